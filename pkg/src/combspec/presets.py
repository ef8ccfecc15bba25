"""Reference parameter sets used by the example configs, scripts and tests.

Each resonator has four fitted rows: VNA and FCS at n ~ 1 photon, then VNA
and FCS at n ~ 1000 photons. Rows are (Qi, Qe, phi).
"""
from combspec.resonator import NotchResonator, ResonatorBank

ROWS = {
    "A": (4.4696e9, [(126e3, 98e3, 0.28), (98e3, 220e3, -0.11), (124e3, 88e3, 0.43), (123e3, 70e3, -0.53)]),
    "B": (4.7377e9, [(148e3, 164e3, 0.58), (120e3, 99e3, 0.28), (144e3, 143e3, 0.70), (129e3, 82e3, -0.32)]),
    "C": (5.3967e9, [(53e3, 48e3, 0.24), (67e3, 31e3, 0.52), (54e3, 47e3, 0.16), (55e3, 29e3, 0.09)]),
    "D": (5.8864e9, [(36e3, 23e3, 0.50), (47e3, 10e3, 0.53), (46e3, 27e3, 0.59), (42e3, 10e3, 0.47)]),
    "E": (7.4670e9, [(27e3, 19e3, 0.34), (32e3, 21e3, 0.38), (25e3, 15e3, 0.20), (25e3, 15e3, 0.21)]),
}
ROW_LABELS = ("vna_n1", "fcs_n1", "vna_n1000", "fcs_n1000")

# three-target multiplexing instance and a pump pair that solves it
TARGETS = (4469.56e6, 4737.73e6, 5396.90e6)
PUMPS = (404.652465e6, 541.065788e6)
ASSIGNMENTS = ((-5, 12), (-3, 11), (12, 1))


def rows():
    """Yield (label, NotchResonator) for every reference row."""
    for name, (f0, rs) in ROWS.items():
        for tag, (qi, qe, phi) in zip(ROW_LABELS, rs):
            yield f"{name}_{tag}", NotchResonator(f0, qi, qe, phi)


def target_bank() -> ResonatorBank:
    """A/B/C placed on the three targets, with their low-power VNA parameters."""
    return ResonatorBank([
        NotchResonator(f, *ROWS[k][1][0]) for k, f in zip("ABC", TARGETS)
    ])
