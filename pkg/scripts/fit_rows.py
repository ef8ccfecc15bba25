"""Round-trip every reference parameter row through simulation and both fit modes.

    python scripts/fit_rows.py [--sigma 0.01] [--seeds 5]
"""
import argparse
import warnings

import numpy as np

from combspec import NoiseSpec, ResonatorBank, fcs_sweep, fit_complex, fit_magnitude, vna_sweep
from combspec import presets
from combspec.fit import UnderResolvedWarning


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--sigma", type=float, default=0.01)
    ap.add_argument("--seeds", type=int, default=5)
    ap.add_argument("--points", type=int, default=401)
    args = ap.parse_args()
    warnings.simplefilter("ignore", UnderResolvedWarning)

    print(f"{'row':<12} {'mode':<9} {'Qi err %':>9} {'Qe err %':>9} {'phi err':>8}   (mean over {args.seeds} seeds)")
    for label, r in presets.rows():
        bank = ResonatorBank([r])
        half = 5 * r.linewidth
        errs = {"complex": [], "magnitude": []}
        for seed in range(args.seeds):
            nz = NoiseSpec(args.sigma, seed)
            v = vna_sweep(bank, r.f0 - half, r.f0 + half, args.points, nz)
            m = fcs_sweep(bank, 1, r.f0 - half, r.f0 + half, args.points, nz)
            for res, phi in ((fit_complex(v), r.phi), (fit_magnitude(m), abs(r.phi))):
                p = res.params
                errs[res.mode].append((abs(p.q_internal / r.q_internal - 1), abs(p.q_external / r.q_external - 1),
                                       abs(p.phi - phi)))
        for mode, e in errs.items():
            qi, qe, ph = np.mean(e, axis=0)
            print(f"{label:<12} {mode:<9} {100 * qi:9.2f} {100 * qe:9.2f} {ph:8.3f}")


if __name__ == "__main__":
    main()
