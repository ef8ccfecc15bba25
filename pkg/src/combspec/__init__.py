"""Frequency-comb spectroscopy planning, analysis and simulation for notch resonator banks."""

from combspec.resonator import (
    NotchResonator,
    ResonatorBank,
    CalibrationLine,
    PhotonEstimate,
    s21_single,
    s21_bank,
    loaded_q,
    fit_calibration,
    photon_number,
)
from combspec.comb import (
    PumpTone,
    Envelope,
    CombLine,
    CombSpectrum,
    harmonics,
    intermod_lattice,
    beat_spacing,
    label_line,
    lattice_indices,
)
from combspec.lattice import (
    MultiplexProblem,
    MultiplexSolution,
    VerificationReport,
    nearest_lattice_point,
    verify_solution,
    solve_multiplex,
    commensurability_guard,
)
from combspec.dos import (
    ScalingInputs,
    DoSProfile,
    mean_spacing,
    dos_analytic,
    dos_bruteforce,
    quantization_mse,
    scaling_laws,
    recommend_pumps,
)
from combspec.sim import NoiseSpec, SweepTrace, vna_at, vna_sweep, fcs_sweep, multiplex_sweep
from combspec.fit import FitResult, NoResonanceError, fit_complex, fit_magnitude, initial_guess

__version__ = "0.1.0"
