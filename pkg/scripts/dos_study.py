"""Density of lattice lines: analytic curve vs enumeration, and quantization error.

    python scripts/dos_study.py [--out out/dos_study]
"""
import argparse
from pathlib import Path

import numpy as np

from combspec import presets
from combspec.dos import (dos_analytic, dos_bruteforce, mean_spacing, nominal_flat_height, quantization_mse,
                          recommend_pumps, tv_distance)
from combspec.io import write_density_csv, write_json


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", type=Path, default=Path("out/dos_study"))
    args = ap.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)
    f1, f2 = presets.PUMPS

    print(f"{'M':>4} {'TV':>8} {'plateau':>12} {'closed form':>12} {'ratio':>6} {'spacing MHz':>12}")
    rows = []
    for M in (5, 10, 25, 50, 100, 200):
        prof = dos_analytic(f1, f2, M)
        hist = dos_bruteforce(f1, f2, M)
        tv = tv_distance(f1, f2, M, hist)
        nom = nominal_flat_height(f1, f2, M)
        sp = mean_spacing(f1, f2, M).exact
        rows.append({"m_max": M, "tv": tv, "flat_height": prof.flat_height, "closed_form": nom, "spacing_hz": sp})
        print(f"{M:4d} {tv:8.4f} {prof.flat_height:12.4e} {nom:12.4e} {prof.flat_height / nom:6.3f} {sp / 1e6:12.4f}")
        if M == 50:
            write_density_csv(args.out / "analytic_m50.csv", prof.omega, prof.density)
            write_density_csv(args.out / "bruteforce_m50.csv", hist.centers, hist.density)

    # plateau from raw counts in a window well inside the flat region
    M = 100
    pts = np.add.outer(np.arange(-M, M + 1) * f1, np.arange(-M, M + 1) * f2).ravel()
    half = 0.5 * M * abs(f1 - f2)
    counted = np.count_nonzero(np.abs(pts) < half) / pts.size / (2 * half)
    print(f"counted plateau at M={M}: {counted:.4e}/Hz, model {1 / (2 * M * max(f1, f2)):.4e}/Hz, "
          f"closed form {nominal_flat_height(f1, f2, M):.4e}/Hz")

    rng = np.random.default_rng(0)
    for delta in (1.0, mean_spacing(f1, f2, 100).exact):
        x = rng.uniform(0, 1e3 * delta, 100_000)
        emp = np.mean((x - delta * np.round(x / delta)) ** 2)
        print(f"quantization: delta {delta:.4g} Hz, empirical MSE {emp:.4g}, delta^2/12 {quantization_mse(delta):.4g}")

    recs = {str(fs): recommend_pumps((4e9, 8e9), 100, fs).__dict__ for fs in (False, True)}
    for fs, r in recs.items():
        print(f"recommend (frame shift {fs}): {r['strategy']}, f_p1 {r['f_p1'] / 1e6:.4f} MHz, "
              f"f_p2 {r['f_p2'] / 1e6:.4f} MHz, flat edge {r['flat_edge'] / 1e9:.3f} GHz")
    write_json(args.out / "summary.json", {"rows": rows, "counted_plateau_m100": counted, "recommend": recs})


if __name__ == "__main__":
    main()
