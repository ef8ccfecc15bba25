"""Command-line entry point.

Exit codes: 0 success, 1 usage or configuration error, 2 infeasible plan or
no resonance found.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from combspec import comb, dos, fit, io, lattice, sim
from combspec.io import ConfigError

EXIT_OK, EXIT_CONFIG, EXIT_INFEASIBLE = 0, 1, 2


def _global_flags(p, suppress=False):
    kw = {"default": argparse.SUPPRESS} if suppress else {}
    p.add_argument("--config", type=Path, help="scenario YAML", **kw)
    p.add_argument("--seed", type=int, help="noise seed override", **({"default": argparse.SUPPRESS} if suppress else {"default": None}))
    p.add_argument("--out", type=Path, help="output directory", **({"default": argparse.SUPPRESS} if suppress else {"default": None}))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="combspec", description=__doc__)
    _global_flags(parser)
    common = argparse.ArgumentParser(add_help=False)
    _global_flags(common, suppress=True)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("plan", parents=[common], help="solve the multiplexing problem")
    p.add_argument("--verify", action="store_true", help="verify the config's `solution` instead of solving")

    p = sub.add_parser("dos", parents=[common], help="density of states of a two-pump lattice")
    p.add_argument("--f-p1", dest="f_p1")
    p.add_argument("--f-p2", dest="f_p2")
    p.add_argument("--m-max", type=int)
    p.add_argument("--gamma", help="line broadening in Hz")
    p.add_argument("--bruteforce", action="store_true", help="add the enumerated histogram and TV distance")
    p.add_argument("--bin", dest="bin_hz", help="histogram bin width in Hz")
    p.add_argument("--recommend", nargs=2, metavar=("W_MIN", "W_MAX"), help="recommend pumps for a band")
    p.add_argument("--frame-shift", action="store_true", help="a rotating-frame shift is available")

    p = sub.add_parser("simulate", parents=[common], help="virtual experiments")
    ssub = p.add_subparsers(dest="mode", required=True)
    s = ssub.add_parser("vna", parents=[common])
    s.add_argument("--start"), s.add_argument("--stop"), s.add_argument("--points", type=int)
    s = ssub.add_parser("fcs", parents=[common])
    s.add_argument("--harmonic", type=int)
    s.add_argument("--start"), s.add_argument("--stop"), s.add_argument("--points", type=int)
    s = ssub.add_parser("multiplex", parents=[common])
    s.add_argument("--span"), s.add_argument("--points", type=int)

    p = sub.add_parser("fit", parents=[common], help="fit trace CSV files")
    p.add_argument("paths", nargs="+", type=Path, help="trace CSV files or directories")
    p.add_argument("--mode", choices=["complex", "magnitude"], help="default: from the trace columns")
    p.add_argument("--baseline", action="store_true", help="co-fit a linear baseline")

    p = sub.add_parser("comb", parents=[common], help="comb spectra")
    csub = p.add_subparsers(dest="kind", required=True)
    for name in ("harmonics", "intermod", "label"):
        c = csub.add_parser(name, parents=[common])
        c.add_argument("--m-max", type=int)
        if name == "label":
            c.add_argument("--f", dest="f_observed")
            c.add_argument("--tol")
        else:
            c.add_argument("--band", nargs=2)
    return parser


def _out(args, cfg) -> Path:
    out = args.out or Path(cfg.get("output_dir", "."))
    out.mkdir(parents=True, exist_ok=True)
    return out


def _cfg(args) -> dict:
    return io.load_config(args.config) if args.config else {}


def cmd_plan(args, cfg) -> int:
    problem = io.parse_problem(cfg)
    out = _out(args, cfg)
    if args.verify:
        sol = io.parse_solution(io._get(cfg, "solution", ""))
        try:
            rep = lattice.verify_solution(problem, sol)
        except ValueError as exc:
            raise ConfigError(f"solution.assignments: {exc}") from None
        io.write_json(out / "plan_verify.json", {
            "passed": rep.passed, "residuals_hz": list(rep.residuals),
            "tolerances_hz": list(rep.tolerances), "within": list(rep.within),
            "pumps_in_band": rep.pumps_in_band, "indices_in_bound": rep.indices_in_bound,
        })
        print(f"f_p1 = {sol.f_p1:.3f} Hz  f_p2 = {sol.f_p2:.3f} Hz")
        for (f, tol), (n, m), r, ok in zip(problem.targets, sol.assignments, rep.residuals, rep.within):
            print(f"  target {f / 1e6:12.6f} MHz  (n, m) = ({n:4d}, {m:4d})  residual {r / 1e3:+10.3f} kHz  "
                  f"{'ok' if ok else 'FAIL'}")
        print("PASS" if rep.passed else "FAIL")
        return EXIT_OK if rep.passed else EXIT_INFEASIBLE
    solutions = lattice.solve_multiplex(problem)
    io.write_solutions(out / "plan_solutions.json", solutions)
    if not solutions:
        print("infeasible: no pump pair matches every target within tolerance")
        return EXIT_INFEASIBLE
    print(f"{len(solutions)} solution(s)")
    print(f"{'rank':>4} {'f_p1 [MHz]':>16} {'f_p2 [MHz]':>16}  assignments / residuals [kHz]")
    for k, s in enumerate(solutions):
        body = "  ".join(f"({n},{m}) {r / 1e3:+.3f}" for (n, m), r in zip(s.assignments, s.residuals))
        print(f"{k:4d} {s.f_p1 / 1e6:16.6f} {s.f_p2 / 1e6:16.6f}  {body}")
    return EXIT_OK


def _pick(flag, section, key, parse, field, default=...):
    if flag is not None:
        return parse(flag, field)
    if key in section:
        return parse(section[key], field)
    if default is ...:
        raise ConfigError(f"{field}: missing required field")
    return default


def cmd_dos(args, cfg) -> int:
    out = _out(args, cfg)
    sec = cfg.get("dos", {}) or {}
    pumps = cfg.get("pumps", {}) or {}
    if args.recommend:
        M = _pick(args.m_max, sec, "m_max", io._int, "dos.m_max", 100)
        band = (io.hz(args.recommend[0], "--recommend W_MIN"), io.hz(args.recommend[1], "--recommend W_MAX"))
        rec = io._build("--recommend", dos.recommend_pumps, band, M, args.frame_shift)
        io.write_json(out / "recommendation.json", io.recommendation_record(rec))
        print(f"strategy: {rec.strategy}")
        print(f"f_p1 = {rec.f_p1 / 1e6:.6f} MHz  f_p2 = {rec.f_p2 / 1e6:.6f} MHz")
        print(f"flat_edge = {rec.flat_edge / 1e9:.6f} GHz  mean_spacing = {rec.mean_spacing / 1e6:.6f} MHz")
        print(f"note: {rec.note}")
        return EXIT_OK
    f1 = _pick(args.f_p1, pumps, "f_p1_hz", io.hz, "pumps.f_p1_hz")
    f2 = _pick(args.f_p2, pumps, "f_p2_hz", io.hz, "pumps.f_p2_hz")
    M = _pick(args.m_max, sec, "m_max", io._int, "dos.m_max", 100)
    gamma = _pick(args.gamma, sec, "gamma_hz", io.hz, "dos.gamma_hz", dos.DEFAULT_GAMMA_HZ)
    prof = io._build("dos", dos.dos_analytic, f1, f2, M, gamma)
    io.write_density_csv(out / "dos_profile.csv", prof.omega, prof.density)
    sp = dos.mean_spacing(f1, f2, M)
    summary = {
        "f_p1_hz": f1, "f_p2_hz": f2, "m_max": M, "gamma_hz": gamma,
        "flat_height_per_hz": prof.flat_height,
        "nominal_flat_height_per_hz": dos.nominal_flat_height(f1, f2, M),
        "flat_edge_hz": prof.flat_edge, "support_edge_hz": prof.support_edge,
        "mean_spacing_hz": sp.exact, "mean_spacing_asymptotic_hz": sp.asymptotic,
        "quantization_mse_hz2": dos.quantization_mse(sp.exact),
        "integral": prof.integral(), "triangular": prof.is_triangular,
    }
    print(f"flat_height      = {prof.flat_height:.6e} /Hz (closed-form constant "
          f"{summary['nominal_flat_height_per_hz']:.6e} /Hz)")
    print(f"flat_edge        = {prof.flat_edge / 1e9:.6f} GHz" + ("  (triangular DoS)" if prof.is_triangular else ""))
    print(f"support_edge     = {prof.support_edge / 1e9:.6f} GHz")
    print(f"mean_spacing     = {sp.exact / 1e6:.6f} MHz (asymptotic {sp.asymptotic / 1e6:.6f} MHz)")
    print(f"quantization MSE = {summary['quantization_mse_hz2']:.6e} Hz^2")
    if args.bruteforce or sec.get("bruteforce", False):
        bw = _pick(args.bin_hz, sec, "bin_hz", io.hz, "dos.bin_hz", None)
        hist = io._build("dos.bin_hz", dos.dos_bruteforce, f1, f2, M, bw)
        io.write_density_csv(out / "dos_histogram.csv", hist.centers, hist.density)
        tv = dos.tv_distance(f1, f2, M, hist)
        summary["bruteforce_bin_hz"] = hist.bin_width
        summary["tv_distance"] = tv
        print(f"TV distance      = {tv:.6f} (bin {hist.bin_width / 1e6:.6f} MHz)")
    io.write_json(out / "dos_summary.json", summary)
    return EXIT_OK


def cmd_simulate(args, cfg) -> int:
    out = _out(args, cfg)
    bank = io.parse_bank(cfg)
    noise = io.parse_noise(cfg, args.seed)
    sw = cfg.get("sweep", {}) or {}
    tilt = io._num(sw.get("tilt_db_per_ghz", 0.0), "sweep.tilt_db_per_ghz")
    gain = io._num(sw.get("gain_db", 0.0), "sweep.gain_db")
    sec = sw.get(args.mode, {}) or {}
    w = f"sweep.{args.mode}"
    points = _pick(args.points, sec, "points", io._int, f"{w}.points", sim.DEFAULT_POINTS)
    if args.mode == "vna":
        start = _pick(args.start, sec, "f_start_hz", io.hz, f"{w}.f_start_hz")
        stop = _pick(args.stop, sec, "f_stop_hz", io.hz, f"{w}.f_stop_hz")
        tr = io._build(w, sim.vna_sweep, bank, start, stop, points, noise, tilt, gain)
        io.write_trace_csv(out / "vna.csv", tr)
        print(f"wrote {out / 'vna.csv'} ({len(tr)} points)")
    elif args.mode == "fcs":
        n = _pick(args.harmonic, sec, "harmonic", io._int, f"{w}.harmonic")
        start = _pick(args.start, sec, "fp_start_hz", io.hz, f"{w}.fp_start_hz")
        stop = _pick(args.stop, sec, "fp_stop_hz", io.hz, f"{w}.fp_stop_hz")
        tr = io._build(w, sim.fcs_sweep, bank, n, start, stop, points, noise, tilt, gain)
        name = f"fcs_n{n}.csv"
        io.write_trace_csv(out / name, tr)
        i = int(np.argmin(tr.values))
        print(f"wrote {out / name}; minimum at pump {tr.pump[i] / 1e6:.6f} MHz, probe {tr.axis[i] / 1e9:.6f} GHz")
    else:
        sol = io.parse_solution(io._get(sec, "solution", w), f"{w}.solution")
        span = _pick(args.span, sec, "fp1_span_hz", io.hz, f"{w}.fp1_span_hz", 100e3)
        traces = io._build(w, sim.multiplex_sweep, bank, sol, span, points, noise, tilt, gain)
        for k, tr in enumerate(traces):
            n, m = tr.meta["n"], tr.meta["m"]
            name = f"multiplex_{k}_n{n}_m{m}.csv"
            io.write_trace_csv(out / name, tr)
            i = int(np.argmin(tr.values))
            print(f"wrote {out / name}; minimum at f_p1 {tr.pump[i] / 1e6:.6f} MHz, probe {tr.axis[i] / 1e9:.6f} GHz")
    return EXIT_OK


def _expand(paths):
    files = []
    for p in paths:
        if p.is_dir():
            files.extend(sorted(p.glob("*.csv")))
        elif p.is_file():
            files.append(p)
        else:
            raise ConfigError(f"{p}: no such file or directory")
    return files


def cmd_fit(args, cfg) -> int:
    files = _expand(args.paths)
    out = _out(args, cfg)
    status = EXIT_OK
    for path in files:
        try:
            tr = io.read_trace_csv(path)
        except (ValueError, KeyError) as exc:
            raise ConfigError(f"{path}: {exc}") from None
        mode = args.mode or ("complex" if tr.mode == sim.VNA_COMPLEX else "magnitude")
        if mode == "magnitude" and tr.mode == sim.VNA_COMPLEX:
            tr = sim.SweepTrace(tr.axis, tr.magnitude_db, sim.FCS_MAGNITUDE, pump=tr.pump, meta=tr.meta)
        try:
            fn = fit.fit_complex if mode == "complex" else fit.fit_magnitude
            res = fn(tr, baseline=args.baseline)
            rec = {"file": path.name, "status": "ok" if res.converged else "not_converged", **res.to_record()}
            p = res.params
            print(f"{path.name}: f0 = {p.f0 / 1e9:.7f} GHz  Qi = {p.q_internal:.4g}  Qe = {p.q_external:.4g}  "
                  f"phi = {p.phi:+.3f}  ({rec['status']})")
        except fit.NoResonanceError as exc:
            rec = {"file": path.name, "status": "no_resonance", "mode": mode, "message": str(exc)}
            print(f"{path.name}: no resonance")
            status = EXIT_INFEASIBLE
        except ValueError as exc:
            raise ConfigError(f"{path}: {exc}") from None
        io.write_json(out / f"{path.stem}.fit.json", rec)
    return status


def cmd_comb(args, cfg) -> int:
    out = _out(args, cfg)
    sec = cfg.get("comb", {}) or {}
    M = _pick(args.m_max, sec, "m_max", io._int, "comb.m_max", comb.DEFAULT_ORDER)
    env = io.parse_envelope(sec.get("envelope"))
    if args.kind == "harmonics":
        p1, p2 = io.parse_pump(cfg, 1), None
    else:
        p1, p2 = io.parse_pump(cfg, 1), io.parse_pump(cfg, 2)
    if args.kind == "label":
        f = _pick(args.f_observed, sec, "f_observed_hz", io.hz, "comb.f_observed_hz")
        tol = _pick(args.tol, sec, "tol_hz", io.hz, "comb.tol_hz", 1e3)
        labels = io._build("comb", comb.label_line, p1, p2, M, f, tol)
        io.write_json(out / "labels.json", {"f_observed_hz": f, "tol_hz": tol,
                                            "labels": [list(x) for x in labels]})
        for n, m in labels:
            print(f"({n}, {m})  {n * p1.frequency + m * p2.frequency - f:+.3f} Hz")
        return EXIT_OK
    band = args.band or sec.get("band_hz")
    if band is None or len(band) != 2:
        raise ConfigError("comb.band_hz: expected [lo, hi]")
    band = (io.hz(band[0], "comb.band_hz[0]"), io.hz(band[1], "comb.band_hz[1]"))
    if args.kind == "harmonics":
        spec = io._build("comb", comb.harmonics, p1, M, band, env)
    else:
        res = io._num(sec.get("resolution_hz", comb.DEFAULT_RESOLUTION_HZ), "comb.resolution_hz")
        spec = io._build("comb", comb.intermod_lattice, p1, p2, M, band, env, res)
    name = f"comb_{args.kind}.csv"
    io.write_comb_csv(out / name, spec)
    print(f"wrote {out / name} ({len(spec)} lines)")
    return EXIT_OK


COMMANDS = {"plan": cmd_plan, "dos": cmd_dos, "simulate": cmd_simulate, "fit": cmd_fit, "comb": cmd_comb}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    try:
        cfg = _cfg(args)
        return COMMANDS[args.command](args, cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


def main_exit():
    sys.exit(main())


if __name__ == "__main__":
    main_exit()
