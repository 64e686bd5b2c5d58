"""Command line driver: ``rbflt run|preset|invert-selftest|calibrate-contour``."""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import time
import warnings
from dataclasses import replace

import numpy as np

from . import __version__
from .config import RunConfig, parse_pairs, read_config
from .diffmat import IllConditionedWarning, dump_csv
from .experiment import resolve
from .laplace_inversion import (
    SUITES, ContourSpec, calibrate, calibration_angles, calibration_pairs, preset_contour, spec_to_dict, suite_error, transform_pair_suite,
)
from .metrics import error_norms, periodicity_report
from .problems import BUILTINS, make_builtin
from .solver import probe_matrix, solve_time_grid

log = logging.getLogger("rbflt")
FMT = "%.16e"


def _write_csv(path, header, rows):
    rows = np.asarray(rows, dtype=float)
    np.savetxt(path, rows.reshape(len(rows), -1), delimiter=",", fmt=FMT, header=",".join(header), comments="")


def _fmt(v):
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, (tuple, list)):
        return ", ".join(_fmt(x) for x in v)
    if isinstance(v, np.floating):
        return repr(float(v))
    return str(v)


def build(cfg: RunConfig):
    pre = make_builtin(cfg.problem, **cfg.overrides)
    if cfg.probes is not None:
        pre = replace(pre, probes=tuple(cfg.probes))
    contour = None
    if cfg.contour_params:
        t0, T = pre.window
        contour = ContourSpec(pre.contour, pre.M, t0=t0, T=T, **cfg.contour_params)
    disc, contour = resolve(pre, contour)
    lo, hi = contour.t0, contour.T
    if any(t < lo or t > hi for t in pre.times):
        raise ValueError(f"output times must lie in the contour window [{lo}, {hi}]")
    return pre, disc, contour


def run_config(cfg: RunConfig, out: str) -> int:
    """Solve, write every artifact into ``out`` and return the process exit code."""
    pre, disc, contour = build(cfg)  # validation happens before anything is written
    p = pre.problem
    os.makedirs(out, exist_ok=True)
    t_start = time.perf_counter()
    res = solve_time_grid(p, disc, contour, pre.times, pre.tol, 50, cfg.threads, pre.freeze)
    elapsed = time.perf_counter() - t_start
    x = disc.nodes.coords
    status = {}

    prof_rows = []
    err_rows = []
    for k, t in enumerate(res.times):
        u = res.solution[:, k]
        ex = p.exact(x, t) if p.exact is not None else np.full_like(x, np.nan)
        prof_rows.append(np.column_stack([np.full_like(x, t), x, u, ex]))
        if p.exact is not None:
            err_rows.append((pre.N, *error_norms(u, ex), t))
    _write_csv(os.path.join(out, "profiles.csv"), ["t", "x", "u", "u_exact"], np.vstack(prof_rows))
    if err_rows:
        _write_csv(os.path.join(out, "errors.csv"), ["N", "Linf", "L2", "RMS", "t"], err_rows)
        if "max_linf" in cfg.checks:
            status["max_linf"] = err_rows[-1][1] <= cfg.checks["max_linf"]

    if pre.probes:
        P = probe_matrix(disc, pre.probes)
        traces = np.asarray(P @ res.solution)
        rep_rows = []
        if pre.period is not None:
            for xp, tr in zip(pre.probes, traces):
                rep_rows.append((xp, *periodicity_report(tr, res.times, pre.period, cfg.periodicity_window)))
        t_out = res.times
        if t_out[0] > 0:
            # the initial state closes the trace at t = 0
            init = np.zeros(len(pre.probes)) if p.u0 is None else np.asarray(P @ p.u0(x))
            t_out = np.r_[0.0, t_out]
            traces = np.column_stack([init, traces])
        for i, tr in enumerate(traces):
            _write_csv(os.path.join(out, f"probe_{i}.csv"), ["t", "u"], np.column_stack([t_out, tr]))
        if rep_rows:
            _write_csv(os.path.join(out, "periodicity.csv"), ["x", "defect", "amplitude"], rep_rows)
            if "max_defect_ratio" in cfg.checks:
                r = cfg.checks["max_defect_ratio"]
                status["max_defect_ratio"] = all(d <= r * a for xp, d, a in rep_rows if xp < p.b - 1e-3)
            if "max_edge_amplitude" in cfg.checks:
                lim = cfg.checks["max_edge_amplitude"]
                status["max_edge_amplitude"] = all(a <= lim for xp, d, a in rep_rows if xp >= p.b - 1e-3)

    if cfg.dump_matrices:
        for name, D in (("D1", disc.D1), ("D2", disc.D2), ("D3", disc.D3)):
            if D is not None:
                dump_csv(D, os.path.join(out, f"{name}.csv"))

    manifest = {
        "version": __version__,
        "problem": cfg.problem,
        "alpha": p.alpha, "eta": p.eta, "xi": p.xi, "zeta": p.zeta,
        "domain": (p.a, p.b),
        "N": pre.N, "n_x": pre.n_x, "kernel": "multiquadric", "shape_factor": pre.shape_factor,
        "freeze": pre.freeze, "tol": pre.tol, "threads": cfg.threads,
        "times": f"{len(res.times)} values in [{res.times[0]!r}, {res.times[-1]!r}]",
        "boundary": "; ".join(f"{bc.side} {bc.kind}" for bc in p.boundary),
        "probes": pre.probes or "none",
        "period": pre.period if pre.period is not None else "none",
        "max_picard_iterations": int(res.iterations.max()),
        "max_imag_leakage": float(np.max(res.imag_residue)),
    }
    manifest.update({f"contour_{k}": v for k, v in spec_to_dict(contour).items()})
    manifest["contour_source"] = "explicit" if cfg.contour_params else f"preset ({pre.suite} suite)"
    manifest.update({f"check_{k}": ("pass" if ok else "FAIL") for k, ok in status.items()})
    with open(os.path.join(out, "manifest.txt"), "w", encoding="utf-8") as fh:
        for k, v in manifest.items():
            fh.write(f"{k} = {_fmt(v)}\n")
    log.info("solved %s in %.2f s", cfg.problem, elapsed)
    for k, ok in status.items():
        print(f"{k}: {'pass' if ok else 'FAIL'}")
    return 0 if all(status.values()) else 1


def _selftest(args) -> int:
    worst = 0.0
    for kind in ("parabolic", "hyperbolic"):
        for t0, T in args.windows:
            spec = preset_contour(kind, t0, T, args.M)
            err = suite_error(spec, n_times=20, pairs=transform_pair_suite())
            worst = max(worst, err)
            print(f"{kind:10s} window [{t0}, {T}] M={args.M}: max relative error {err:.3e}")
    ok = worst <= args.tol
    print(f"invert-selftest: {'pass' if ok else 'FAIL'} (tolerance {args.tol:g})")
    return 0 if ok else 1


def _calibrate(args) -> int:
    pairs = calibration_pairs(args.oscillation, args.suite)
    angles = calibration_angles(args.kind, args.oscillation)
    spec, err = calibrate(args.kind, args.t0, args.T, args.M, pairs=pairs, angles=angles)
    d = spec_to_dict(spec)
    d = {k: (float(v) if isinstance(v, (float, np.floating)) else v) for k, v in d.items()}
    d["suite"] = args.suite
    if args.oscillation:
        d["oscillation"] = list(args.oscillation)
    d["suite_error"] = float(err)
    print(json.dumps(d))
    if args.save:
        entries = []
        if os.path.exists(args.save):
            with open(args.save, encoding="utf-8") as fh:
                entries = json.load(fh)
        same = lambda e: all(e.get(k) == d.get(k) for k in ("kind", "t0", "T", "M", "suite", "oscillation"))
        entries = [e for e in entries if not same(e)] + [d]
        with open(args.save, "w", encoding="utf-8") as fh:
            json.dump(entries, fh, indent=1)
    return 0


def _pair_list(text):
    vals = [float(v) for v in text.split(",")]
    if len(vals) != 2:
        raise argparse.ArgumentTypeError("expected two comma separated numbers")
    return tuple(vals)


def make_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="rbflt", description="RBF-FD / Laplace-transform solver for fractional KdV-Burgers problems")
    ap.add_argument("--version", action="version", version=__version__)
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--out", default=None, help="output directory")
        p.add_argument("--threads", type=int, default=None)
        p.add_argument("overrides", nargs="*", metavar="key=value")

    r = sub.add_parser("run", help="run a key=value config file")
    r.add_argument("config", nargs="?", default=None)
    r.add_argument("--config", dest="config_opt", default=None)
    r.add_argument("--preset", default=None, help="problem id, overrides the file")
    common(r)

    pr = sub.add_parser("preset", help="run a built-in problem")
    pr.add_argument("id", choices=BUILTINS)
    pr.add_argument("--config", default=None, help="extra settings file")
    common(pr)

    st = sub.add_parser("invert-selftest", help="transform-pair suite on calibrated contours")
    st.add_argument("--M", type=int, default=40)
    st.add_argument("--window", dest="windows", type=_pair_list, action="append")
    st.add_argument("--tol", type=float, default=1e-6)

    ca = sub.add_parser("calibrate-contour", help="grid search for contour parameters")
    ca.add_argument("kind", choices=("parabolic", "hyperbolic"))
    ca.add_argument("t0", type=float)
    ca.add_argument("T", type=float)
    ca.add_argument("M", type=int)
    ca.add_argument("--suite", choices=SUITES, default="transform-pairs", help="pairs to calibrate on")
    ca.add_argument("--oscillation", type=_pair_list, default=None, help="omega,a of a sin*tanh drive")
    ca.add_argument("--save", default=None, help="append to a JSON preset file")
    return ap


def main(argv=None) -> int:
    parser = make_parser()
    # key=value pairs may follow options, which argparse leaves unclaimed
    args, extra = parser.parse_known_args(argv)
    stray = [e for e in extra if e.startswith("-") or "=" not in e]
    if stray or (extra and not hasattr(args, "overrides")):
        parser.error(f"unrecognized arguments: {' '.join(stray or extra)}")
    if extra:
        args.overrides = list(args.overrides) + extra
    if getattr(args, "command", None) == "run" and args.config and "=" in args.config:
        # the optional config slot swallowed the first override
        args.overrides.insert(0, args.config)
        args.config = None
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    if not args.verbose:
        warnings.simplefilter("ignore", IllConditionedWarning)
    try:
        if args.command == "invert-selftest":
            args.windows = args.windows or [(0.5, 5.0), (0.3, 3.0)]
            return _selftest(args)
        if args.command == "calibrate-contour":
            return _calibrate(args)
        settings = {}
        cfg_path = (args.config_opt or args.config) if args.command == "run" else args.config
        if args.command == "run" and cfg_path is None and args.preset is None:
            raise ValueError("run needs a config file or --preset")
        if cfg_path:
            settings.update(read_config(cfg_path))
        if args.command == "preset":
            settings["problem"] = args.id
        elif args.preset:
            settings["problem"] = args.preset
        settings.update(parse_pairs(args.overrides))
        if args.threads is not None:
            settings["threads"] = args.threads
        if args.out is not None:
            settings["out"] = args.out
        cfg = RunConfig.from_dict(settings)
        out = cfg.out or os.path.join("runs", cfg.problem)
        return run_config(cfg, out)
    except (ValueError, OSError) as exc:
        print(f"rbflt: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
