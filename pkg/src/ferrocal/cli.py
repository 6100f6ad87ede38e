"""Command-line pipeline: fit, merz, collapse, levels, simulate, program.

Exit codes: 0 success; 2 usage or configuration errors; 3 input-file parse
errors; 1 any other processing failure (non-convergent fits, out-of-range
programming targets, ...). All outputs are deterministic for identical
(config, inputs, seed): no timestamps, fixed formatting, and every random
draw descends from the single run seed.
"""

import argparse
import math
import os
import sys
from pathlib import Path

from .config import RunConfig, load_config
from .errors import ConfigError, DomainError, FerrocalError, ParseError
from .fitting import curve_markers, fit_family, fit_lorentzian_cdf
from .kinetics import collapse_rms, collapse_transform, fit_merz_nested, regress_mu_fixed_tau
from .levels import (achieved_weight, dac_nearest_code, program_voltage_for_weight,
                     s0_filter, s0_filter_with_margin, staircase_of)
from .model import DeviceCalibration
from .simulate import run_protocol_sweep, sample_ensemble
from .sweepio import (emit_fit_report, emit_merz_report, emit_plotdata,
                      emit_sweep_csv, parse_fit_report, parse_sweep_csv)

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_USAGE = 2
EXIT_PARSE = 3


def _out_dir(args):
    out = args.out_dir or os.environ.get("FERROCAL_OUT_DIR") or "."
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _match_fit(fits, t_p):
    for fit, _ in fits:
        if math.isclose(fit.t_p, t_p, rel_tol=1e-9):
            return fit
    raise DomainError(f"no fit in the report for t_p = {t_p * 1e6:g} us")


def cmd_fit(args):
    out = _out_dir(args)
    curves = parse_sweep_csv(args.input)
    if len(curves) == 1:
        fits = [fit_lorentzian_cdf(curves[0])]
    else:
        fits = fit_family(curves, share_offsets=args.share_offsets)
    markers = [curve_markers(c) for c in sorted(curves, key=lambda c: c.t_p)]
    report = emit_fit_report(out / "fit_report.csv", fits,
                             vc_mech=[m.vc_mech for m in markers])
    ordered = sorted(curves, key=lambda c: c.t_p)
    emit_plotdata("fit-overlay", list(zip(ordered, fits)), out)
    emit_plotdata("pdf", fits, out)
    print(f"wrote {report}")
    print("t_p_us y0_nm A_nm mu w v50_V vc_mech_V rms_nm")
    for fit, m in zip(fits, markers):
        vc = "-" if m.vc_mech is None else f"{m.vc_mech:.6g}"
        print(f"{fit.t_p * 1e6:g} {fit.y0:.6g} {fit.a:.6g} {fit.mu:.8g} "
              f"{fit.w:.6g} {fit.v50:.6g} {vc} {fit.rms_residual:.4g}")
    return EXIT_OK


def cmd_merz(args):
    out = _out_dir(args)
    rows = parse_fit_report(args.fits)
    points = [(fit.t_p, fit.mu) for fit, _ in rows]
    if args.tau_inf is not None:
        regression = regress_mu_fixed_tau(points, args.tau_inf)
    else:
        lo, hi = args.search if args.search is not None else (-16.0, -10.0)
        regression = fit_merz_nested(points, tau_search=(lo, hi))
    paths = emit_merz_report(out, regression, points)
    emit_plotdata("merz-line", (regression, points), out)
    print(f"wrote {paths[0]} and {paths[1]}")
    alpha = "inf" if regression.degenerate else f"{regression.alpha:.6g}"
    print(f"alpha = {alpha}  slope = {regression.slope:.6g}  "
          f"mu_star = {regression.mu_star:.8g}  tau_inf_s = {regression.tau_inf:.6g}  "
          f"r_squared = {regression.r_squared:.8g}")
    if regression.degenerate:
        print("warning: slope is indistinguishable from zero; alpha is unbounded")
    return EXIT_OK


def cmd_collapse(args):
    out = _out_dir(args)
    curves = parse_sweep_csv(args.input)
    fits = parse_fit_report(args.fits)
    points = []
    for curve in curves:
        points.extend(collapse_transform(curve, _match_fit(fits, curve.t_p)))
    rms = collapse_rms(points)
    emit_plotdata("collapse", points, out)
    with open(out / "collapse_summary.txt", "w", newline="\n") as fh:
        fh.write(f"points = {len(points)}\n")
        fh.write(f"rms = {rms!r}\n")
    print(f"collapse rms over {len(points)} points: {rms:.6g}")
    return EXIT_OK


def cmd_levels(args):
    out = _out_dir(args)
    curves = parse_sweep_csv(args.input)
    for curve in curves:
        levelset = (s0_filter(curve) if args.margin is None
                    else s0_filter_with_margin(curve, args.margin))
        label = f"{curve.t_p * 1e6:g}us"
        path = out / f"levels_{label}.csv"
        with open(path, "w", newline="\n") as fh:
            fh.write("V_p_V,value,level_index\n")
            for v, y, k in zip(levelset.v_p, levelset.values, levelset.level_index):
                fh.write(f"{v!r},{y!r},{int(k)}\n")
        emit_plotdata("staircase", levelset, out / f"staircase_{label}")
        staircase_of(levelset)  # validates non-emptiness
        print(f"t_p = {label}: kept {levelset.count} of {levelset.source_count} samples")
    return EXIT_OK


def cmd_simulate(args):
    out = _out_dir(args)
    cfg = load_config(args.config)
    seed = cfg.seed if args.seed is None else args.seed
    ensemble = sample_ensemble(cfg.ensemble_n, cfg.ensemble_mu_star, cfg.ensemble_w,
                               cfg.kinetics, seed)
    grid = cfg.sweep.grid()
    curves = []
    for t_p in cfg.sweep.t_p:
        proto = cfg.protocol_for(t_p)
        curves.append(run_protocol_sweep(
            ensemble, proto, grid, cfg.device, seed=seed,
            observable_kind=cfg.sweep.observable_kind, p_r=cfg.sweep.p_r))
    dest = Path(args.out)
    if not dest.is_absolute():
        dest = out / dest
    emit_sweep_csv(dest, curves)
    print(f"wrote {dest}: {len(curves)} sweep(s), {grid.size} points each, "
          f"n = {ensemble.n} hysterons, seed = {seed}")
    return EXIT_OK


def cmd_program(args):
    out = _out_dir(args)
    rows = parse_fit_report(args.fits)
    targets = [float(tok) for tok in args.targets.split(",") if tok.strip()]
    if not targets:
        raise ConfigError("--targets must list at least one weight")
    lo, hi = args.dac_range
    # only the DAC fields matter for programming; the rest is placeholder
    cal = DeviceCalibration(delta_min=0.0, delta_max=1.0, v_ac=1.0, t_film=1e-8,
                            dac_bits=args.dac_bits, dac_range=(lo, hi))
    path = out / "program_table.csv"
    with open(path, "w", newline="\n") as fh:
        fh.write("t_p_us,s_bar_target,dac_code,V_p_V,s_bar_achieved\n")
        for fit, _ in rows:
            for target in targets:
                v = program_voltage_for_weight(fit, target, cal)
                code = dac_nearest_code(cal, v)
                got = achieved_weight(fit, v)
                fh.write(f"{fit.t_p * 1e6!r},{target!r},{code},{v!r},{got!r}\n")
    print(f"wrote {path} ({len(rows) * len(targets)} rows)")
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
        prog="ferrocal",
        description="Calibration, fitting, and simulation for ferroelectric-MEMS synaptic weights")
    parser.add_argument("--seed", type=int, default=None,
                        help="override the configured random seed")
    parser.add_argument("--out-dir", default=None,
                        help="output directory (default: $FERROCAL_OUT_DIR or '.')")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fit", help="fit sweep curves to the threshold-distribution model")
    p.add_argument("--input", required=True, help="sweep CSV")
    p.add_argument("--share-offsets", action="store_true",
                   help="hold one global (y0, A) across all pulse widths")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("merz", help="regress fitted medians against the kinetic law")
    p.add_argument("--fits", required=True, help="fit report CSV")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--tau-inf", type=float, default=None, help="fixed attempt time (s)")
    g.add_argument("--search", type=lambda s: tuple(float(x) for x in s.split(",")),
                   default=None, metavar="LO,HI",
                   help="log10-seconds interval to profile tau_inf over (default -16,-10)")
    p.set_defaults(func=cmd_merz)

    p = sub.add_parser("collapse", help="map sweeps onto the universal master curve")
    p.add_argument("--input", required=True, help="sweep CSV")
    p.add_argument("--fits", required=True, help="fit report CSV")
    p.set_defaults(func=cmd_collapse)

    p = sub.add_parser("levels", help="extract monotone weight levels from sweeps")
    p.add_argument("--input", required=True, help="sweep CSV")
    p.add_argument("--margin", type=float, default=None,
                   help="noise margin in value units (default: plain filter)")
    p.set_defaults(func=cmd_levels)

    p = sub.add_parser("simulate", help="generate synthetic sweeps from the pulse protocol")
    p.add_argument("--config", required=True, help="INI run configuration")
    p.add_argument("--out", required=True, help="output sweep CSV")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("program", help="DAC codes for target weights")
    p.add_argument("--fits", required=True, help="fit report CSV")
    p.add_argument("--targets", required=True, help="comma-separated weights in (0,1)")
    p.add_argument("--dac-bits", type=int, default=18)
    p.add_argument("--dac-range", type=lambda s: tuple(float(x) for x in s.split(",")),
                   default=(0.5, 9.0), metavar="LO,HI")
    p.set_defaults(func=cmd_program)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse has already printed its message
        return int(exc.code or 0)
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"ferrocal: parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except ConfigError as exc:
        print(f"ferrocal: config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except FerrocalError as exc:
        print(f"ferrocal: error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except OSError as exc:
        print(f"ferrocal: i/o error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
