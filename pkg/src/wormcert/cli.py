"""Command-line front end.

Exit codes: 0 when every check passes, 1 on a certification failure,
2 on a configuration error (bad flags, unusable profile file).
"""

import argparse
import csv
import io
import json
import math
import os
import sys
from dataclasses import dataclass

import numpy as np

from . import __version__
from .certify import (RunSettings, certify_annuli, certify_containments, certify_crucial_estimate,
                      certify_halfplane_containment, certify_levi, certify_witness, find_d1,
                      lipschitz_constants, run_checks, select_parameters, witness_table)
from .certify.report import CertReport
from .certify.witness import DEFAULT_EPS_LIST, DEFAULT_LIP_RADIUS, DEFAULT_S_LIST
from .errors import ConfigError, ProfileError, SearchError, WormError
from .geometry import (PointCW, RotationParams, halfplane_margin, in_domain_D, rho_delta_eta_eval,
                       rho_eval)
from .profiles import (DEFAULT_ALPHA, DEFAULT_EXTENSION_C, build_profile, build_smoothed,
                       epsilon0, load_profile, save_profile, select_alpha)

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2
SLICE_DELTA = 5e-6
SLICE_ETA = 5e-5


@dataclass
class RunConfig:
    profile_path: str
    grid_scale: float
    eps_list: tuple
    s_list: tuple
    output_dir: str
    format: str
    seed: int


def _float_list(text):
    try:
        return tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from exc


def _add_common(sub):
    sub.add_argument("--profile", default="builtin",
                     help="profile JSON written by build-profile, or 'builtin' (default)")
    sub.add_argument("--eps", type=_float_list, default=DEFAULT_EPS_LIST,
                     help="witness eps values, comma separated")
    sub.add_argument("--s", type=_float_list, default=DEFAULT_S_LIST,
                     help="s-H-convexity exponents, comma separated")
    sub.add_argument("--grid-scale", type=float, default=1.0,
                     help="multiply every grid and sample count by this factor")
    sub.add_argument("--out", default="wormcert-out", help="output directory")
    sub.add_argument("--format", choices=("json", "csv"), default="json")
    sub.add_argument("--seed", type=int, default=0, help="seed of the low-discrepancy samplers")
    sub.add_argument("--tube-eps", type=float, default=0.1,
                     help="neighborhood radius eps for the containment Omega-bar in D in Omega(eps)")
    sub.add_argument("--no-timing", action="store_true",
                     help="omit wall_time_s from reports so they are byte-stable")


def build_parser():
    parser = argparse.ArgumentParser(prog="wormcert", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    subs = parser.add_subparsers(dest="command", required=True)

    bp = subs.add_parser("build-profile", help="build and validate the profile, write its JSON")
    bp.add_argument("--alpha", type=float, default=DEFAULT_ALPHA)
    bp.add_argument("--extension-c", type=float, default=DEFAULT_EXTENSION_C)
    bp.add_argument("--blend-width", type=float, default=None, help="default alpha/2")
    bp.add_argument("--eta", type=float, default=None, help="also build S_eta at this eta")
    bp.add_argument("--out", default="wormcert-out", help="output directory")

    for name, text in [
        ("certify-all", "run every check and write reports plus summary.json"),
        ("crucial-estimate", "search d1 and certify the tilt estimate"),
        ("levi", "select parameters and run the Levi suite"),
        ("containment", "select parameters and certify both containments"),
        ("witness", "Lipschitz constant and witness table"),
        ("annuli", "boundary and bottom annuli inside Omega(eps)"),
    ]:
        _add_common(subs.add_parser(name, help=text))

    sl = subs.add_parser("slice", help="export a cross-section of Omega, D and H_t as CSV")
    sl.add_argument("--profile", default="builtin")
    sl.add_argument("--kind", choices=("w-plane", "radial"), default="w-plane")
    sl.add_argument("--abs-z", type=float, default=math.exp(math.pi / 4.0),
                    help="|z| of a w-plane slice")
    sl.add_argument("--w-angle", type=float, default=-math.pi / 2.0,
                    help="arg w of a radial slice")
    sl.add_argument("--re-range", type=_float_list, default=(-2.5, 2.5))
    sl.add_argument("--im-range", type=_float_list, default=(-2.5, 2.5))
    sl.add_argument("--z-range", type=_float_list, default=(0.5, 3.0), help="|z| range of a radial slice")
    sl.add_argument("--w-range", type=_float_list, default=(0.0, 2.5), help="|w| range of a radial slice")
    sl.add_argument("--n", type=_float_list, default=(101, 101), help="grid counts, e.g. 101,101")
    sl.add_argument("--eta", type=float, default=None, help="default: stored eta or 5e-5")
    sl.add_argument("--delta", type=float, default=SLICE_DELTA)
    sl.add_argument("--t", type=float, default=0.0)
    sl.add_argument("--out", default="wormcert-out", help="output directory ('-' for stdout)")
    return parser


# ---------------------------------------------------------------------------
# helpers


def _load(path):
    if path == "builtin":
        return build_profile(), None
    if not os.path.isfile(path):
        raise ConfigError(f"profile file not found: {path}")
    try:
        return load_profile(path)
    except (json.JSONDecodeError, TypeError, ValueError) as exc:
        raise ConfigError(f"unreadable profile file {path}: {exc}") from exc


def _config(args, p):
    cfg = RunConfig(args.profile, args.grid_scale, tuple(args.eps), tuple(args.s), args.out,
                    args.format, args.seed)
    eps0 = epsilon0(p)
    if not cfg.grid_scale > 0:
        raise ConfigError("--grid-scale must be positive")
    if not cfg.eps_list or any(not 0 < e < eps0 for e in cfg.eps_list):
        raise ConfigError(f"every eps must lie in (0, eps0 = {eps0:.6g})")
    if any(s < 1 for s in cfg.s_list):
        raise ConfigError("every s must be >= 1")
    if not args.tube_eps > 0:
        raise ConfigError("--tube-eps must be positive")
    return cfg


def _settings(cfg, args):
    return RunSettings(tube_eps=args.tube_eps, eps_list=cfg.eps_list, s_list=cfg.s_list,
                       grid_scale=cfg.grid_scale, seed=cfg.seed)


def _report_rows(report, prefix=""):
    name = prefix + report.check_name
    rows = [[name, report.passed, repr(report.min_margin), repr(report.tolerance)]]
    for child in report.children:
        rows.extend(_report_rows(child, name + "/"))
    return rows


def _write_text(path, text):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _csv_text(header, rows):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def _emit(report, cfg, timing=True):
    os.makedirs(cfg.output_dir, exist_ok=True)
    if cfg.format == "csv":
        path = os.path.join(cfg.output_dir, f"{report.check_name}.csv")
        _write_text(path, _csv_text(["check", "pass", "min_margin", "tolerance"], _report_rows(report)))
    else:
        path = os.path.join(cfg.output_dir, f"{report.check_name}.json")
        _write_text(path, report.to_json(timing))
    print(f"{report.check_name}: {'PASS' if report.passed else 'FAIL'} "
          f"(min margin {report.min_margin:.6g}, tolerance {report.tolerance:g}) -> {path}")
    return path


def _verdict(reports):
    return EXIT_OK if all(r.passed for r in reports) else EXIT_FAIL


# ---------------------------------------------------------------------------
# commands


def cmd_build_profile(args):
    alpha = select_alpha(args.alpha)
    if not args.extension_c > 0:
        raise ConfigError("--extension-c must be positive")
    if args.blend_width is not None and not 0 < args.blend_width <= alpha / 2:
        raise ConfigError("--blend-width must lie in (0, alpha/2]")
    p = build_profile(alpha, args.extension_c, args.blend_width)
    sp = build_smoothed(p, args.eta) if args.eta is not None else None
    os.makedirs(args.out, exist_ok=True)
    path = os.path.join(args.out, "profile.json")
    save_profile(path, p, sp)
    print(f"alpha = {p.alpha!r}")
    print(f"beta = {p.beta!r}")
    print(f"epsilon0 = {epsilon0(p)!r}")
    if sp is not None:
        print(f"eta = {sp.eta!r}, gamma = {sp.gamma!r}, x_eta = {sp.x_eta!r}, beta_eta = {sp.beta_eta!r}")
    print(f"wrote {path}")
    return EXIT_OK


def cmd_certify_all(args):
    p, _ = _load(args.profile)
    cfg = _config(args, p)
    settings = _settings(cfg, args)
    entries, reports = [], []
    try:
        for report in run_checks(p, settings):
            path = _emit(report, cfg, timing=not args.no_timing)
            reports.append(report)
            entries.append({"check_name": report.check_name, "pass": report.passed,
                            "min_margin": report.min_margin, "tolerance": report.tolerance,
                            "file": os.path.basename(path)})
            if not report.passed:
                print(f"aborting: {report.check_name} failed, see {path}", file=sys.stderr)
                break
    except (SearchError, ProfileError) as exc:
        entries.append({"check_name": "parameter_search", "pass": False, "error": str(exc)})
        print(f"aborting: {exc}", file=sys.stderr)
    summary = {
        "version": __version__,
        "settings": {"profile": cfg.profile_path, "grid_scale": cfg.grid_scale,
                     "eps_list": list(cfg.eps_list), "s_list": list(cfg.s_list),
                     "seed": cfg.seed, "tube_eps": settings.tube_eps},
        "checks": entries,
        "pass": all(e["pass"] for e in entries),
    }
    _write_text(os.path.join(cfg.output_dir, "summary.json"),
                json.dumps(summary, indent=2, sort_keys=True) + "\n")
    timings = {r.check_name: r.wall_time for r in reports}
    _write_text(os.path.join(cfg.output_dir, "timings.json"), json.dumps(timings, indent=2) + "\n")
    print(f"summary: {'PASS' if summary['pass'] else 'FAIL'} -> "
          f"{os.path.join(cfg.output_dir, 'summary.json')}")
    return EXIT_OK if summary["pass"] else EXIT_FAIL


def cmd_crucial_estimate(args):
    p, _ = _load(args.profile)
    cfg = _config(args, p)
    s = _settings(cfg, args)
    d1 = find_d1(p, s.count(512), s.count(4096))
    report = certify_crucial_estimate(p, d1, s.count(512), s.count(4096))
    report.details = {"d1": d1}
    _emit(report, cfg, not args.no_timing)
    return _verdict([report])


def _selected(args):
    p, _ = _load(args.profile)
    cfg = _config(args, p)
    s = _settings(cfg, args)
    return p, cfg, s, select_parameters(p, s)


def cmd_levi(args):
    p, cfg, s, sel = _selected(args)
    report = certify_levi(p, sel.sp, sel.rp, s.count(100_000), s.count(1000), s.seed)
    report.details["selection"] = sel.as_dict()
    _emit(report, cfg, not args.no_timing)
    return _verdict([report])


def cmd_containment(args):
    p, cfg, s, sel = _selected(args)
    reports = [certify_containments(p, sel.sp, sel.rp, s.count(100_000), s.seed),
               certify_halfplane_containment(p, sel.rp, s.count(100_000), s.seed)]
    for r in reports:
        r.details["selection"] = sel.as_dict()
        _emit(r, cfg, not args.no_timing)
    return _verdict(reports)


def cmd_witness(args):
    p, _ = _load(args.profile)
    cfg = _config(args, p)
    s = _settings(cfg, args)
    wc = lipschitz_constants(p, DEFAULT_LIP_RADIUS, s.count(100_000), cfg.s_list, cfg.seed)
    if cfg.format == "csv":
        rows = witness_table(p, wc, sorted(cfg.eps_list, reverse=True))
        keys = [f"{x:g}" for x in cfg.s_list]
        header = ["eps", "x_minus_pi", "rho", "distance"] + [f"ratio_s{k}" for k in keys]
        body = [[repr(r["eps"]), repr(r["x_minus_pi"]), repr(r["rho"]), repr(r["distance"])]
                + [repr(r["ratios"][k]) for k in keys] for r in rows]
        os.makedirs(cfg.output_dir, exist_ok=True)
        path = os.path.join(cfg.output_dir, "witness_table.csv")
        _write_text(path, _csv_text(header, body))
        print(f"wrote {path}")
    report = certify_witness(p, wc, cfg.eps_list)
    _emit(report, RunConfig(**{**cfg.__dict__, "format": "json"}), not args.no_timing)
    return _verdict([report])


def cmd_annuli(args):
    p, _ = _load(args.profile)
    cfg = _config(args, p)
    s = _settings(cfg, args)
    parts = [certify_annuli(p, eps, s.count(256)) for eps in cfg.eps_list]
    report = CertReport.composite("annuli", {"eps_list": list(cfg.eps_list)}, parts,
                                  wall_time=sum(r.wall_time for r in parts))
    _emit(report, cfg, not args.no_timing)
    return _verdict([report])


def _pair(values, name, integer=False):
    if len(values) != 2:
        raise ConfigError(f"--{name} needs two comma-separated values")
    if integer:
        if any(v < 1 or v != int(v) for v in values):
            raise ConfigError(f"--{name} needs positive integers")
        return int(values[0]), int(values[1])
    return float(values[0]), float(values[1])


def slice_rows(p, sp, rp, kind, n, abs_z=None, w_angle=None, first=None, second=None):
    """Row-major cross-section grid and its columns; see cmd_slice."""
    a = np.linspace(first[0], first[1], n[0])
    b = np.linspace(second[0], second[1], n[1])
    aa, bb = np.meshgrid(a, b, indexing="ij")
    aa, bb = aa.ravel(), bb.ravel()
    if kind == "w-plane":
        if not abs_z > 0:
            raise ConfigError("|z| must be positive: the defining functions are off chart at z = 0")
        pts = PointCW(np.full(aa.shape, abs_z, dtype=complex), aa + 1j * bb)
        header = ["re_w", "im_w"]
    else:
        if not first[0] > 0:
            raise ConfigError("the |z| range must stay positive: z = 0 is off chart")
        pts = PointCW(aa.astype(complex), bb * np.exp(1j * w_angle))
        header = ["abs_z", "abs_w"]
    cols = [aa, bb, rho_eval(p, pts), rho_delta_eta_eval(rp, sp, pts), halfplane_margin(rp, pts),
            in_domain_D(rp, sp, pts)]
    header += ["rho", "rho_delta_eta", "halfplane_margin", "in_D"]
    rows = [[repr(float(c0)), repr(float(c1)), repr(float(c2)), repr(float(c3)), repr(float(c4)),
             "1" if c5 else "0"] for c0, c1, c2, c3, c4, c5 in zip(*cols)]
    return header, rows


def cmd_slice(args):
    p, sp = _load(args.profile)
    n = _pair(args.n, "n", integer=True)
    eta = args.eta if args.eta is not None else (sp.eta if sp is not None else SLICE_ETA)
    if sp is None or sp.eta != eta:
        sp = build_smoothed(p, eta)
    try:
        rp = RotationParams(1.0, eta, args.delta, args.t)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    if args.kind == "w-plane":
        header, rows = slice_rows(p, sp, rp, "w-plane", n, abs_z=args.abs_z,
                                  first=_pair(args.re_range, "re-range"),
                                  second=_pair(args.im_range, "im-range"))
    else:
        header, rows = slice_rows(p, sp, rp, "radial", n, w_angle=args.w_angle,
                                  first=_pair(args.z_range, "z-range"),
                                  second=_pair(args.w_range, "w-range"))
    text = _csv_text(header, rows)
    if args.out == "-":
        sys.stdout.write(text)
    else:
        os.makedirs(args.out, exist_ok=True)
        path = os.path.join(args.out, f"slice_{args.kind}.csv")
        _write_text(path, text)
        print(f"wrote {len(rows)} rows to {path}")
    return EXIT_OK


COMMANDS = {
    "build-profile": cmd_build_profile,
    "certify-all": cmd_certify_all,
    "crucial-estimate": cmd_crucial_estimate,
    "levi": cmd_levi,
    "containment": cmd_containment,
    "witness": cmd_witness,
    "annuli": cmd_annuli,
    "slice": cmd_slice,
}


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    try:
        return COMMANDS[args.command](args)
    except (ConfigError, ProfileError, ValueError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (SearchError, WormError) as exc:
        print(f"certification error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
