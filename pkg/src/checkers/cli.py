"""Command-line interface.

Exit codes: 0 computed or verified, 1 a check failed, 2 usage or domain error.
Options may also come from ``--config FILE`` (``key = value`` lines, keys named
like the long options with dashes or underscores); flags given on the command
line win.
"""

from __future__ import annotations

import argparse
import logging
import math
import os
import random
import sys

from . import analysis, dips, young
from .core import (
    DomainError,
    LatticePoint,
    Params,
    brute_force_amplitude,
    exact_row,
    iter_exact_rows,
    rows_at,
    to_lattice,
    wave_row,
)
from .reports import VerificationReport, csv_text, dumps, fmt, write_output

log = logging.getLogger("checkers")


def format_complex(z: complex, digits: int = 10) -> str:
    re, im = z.real, z.imag
    if im == 0:
        return f"{re:.{digits}g}"
    if re == 0:
        return f"{im:.{digits}g}i"
    sign = "+" if im > 0 else "-"
    return f"{re:.{digits}g} {sign} {abs(im):.{digits}g}i"


def _params(args) -> Params:
    return Params(m=args.m, eps=args.eps)


# ---------------------------------------------------------------------------
# wave

def cmd_wave(args) -> int:
    params = _params(args)
    eps = params.eps
    x, t = to_lattice(args.x, eps), to_lattice(args.t, eps)
    if t < 1:
        raise DomainError("t must be positive")
    lines = [f"lattice: x={x} t={t} mu={params.mu!r}"]

    if args.engine == "exact":
        if params.mu != 1:
            raise DomainError(f"the exact engine needs m*eps = 1, got {params.mu}")
        row, nxt = exact_row(t), exact_row(t + 1)
        a = row.amplitude(x)
        s = row.path_sum(x) if (x + t) % 2 == 0 and -t < x <= t else None
        lines.append(f"S = {s if s is not None else 0}")
        lines.append(f"a = 2^({1 - t}/2) * ({row.scaled_real(x)} + {row.scaled_imag(x)}i) = {format_complex(a)}")
        a1 = nxt.scaled_real(x) * 2.0 ** (-t / 2)
        a2 = nxt.scaled_imag(x + 1) * 2.0 ** (-t / 2)
        lines.append(f"a1 = 2^(-{t}/2) * {nxt.scaled_real(x)} = {a1:.10g}")
        lines.append(f"a2 = 2^(-{t}/2) * {nxt.scaled_imag(x + 1)} = {a2:.10g}")
    elif args.engine == "oracle":
        a = brute_force_amplitude(LatticePoint(x, t), params)
        a1 = brute_force_amplitude(LatticePoint(x, t + 1), params).real
        a2 = brute_force_amplitude(LatticePoint(x + 1, t + 1), params).imag
    else:
        row, nxt = rows_at([t, t + 1], params)
        a, a1, a2 = row.amplitude(x), nxt.real(x), nxt.imag(x + 1)

    values = {"a": format_complex(a), "a1": f"{a1:.10g}", "a2": f"{a2:.10g}", "P": f"{abs(a) ** 2:.10g}"}
    if args.what != "all":
        print(values[args.what])
        return 0
    if args.engine != "exact":
        lines.append(f"a = {values['a']}")
        lines.append(f"a1 = {values['a1']}")
        lines.append(f"a2 = {values['a2']}")
    lines.append(f"P = {values['P']}")
    print("\n".join(lines))
    return 0


# ---------------------------------------------------------------------------
# young / signmap

def _infer_format(path, explicit, default):
    if explicit:
        return explicit
    if path:
        ext = os.path.splitext(path)[1].lower().lstrip(".")
        if ext in ("ppm", "csv", "json"):
            return ext
    return default


def cmd_young(args) -> int:
    if args.map:
        words = list(args.map)
        if words[0] != "map" or len(words) != 3:
            raise DomainError("usage: young map WMAX HMAX")
        return _write_sign_map(int(words[1]), int(words[2]), args)
    if args.w is None or args.h is None:
        raise DomainError("give -w and -h, or `map WMAX HMAX`")
    if args.brute_force:
        print(young.young_brute_force(args.w, args.h))
    else:
        print(young.young_difference(args.w, args.h))
    return 0


def _write_sign_map(w_max, h_max, args) -> int:
    grid = young.sign_map(w_max, h_max)
    fmt_ = _infer_format(args.output, args.format, "ppm")
    if fmt_ == "ppm":
        write_output(grid.to_ppm(), args.output)
    elif fmt_ == "csv":
        write_output(grid.to_csv(), args.output)
    else:
        raise DomainError(f"sign maps are written as ppm or csv, not {fmt_}")
    log.info("sign map %dx%d written", w_max, h_max)
    return 0


def cmd_signmap(args) -> int:
    return _write_sign_map(args.wmax, args.hmax, args)


# ---------------------------------------------------------------------------
# layer / dips

def cmd_layer(args) -> int:
    params = _params(args)
    t = to_lattice(args.t, params.eps)
    table = analysis.layer_table(t, params, full=args.full)
    rows = ((x, fmt(a), "" if s is None else fmt(s), "" if e is None else fmt(e)) for x, a, s, e in table)
    write_output(csv_text(("x", "a1", "asymptotic", "abs_error"), rows), args.output)
    return 0


def cmd_dips(args) -> int:
    params = _params(args)
    t = to_lattice(args.t, params.eps)
    config = dips.DipScanConfig(window_constant=args.window)
    log.info("computing row t=%d", t + 1)
    scan = dips.dip_scan(args.T, t, params, resolution=args.resolution, config=config, threads=args.threads)
    predicted = [
        {"k": k, "v": dips.dip_velocity(k, args.T, params),
         "group_velocity": dips.group_velocity(math.pi * k / (args.T * params.eps), params)}
        for k in dips.dip_indices(args.T)
    ]
    summary = {
        "T": args.T, "t": t, "mu": params.mu, "window_constant": args.window,
        "resolution": args.resolution, "predicted": predicted,
        "local_minima": [float(v) for v in scan.local_minima(args.prominence)],
    }
    write_output(scan.to_csv(), args.output)
    if args.json:
        write_output(dumps(summary), args.json)
    elif args.output:
        print(dumps(summary), end="")
    return 0


# ---------------------------------------------------------------------------
# verify

def _verify_recurrence(args) -> VerificationReport:
    mu = args.m * args.eps if args.fixed_mass else None
    return analysis.verify_recurrence(args.samples, args.tmax, args.exact_tmax, args.tolerance, args.seed, mu=mu)


def cmd_verify(args) -> int:
    check = args.check
    params = _params(args)
    if check == "outside":
        t_values = None
        if args.samples:
            rng = random.Random(args.seed)
            t_values = sorted(rng.sample(range(1, args.tmax + 1), min(args.samples, args.tmax)))
        report = analysis.verify_sign_outside(args.tmax, params, args.component, t_values=t_values,
                                              exact=None if not args.float else False)
    elif check == "middle":
        xs = [x for x in range(-args.xmax, args.xmax + 1) if x != 0]
        report = analysis.verify_sign_middle(xs, args.tmax, exact=args.exact)
    elif check == "recurrence":
        report = _verify_recurrence(args)
    elif check == "symmetry":
        report = VerificationReport(theorem="symmetry", domain={"t_max": args.tmax, "mu": params.mu})
        if params.mu == 1 and not args.float:
            for row in iter_exact_rows(args.tmax + 1, t_min=1):
                report.checked += 1
                if any(row.scaled_real(x) != row.scaled_real(-x) for x in range(row.t + 1)):
                    report.violations.append({"t": row.t - 1})
        else:
            dev = analysis.symmetry_check(args.tmax, params)
            report.checked = 1
            report.thresholds["max_deviation"] = dev
            if dev > args.tolerance:
                report.violations.append({"t": args.tmax, "deviation": dev})
    elif check == "middle-values":
        report = VerificationReport(theorem="middle-values", domain={"t_max": args.tmax})
        for row in iter_exact_rows(args.tmax + 1, t_min=2):
            t = row.t - 1
            for k in range(t):
                report.checked += 1
                x = -t + 2 * k + 1
                if analysis.middle_value_a1(k, t) != row.scaled_real(x):
                    report.violations.append({"k": k, "t": t})
    elif check == "sharpness":
        w = dips.find_sign_counterexample(args.v0, params, args.tmax)
        report = VerificationReport(theorem="sharpness", domain={"v0": args.v0, "t_max": args.tmax, "mu": params.mu})
        report.checked = 1
        if w is None:
            report.violations.append({"reason": f"no witness up to t={args.tmax}"})
        else:
            report.notes["witness"] = w.to_dict()
            if w.confirmed is False:
                report.violations.append({"reason": "exact engine does not confirm the witness", **w.to_dict()})
    elif check == "young-outside":
        report = young.verify_young_outside(args.tmax)
    elif check == "young-middle":
        report = young.verify_young_middle(range(-args.xmax, args.xmax + 1), args.tmax)
    else:  # argparse restricts choices
        raise DomainError(f"unknown check {check}")
    write_output(report.to_json(), args.output)
    return 0 if report.ok else 1


# ---------------------------------------------------------------------------
# zeros

def cmd_zeros(args) -> int:
    zeros = analysis.zero_scan(args.tmax)
    unexpected = [z for z in zeros if not z.expected]
    data = {
        "t_max": args.tmax,
        "zeros": [{"x": z.x, "t": z.t, "component": z.component, "expected": z.expected} for z in zeros],
        "unexpected": [{"x": z.x, "t": z.t, "component": z.component} for z in unexpected],
    }
    write_output(dumps(data), args.output)
    return 1 if unexpected else 0


# ---------------------------------------------------------------------------
# parser

def _add_mass(p):
    p.add_argument("--m", type=float, default=1.0, help="particle mass (default 1)")
    p.add_argument("--eps", type=float, default=1.0, help="lattice step (default 1)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="checkers", description="Feynman checkers and Young diagram step parity.")
    parser.add_argument("--config", help="key=value file with option defaults")
    parser.add_argument("--threads", type=int, default=os.cpu_count() or 1, help="worker threads for scans")
    parser.add_argument("-v", "--verbose", action="store_true", help="progress on stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("wave", help="amplitude and derived values at one point")
    p.add_argument("-x", type=float, required=True)
    p.add_argument("-t", type=float, required=True)
    _add_mass(p)
    p.add_argument("--engine", choices=("oracle", "exact", "float"), default="float")
    p.add_argument("--what", choices=("all", "a", "a1", "a2", "P"), default="all")
    p.set_defaults(func=cmd_wave)

    p = sub.add_parser("young", help="odd-minus-even step count, or a sign map", add_help=False)
    p.add_argument("--help", action="help")
    p.add_argument("map", nargs="*", help="`map WMAX HMAX` writes the sign map")
    p.add_argument("-w", type=int)
    p.add_argument("-h", type=int)
    p.add_argument("--brute-force", action="store_true")
    p.add_argument("-o", "--output")
    p.add_argument("--format", choices=("ppm", "csv"))
    p.set_defaults(func=cmd_young)

    p = sub.add_parser("signmap", help="sign map of D(w, h) as PPM or CSV")
    p.add_argument("wmax", type=int)
    p.add_argument("hmax", type=int)
    p.add_argument("-o", "--output")
    p.add_argument("--format", choices=("ppm", "csv"))
    p.set_defaults(func=cmd_signmap)

    p = sub.add_parser("layer", help="a1_tilde across x at fixed t with the asymptotic main term")
    p.add_argument("-t", type=float, required=True)
    _add_mass(p)
    p.add_argument("--full", action="store_true", help="include x outside the peaks")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_layer)

    p = sub.add_parser("dips", help="dip scan CSV and predicted dip positions")
    p.add_argument("-T", type=int, required=True, help="dip order")
    p.add_argument("-t", type=float, required=True)
    _add_mass(p)
    p.add_argument("--resolution", type=int, default=2001)
    p.add_argument("--window", type=float, default=1.0, help="window half-width in units of sqrt(t)")
    p.add_argument("--prominence", type=float, default=0.1, help="minimum depth of reported minima, in medians")
    p.add_argument("-o", "--output", help="scan CSV (stdout if omitted)")
    p.add_argument("--json", help="predicted positions and detected minima")
    p.set_defaults(func=cmd_dips)

    p = sub.add_parser("verify", help="numerical verification reports (JSON)")
    p.add_argument("check", choices=("outside", "middle", "recurrence", "symmetry", "middle-values",
                                        "sharpness", "young-outside", "young-middle"))
    p.add_argument("--tmax", type=int, default=2000)
    p.add_argument("--samples", type=int, default=0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--component", type=int, choices=(1, 2), default=1)
    p.add_argument("--xmax", type=int, default=10, help="|x| range for the middle law, |d| for young-middle")
    p.add_argument("--v0", type=float, default=0.70)
    p.add_argument("--exact", action="store_true", help="exact engine for the middle law")
    p.add_argument("--float", action="store_true", help="force the float engine")
    p.add_argument("--exact-tmax", type=int, default=200)
    p.add_argument("--tolerance", type=float, default=1e-9)
    p.add_argument("--fixed-mass", action="store_true", help="use --m/--eps instead of random masses")
    _add_mass(p)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("zeros", help="exact zeros of Re a and Im a")
    p.add_argument("--tmax", type=int, default=100)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_zeros)
    return parser


def read_config(path) -> dict:
    cfg = {}
    with open(path) as fh:
        for n, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise DomainError(f"{path}:{n}: expected key=value")
            key, value = (s.strip() for s in line.split("=", 1))
            cfg[key.replace("-", "_")] = value
    return cfg


def _apply_config(parser, argv, cfg):
    """Install config values as subcommand defaults, converted by each option's type."""
    pre = parser.parse_args(argv)
    subparser = parser._subparsers._group_actions[0].choices[pre.command]
    defaults = {}
    for action in subparser._actions + parser._actions:
        if action.dest in cfg:
            raw = cfg[action.dest]
            if action.nargs == 0:
                defaults[action.dest] = raw.lower() in ("1", "true", "yes", "on")
            else:
                defaults[action.dest] = action.type(raw) if action.type else raw
    subparser.set_defaults(**defaults)
    parser.set_defaults(**{k: v for k, v in defaults.items() if k in ("threads", "verbose")})


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.config:
            _apply_config(parser, argv, read_config(args.config))
            args = parser.parse_args(argv)
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, stream=sys.stderr,
                            format="%(message)s")
        return args.func(args)
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
