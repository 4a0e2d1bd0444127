"""Command-line front end: ``convlimit {analyze,green,expand,verify,plot-data}``."""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from pathlib import Path
from typing import List, Optional, Sequence

import numpy as np

from . import presets
from .errors import ConvLimitError, ZeroDrift, ZeroFirstMoment
from .expansion import reduce_via_recurrence
from .gaussian import GeneralizedGaussianSpec, eval_H
from .sequence import ComplexSequence, green_powers, load_sequence, parse_value
from .spatial import DEFAULT_RADIUS, contour_reconstruct_window
from .symbol import DEFAULT_TOL, SymbolProfile, check_hypotheses, eval_symbol
from .verify import (berry_esseen_check, bounded_ratio, build_polynomials,
                     envelope_check, error_table)

EXIT_HYPOTHESIS = 2
EXIT_ZERO_DRIFT = 3
EXIT_ENVELOPE = 4


def _fmt(x: float) -> str:
    return "%.17g" % x


def _default_tol() -> float:
    env = os.environ.get("CONVLIMIT_TOL")
    return float(env) if env else DEFAULT_TOL


def _load(args) -> ComplexSequence:
    if args.input:
        a = load_sequence(args.input)
    else:
        a = presets.preset(args.preset, args.lambda_a)
    if args.normalize:
        t = np.linspace(-np.pi, np.pi, 8192, endpoint=False)
        a = a.scaled(1.0 / np.max(np.abs(eval_symbol(a, np.exp(1j * t)))))
    return a


def _n_list(args) -> List[int]:
    if args.n_min < 1:
        raise SystemExit("--n-min must be at least 1")
    return list(range(args.n_min, args.n_max + 1, args.n_step))


def _s_list(args, profile: SymbolProfile) -> List[int]:
    values = [int(v) for v in str(args.s).split(",")]
    if any(v < 0 for v in values):
        raise SystemExit("--s values must be nonnegative")
    if len(values) == 1:
        return values * len(profile.points)
    if len(values) != len(profile.points):
        raise SystemExit(f"--s lists {len(values)} orders for {len(profile.points)} points")
    return values


def _out(args) -> Path:
    path = Path(args.out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _write_json(path: Path, data) -> None:
    path.write_text(json.dumps(data, indent=2, sort_keys=True) + "\n")


def _profile(args, a: ComplexSequence) -> SymbolProfile:
    return check_hypotheses(a, tol=args.tol)


def _admissible_or_exit(profile: SymbolProfile) -> None:
    report = profile.hypothesis_report
    if not report.admissible:
        for line in report.diagnostics:
            print(line, file=sys.stderr)
        raise SystemExit(EXIT_HYPOTHESIS)


def _polynomials(a, profile, s_values):
    try:
        return build_polynomials(a, profile, s_values)
    except (ZeroFirstMoment, ZeroDrift) as exc:
        shift = profile.suggested_shift or 1
        print(f"zero drift: {exc}; rerun on the sequence shifted by J={shift}", file=sys.stderr)
        raise SystemExit(EXIT_ZERO_DRIFT)


def cmd_analyze(args) -> int:
    a = _load(args)
    profile = _profile(args, a)
    _write_json(_out(args) / "profile.json", profile.to_json())
    for p in profile.points:
        print(f"kappa={p.kappa:.12g} z={p.z:.12g} alpha={p.alpha:.12g} "
              f"mu={p.mu} beta={p.beta:.12g} case={p.case_tag}")
    _admissible_or_exit(profile)
    return 0


def cmd_green(args) -> int:
    a = _load(args)
    with open(_out(args) / "green.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["n", "j", "green_re", "green_im"])
        for n, G in green_powers(a, _n_list(args)):
            for j, v in zip(G.offsets, G.coefficients):
                w.writerow([n, int(j), _fmt(v.real), _fmt(v.imag)])
    return 0


def cmd_expand(args) -> int:
    a = _load(args)
    profile = _profile(args, a)
    _admissible_or_exit(profile)
    s_values = _s_list(args, profile)
    families = _polynomials(a, profile, s_values)
    out = _out(args)
    for k, (point, family) in enumerate(zip(profile.points, families)):
        if not family:
            print(f"point {k}: s=0, attractor only")
        for poly in family:
            reduced = reduce_via_recurrence(poly, point.mu, point.beta)
            data = poly.to_json()
            data["reduced"] = reduced.to_json()["terms"]
            data["point"] = k
            _write_json(out / f"poly_k{k}_sigma{poly.sigma}.json", data)
            print(f"point {k} sigma {poly.sigma}: {poly!r} ~ {reduced!r}")
    return 0


def cmd_verify(args) -> int:
    a = _load(args)
    profile = _profile(args, a)
    _admissible_or_exit(profile)
    s_values = _s_list(args, profile)
    families = _polynomials(a, profile, s_values)
    ns = _n_list(args)
    report = error_table(a, profile, families, ns, s_values, widen=args.widen, jobs=args.jobs)
    out = _out(args)
    with open(out / "verify.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        head = ["n", "j", "green_re", "green_im", "expansion_re", "expansion_im", "err_abs"]
        head += [f"X_{k}" for k in range(len(profile.points))] + ["scaled_err"]
        w.writerow(head)
        scaled = report.scaled_err
        for i, (n, j, g, e, err, X) in enumerate(report.rows()):
            w.writerow([n, j, _fmt(g.real), _fmt(g.imag), _fmt(e.real), _fmt(e.imag),
                        _fmt(err)] + [_fmt(x) for x in X] + [_fmt(scaled[i])])
    with open(out / "scaled_sup.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["n", "scaled_sup"])
        for n in sorted(report.scaled_sup):
            w.writerow([n, _fmt(report.scaled_sup[n])])
    fits = envelope_check(report, profile, s_values)
    summary = {
        "rate": report.rate,
        "scaled_sup": {str(n): v for n, v in sorted(report.scaled_sup.items())},
        "scaled_sup_ratio": bounded_ratio(report.scaled_sup) if len(ns) > 1 else None,
        "envelope": [{"C": C, "c": c, "ok": ok} for C, c, ok in fits],
    }
    try:
        be = berry_esseen_check(a, ns)
        summary["berry_esseen"] = {str(n): v for n, v in sorted(be.items())}
    except ConvLimitError:
        summary["berry_esseen"] = None
    if args.oracle:
        small = [n for n in ns if n <= 20] or [ns[0]]
        st = a.stencil
        window = (-max(small) * st.p, max(small) * st.r)
        rec = contour_reconstruct_window(a, small, window, DEFAULT_RADIUS, 512)
        js = np.arange(window[0], window[1] + 1)
        dev = 0.0
        for n, G in green_powers(a, small):
            dev = max(dev, float(np.max(np.abs(rec[n] - G.values(js)))))
        summary["oracle_max_deviation"] = dev
        print(f"oracle max deviation: {dev:.3g}")
    _write_json(out / "summary.json", summary)
    for C, c, ok in fits:
        print(f"envelope C={C:.6g} c={c:.6g} ok={ok}")
    if not all(ok for _, _, ok in fits):
        return EXIT_ENVELOPE
    return 0


def cmd_plot_data(args) -> int:
    out = _out(args)
    if args.function == "H":
        spec = GeneralizedGaussianSpec(args.mu, parse_value(args.beta))
        count = int(round((args.xmax - args.xmin) / args.step)) + 1
        xs = args.xmin + args.step * np.arange(count)
        vals = eval_H(spec, args.m, xs)
        with open(out / f"H_mu{args.mu}_m{args.m}.csv", "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["x", "re", "im"])
            for x, v in zip(xs, vals):
                w.writerow([_fmt(x), _fmt(v.real), _fmt(v.imag)])
        return 0
    # scaled-sup: the data behind the n versus n^rate max|Err| plots
    args.widen = False
    args.oracle = False
    return cmd_verify(args)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="convlimit", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, sequence=True):
        if sequence:
            src = p.add_mutually_exclusive_group()
            src.add_argument("--input", help="sequence JSON file")
            src.add_argument("--preset", choices=presets.PRESETS, default="probabilistic-example")
            p.add_argument("--lambda-a", default="1/2", help="Courant number for the o3 preset")
            p.add_argument("--normalize", action="store_true",
                           help="rescale so that max |F| on the unit circle is 1")
        p.add_argument("--tol", type=float, default=_default_tol())
        p.add_argument("--out", default=".")
        p.add_argument("--jobs", type=int, default=1)

    def n_range(p, lo=10, hi=100, step=10):
        p.add_argument("--n-min", type=int, default=lo)
        p.add_argument("--n-max", type=int, default=hi)
        p.add_argument("--n-step", type=int, default=step)

    p = sub.add_parser("analyze", help="tangency points and hypothesis checks")
    common(p)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("green", help="temporal Green's function table")
    common(p)
    n_range(p, 1, 10, 1)
    p.set_defaults(func=cmd_green)

    p = sub.add_parser("expand", help="expansion polynomials")
    common(p)
    p.add_argument("--s", default="2")
    p.set_defaults(func=cmd_expand)

    p = sub.add_parser("verify", help="error table against the expansion")
    common(p)
    p.add_argument("--s", default="2")
    n_range(p)
    p.add_argument("--oracle", action="store_true", help="cross-check with contour reconstruction")
    p.add_argument("--widen", action="store_true", help="use twice the support width")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("plot-data", help="CSV data for plots")
    common(p)
    p.add_argument("--function", choices=("H", "scaled-sup"), default="H")
    p.add_argument("--mu", type=int, default=1)
    p.add_argument("--beta", default="1")
    p.add_argument("--m", type=int, default=0)
    p.add_argument("--xmin", type=float, default=-10.0)
    p.add_argument("--xmax", type=float, default=10.0)
    p.add_argument("--step", type=float, default=0.1)
    p.add_argument("--s", default="2")
    n_range(p)
    p.set_defaults(func=cmd_plot_data)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConvLimitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except SystemExit as exc:
        if isinstance(exc.code, int):
            return exc.code
        print(exc.code, file=sys.stderr)
        return 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
