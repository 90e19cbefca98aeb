"""Command-line front end.

Usage::

    critjac discriminant --b 2 --btilde 0
    critjac discriminant --b 1 --btilde 1 --e-grid -3:3:601 --output d.csv
    critjac solve --alpha 0.8 --b 1 --E -1 --N 2000 --every 10
    critjac fit --alpha 0.8 --b 1 --E -1 --N 100000
    critjac spectrum --alpha 1 --b 3 --n-max 20 --N 4000
    critjac bounds --alpha 1 --b 3 --n-max 20 --N 4000
    critjac counting --alpha 1 --b 3 --n-max 20 --N 4000
    critjac gap --alpha 1 --b 3 --a 5 --trials 1000 --seed 7

The report goes to ``--output`` when given (written atomically), otherwise to
stdout; the one-line summary then moves to stderr. Exit status: 0 success,
1 a checked property failed, 2 invalid input.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import platform
import sys
import tempfile
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from itertools import product

import numpy as np

from . import __version__
from .asymptotics import (
    envelope_exponent_fit,
    norm_growth_fit,
    phase_frequency_fit,
    subordinacy_ratios,
)
from .errors import CritjacError, NotStabilized
from .model import ModelParams, PeriodicData, classify_coupling, discriminant_grid
from .propagate import recurrence_residuals, solve_recurrence
from .regression import geometric_indices
from .spectral import (
    Cutoff,
    counting_bound_check,
    eigenvalue_bounds_check,
    gap_inequality_check,
    ratio_spread,
    stabilized_positive_eigs,
)

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

ENVELOPE_TOL = 0.02
FREQUENCY_RTOL = 0.02
NORM_GROWTH_TOL = 0.05
RATIO_RANGE = (1e-2, 1e2)
RESIDUAL_TOL = 1e-10
RATIO_SPREAD_MAX = 10.0


class UsageError(Exception):
    pass


@dataclass
class Report:
    command: str
    params: dict
    columns: list[str]
    results: list[dict] = field(default_factory=list)
    passed: bool = True
    summary: list[str] = field(default_factory=list)


def parse_grid(text: str) -> np.ndarray:
    """``lo:hi:count`` -> ``count`` evenly spaced points."""
    try:
        lo, hi, count = text.split(":")
        lo, hi, count = float(lo), float(hi), int(count)
    except ValueError:
        raise UsageError(f"grid must look like lo:hi:count, got {text!r}") from None
    if count < 1 or (count > 1 and not lo < hi):
        raise UsageError("grid needs count >= 1 and lo < hi")
    return np.linspace(lo, hi, count)


def parse_list(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"expected comma-separated numbers, got {text!r}") from None


def parse_pair(text: str) -> tuple[float, float]:
    vals = parse_list(text)
    if len(vals) != 2:
        raise UsageError("anchor must be two comma-separated numbers")
    return vals[0], vals[1]


def make_params(alpha: float, b: float) -> ModelParams:
    try:
        return ModelParams(alpha, b)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def check_size(N: int, name: str = "N") -> None:
    if N < 4:
        raise UsageError(f"{name} must be at least 4")


def fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def jsonable(v):
    if isinstance(v, dict):
        return {k: jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [jsonable(x) for x in v]
    if isinstance(v, np.bool_):
        return bool(v)
    if isinstance(v, np.integer):
        return int(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return v if math.isfinite(v) else None
    return v


def render(report: Report, fmt_name: str, metadata: dict) -> str:
    if fmt_name == "json":
        doc = {
            "command": report.command,
            "params": jsonable(report.params),
            "results": jsonable(report.results),
            "pass": bool(report.passed),
            "metadata": metadata,
        }
        return json.dumps(doc, indent=2, allow_nan=False) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(report.columns)
    for row in report.results:
        w.writerow([fmt(row.get(c)) for c in report.columns])
    return buf.getvalue()


def write_atomic(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".critjac-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def worker_count(jobs: int) -> int:
    env = os.environ.get("CRITJAC_THREADS")
    cap = os.cpu_count() or 1
    if env:
        try:
            cap = max(1, int(env))
        except ValueError:
            raise UsageError("CRITJAC_THREADS must be an integer") from None
    return max(1, min(jobs, cap))


# ---------------------------------------------------------------- commands


def cmd_discriminant(args) -> Report:
    pd = PeriodicData.critical_family(args.b, args.btilde)
    label = classify_coupling(pd, tol=args.tol)
    word = {"absolutely_continuous": "absolutely continuous"}.get(label.value, label.value)
    rep = Report("discriminant", {"b": args.b, "btilde": args.btilde, "tol": args.tol,
                                  "e_grid": args.e_grid},
                 ["E", "d"], summary=[word])
    if args.e_grid:
        Es = parse_grid(args.e_grid)
        for E, d in zip(Es.tolist(), discriminant_grid(pd, Es).tolist()):
            rep.results.append({"E": E, "d": d})
    rep.params["classification"] = label.value
    return rep


def cmd_solve(args) -> Report:
    p = make_params(args.alpha, args.b)
    check_size(args.N)
    anchor = parse_pair(args.anchor)
    tr = solve_recurrence(p, args.E, args.anchor_index, anchor, args.N)
    idx = np.arange(tr.start, tr.stop + 1, max(1, args.every))
    m, e = tr.scaled(idx)
    interior = idx[(idx > tr.start) & (idx < tr.stop)]
    worst = float(recurrence_residuals(tr, interior).max()) if interior.size else 0.0
    rep = Report("solve", {"alpha": args.alpha, "b": args.b, "E": args.E, "N": args.N,
                           "anchor_index": args.anchor_index, "anchor": list(anchor)},
                 ["n", "u", "mantissa", "log_scale"])
    for n, mi, ei in zip(idx.tolist(), m.tolist(), e.tolist()):
        rep.results.append({"n": n, "u": math.ldexp(mi, ei) if ei < 1000 else math.inf,
                            "mantissa": mi, "log_scale": ei * math.log(2.0)})
    rep.passed = worst <= RESIDUAL_TOL
    rep.params["max_relative_residual"] = worst
    rep.summary.append(f"max relative residual: {worst!r}")
    return rep


def fit_job(alpha: float, b: float, E: float, N: int, n_min: int) -> dict:
    p = ModelParams(alpha, b)
    sites = 2 * N + 1
    t1 = solve_recurrence(p, E, 1, (1.0, 0.0), sites)
    t2 = solve_recurrence(p, E, 1, (0.0, 1.0), sites)
    env = envelope_exponent_fit(t1, window=(n_min, N))
    freq = phase_frequency_fit(t1, p, E, window=(n_min, N))
    g1 = norm_growth_fit(t1, window=(n_min, N))
    g2 = norm_growth_fit(t2, window=(n_min, N))
    ratios = subordinacy_ratios(p, E, geometric_indices(n_min, N, 30), ((1.0, 0.0), (0.0, 1.0)))
    row = {
        "alpha": alpha, "b": b, "E": E,
        "fitted_envelope": env.fitted_value, "predicted_envelope": env.predicted_value,
        "envelope_ok": env.abs_error <= ENVELOPE_TOL,
        "fitted_frequency": freq.fitted_value, "predicted_frequency": freq.predicted_value,
        "frequency_ok": freq.rel_error <= FREQUENCY_RTOL,
        "norm_growth_1": g1.fitted_value, "norm_growth_2": g2.fitted_value,
        "predicted_norm_growth": g1.predicted_value,
        "norm_growth_ok": max(g1.abs_error, g2.abs_error) <= NORM_GROWTH_TOL,
        "ratio_min": float(ratios.min()), "ratio_max": float(ratios.max()),
        "ratio_ok": bool(ratios.min() >= RATIO_RANGE[0] and ratios.max() <= RATIO_RANGE[1]),
    }
    row["pass"] = all(row[k] for k in ("envelope_ok", "frequency_ok", "norm_growth_ok", "ratio_ok"))
    return row


FIT_COLUMNS = ["alpha", "b", "E", "fitted_envelope", "predicted_envelope", "envelope_ok",
               "fitted_frequency", "predicted_frequency", "frequency_ok", "norm_growth_1",
               "norm_growth_2", "predicted_norm_growth", "norm_growth_ok", "ratio_min",
               "ratio_max", "ratio_ok", "pass"]


def cmd_fit(args) -> Report:
    alphas, bs, Es = parse_list(args.alpha), parse_list(args.b), parse_list(args.E)
    check_size(args.N)
    n_min = args.window_min if args.window_min else max(2, args.N // 100)
    if not 2 <= n_min < args.N:
        raise UsageError("window-min must lie in [2, N)")
    jobs = list(product(alphas, bs, Es))
    for al, b, E in jobs:
        make_params(al, b)
        if E >= 0 or b <= 0 or not (2 / 3 < al <= 1):
            raise UsageError("fit needs E < 0, b > 0 and 2/3 < alpha <= 1")
    workers = worker_count(len(jobs))
    if workers == 1:
        rows = [fit_job(al, b, E, args.N, n_min) for al, b, E in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futs = [pool.submit(fit_job, al, b, E, args.N, n_min) for al, b, E in jobs]
            rows = [f.result() for f in futs]
    rep = Report("fit", {"alpha": alphas, "b": bs, "E": Es, "N": args.N, "window_min": n_min},
                 FIT_COLUMNS, rows)
    rep.passed = all(r["pass"] for r in rows)
    for r in rows:
        rep.summary.append(f"alpha={r['alpha']!r} b={r['b']!r} E={r['E']!r}: "
                           f"envelope {r['fitted_envelope']:.5f} (pred {r['predicted_envelope']:.5f}), "
                           f"frequency {r['fitted_frequency']:.5f} (pred {r['predicted_frequency']:.5f})")
    return rep


def _stabilized(p: ModelParams, args):
    check_size(args.N)
    if args.n_max < 1:
        raise UsageError("n-max must be positive")
    if p.b <= 0:
        raise UsageError("positive discrete spectrum needs b > 0")
    return stabilized_positive_eigs(p, args.n_max, args.N, tol=args.tol)


def _stabilization_failure(command: str, params: dict, columns: list[str], exc: Exception) -> Report:
    rep = Report(command, params, columns, passed=False)
    rep.summary.append(f"not stabilized: {exc}")
    return rep


def cmd_spectrum(args) -> Report:
    p = make_params(args.alpha, args.b)
    params = {"alpha": args.alpha, "b": args.b, "n_max": args.n_max, "N": args.N, "tol": args.tol}
    cols = ["n", "E_n", "discrepancy"]
    try:
        rep_e = _stabilized(p, args)
    except NotStabilized as exc:
        return _stabilization_failure("spectrum", params, cols, exc)
    rep = Report("spectrum", params, cols)
    for i, (E, d) in enumerate(zip(rep_e.eigenvalues.tolist(), rep_e.discrepancies.tolist()), 1):
        rep.results.append({"n": i, "E_n": E, "discrepancy": d})
    rep.params["truncation_sizes"] = list(rep_e.truncation_sizes)
    rep.summary.append(f"stabilized: {rep_e.stabilized_count}")
    return rep


def cmd_bounds(args) -> Report:
    p = make_params(args.alpha, args.b)
    params = {"alpha": args.alpha, "b": args.b, "n_max": args.n_max, "N": args.N,
              "tol": args.tol, "cutoff": args.cutoff}
    cols = ["n", "E_n", "lower", "upper", "ratio", "lower_ok", "upper_ok"]
    try:
        rep_e = _stabilized(p, args)
    except NotStabilized as exc:
        return _stabilization_failure("bounds", params, cols, exc)
    rows = eigenvalue_bounds_check(p, rep_e, cutoff=args.cutoff, raise_on_violation=False)
    rep = Report("bounds", params, cols)
    for r in rows:
        rep.results.append({"n": r.n, "E_n": r.value, "lower": r.lower, "upper": r.upper,
                            "ratio": r.ratio, "lower_ok": r.lower_ok, "upper_ok": r.upper_ok})
    ok = all(r.lower_ok and r.upper_ok is not False for r in rows)
    if p.b * p.b < 6:
        spread = ratio_spread(rows)
        rep.params["ratio_spread"] = spread
        ok = ok and spread < RATIO_SPREAD_MAX
    rep.passed = ok
    bad = [r.n for r in rows if not r.lower_ok or r.upper_ok is False]
    rep.summary.append(f"rows: {len(rows)}, violations: {len(bad)}" + (f" at n={bad}" if bad else ""))
    return rep


def cmd_counting(args) -> Report:
    p = make_params(args.alpha, args.b)
    params = {"alpha": args.alpha, "b": args.b, "n_max": args.n_max, "N": args.N,
              "tol": args.tol, "cutoff": args.cutoff, "points": args.points}
    cols = ["E", "count", "bound", "margin", "pass"]
    try:
        rep_e = _stabilized(p, args)
    except NotStabilized as exc:
        return _stabilization_failure("counting", params, cols, exc)
    grid = counting_grid(rep_e.eigenvalues, args.points)
    rep = Report("counting", params, cols)
    for E in grid.tolist():
        c = counting_bound_check(p, E, rep_e, cutoff=args.cutoff)
        rep.results.append({"E": E, "count": c.count, "bound": c.bound, "margin": c.margin,
                            "pass": c.passed})
    rep.passed = all(r["pass"] for r in rep.results)
    bad = sum(not r["pass"] for r in rep.results)
    rep.summary.append(f"grid points: {len(grid)}, violations: {bad}")
    return rep


def counting_grid(eigs: np.ndarray, points: int) -> np.ndarray:
    """Geometric grid up to the last eigenvalue plus a point just above each eigenvalue."""
    top = float(eigs[-1])
    geo = np.geomspace(min(1.0, top) * 0.5 if top > 0 else 0.5, top, points)
    above = np.nextafter(eigs[:-1], np.inf)
    return np.unique(np.concatenate([geo, above, [top]]))


def cmd_gap(args) -> Report:
    p = make_params(args.alpha, args.b)
    check_size(args.N)
    if args.a <= 0 or args.trials < 1:
        raise UsageError("gap needs a > 0 and trials >= 1")
    if p.b <= 0:
        raise UsageError("gap inequality is stated for b > 0")
    g = gap_inequality_check(p, args.a, args.N, args.trials, args.seed, cutoff=args.cutoff,
                             exact=not args.no_exact)
    rep = Report("gap", {"alpha": args.alpha, "b": args.b, "a": args.a, "N": args.N,
                         "trials": args.trials, "seed": args.seed, "cutoff": args.cutoff},
                 ["trials", "violations", "min_ratio", "exact_min_ratio", "forbidden_sites"])
    rep.results.append({"trials": g.trials, "violations": g.violations, "min_ratio": g.min_ratio,
                        "exact_min_ratio": g.exact_min_ratio,
                        "forbidden_sites": " ".join(str(s) for s in g.forbidden_sites)})
    rep.passed = g.passed
    rep.summary.append(f"violations: {g.violations}")
    return rep


COMMANDS = {
    "discriminant": (cmd_discriminant, "csv"),
    "solve": (cmd_solve, "csv"),
    "fit": (cmd_fit, "json"),
    "spectrum": (cmd_spectrum, "csv"),
    "bounds": (cmd_bounds, "csv"),
    "counting": (cmd_counting, "csv"),
    "gap": (cmd_gap, "json"),
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="critjac", description=__doc__.split("\n")[0])
    ap.add_argument("--version", action="version", version=f"critjac {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--format", choices=["csv", "json"], default=None)
        sp.add_argument("--output", "-o", default=None, help="report path (default: stdout)")
        sp.add_argument("--timing", action="store_true",
                        help="add wall-clock time to JSON metadata (breaks byte-identical output)")

    sp = sub.add_parser("discriminant", help="periodic discriminant d(E) and coupling class")
    sp.add_argument("--b", type=float, required=True)
    sp.add_argument("--btilde", type=float, required=True)
    sp.add_argument("--e-grid", default=None, help="lo:hi:count")
    sp.add_argument("--tol", type=float, default=0.0)
    common(sp)

    sp = sub.add_parser("solve", help="solve the recurrence and emit u_n")
    sp.add_argument("--alpha", type=float, required=True)
    sp.add_argument("--b", type=float, required=True)
    sp.add_argument("--E", type=float, required=True)
    sp.add_argument("--N", type=int, default=1000)
    sp.add_argument("--anchor", default="1,0", help="u_k,u_{k+1}")
    sp.add_argument("--anchor-index", type=int, default=1)
    sp.add_argument("--every", type=int, default=1, help="emit every k-th site")
    common(sp)

    sp = sub.add_parser("fit", help="fit envelope, frequency and norm growth at E < 0")
    sp.add_argument("--alpha", required=True, help="value or comma list")
    sp.add_argument("--b", required=True, help="value or comma list")
    sp.add_argument("--E", required=True, help="value or comma list")
    sp.add_argument("--N", type=int, default=100_000, help="largest block index n of u_{2n}")
    sp.add_argument("--window-min", type=int, default=None)
    common(sp)

    for name, text in (("spectrum", "stabilized positive eigenvalues"),
                       ("bounds", "per-index eigenvalue bounds"),
                       ("counting", "eigenvalue counting bound on an energy grid")):
        sp = sub.add_parser(name, help=text)
        sp.add_argument("--alpha", type=float, required=True)
        sp.add_argument("--b", type=float, required=True)
        sp.add_argument("--n-max", type=int, default=20)
        sp.add_argument("--N", type=int, default=4000)
        sp.add_argument("--tol", type=float, default=1e-6)
        if name != "spectrum":
            sp.add_argument("--cutoff", choices=[c.value for c in Cutoff], default="literal")
        if name == "counting":
            sp.add_argument("--points", type=int, default=200)
        common(sp)

    sp = sub.add_parser("gap", help="randomised spectral-gap inequality")
    sp.add_argument("--alpha", type=float, required=True)
    sp.add_argument("--b", type=float, required=True)
    sp.add_argument("--a", type=float, required=True)
    sp.add_argument("--N", type=int, default=2000)
    sp.add_argument("--trials", type=int, default=1000)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--cutoff", choices=[c.value for c in Cutoff], default="literal")
    sp.add_argument("--no-exact", action="store_true", help="skip the exact minimum")
    common(sp)
    return ap


def _join_negative_values(argv: list[str]) -> list[str]:
    """Let ``--e-grid -3:3:601`` through; argparse would read ``-3:3:601`` as a flag."""
    out, i = [], 0
    while i < len(argv):
        tok = argv[i]
        if tok in VALUE_OPTIONS and i + 1 < len(argv) and argv[i + 1].startswith("-") \
                and len(argv[i + 1]) > 1 and (argv[i + 1][1].isdigit() or argv[i + 1][1] == "."):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
            continue
        out.append(tok)
        i += 1
    return out


VALUE_OPTIONS = {"--e-grid", "--E", "--b", "--btilde", "--alpha", "--anchor", "--a"}


def main(argv=None) -> int:
    ap = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    args = ap.parse_args(_join_negative_values(argv))
    func, default_fmt = COMMANDS[args.command]
    fmt_name = args.format or default_fmt
    t0 = time.perf_counter()
    try:
        rep = func(args)
    except (UsageError, CritjacError, ValueError) as exc:
        print(f"critjac {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    metadata = {"critjac": __version__, "numpy": np.__version__,
                "python": platform.python_version()}
    if args.timing:
        metadata["elapsed_s"] = time.perf_counter() - t0

    has_table = bool(rep.results) or args.command != "discriminant"
    text = render(rep, fmt_name, metadata) if has_table else None
    if text is not None and args.output:
        write_atomic(args.output, text)
    summary_stream = sys.stderr if (text is not None and not args.output) else sys.stdout
    if text is not None and not args.output:
        sys.stdout.write(text)
    for line in rep.summary:
        print(line, file=summary_stream)
    return EXIT_OK if rep.passed else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
