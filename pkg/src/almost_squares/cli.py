"""Command-line front end.

Every subcommand writes a header row and data rows (CSV) or one JSON
object per line. Exit codes: 0 success, 1 runtime error, 2 usage error,
3 the experiment ran but its pass/fail property failed.
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import sys
from dataclasses import dataclass, field
from fractions import Fraction

from . import core, expsums, gaps
from ._parallel import parallel_map
from .exact import FixedPoint, as_fraction, power_bounds

log = logging.getLogger("almost_squares")

EXIT_OK, EXIT_ERROR, EXIT_USAGE, EXIT_FAILED = 0, 1, 2, 3

SUBCOMMANDS = ("find", "scan", "quarter", "product-gap", "multtable",
               "two-squares", "salie-probe", "fractional-count", "fit")


@dataclass
class Command:
    subcommand: str
    params: dict = field(default_factory=dict)
    output: str | None = None
    format: str = "csv"
    workers: int = 1


class Table:
    """Ordered rows with fixed columns."""

    def __init__(self, columns):
        self.columns = list(columns)
        self.rows = []
        self.failed = False

    def add(self, **row):
        self.rows.append(row)


def _cell(v):
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (FixedPoint, Fraction)):
        return str(v)
    return repr(v) if isinstance(v, float) else str(v)


def _json_value(v):
    if isinstance(v, FixedPoint):
        return str(v)
    if isinstance(v, Fraction):
        return str(v)
    return v


def write_table(table: Table, fmt: str, stream):
    if fmt == "csv":
        w = csv.writer(stream, lineterminator="\n")
        w.writerow(table.columns)
        for row in table.rows:
            w.writerow([_cell(row.get(c)) for c in table.columns])
    else:
        for row in table.rows:
            stream.write(json.dumps({c: _json_value(row.get(c)) for c in table.columns}) + "\n")


# argument types --------------------------------------------------------

def _nonneg_int(s):
    try:
        v = int(s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {s!r}")
    if v < 0:
        raise argparse.ArgumentTypeError(f"must be >= 0: {s}")
    return v


def _pos_int(s):
    v = _nonneg_int(s)
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1: {s}")
    return v


def _rational(s):
    try:
        return as_fraction(s)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {s!r}")


def _pos_rational(s):
    v = _rational(s)
    if v <= 0:
        raise argparse.ArgumentTypeError(f"must be positive: {s}")
    return v


def _theta(s):
    v = _rational(s)
    if not 0 <= v < Fraction(1, 2):
        raise argparse.ArgumentTypeError(f"theta must lie in [0, 1/2): {s}")
    return v


def _real(s):
    try:
        v = float(s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {s!r}")
    if not math.isfinite(v):
        raise argparse.ArgumentTypeError(f"not finite: {s}")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--output", "-o", help="write here instead of stdout")
    common.add_argument("--workers", type=_pos_int, default=1,
                        help="worker processes; output does not depend on it")

    p = argparse.ArgumentParser(
        prog="almost-squares",
        description="Experiments on almost squares n = ab with a, b near sqrt(x).")
    sub = p.add_subparsers(dest="subcommand", required=True, metavar="COMMAND")

    s = sub.add_parser("find", parents=[common],
                       help="best almost square near one x",
                       description="Find n = ab near x with a, b in the window "
                       "sqrt(x) +- c2 x^theta. Methods: exhaustive factor-pair scan "
                       "(brute), difference-of-squares d-search with n = D^2 - d^2 "
                       "(dsearch), or the conditional fractional-window schedule "
                       "N = floor(x^theta), Delta = x^-(theta - 2 eps) (conditional).")
    s.add_argument("--x", type=_pos_int, required=True)
    s.add_argument("--theta", type=_theta, required=True)
    s.add_argument("--c2", type=_pos_rational, default=Fraction(2))
    s.add_argument("--method", choices=("brute", "dsearch", "conditional"), default="brute")
    s.add_argument("--eps", type=_pos_rational, default=Fraction(1, 100))
    s.add_argument("--d-max", type=_nonneg_int,
                   help="dsearch range end (default floor(c2 x^theta))")

    s = sub.add_parser("scan", parents=[common],
                       help="minimal offsets over a log-spaced x grid",
                       description="For each x on a log-spaced grid, the smallest |x - ab| "
                       "reachable in its window, compared with bound-const * "
                       "x^(1/2 - theta). Probes the exponent f(theta) of the "
                       "almost-square interval problem; at theta = 1/4 this is the "
                       "pigeonhole d-search upper bound.")
    s.add_argument("--x-min", type=_pos_int, required=True)
    s.add_argument("--x-max", type=_pos_int, required=True)
    s.add_argument("--count", type=_pos_int, default=20)
    s.add_argument("--theta", type=_theta, required=True)
    s.add_argument("--c2", type=_pos_rational, default=Fraction(2))
    s.add_argument("--method", choices=("brute", "dsearch"), default="brute")
    s.add_argument("--bound-const", type=_pos_rational, default=Fraction(10))
    s.add_argument("--block", type=_pos_int, default=1,
                   help="report the worst offset over x .. x+block-1")

    s = sub.add_parser("quarter", parents=[common],
                       help="quarter-point adversary for small windows",
                       description="At x nearest (k + 1/4)^2, where sqrt(x) sits a quarter "
                       "away from an integer, check that every window product misses x "
                       "by at least sqrt(x)/4 - c2^2 x^(2 theta) - 1 (theta < 1/4).")
    s.add_argument("--k", type=_pos_int, nargs="+", required=True)
    s.add_argument("--theta", type=_theta, required=True)
    s.add_argument("--c2", type=_pos_rational, default=Fraction(1))

    s = sub.add_parser("product-gap", parents=[common],
                       help="pigeonhole gap between window products",
                       description="Largest gap between consecutive products ab (a, b in "
                       "the window) across [x - c x^(1/2 + theta), x], against the "
                       "counting floor x^(1/2 - theta) / (4c).")
    s.add_argument("--x", type=_pos_int, nargs="+", required=True)
    s.add_argument("--theta", type=_theta, required=True)
    s.add_argument("--c", type=_pos_rational, default=Fraction(1))

    s = sub.add_parser("multtable", parents=[common],
                       help="distinct entries of the n x n multiplication table",
                       description="Count distinct products ab with 1 <= a, b <= n and the "
                       "density count / n^2, which decays like (log n)^-alpha with "
                       "alpha = 1 - log(e log 2)/log 2.")
    s.add_argument("--n", type=_pos_int, nargs="+", required=True)
    s.add_argument("--limit", type=_pos_int, default=gaps.MULT_TABLE_LIMIT)

    s = sub.add_parser("two-squares", parents=[common],
                       help="sums of two squares near x, or their largest gap",
                       description="With --x: the nearest D^2 + d^2 to x over d <= d-max, "
                       "D nearest sqrt(x - d^2), against the bound 4 x^(1/4). "
                       "With --gap LO HI: the widest step between consecutive sums of "
                       "two squares in [LO, HI].")
    mode = s.add_mutually_exclusive_group(required=True)
    mode.add_argument("--x", type=_pos_int, nargs="+")
    mode.add_argument("--gap", type=_nonneg_int, nargs=2, metavar=("LO", "HI"))
    s.add_argument("--d-max", type=_nonneg_int, help="default floor(2 x^(1/4))")

    s = sub.add_parser("salie-probe", parents=[common],
                       help="twisted incomplete Salie sums against the conjectured bound",
                       description="Evaluate the twisted incomplete Salie sum over the "
                       "default grid (odd non-square q <= q-max) and report "
                       "|sum| / ((H K)^(1/2) + H^(3/4) + K + HK/q^(1/2) + K^2/q^(1/2)) q^eps.")
    s.add_argument("--q-max", type=_pos_int, default=200)
    s.add_argument("--eps", type=_real, default=0.1)
    s.add_argument("--alert", type=_real, default=expsums.RATIO_ALERT)
    s.add_argument("--strict", action="store_true",
                   help="exit 3 when any ratio exceeds --alert")

    s = sub.add_parser("fractional-count", parents=[common],
                       help="count n <= N with {p n^2 / q} in a window",
                       description="Exact count S of 1 <= n <= N with {p n^2/q} in "
                       "(lambda - delta, lambda + delta) mod 1, with the Fejer-window "
                       "inequality 1 + 2S >= sum f(n/N) g_lambda(p n^2/q).")
    s.add_argument("--p", type=int, required=True)
    s.add_argument("--q", type=_pos_int, required=True)
    s.add_argument("--lambda", dest="lam", type=_rational, required=True)
    s.add_argument("--delta", type=_pos_rational, required=True)
    s.add_argument("--n", type=_nonneg_int, required=True)

    s = sub.add_parser("fit", parents=[common],
                       help="fit the offset exponent from scan output",
                       description="Least-squares slope of log(offset) on log(x) over a "
                       "CSV with x and offset columns (e.g. scan output); offset-0 rows "
                       "are dropped. Estimates the exponent f(theta).")
    s.add_argument("--input", required=True, help="CSV path, or - for stdin")
    return p


def parse_command(argv) -> Command:
    """Parse and validate; argparse exits with status 2 on bad input."""
    parser = build_parser()
    ns = parser.parse_args(argv)
    params = {k: v for k, v in vars(ns).items()
              if k not in ("subcommand", "format", "output", "workers")}
    sc = ns.subcommand
    if sc == "find" and ns.method == "conditional":
        if not Fraction(1, 4) < ns.theta < Fraction(1, 3):
            parser.error("conditional method needs 1/4 < theta < 1/3")
    if sc == "scan" and ns.x_min > ns.x_max:
        parser.error("--x-min must not exceed --x-max")
    if sc == "quarter" and ns.theta >= Fraction(1, 4):
        parser.error("quarter needs theta < 1/4")
    if sc == "multtable" and max(ns.n) > ns.limit:
        parser.error(f"n above --limit {ns.limit}")
    if sc == "two-squares":
        if ns.gap and ns.gap[0] > ns.gap[1]:
            parser.error("--gap needs LO <= HI")
        if ns.x and ns.d_max is not None and any(ns.d_max**2 >= x for x in ns.x):
            parser.error("--d-max squared must be below every x")
    if sc == "fractional-count":
        if math.gcd(ns.p, ns.q) != 1:
            parser.error("--p and --q must be coprime")
        if ns.delta > Fraction(1, 2):
            parser.error("--delta must be at most 1/2")
    return Command(sc, params, ns.output, ns.format, ns.workers)


# subcommand runners ---------------------------------------------------------

def _fixed(v: Fraction) -> FixedPoint:
    return FixedPoint.from_fraction(v, gaps.REPORT_DIGITS)


def _run_find(p, workers):
    t = Table(["x", "a", "b", "n", "offset", "D", "d"])
    x = p["x"]
    if p["method"] == "brute":
        res = core.brute_force_nearest(x, core.search_window(x, p["theta"], p["c2"]))
    elif p["method"] == "dsearch":
        d_hi = p["d_max"]
        if d_hi is None:
            d_hi = math.floor(core.window_radius(x, p["theta"], p["c2"]))
        res = core.d_search(x, 0, d_hi, workers)
    else:
        res = core.conditional_find(x, p["theta"], p["eps"])
    t.add(**res.as_row())
    return t


def _run_scan(p, workers):
    xs = gaps.log_grid(p["x_min"], p["x_max"], p["count"])
    recs = gaps.scan_worst_offset(xs, p["theta"], p["c2"], p["method"], workers, p["block"])
    t = Table(["experiment", "x", "offset", "bound", "pass"])
    for r in recs:
        lo, _ = power_bounds(r.x, Fraction(1, 2) - p["theta"])
        bound = p["bound_const"] * lo
        ok = r.offset <= bound
        t.failed |= not ok
        t.add(experiment=f"scan-{p['method']}", x=r.x, offset=r.offset,
              bound=_fixed(bound), pass_=ok)
    return t


def _quarter_one(args):
    return gaps.quarter_point_check(*args)


def _run_quarter(p, workers):
    res = parallel_map(_quarter_one, [(k, p["theta"], p["c2"]) for k in p["k"]], workers)
    t = Table(["experiment", "x", "offset", "bound", "pass"])
    for r in res:
        t.failed |= not r.passed
        t.add(experiment="quarter", x=r.x, offset=r.min_offset, bound=r.bound, pass_=r.passed)
    return t


def _gap_one(args):
    return gaps.product_gap(*args)


def _run_product_gap(p, workers):
    res = parallel_map(_gap_one, [(x, p["theta"], p["c"]) for x in p["x"]], workers)
    t = Table(["experiment", "x", "offset", "bound", "pass"])
    for x, r in zip(p["x"], res):
        t.failed |= not r.passed
        t.add(experiment="product-gap", x=x, offset=r.max_gap, bound=r.floor, pass_=r.passed)
    return t


def _run_multtable(p, workers):
    t = Table(["n", "count", "density"])
    for n in p["n"]:
        c = gaps.mult_table_count(n, p["limit"])
        t.add(n=n, count=c, density=_fixed(Fraction(c, n * n)))
    return t


def _near_one(args):
    x, d_max = args
    if d_max is None:
        d_max = math.floor(2 * power_bounds(x, Fraction(1, 4))[0])
        while d_max * d_max >= x:
            d_max -= 1
    return gaps.two_squares_near(x, d_max)


def _run_two_squares(p, workers):
    if p["gap"]:
        lo, hi = p["gap"]
        sieve = gaps.two_squares_sieve(hi, workers)
        gap, at = gaps.max_gap_two_squares(lo, hi, sieve)
        t = Table(["lo", "hi", "gap", "at"])
        t.add(lo=lo, hi=hi, gap=gap, at=at)
        return t
    res = parallel_map(_near_one, [(x, p["d_max"]) for x in p["x"]], workers)
    t = Table(["experiment", "x", "offset", "bound", "pass"])
    for x, r in zip(p["x"], res):
        bound = 4 * power_bounds(x, Fraction(1, 4))[0]
        ok = r.offset <= bound
        t.failed |= not ok
        t.add(experiment="two-squares", x=x, offset=r.offset, bound=_fixed(bound), pass_=ok)
    return t


def _run_salie(p, workers):
    grid = expsums.default_probe_grid(p["q_max"])
    rep = expsums.probe_conjecture(grid, p["eps"], workers, p["alert"])
    t = Table(expsums.PROBE_COLUMNS)
    for row in rep.rows:
        t.add(**row)
    if rep.max_ratio is not None:
        log.info("max ratio %.6f at %s", rep.max_ratio, rep.argmax)
    if p["strict"] and rep.alerts(p["alert"]):
        t.failed = True
    return t


def _run_fractional(p, workers):
    res = expsums.fractional_count(p["p"], p["q"], p["lam"], p["delta"], p["n"])
    chk = expsums.counting_inequality_check(p["p"], p["q"], p["lam"], p["delta"], p["n"])
    t = Table(["p", "q", "lambda", "delta", "N", "count", "main_term", "lhs", "rhs", "pass"])
    t.failed = not chk.passed
    t.add(p=res.p, q=res.q, **{"lambda": p["lam"]}, delta=p["delta"], N=res.N,
          count=res.count, main_term=res.main_term, lhs=chk.lhs, rhs=chk.rhs, pass_=chk.passed)
    return t


def _run_fit(p, workers):
    stream = sys.stdin if p["input"] == "-" else open(p["input"], newline="")
    with stream:
        recs = [gaps.GapRecord(int(r["x"]), int(r["offset"])) for r in csv.DictReader(stream)]
    fit = gaps.fit_exponent(recs)
    t = Table(["slope", "intercept", "count"])
    t.add(slope=fit.slope, intercept=fit.intercept, count=fit.count)
    return t


RUNNERS = {
    "find": _run_find, "scan": _run_scan, "quarter": _run_quarter,
    "product-gap": _run_product_gap, "multtable": _run_multtable,
    "two-squares": _run_two_squares, "salie-probe": _run_salie,
    "fractional-count": _run_fractional, "fit": _run_fit,
}


def execute(cmd: Command, stdout=None) -> int:
    try:
        table = RUNNERS[cmd.subcommand](cmd.params, cmd.workers)
    except Exception as exc:
        log.error("%s failed with %s: %s", cmd.subcommand, cmd.params, exc)
        return EXIT_ERROR
    for row in table.rows:
        if "pass_" in row:
            row["pass"] = row.pop("pass_")
    if cmd.output:
        with open(cmd.output, "w", newline="") as fh:
            write_table(table, cmd.format, fh)
    else:
        write_table(table, cmd.format, stdout or sys.stdout)
    if table.failed:
        log.error("%s: property failed for %s", cmd.subcommand, cmd.params)
        return EXIT_FAILED
    return EXIT_OK


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    cmd = parse_command(sys.argv[1:] if argv is None else argv)
    try:
        return execute(cmd)
    except BrokenPipeError:
        # reader went away (e.g. piped into head)
        sys.stderr.close()
        return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
