"""Quadratic exponential sums and the Fejér-window counting machinery.

Complex sums are accumulated with ``math.fsum`` on the real and imaginary
parts separately, and every phase is reduced mod 1 before it is scaled
by 2*pi, so the per-term error stays at a few ulps.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple

import numpy as np

from ._parallel import parallel_map
from .core import conditional_schedule
from .exact import as_fraction, is_square, isqrt, jacobi, mod_inverse

log = logging.getLogger(__name__)

TWO_PI = 2 * math.pi
MAX_TERMS = 10**6
ULP = 2.0**-53
# per-term phase error allowed before a query is refused
ROUNDOFF_LIMIT = 1e-9
RATIO_ALERT = 100.0


class RoundoffError(ValueError):
    """Predicted floating-point error of a sum exceeds the allowed budget."""


def _fsum_exp(phase: np.ndarray, weight: np.ndarray | None = None) -> complex:
    """Sum of weight * e(phase) for phases already reduced to [0, 1)."""
    ang = TWO_PI * phase
    re, im = np.cos(ang), np.sin(ang)
    if weight is not None:
        re, im = re * weight, im * weight
    return complex(math.fsum(re.ravel()), math.fsum(im.ravel()))


def _frac_linear(coef: float, n: np.ndarray) -> np.ndarray:
    # {coef * n} with coef reduced first so the product stays small
    return np.mod(math.fmod(coef, 1.0) * n, 1.0)


def _phase_error(lam: float, mu: float, H: int, K: int) -> float:
    return TWO_PI * (abs(math.fmod(lam, 1.0)) * H + abs(math.fmod(mu, 1.0)) * K + 4) * ULP


def gauss_sum(a: int, b: int, q: int) -> complex:
    """G(a, b; q) = sum over d mod q of e((a d**2 + b d) / q)."""
    if q < 1:
        raise ValueError("q must be >= 1")
    if q > MAX_TERMS:
        raise ValueError(f"q={q} exceeds {MAX_TERMS} terms")
    d = np.arange(q, dtype=np.int64)
    r = ((a % q) * (d * d % q) + (b % q) * d) % q
    return _fsum_exp(r / q)


@dataclass(frozen=True)
class ExpSumQuery:
    a: int
    q: int
    H: float
    K: float
    lam: float = 0.0
    mu: float = 0.0

    @property
    def h_max(self) -> int:
        return math.floor(self.H)

    @property
    def k_count(self) -> int:
        return max(math.ceil(self.K), 0)

    def problems(self) -> list[str]:
        """Reasons this query falls outside the probe's hypotheses."""
        out = []
        if self.q < 2:
            out.append("q < 2")
        if self.q % 2 == 0:
            out.append("q even")
        if is_square(self.q):
            out.append("q is a perfect square")
        if math.gcd(self.a, self.q) != 1:
            out.append("gcd(a, q) > 1")
        if self.H < 1 or self.K < 1:
            out.append("H or K below 1")
        return out


def _characters(q: int):
    """Jacobi symbols and inverses for residues 0..q-1 (inverse 0 when not a unit)."""
    chi = np.array([jacobi(h, q) for h in range(q)], dtype=np.float64)
    inv = np.array([mod_inverse(h, q) if chi[h] else 0 for h in range(q)], dtype=np.int64)
    return chi, inv


def salie_sum(query: ExpSumQuery) -> complex:
    """Twisted incomplete Salié sum, evaluated term by term.

    sum over 1 <= h <= H, (h, q) = 1, of e(lam h) (h/q)
        times sum over 0 <= k < K of e(mu k) e(a hbar k**2 / q).
    """
    a, q = query.a, query.q
    if q < 1 or q % 2 == 0:
        raise ValueError(f"salie_sum needs odd q, got {q}")
    H, K = query.h_max, query.k_count
    if H < 1 or K < 1:
        return 0j
    if H * K > MAX_TERMS:
        raise ValueError(f"{H * K} terms exceeds {MAX_TERMS}")
    if _phase_error(query.lam, query.mu, H, K) > ROUNDOFF_LIMIT:
        raise RoundoffError(f"phase roundoff too large for {query}")
    h = np.arange(1, H + 1, dtype=np.int64)
    hs = [int(v) for v in h if math.gcd(int(v), q) == 1]
    if not hs:
        return 0j
    h = np.array(hs, dtype=np.int64)
    chi = np.array([jacobi(v, q) for v in hs], dtype=np.float64)
    hbar = np.array([mod_inverse(v, q) for v in hs], dtype=np.int64)
    k = np.arange(K, dtype=np.int64)
    r = ((a * hbar % q)[:, None] * (k * k % q)[None, :]) % q
    phase = np.mod(_frac_linear(query.lam, h)[:, None]
                   + _frac_linear(query.mu, k)[None, :] + r / q, 1.0)
    weight = np.broadcast_to(chi[:, None], phase.shape)
    return _fsum_exp(phase, weight)


class _InnerTable:
    """T[c] = sum over 0 <= k < K of e(mu k + c k**2 / q), for every residue c."""

    def __init__(self, q: int, K: int, mu: float):
        k = np.arange(K, dtype=np.int64)
        lin = _frac_linear(mu, k)
        ksq = k * k % q
        self.values = np.empty(q, dtype=np.complex128)
        for c in range(q):
            self.values[c] = _fsum_exp(np.mod(lin + (c * ksq % q) / q, 1.0))


def salie_sum_factored(query: ExpSumQuery, table: _InnerTable | None = None,
                       chars=None) -> complex:
    """Same sum as ``salie_sum``, grouping h by the residue a*hbar mod q."""
    a, q = query.a, query.q
    if q < 1 or q % 2 == 0:
        raise ValueError(f"salie_sum needs odd q, got {q}")
    H, K = query.h_max, query.k_count
    if H < 1 or K < 1:
        return 0j
    if _phase_error(query.lam, query.mu, H, K) > ROUNDOFF_LIMIT:
        raise RoundoffError(f"phase roundoff too large for {query}")
    table = table or _InnerTable(q, K, query.mu)
    chi, inv = chars or _characters(q)
    h = np.arange(1, H + 1, dtype=np.int64)
    res = h % q
    keep = chi[res] != 0
    h, res = h[keep], res[keep]
    inner = table.values[a * inv[res] % q]
    tw = chi[res] * np.exp(1j * TWO_PI * _frac_linear(query.lam, h))
    prod = tw * inner
    return complex(math.fsum(prod.real), math.fsum(prod.imag))


def conjectured_bound(H, K, q, eps) -> float:
    """(sqrt(HK) + H**(3/4) + K + HK/sqrt(q) + K**2/sqrt(q)) * q**eps."""
    H, K = float(H), float(K)
    rq = math.sqrt(q)
    return (math.sqrt(H * K) + H**0.75 + K + H * K / rq + K * K / rq) * q**eps


@dataclass
class ProbeReport:
    rows: list = field(default_factory=list)
    skipped: list = field(default_factory=list)
    max_ratio: float | None = None
    argmax: ExpSumQuery | None = None

    def alerts(self, threshold: float = RATIO_ALERT) -> list[dict]:
        return [r for r in self.rows if r["ratio"] > threshold]


PROBE_COLUMNS = ["a", "q", "H", "K", "lambda", "mu", "abs_sum", "bound", "ratio"]


def default_probe_grid(q_max: int = 200) -> list[ExpSumQuery]:
    """Odd non-square q <= q_max, a in 1..5 prime to q, H and K in
    {ceil(sqrt q), q, 2q}, lam and mu in {0, 0.3}."""
    grid = []
    for q in range(3, q_max + 1, 2):
        if is_square(q):
            continue
        sizes = sorted({isqrt(q - 1) + 1, q, 2 * q})
        for a in range(1, 6):
            if math.gcd(a, q) != 1:
                continue
            for H in sizes:
                for K in sizes:
                    for lam in (0.0, 0.3):
                        for mu in (0.0, 0.3):
                            grid.append(ExpSumQuery(a, q, H, K, lam, mu))
    return grid


def _probe_modulus(args):
    q, queries, eps = args
    chars = _characters(q)
    tables = {}
    out = []
    for qu in queries:
        key = (qu.k_count, qu.mu)
        if key not in tables:
            tables[key] = _InnerTable(q, qu.k_count, qu.mu)
        s = salie_sum_factored(qu, tables[key], chars)
        bound = conjectured_bound(qu.H, qu.K, q, eps)
        out.append({"a": qu.a, "q": q, "H": qu.H, "K": qu.K, "lambda": qu.lam,
                    "mu": qu.mu, "abs_sum": abs(s), "bound": bound,
                    "ratio": abs(s) / bound})
    return out


def probe_conjecture(grid, eps: float = 0.1, workers: int = 1,
                     alert: float = RATIO_ALERT) -> ProbeReport:
    """|salie_sum| / conjectured_bound for every admissible query.

    Queries are grouped by modulus so inner sums over k are shared; rows
    come back in grid order whatever the worker count.
    """
    report = ProbeReport()
    order, groups = [], {}
    for i, qu in enumerate(grid):
        bad = qu.problems()
        if bad:
            log.warning("skipping %s: %s", qu, ", ".join(bad))
            report.skipped.append((qu, bad))
            continue
        if qu.q not in groups:
            groups[qu.q] = []
            order.append(qu.q)
        groups[qu.q].append((i, qu))
    jobs = [(q, [qu for _, qu in groups[q]], eps) for q in order]
    results = parallel_map(_probe_modulus, jobs, workers)
    indexed = []
    for q, rows in zip(order, results):
        indexed.extend(zip((i for i, _ in groups[q]), rows))
    indexed.sort(key=lambda t: t[0])
    report.rows = [r for _, r in indexed]
    for r in report.rows:
        if report.max_ratio is None or r["ratio"] > report.max_ratio:
            report.max_ratio = r["ratio"]
            report.argmax = ExpSumQuery(r["a"], r["q"], r["H"], r["K"], r["lambda"], r["mu"])
    for r in report.alerts(alert):
        log.warning("ratio %.3f above alert %.1f at %s", r["ratio"], alert, r)
    return report


def fejer_coeff(delta, h: int) -> float:
    """c(h) = delta * (sin(pi delta h) / (pi delta h))**2, with c(0) = delta."""
    delta = float(delta)
    if not 0 < delta < 0.5:
        raise ValueError(f"delta must lie in (0, 1/2), got {delta}")
    if h == 0:
        return delta
    if (delta * h).is_integer():
        return 0.0
    z = math.pi * delta * h
    return delta * (math.sin(z) / z) ** 2


def fejer_coeffs(delta: float, h: np.ndarray) -> np.ndarray:
    """Vectorised ``fejer_coeff``."""
    h = np.asarray(h, dtype=np.float64)
    return delta * np.sinc(delta * h) ** 2


@dataclass(frozen=True)
class FejerWindow:
    """Triangular window of half-width ``delta`` centred at ``lam``, periodised mod 1."""

    delta: float
    lam: float = 0.0

    def __post_init__(self):
        if not 0 < self.delta < 0.5:
            raise ValueError(f"delta must lie in (0, 1/2), got {self.delta}")

    @staticmethod
    def f(x):
        return max(0.0, 1.0 - abs(x))

    def t(self, x):
        return max(0.0, 1.0 - abs(x) / self.delta)

    def g(self, x):
        # delta < 1/2, so only the nearest translate of t can be nonzero
        return self.t(x - math.floor(x + 0.5))

    def g_lambda(self, x):
        return self.g(x - self.lam)

    @staticmethod
    def f_hat(y):
        if y == 0:
            return 1.0
        return (math.sin(math.pi * y) / (math.pi * y)) ** 2

    def coeff(self, h: int) -> float:
        return fejer_coeff(self.delta, h)

    def partial_sum(self, x: np.ndarray, M: int) -> np.ndarray:
        """sum over |h| <= M of c(h) e(-lam h) e(h x), real by symmetry."""
        x = np.asarray(x, dtype=np.float64)
        h = np.arange(1, M + 1, dtype=np.float64)
        c = fejer_coeffs(self.delta, h)
        out = np.full(x.shape, self.delta)
        for lo in range(0, M, 256):
            hh, cc = h[lo:lo + 256], c[lo:lo + 256]
            arg = np.mod(np.outer(x - self.lam, hh), 1.0)
            out += 2 * (np.cos(TWO_PI * arg) * cc).sum(axis=1)
        return out


def tail_bound(delta: float, M: int) -> float:
    """sum over |h| > M of 1 / (pi**2 delta h**2)."""
    inv_sq = math.pi**2 / 6 - math.fsum(1.0 / h**2 for h in range(1, M + 1))
    return 2 * inv_sq / (math.pi**2 * delta)


def window_eval(kind: str, params: FejerWindow | None, x: float) -> float:
    if kind == "f":
        return FejerWindow.f(x)
    if kind == "f_hat":
        return FejerWindow.f_hat(x)
    if params is None:
        raise ValueError(f"{kind} needs a FejerWindow")
    if kind == "t":
        return params.t(x)
    if kind == "g":
        return params.g(x)
    if kind == "g_lambda":
        return params.g_lambda(x)
    raise ValueError(f"unknown window {kind!r}")


class CountResult(NamedTuple):
    count: int
    main_term: float
    N: int
    p: int
    q: int


def _window_test(q: int, lam: Fraction, delta: Fraction):
    # integer form of: ||r/q - lam|| < delta
    lam = lam % 1
    ld, dd = lam.denominator, delta.denominator
    M = q * ld * dd
    L = lam.numerator * q * dd
    W = delta.numerator * q * ld

    def inside(r):
        t = (r * ld * dd - L) % M
        return t < W or M - t < W
    return inside


def fractional_count(p: int, q: int, lam, delta, N: int) -> CountResult:
    """Exact count of 1 <= n <= N with {p n**2 / q} in (lam - delta, lam + delta) mod 1.

    ``lam`` and ``delta`` are taken as exact rationals (floats through
    their decimal repr). delta = 1/2 is accepted: the window is then the
    whole circle less one point.
    """
    if q < 1 or math.gcd(p, q) != 1:
        raise ValueError(f"need gcd(p, q) = 1, got p={p}, q={q}")
    lam, delta = as_fraction(lam), as_fraction(delta)
    if not 0 < delta <= Fraction(1, 2):
        raise ValueError(f"delta must lie in (0, 1/2], got {delta}")
    if N < 0:
        raise ValueError("N must be >= 0")
    inside = _window_test(q, lam, delta)
    count = sum(1 for n in range(1, N + 1) if inside(p * n * n % q))
    return CountResult(count, float(delta * N), N, p, q)


class InequalityCheck(NamedTuple):
    lhs: float
    rhs: float
    passed: bool


def counting_inequality_check(p: int, q: int, lam, delta, N: int) -> InequalityCheck:
    """1 + 2 S against sum over |n| <= N of f(n/N) g_lam(p n**2 / q), both exact."""
    lam, delta = as_fraction(lam), as_fraction(delta)
    S = fractional_count(p, q, lam, delta, N).count
    lhs = 1 + 2 * S

    def g(r):
        t = (Fraction(r, q) - lam) % 1
        dist = min(t, 1 - t)
        return max(Fraction(0), 1 - dist / delta)

    rhs = g(0)
    for n in range(1, N):
        rhs += 2 * (1 - Fraction(n, N)) * g(p * n * n % q)
    return InequalityCheck(float(lhs), float(rhs), lhs >= rhs - Fraction(1, 10**9))


def choose_modulus(x: int) -> int:
    """2 floor(sqrt x) + 1, or + 3 when the first choice is a square."""
    if x < 1:
        raise ValueError("x must be >= 1")
    q = 2 * isqrt(x) + 1
    if is_square(q):
        q += 2
    assert q % 2 and not is_square(q)
    return q


@dataclass
class MainTermReport:
    x: int
    q: int
    N: int
    delta: Fraction
    rows: list = field(default_factory=list)

    @property
    def empty_windows(self) -> list:
        return [r["lambda"] for r in self.rows if r["count"] == 0]


def main_term_compare(x: int, theta, eps, lambda_grid) -> MainTermReport:
    """Counts S(1/q; lam, Delta/2, N) against the main term Delta N / 4.

    q = choose_modulus(x), N = floor(x**theta), Delta = x**-(theta - 2 eps).
    """
    theta, eps = as_fraction(theta), as_fraction(eps)
    if not Fraction(1, 4) < theta < Fraction(1, 3):
        raise ValueError(f"theta must lie in (1/4, 1/3), got {theta}")
    q = choose_modulus(x)
    N, delta = conditional_schedule(x, theta, eps)
    if q <= 2 * N:
        raise ValueError(f"need q > 2N, got q={q}, N={N}")
    rep = MainTermReport(x, q, N, delta)
    for lam in lambda_grid:
        res = fractional_count(1, q, lam, delta / 2, N)
        rep.rows.append({"lambda": lam, "count": res.count,
                         "main_term": float(delta * N / 4),
                         "empty": res.count == 0})
        if res.count == 0:
            log.warning("empty window at lambda=%s for x=%d", lam, x)
    return rep
