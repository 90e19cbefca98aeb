"""Positive-energy spectral analysis on finite sections.

Eigenvalues come from Sturm-count bisection on the Dirichlet-cut truncation
and are accepted once they agree between sizes ``N`` and ``2N``. The module
also provides the quadratic-form checks behind the discrete-spectrum bounds:
the spectral-gap inequality on ``H_a^(2)``, single-site and alternating
block test functions, and a Gram-matrix certificate that turns test
functions into eigenvalue counts.

Site ``n`` (1-based, as in the operator) is stored at array position ``n - 1``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np
from scipy import linalg as sla

from .errors import (
    BoundViolation,
    DomainError,
    InsufficientStabilization,
    NotStabilized,
    SupportViolation,
    WindowTooSmall,
)
from .model import ModelParams, coefficient_arrays

ZERO_PIVOT_SHIFT = 2.0**-40
SQRT6 = math.sqrt(6.0)


class Cutoff(str, enum.Enum):
    """Which odd sites span ``H_a^(1)``.

    ``literal``: ``2n - 1`` with ``n <= (2a/b)**(1/alpha) / 2``.
    ``strict``: odd ``k`` with ``k < (2a/b)**(1/alpha)``, i.e. every odd site
    where ``b_k < 2a``. The gap inequality needs ``b_k >= 2a`` on all odd
    sites of ``H_a^(2)``, which only the strict form guarantees.
    """

    LITERAL = "literal"
    STRICT = "strict"


@dataclass(frozen=True)
class TruncatedJacobi:
    diag: np.ndarray
    offdiag: np.ndarray

    def __post_init__(self):
        if self.offdiag.size != self.diag.size - 1:
            raise ValueError("offdiag must have length dim - 1")
        if np.any(self.offdiag <= 0):
            raise ValueError("off-diagonal entries must be strictly positive")

    @property
    def dim(self) -> int:
        return self.diag.size

    @classmethod
    def from_params(cls, p: ModelParams, N: int) -> "TruncatedJacobi":
        if N < 2:
            raise ValueError("truncation size must be at least 2")
        a, b = coefficient_arrays(p, N)
        return cls(diag=b[1:].copy(), offdiag=a[1:N].copy())

    def dense(self) -> np.ndarray:
        return np.diag(self.diag) + np.diag(self.offdiag, 1) + np.diag(self.offdiag, -1)

    def matvec(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        d = self.diag.reshape((-1,) + (1,) * (x.ndim - 1))
        o = self.offdiag.reshape((-1,) + (1,) * (x.ndim - 1))
        y = d * x
        y[:-1] += o * x[1:]
        y[1:] += o * x[:-1]
        return y

    def gershgorin(self) -> tuple[float, float]:
        r = np.zeros(self.dim)
        r[:-1] += self.offdiag
        r[1:] += self.offdiag
        return float(np.min(self.diag - r)), float(np.max(self.diag + r))

    @property
    def scale(self) -> float:
        lo, hi = self.gershgorin()
        return max(abs(lo), abs(hi), 1.0)


def _sturm_raw(diag: np.ndarray, off2: np.ndarray, x: np.ndarray):
    d = diag[0] - x
    neg = (d < 0).astype(np.int64)
    hit = d == 0
    d = np.where(hit, 1.0, d)
    for i in range(1, diag.size):
        d = (diag[i] - x) - off2[i - 1] / d
        neg += d < 0
        z = d == 0
        if z.any():
            hit |= z
            d = np.where(z, 1.0, d)
    return neg, hit


def sturm_count(T: TruncatedJacobi, x) -> np.ndarray | int:
    """Number of eigenvalues strictly below ``x`` (scalar or array).

    A shift that produces an exactly zero pivot is moved down by
    ``2**-40 * scale`` and recounted.
    """
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    off2 = T.offdiag**2
    counts, hit = _sturm_raw(T.diag, off2, xs)
    step = ZERO_PIVOT_SHIFT * T.scale
    tries = 0
    while hit.any() and tries < 8:
        tries += 1
        redo = np.flatnonzero(hit)
        c, h = _sturm_raw(T.diag, off2, xs[redo] - tries * step)
        counts[redo] = c
        hit[:] = False
        hit[redo] = h
    return int(counts[0]) if np.ndim(x) == 0 else counts


def eigs_by_index(T: TruncatedJacobi, indices, tol: float | None = None,
                  rtol: float = 1e-10, max_iter: int = 200) -> np.ndarray:
    """Bisection for the eigenvalues with the given 0-based sorted indices.

    Each bracket is shrunk to width ``<= tol`` (absolute) when ``tol`` is
    given, else to ``rtol * max(1, |lambda|)``.
    """
    idx = np.atleast_1d(np.asarray(indices, dtype=np.int64))
    if idx.size == 0:
        return np.zeros(0)
    if np.any(idx < 0) or np.any(idx >= T.dim):
        raise IndexError("eigenvalue index out of range")
    glo, ghi = T.gershgorin()
    L = np.full(idx.size, glo - 1e-12 * T.scale)
    H = np.full(idx.size, ghi + 1e-12 * T.scale)
    for _ in range(max_iter):
        width = H - L
        lim = tol if tol is not None else rtol * np.maximum(1.0, np.maximum(abs(L), abs(H)))
        active = width > lim
        if not active.any():
            break
        act = np.flatnonzero(active)
        mid = 0.5 * (L[act] + H[act])
        stuck = (mid <= L[act]) | (mid >= H[act])
        if stuck.all():
            break
        c = sturm_count(T, mid)
        left = c > idx[act]
        H[act] = np.where(left, mid, H[act])
        L[act] = np.where(left, L[act], mid)
    return 0.5 * (L + H)


def eigs_in_interval(T: TruncatedJacobi, lo: float, hi: float, tol: float | None = None) -> np.ndarray:
    """All eigenvalues in ``[lo, hi)``, sorted; count is ``N(hi) - N(lo)``."""
    if not lo < hi:
        raise ValueError("need lo < hi")
    c_lo, c_hi = sturm_count(T, lo), sturm_count(T, hi)
    if tol is None:
        tol = 1e-10 * max(1.0, abs(lo), abs(hi))
    return eigs_by_index(T, np.arange(c_lo, c_hi), tol=tol)


def inverse_iteration(T: TruncatedJacobi, lam: float, steps: int = 3, seed: int = 0) -> np.ndarray:
    """Unit eigenvector estimate for an eigenvalue approximation ``lam``."""
    n = T.dim
    shift = lam + 4 * np.finfo(float).eps * T.scale
    ab = np.zeros((3, n))
    ab[0, 1:] = T.offdiag
    ab[1] = T.diag - shift
    ab[2, :-1] = T.offdiag
    w = np.random.default_rng(seed).standard_normal(n)
    w /= np.linalg.norm(w)
    for _ in range(steps):
        w = sla.solve_banded((1, 1), ab, w, check_finite=False)
        w /= np.linalg.norm(w)
    return w


def eigen_residual(T: TruncatedJacobi, lam: float, w: np.ndarray) -> float:
    return float(np.linalg.norm(T.matvec(w) - lam * w) / np.linalg.norm(w))


class Side(str, enum.Enum):
    POSITIVE = "positive"
    NEGATIVE = "negative"


@dataclass(frozen=True)
class EigenReport:
    """Eigenvalues nearest zero on one side, ordered by distance from zero."""

    eigenvalues: np.ndarray
    truncation_sizes: tuple[int, int]
    stabilized_count: int
    tolerance: float
    side: Side = Side.POSITIVE
    discrepancies: np.ndarray | None = None

    def count_below(self, E: float) -> int:
        return int(np.sum(self.eigenvalues < E))


def side_eigenvalues(T: TruncatedJacobi, count: int, side: Side | str = Side.POSITIVE,
                     rtol: float = 1e-12) -> np.ndarray:
    """The first ``count`` eigenvalues of ``T`` on the given side of zero."""
    side = Side(side)
    c0 = sturm_count(T, 0.0)
    if side is Side.POSITIVE:
        idx = c0 + np.arange(count)
        if idx.size and idx[-1] >= T.dim:
            raise NotStabilized(f"only {T.dim - c0} non-negative eigenvalues in truncation")
    else:
        idx = c0 - 1 - np.arange(count)
        if idx.size and idx[-1] < 0:
            raise NotStabilized(f"only {c0} negative eigenvalues in truncation")
    return eigs_by_index(T, idx, rtol=rtol)


def stabilized_positive_eigs(p: ModelParams, n_max: int, N: int, tol: float = 1e-6,
                             side: Side | str = Side.POSITIVE) -> EigenReport:
    """Eigenvalues from truncations ``N`` and ``2N`` agreeing to
    ``tol * max(1, |E|)``; returns the longest stabilized prefix (values at 2N)."""
    side = Side(side)
    sizes = (int(N), 2 * int(N))
    e1 = side_eigenvalues(TruncatedJacobi.from_params(p, sizes[0]), n_max, side)
    e2 = side_eigenvalues(TruncatedJacobi.from_params(p, sizes[1]), n_max, side)
    disc = np.abs(e1 - e2)
    good = disc < tol * np.maximum(1.0, np.abs(e2))
    k = int(np.argmin(good)) if not good.all() else n_max
    if k < n_max:
        raise NotStabilized(f"only {k} of {n_max} eigenvalues stabilized between N={sizes[0]} and {sizes[1]}")
    return EigenReport(eigenvalues=e2[:k], truncation_sizes=sizes, stabilized_count=k,
                       tolerance=tol, side=side, discrepancies=disc[:k])


# ---------------------------------------------------------------- bounds


def _require_positive_b(p: ModelParams) -> None:
    if p.b <= 0:
        raise DomainError("positive-energy bounds are stated for b > 0")


def odd_sites_below(x: float) -> int:
    """Number of odd integers ``k >= 1`` with ``k < x``."""
    return 0 if x <= 1 else int(math.ceil((x - 1) / 2))


def counting_bound(p: ModelParams, E: float, cutoff: Cutoff | str = Cutoff.LITERAL) -> float:
    """Upper bound on the number of eigenvalues in ``(0, E)``."""
    _require_positive_b(p)
    x = (E / p.b) ** (1 / p.alpha)
    return 0.5 * x if Cutoff(cutoff) is Cutoff.LITERAL else float(odd_sites_below(x))


class CountingCheck(NamedTuple):
    passed: bool
    count: int
    bound: float
    margin: float


def counting_bound_check(p: ModelParams, E: float, report: EigenReport,
                         cutoff: Cutoff | str = Cutoff.LITERAL) -> CountingCheck:
    if E > report.eigenvalues[-1]:
        raise InsufficientStabilization(f"E = {E} exceeds the last stabilized eigenvalue")
    count = report.count_below(E)
    bound = counting_bound(p, E, cutoff)
    return CountingCheck(count <= bound, count, bound, bound - count)


def lower_bound(p: ModelParams, n: int, cutoff: Cutoff | str = Cutoff.LITERAL) -> float:
    if Cutoff(cutoff) is Cutoff.LITERAL:
        return 2**p.alpha * p.b * n**p.alpha
    return p.b * (2 * n - 1) ** p.alpha


def upper_bound_constant(alpha: float) -> float:
    """Factor of ``b n**alpha`` in the single-site upper bound (valid for b >= sqrt 6)."""
    return 2 ** (2 + alpha) / (3 ** (1 / alpha) - 1) ** alpha


def upper_bound(p: ModelParams, n: int) -> float | None:
    if p.b * p.b < 6:
        return None
    return upper_bound_constant(p.alpha) * p.b * n**p.alpha


class BoundRow(NamedTuple):
    n: int
    value: float
    lower: float
    upper: float | None
    ratio: float
    lower_ok: bool
    upper_ok: bool | None


def eigenvalue_bounds_check(p: ModelParams, report: EigenReport,
                            cutoff: Cutoff | str = Cutoff.LITERAL,
                            raise_on_violation: bool = True) -> list[BoundRow]:
    """Per-index lower/upper bound check.

    ``ratio`` is ``E_n / (b**(1 - 2 alpha) n**alpha)``, reported for every row;
    its boundedness is the only checkable content when ``b < sqrt 6``.
    """
    _require_positive_b(p)
    rows = []
    for i, E in enumerate(report.eigenvalues.tolist(), start=1):
        lo = lower_bound(p, i, cutoff)
        hi = upper_bound(p, i)
        ratio = E / (p.b ** (1 - 2 * p.alpha) * i**p.alpha)
        row = BoundRow(i, E, lo, hi, ratio, E >= lo, None if hi is None else E <= hi)
        if raise_on_violation:
            if not row.lower_ok:
                raise BoundViolation(i, "lower", E, lo)
            if row.upper_ok is False:
                raise BoundViolation(i, "upper", E, hi)
        rows.append(row)
    return rows


def ratio_spread(rows: Sequence[BoundRow]) -> float:
    r = np.array([row.ratio for row in rows])
    return float(r.max() / r.min())


# ---------------------------------------------------------------- gap inequality


def h1_sites(p: ModelParams, a: float, cutoff: Cutoff | str = Cutoff.LITERAL) -> np.ndarray:
    """Odd sites spanning ``H_a^(1)`` (1-based)."""
    _require_positive_b(p)
    x = (2 * a / p.b) ** (1 / p.alpha)
    if Cutoff(cutoff) is Cutoff.LITERAL:
        n_hi = int(math.floor(0.5 * x))
        return 2 * np.arange(1, n_hi + 1) - 1
    return 2 * np.arange(1, odd_sites_below(x) + 1) - 1


def allowed_sites(p: ModelParams, a: float, N: int, cutoff: Cutoff | str = Cutoff.LITERAL) -> np.ndarray:
    """Sites in ``[1, N - 2]`` outside ``H_a^(1)``."""
    sites = np.arange(1, N - 1)
    return np.setdiff1d(sites, h1_sites(p, a, cutoff))


def validate_h2(p: ModelParams, a: float, psi: np.ndarray, cutoff: Cutoff | str = Cutoff.LITERAL) -> None:
    """Raise if any column of ``psi`` touches a forbidden or boundary site."""
    psi = np.asarray(psi)
    N = psi.shape[0]
    bad = np.setdiff1d(np.arange(1, N + 1), allowed_sites(p, a, N, cutoff))
    if np.any(psi[bad - 1] != 0):
        raise SupportViolation("trial vector is non-zero outside H_a^(2) on [1, N-2]")


@dataclass(frozen=True)
class GapReport:
    a: float
    N: int
    trials: int
    violations: int
    min_ratio: float
    exact_min_ratio: float | None
    forbidden_sites: tuple[int, ...]
    cutoff: Cutoff

    @property
    def passed(self) -> bool:
        return self.violations == 0


def gap_ratios(p: ModelParams, a: float, psi: np.ndarray, cutoff: Cutoff | str = Cutoff.LITERAL) -> np.ndarray:
    """``||(J - a) psi|| / (a ||psi||)`` for each column of ``psi``."""
    validate_h2(p, a, psi, cutoff)
    T = TruncatedJacobi.from_params(p, psi.shape[0])
    img = T.matvec(psi) - a * psi
    return np.linalg.norm(img, axis=0) / (a * np.linalg.norm(psi, axis=0))


def exact_gap_ratio(p: ModelParams, a: float, N: int, cutoff: Cutoff | str = Cutoff.LITERAL) -> float:
    """``min ||(J - a) psi|| / (a ||psi||)`` over ``H_a^(2)`` vectors on ``[1, N - 2]``.

    Smallest eigenvalue of the principal submatrix of ``(J_N - a)**2`` on the
    allowed sites; that submatrix keeps bandwidth 2 after compression.
    """
    T = TruncatedJacobi.from_params(p, N)
    d = T.diag - a
    o = T.offdiag
    o_pad = np.concatenate([[0.0], o, [0.0]])
    m0 = d**2 + o_pad[:-1] ** 2 + o_pad[1:] ** 2
    m1 = o * (d[:-1] + d[1:])
    m2 = o[:-1] * o[1:]
    S = allowed_sites(p, a, N, cutoff) - 1

    def entry(i, j):
        i, j = np.minimum(i, j), np.maximum(i, j)
        gap = j - i
        out = np.zeros(i.shape)
        out[gap == 0] = m0[i[gap == 0]]
        out[gap == 1] = m1[i[gap == 1]]
        out[gap == 2] = m2[i[gap == 2]]
        return out

    ab = np.zeros((3, S.size))
    ab[0] = m0[S]
    ab[1, :-1] = entry(S[:-1], S[1:])
    ab[2, :-2] = entry(S[:-2], S[2:])
    lam = sla.eigvals_banded(ab, lower=True, select="i", select_range=(0, 0))[0]
    return math.sqrt(max(lam, 0.0)) / a


def gap_inequality_check(p: ModelParams, a: float, N: int = 2000, trials: int = 1000,
                         seed: int = 0, cutoff: Cutoff | str = Cutoff.LITERAL,
                         exact: bool = True, rel_tol: float = 1e-12) -> GapReport:
    """Random dense ``H_a^(2)`` vectors, entries uniform in ``[-1, 1]``."""
    cutoff = Cutoff(cutoff)
    rng = np.random.default_rng(seed)
    mask = np.zeros(N, dtype=bool)
    mask[allowed_sites(p, a, N, cutoff) - 1] = True
    psi = rng.uniform(-1.0, 1.0, size=(N, trials)) * mask[:, None]
    ratios = gap_ratios(p, a, psi, cutoff)
    viol = int(np.sum(ratios < 1.0 - rel_tol))
    ex = exact_gap_ratio(p, a, N, cutoff) if exact else None
    return GapReport(a, N, trials, viol, float(ratios.min()), ex,
                     tuple(int(s) for s in h1_sites(p, a, cutoff)), cutoff)


# ---------------------------------------------------------------- test functions


def column_energy(p: ModelParams, sites: Sequence[int], values: Sequence[float], a: float) -> tuple[float, float]:
    """``(||(J - a) f||**2, ||f||**2)`` for finitely supported ``f`` on the infinite matrix."""
    sites = np.asarray(sites, dtype=np.int64)
    values = np.asarray(values, dtype=float)
    L = int(sites.max()) + 2
    f = np.zeros(L)
    f[sites - 1] = values
    T = TruncatedJacobi.from_params(p, L)
    g = T.matvec(f) - a * f
    return float(g @ g), float(f @ f)


def delta_test_energy(p: ModelParams, m: int, a: float) -> float:
    """``||(J - a) delta_{2m-1}||**2 - a**2`` in closed form."""
    if 2 * m - 1 < 3:
        raise ValueError("need 2m - 1 >= 3")
    al, b = p.alpha, p.b
    k = 2 * m - 1
    return (k - 1) ** (2 * al) + k ** (2 * al) + (b * k**al - a) ** 2 - a * a


def window_bounds(p: ModelParams, a: float) -> tuple[float, float]:
    """Open site window where ``|b k**alpha - a| < a / 2``."""
    _require_positive_b(p)
    return (a / (2 * p.b)) ** (1 / p.alpha), (3 * a / (2 * p.b)) ** (1 / p.alpha)


def window_odd_sites(p: ModelParams, a: float) -> np.ndarray:
    lo, hi = window_bounds(p, a)
    first = max(1, int(math.floor(lo)) + 1)
    if first % 2 == 0:
        first += 1
    ks = np.arange(first, int(math.ceil(hi)), 2)
    return ks[(ks > lo) & (ks < hi)]


def single_site_level(p: ModelParams, n: int) -> float:
    """Smallest ``a`` for which the window holds ``n`` odd sites by the width estimate."""
    return 2 * p.b * (2 * n / (3 ** (1 / p.alpha) - 1)) ** p.alpha


def window_width(p: ModelParams, a: float, n: int) -> float:
    """Width of one of ``n`` equal subintervals of the window."""
    lo, hi = window_bounds(p, a)
    return (hi - lo) / n


@dataclass(frozen=True)
class BlockTestFunction:
    k: int
    sites: np.ndarray
    values: np.ndarray
    norm2: float
    energy: float
    a: float
    odd_energy: float  # ||(B - a) f||**2, the part living on the support itself

    @property
    def satisfied(self) -> bool:
        return self.energy <= self.a * self.a * self.norm2

    @property
    def offdiag_energy(self) -> float:
        """Even-site part ``||J_A f||**2``; orthogonal to the odd-site part."""
        return self.energy - self.odd_energy


def block_test_function(p: ModelParams, a: float, n: int, k: int,
                        C: float | None = None) -> BlockTestFunction:
    """Alternating +-1 on the odd sites of the ``k``-th of ``n`` equal subintervals.

    Raises ``WindowTooSmall`` when the subinterval width is below 2. If a
    calibrated constant ``C`` is given and ``a >= C b**(1-2 alpha) n**alpha``,
    a failing energy inequality raises ``BoundViolation``.
    """
    if not 1 <= k <= n:
        raise ValueError("need 1 <= k <= n")
    width = window_width(p, a, n)
    if width < 2:
        raise WindowTooSmall(f"subinterval width {width:.4g} < 2")
    lo, hi = window_bounds(p, a)
    left, right = lo + (k - 1) * width, lo + k * width
    ks = window_odd_sites(p, a)
    sites = ks[(ks >= left) & (ks < right)] if k < n else ks[ks >= left]
    if sites.size == 0:
        raise WindowTooSmall(f"subinterval {k} holds no odd site")
    values = np.where(np.arange(sites.size) % 2 == 0, 1.0, -1.0)
    energy, norm2 = column_energy(p, sites, values, a)
    odd = float(np.sum(((p.b * sites.astype(float) ** p.alpha - a) * values) ** 2))
    f = BlockTestFunction(k, sites, values, norm2, energy, a, odd)
    if C is not None and a >= C * p.b ** (1 - 2 * p.alpha) * n**p.alpha and not f.satisfied:
        raise BoundViolation(k, "energy", energy, a * a * norm2)
    return f


def block_remainder_scale(p: ModelParams, a: float, n: int) -> float:
    """Bracket multiplying ``const`` in the remainder estimate for block functions."""
    al, b = p.alpha, p.b
    return (3 * a / (2 * b)) ** 2 + window_width(p, a, n) * (a / (2 * b)) ** (2 * (al - 1) / al)


@dataclass(frozen=True)
class BlockCalibration:
    const: float
    C: float
    a: float
    conditions: dict
    all_satisfied: bool


def calibrate_block_constant(p: ModelParams, n: int, max_rounds: int = 30) -> BlockCalibration:
    """Measure the remainder constant and the resulting threshold ``C``.

    ``const`` is the largest observed ratio of the even-site energy of a block
    function to its remainder bracket. ``a`` is the smallest level meeting the
    three sufficient conditions (width >= 2 and the two remainder
    conditions) with that constant; ``C = a / (b**(1-2 alpha) n**alpha)``.
    """
    _require_positive_b(p)
    al, b = p.alpha, p.b
    K = 1.5 ** (1 / al) - 0.5 ** (1 / al)
    base = b ** (1 - 2 * al) * n**al
    a_width = b * (2 * n / K) ** al * (1 + 1e-9)

    def conds(const):
        return {
            "width": a_width,
            "remainder_outer": (18 * const / K) ** al * base,
            "remainder_inner": (8 * const) ** (al / 2) * (2 * b) ** (1 - al),
        }

    a = a_width
    const = 0.0
    for _ in range(max_rounds):
        fs = [block_test_function(p, a, n, k) for k in range(1, n + 1)]
        scale = block_remainder_scale(p, a, n)
        const = max(const, max(f.offdiag_energy / scale for f in fs))
        a_new = max(conds(const).values())
        if a_new <= a * (1 + 1e-12):
            break
        a = a_new
    fs = [block_test_function(p, a, n, k) for k in range(1, n + 1)]
    return BlockCalibration(const, a / base, a, conds(const), all(f.satisfied for f in fs))


class Certificate(NamedTuple):
    count: int
    max_ratio: float
    certified: bool


def certify_test_functions(p: ModelParams, a: float, functions: Sequence[tuple[Sequence[int], Sequence[float]]]) -> Certificate:
    """Gram-matrix certificate: if ``||(J - a) f||**2 <= a**2 ||f||**2`` on the
    span of ``functions``, then ``J`` has at least ``len(functions)``
    eigenvalues in ``[0, 2a]``. ``max_ratio`` is the largest generalised
    eigenvalue of the image Gram matrix over the plain Gram matrix, over ``a**2``."""
    L = max(int(np.max(s)) for s, _ in functions) + 2
    F = np.zeros((L, len(functions)))
    for j, (s, v) in enumerate(functions):
        F[np.asarray(s, dtype=np.int64) - 1, j] = v
    T = TruncatedJacobi.from_params(p, L)
    G = F.T @ F
    img = T.matvec(F) - a * F
    H = img.T @ img
    lam = sla.eigh(H, G, eigvals_only=True)
    ratio = float(lam.max() / (a * a))
    return Certificate(len(functions), ratio, ratio <= 1.0)
