"""Forward evaluation of solutions of the three-term recurrence

    a_n u_{n+1} + b_n u_n + a_{n-1} u_{n-1} = E u_n

with power-of-two rescaling, so that growing solutions at positive energy do
not overflow. Rescaling by powers of two is exact, so mantissas carry the
same relative precision as an unscaled computation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DegenerateAnchor, OutOfRange
from .model import A0Convention, ModelParams, coefficient_arrays

LN2 = math.log(2.0)
_HI = 1e100
_LO = 1e-100


@dataclass(frozen=True)
class SolutionTrace:
    """Solution values ``u_n`` for ``n`` in ``[start, stop]``.

    ``u_n = values[n - start] * 2**exponents[(n - start) // checkpoint_stride]``.
    """

    values: np.ndarray
    exponents: np.ndarray
    checkpoint_stride: int
    E: float
    boundary: tuple[int, tuple[float, float]]
    params: ModelParams

    @property
    def start(self) -> int:
        return self.boundary[0]

    @property
    def stop(self) -> int:
        return self.start + len(self.values) - 1

    @property
    def log_scale(self) -> np.ndarray:
        """Accumulated natural-log scale per checkpoint block."""
        return self.exponents * LN2

    def _positions(self, n) -> np.ndarray:
        n = np.asarray(n, dtype=np.int64)
        if np.any(n < self.start) or np.any(n > self.stop):
            raise OutOfRange(f"indices must lie in [{self.start}, {self.stop}]")
        return n - self.start

    def scaled(self, n) -> tuple[np.ndarray, np.ndarray]:
        """Mantissas and integer power-of-two exponents at indices ``n``."""
        pos = self._positions(n)
        return self.values[pos], self.exponents[pos // self.checkpoint_stride]

    def u(self, n) -> np.ndarray:
        m, e = self.scaled(n)
        return np.ldexp(m, e)

    def log_abs(self, n) -> np.ndarray:
        m, e = self.scaled(n)
        with np.errstate(divide="ignore"):
            return np.log(np.abs(m)) + e * LN2

    @property
    def indices(self) -> np.ndarray:
        return np.arange(self.start, self.stop + 1)


def _check_anchor(anchor_values) -> tuple[float, float]:
    u0, u1 = (float(x) for x in anchor_values)
    if u0 == 0.0 and u1 == 0.0:
        raise DegenerateAnchor("anchor values are both zero")
    return u0, u1


def solve_recurrence(
    p: ModelParams,
    E: float,
    anchor_index: int = 1,
    anchor_values: Sequence[float] = (1.0, 0.0),
    N: int = 1000,
    checkpoint_stride: int = 64,
) -> SolutionTrace:
    """Solve forward from ``(u_k, u_{k+1})`` at ``k = anchor_index`` up to ``u_N``."""
    u0, u1 = _check_anchor(anchor_values)
    k0 = int(anchor_index)
    if k0 < 0 or (k0 == 0 and p.a0_convention is A0Convention.ZERO):
        raise ValueError("anchor_index must be >= 1 (or 0 under a0 convention 'one')")
    if N <= k0 + 1:
        raise ValueError("N must exceed anchor_index + 1")
    if checkpoint_stride < 1:
        raise ValueError("checkpoint_stride must be positive")

    a, b = coefficient_arrays(p, N)
    al = a.tolist()
    bl = b.tolist()
    E = float(E)
    size = N - k0 + 1
    stride = checkpoint_stride
    vals = [0.0] * size
    exps = [0] * ((size - 1) // stride + 1)
    vals[0], vals[1] = u0, u1
    x, y = u0, u1
    w = 0
    for i in range(1, size - 1):
        k = k0 + i
        nxt = ((E - bl[k]) * y - al[k - 1] * x) / al[k]
        big = max(abs(y), abs(nxt))
        if big > _HI or (0.0 < big < _LO):
            e = math.frexp(big)[1]
            x, y, nxt = math.ldexp(x, -e), math.ldexp(y, -e), math.ldexp(nxt, -e)
            w += e
            blk = i // stride
            if (i + 1) // stride == blk:
                for j in range(blk * stride, i + 1):
                    vals[j] = math.ldexp(vals[j], -e)
                exps[blk] = w
        if not math.isfinite(nxt):
            raise FloatingPointError(f"non-finite value at n = {k + 1}")
        if (i + 1) % stride == 0:
            exps[(i + 1) // stride] = w
        vals[i + 1] = nxt
        x, y = y, nxt
    return SolutionTrace(
        values=np.array(vals),
        exponents=np.array(exps, dtype=np.int64),
        checkpoint_stride=stride,
        E=E,
        boundary=(k0, (u0, u1)),
        params=p,
    )


def orthogonal_polynomial_anchor(p: ModelParams, E: float) -> tuple[float, float]:
    """``(u_1, u_2)`` of the solution with Dirichlet condition ``u_0 = 0``, ``u_1 = 1``."""
    a, b = coefficient_arrays(p, 2)
    return 1.0, (E - b[1]) / a[1]


@dataclass(frozen=True)
class BlockPath:
    """Rescaled ``U_{2k+1} = (u_{2k}, u_{2k+1})`` for ``k = 0..n``."""

    mantissas: np.ndarray  # shape (n + 1, 2)
    exponents: np.ndarray  # shape (n + 1,)

    def vectors(self) -> np.ndarray:
        return np.ldexp(self.mantissas, self.exponents[:, None])


def block_path(p: ModelParams, E: float, U1: Sequence[float], n: int) -> BlockPath:
    """Apply ``B_1, ..., B_n`` to ``U_1 = (u_0, u_1)`` keeping every iterate."""
    x, y = _check_anchor(U1)
    if n < 1:
        raise ValueError("n must be >= 1")
    a, b = coefficient_arrays(p, 2 * n)
    al, bl = a.tolist(), b.tolist()
    E = float(E)
    mant = np.empty((n + 1, 2))
    exps = np.zeros(n + 1, dtype=np.int64)
    mant[0] = (x, y)
    w = 0
    for k in range(1, n + 1):
        o, e_ = 2 * k - 1, 2 * k
        # B_k = T_{2k} T_{2k-1} with T_m = [[0, 1], [r_m, s_m]]
        r1, s1 = -al[o - 1] / al[o], (E - bl[o]) / al[o]
        r2, s2 = -al[e_ - 1] / al[e_], (E - bl[e_]) / al[e_]
        x, y = r1 * x + s1 * y, s2 * r1 * x + (r2 + s2 * s1) * y
        big = max(abs(x), abs(y))
        if big > _HI or (0.0 < big < _LO):
            sh = math.frexp(big)[1]
            x, y = math.ldexp(x, -sh), math.ldexp(y, -sh)
            w += sh
        mant[k] = (x, y)
        exps[k] = w
    return BlockPath(mant, exps)


def propagate_blocks(p: ModelParams, E: float, U1: Sequence[float], n: int) -> tuple[np.ndarray, float]:
    """Rescaled ``(B_n ... B_1) U_1`` and its natural-log scale."""
    path = block_path(p, E, U1, n)
    return path.mantissas[-1].copy(), float(path.exponents[-1] * LN2)


def _block_log_sums(trace: SolutionTrace) -> tuple[np.ndarray, np.ndarray]:
    m2 = trace.values**2
    stride = trace.checkpoint_stride
    nblk = len(trace.exponents)
    pad = np.zeros(nblk * stride)
    pad[: m2.size] = m2
    within = np.cumsum(pad.reshape(nblk, stride), axis=1)
    with np.errstate(divide="ignore"):
        totals = np.log(within[:, -1]) + 2 * trace.exponents * LN2
    prefix = np.logaddexp.accumulate(totals)
    return within, prefix


def partial_norms(trace: SolutionTrace, Ns) -> np.ndarray:
    """``log sum_{start <= n <= N} u_n**2`` for each ``N`` in ``Ns``."""
    pos = trace._positions(Ns)
    within, prefix = _block_log_sums(trace)
    stride = trace.checkpoint_stride
    blk, off = np.divmod(pos, stride)
    with np.errstate(divide="ignore"):
        cur = np.log(within[blk, off]) + 2 * trace.exponents[blk] * LN2
    before = np.where(blk > 0, prefix[np.maximum(blk - 1, 0)], -np.inf)
    return np.logaddexp(before, cur)


def partial_norm(trace: SolutionTrace, N: int) -> float:
    return float(partial_norms(trace, np.array([N]))[0])


def _aligned(trace: SolutionTrace, n: np.ndarray, shift: int, ref: np.ndarray) -> np.ndarray:
    m, e = trace.scaled(n + shift)
    return np.ldexp(m, e - ref)


def recurrence_residuals(trace: SolutionTrace, n) -> np.ndarray:
    """Relative residual of the recurrence at interior indices ``n``."""
    n = np.asarray(n, dtype=np.int64)
    if np.any(n <= trace.start) or np.any(n >= trace.stop):
        raise OutOfRange("residual needs interior indices")
    a, b = coefficient_arrays(trace.params, trace.stop)
    _, ref = trace.scaled(n)
    um, u0, up = (_aligned(trace, n, s, ref) for s in (-1, 0, 1))
    terms = np.stack([a[n] * up, b[n] * u0, a[n - 1] * um, -trace.E * u0])
    num = np.abs(terms.sum(axis=0))
    den = np.abs(terms).sum(axis=0)
    return np.divide(num, den, out=np.zeros_like(num), where=den > 0)


def wronskian(u: SolutionTrace, v: SolutionTrace, n) -> np.ndarray:
    """``a_n (u_n v_{n+1} - u_{n+1} v_n)``; constant in ``n`` for a common energy."""
    n = np.asarray(n, dtype=np.int64)
    a, _ = coefficient_arrays(u.params, int(n.max()) + 1)
    mu0, eu = u.scaled(n)
    mv0, ev = v.scaled(n)
    mu1 = _aligned(u, n, 1, eu)
    mv1 = _aligned(v, n, 1, ev)
    return np.ldexp(a[n] * (mu0 * mv1 - mu1 * mv0), eu + ev)


def wronskian_deviation(u: SolutionTrace, v: SolutionTrace, n, ref: float | None = None) -> np.ndarray:
    """``(W_n - ref) / (a_n (|u_n v_{n+1}| + |u_{n+1} v_n|))``.

    For growing solutions ``W_n`` is a difference of huge terms, so constancy
    can only hold relative to their size; this measures exactly that without
    leaving the mantissa range. ``ref`` defaults to ``W`` at ``n[0]``.
    """
    n = np.asarray(n, dtype=np.int64)
    if ref is None:
        ref = float(wronskian(u, v, n[:1])[0])
    a, _ = coefficient_arrays(u.params, int(n.max()) + 1)
    mu0, eu = u.scaled(n)
    mv0, ev = v.scaled(n)
    mu1 = _aligned(u, n, 1, eu)
    mv1 = _aligned(v, n, 1, ev)
    p, q = mu0 * mv1, mu1 * mv0
    size = np.abs(p) + np.abs(q)
    with np.errstate(over="ignore", under="ignore"):
        ref_scaled = np.ldexp(ref / a[n], -(eu + ev))
    return (p - q - ref_scaled) / size
