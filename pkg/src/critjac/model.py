"""Model parameters, coefficient sequences and the periodic discriminant.

The operator is the Jacobi matrix with off-diagonal ``a_n = n**alpha`` and
diagonal ``b_n = b * n**alpha`` on odd ``n``, ``0`` on even ``n``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np


class A0Convention(str, enum.Enum):
    """Boundary weight ``a_0`` used by the first transfer matrix."""

    ZERO = "zero"
    ONE = "one"


class Coupling(str, enum.Enum):
    ABSOLUTELY_CONTINUOUS = "absolutely_continuous"
    DISCRETE = "discrete"
    CRITICAL = "critical"


@dataclass(frozen=True)
class ModelParams:
    alpha: float
    b: float
    a0_convention: A0Convention = A0Convention.ZERO

    def __post_init__(self):
        if not (0.0 < self.alpha <= 1.0):
            raise ValueError(f"alpha must lie in (0, 1], got {self.alpha!r}")
        if self.b == 0 or not np.isfinite(self.b):
            raise ValueError(f"b must be finite and non-zero, got {self.b!r}")
        object.__setattr__(self, "a0_convention", A0Convention(self.a0_convention))

    @property
    def a0(self) -> float:
        return 0.0 if self.a0_convention is A0Convention.ZERO else 1.0

    def reflected(self) -> "ModelParams":
        """Parameters with ``b -> -b``; the spectrum is mirrored about zero."""
        return ModelParams(self.alpha, -self.b, self.a0_convention)


@dataclass(frozen=True)
class PeriodicData:
    """One period ``(c_1..c_K)``, ``(d_1..d_K)`` of a periodic Jacobi matrix."""

    c: tuple[float, ...]
    d: tuple[float, ...] = field(default=())

    def __post_init__(self):
        c = tuple(float(x) for x in self.c)
        d = tuple(float(x) for x in self.d) if self.d else (0.0,) * len(c)
        if len(c) < 1:
            raise ValueError("period K must be at least 1")
        if len(d) != len(c):
            raise ValueError("c and d must have the same period length")
        if any(x <= 0 for x in c):
            raise ValueError("all c entries must be strictly positive")
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "d", d)

    @property
    def period(self) -> int:
        return len(self.c)

    @classmethod
    def critical_family(cls, b: float, btilde: float) -> "PeriodicData":
        """The two-periodic comparison matrix with ``c = 1``, ``d = (b, btilde)``."""
        return cls(c=(1.0, 1.0), d=(b, btilde))


def seq_a(n: int, p: ModelParams) -> float:
    if n < 0:
        raise ValueError("n must be non-negative")
    if n == 0:
        return p.a0
    return float(n) ** p.alpha


def seq_b(n: int, p: ModelParams) -> float:
    if n < 1:
        raise ValueError("n must be positive")
    return p.b * float(n) ** p.alpha if n % 2 else 0.0


def coefficient_arrays(p: ModelParams, n_max: int) -> tuple[np.ndarray, np.ndarray]:
    """Arrays ``a[0..n_max]`` and ``b[0..n_max]``; ``b[0]`` is unused and set to 0."""
    n = np.arange(n_max + 1, dtype=float)
    a = n**p.alpha
    a[0] = p.a0
    odd = (np.arange(n_max + 1) % 2) == 1
    b = np.where(odd, p.b * n**p.alpha, 0.0)
    return a, b


def _period_matrix(c_prev: float, c_n: float, d_n: float, E: float) -> np.ndarray:
    return np.array([[0.0, 1.0], [-c_prev / c_n, (E - d_n) / c_n]])


def periodic_discriminant(pd: PeriodicData, E: float) -> float:
    """Trace of the one-period transfer product, with cyclic ``c_0 = c_K``."""
    K = pd.period
    M = np.eye(2)
    for n in range(K):
        c_prev = pd.c[n - 1]  # n = 0 wraps to c_K
        M = _period_matrix(c_prev, pd.c[n], pd.d[n], E) @ M
    return float(np.trace(M))


def classify_coupling(pd: PeriodicData, tol: float = 0.0) -> Coupling:
    """Trichotomy of ``|d(0)|`` against 2; ``tol`` widens the critical band."""
    d0 = abs(periodic_discriminant(pd, 0.0))
    if abs(d0 - 2.0) <= tol:
        return Coupling.CRITICAL
    return Coupling.ABSOLUTELY_CONTINUOUS if d0 < 2.0 else Coupling.DISCRETE


def discriminant_grid(pd: PeriodicData, energies: Sequence[float]) -> np.ndarray:
    return np.array([periodic_discriminant(pd, float(E)) for E in energies])
