"""2x2 transfer-matrix algebra for the critically coupled model.

All matrices are ``(2, 2)`` complex128 numpy arrays; real inputs embed.
"""

from __future__ import annotations

import numpy as np

from .errors import DomainError, SingularConjugator
from .model import ModelParams, seq_a, seq_b

_I2 = np.eye(2, dtype=complex)


def mat2(a, b, c, d) -> np.ndarray:
    return np.array([[a, b], [c, d]], dtype=complex)


def frobenius(M: np.ndarray) -> float:
    return float(np.sqrt(np.sum(np.abs(M) ** 2)))


def inv2(M: np.ndarray) -> np.ndarray:
    det = M[0, 0] * M[1, 1] - M[0, 1] * M[1, 0]
    if det == 0:
        raise SingularConjugator("matrix is singular")
    return np.array([[M[1, 1], -M[0, 1]], [-M[1, 0], M[0, 0]]], dtype=complex) / det


def det2(M: np.ndarray) -> complex:
    return complex(M[0, 0] * M[1, 1] - M[0, 1] * M[1, 0])


def transfer_T(n: int, E: float, p: ModelParams) -> np.ndarray:
    """``T_n`` with ``U_{n+1} = T_n U_n`` for ``U_n = (u_{n-1}, u_n)``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    an = seq_a(n, p)
    return mat2(0.0, 1.0, -seq_a(n - 1, p) / an, (E - seq_b(n, p)) / an)


def block_B(n: int, E: float, p: ModelParams) -> np.ndarray:
    """Two-step block ``B_n = T_{2n} T_{2n-1}``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return transfer_T(2 * n, E, p) @ transfer_T(2 * n - 1, E, p)


def zero_energy_block(n: int, p: ModelParams) -> np.ndarray:
    """Closed form of ``B_n`` at ``E = 0`` under ``a_0 = 0``."""
    al = p.alpha
    return mat2(-((1 - 1 / (2 * n - 1)) ** al), -p.b, 0.0, -((1 - 1 / (2 * n)) ** al))


def matrix_C(n: int, E: float, p: ModelParams) -> np.ndarray:
    al, b = p.alpha, p.b
    lead = mat2(1.0, -b, 1.0, 0.0)
    energy = mat2(b * E + E / (2 * b), 0.0, E / (2 * b), -E / 2)
    drift = mat2(0.0, 0.0, -al, al * b)
    return lead + (2.0 * n) ** (-al) * energy + drift / (2.0 * n)


def matrix_Btilde(n: int, E: float, p: ModelParams) -> np.ndarray:
    al, b = p.alpha, p.b
    lead = mat2(0.0, 1.0, -1.0, 2.0)
    energy = mat2(0.0, 0.0, 0.0, b * E)
    drift = mat2(0.0, 0.0, al, -al)
    return lead + (2.0 * n) ** (-al) * energy + drift / n


def conjugacy_residual(n: int, E: float, p: ModelParams) -> float:
    """``||C_n B_n C_n^{-1} + Btilde_n||_F``; decays like ``n**(-2 alpha)``."""
    C = matrix_C(n, E, p)
    if det2(C) == 0:
        raise SingularConjugator(f"C_{n} is singular")
    return frobenius(C @ block_B(n, E, p) @ inv2(C) + matrix_Btilde(n, E, p))


def ansatz_coefficients(E: float, p: ModelParams) -> tuple[float, complex, float]:
    """``(gamma, A, delta)`` of the WKB-type ansatz ``z_n = n**gamma exp(A n**delta)``.

    ``A`` is taken on the imaginary axis, ``i sqrt(-bE) / (2**(alpha/2) delta)``,
    which is the branch that produces oscillating solutions for ``bE < 0``.
    """
    if E >= 0 or p.b * E >= 0:
        raise DomainError("ansatz needs b*E < 0")
    gamma = -p.alpha / 4
    delta = 1 - p.alpha / 2
    A = 1j * np.sqrt(-p.b * E) / (2 ** (p.alpha / 2) * delta)
    return gamma, A, delta


def ansatz_z(n: int, E: float, p: ModelParams) -> complex:
    gamma, A, delta = ansatz_coefficients(E, p)
    x = float(n)
    return complex(x**gamma * np.exp(A * x**delta))


def matrix_S(n: int, E: float, p: ModelParams) -> np.ndarray:
    z0, z1 = ansatz_z(n - 1, E, p), ansatz_z(n, E, p)
    return mat2(np.conj(z0), z0, np.conj(z1), z1)


def ansatz_matrix(n: int, E: float, p: ModelParams) -> np.ndarray:
    """``S_{n+1}^{-1} Btilde_n S_n``."""
    S_next = matrix_S(n + 1, E, p)
    if det2(S_next) == 0:
        raise SingularConjugator(f"S_{n + 1} is singular")
    return inv2(S_next) @ matrix_Btilde(n, E, p) @ matrix_S(n, E, p)


def ansatz_residual(n: int, E: float, p: ModelParams) -> float:
    """``||S_{n+1}^{-1} Btilde_n S_n - I||_F``; decays like ``n**(-3 alpha / 2)``."""
    if E >= 0:
        raise DomainError("ansatz residual is defined for E < 0")
    if not (2 / 3 < p.alpha <= 1):
        raise DomainError("ansatz residual needs 2/3 < alpha <= 1")
    return frobenius(ansatz_matrix(n, E, p) - _I2)


def ansatz_entries(n: int, E: float, p: ModelParams) -> tuple[complex, complex, complex]:
    """Unnormalised diagonal and off-diagonal entries plus ``det S_{n+1}``.

    Returns ``(diag, offdiag, det)`` such that the ansatz matrix equals
    ``[[diag, offdiag], [-conj(offdiag), -conj(diag)]] / det``. Built directly
    from ``z_{n-1}, z_n, z_{n+1}`` so that it is independent of ``ansatz_matrix``.
    """
    zm, z, zp = (ansatz_z(k, E, p) for k in (n - 1, n, n + 1))
    al, b = p.alpha, p.b
    w = (2.0 * n) ** (-al)
    az2 = abs(z) ** 2
    diag = (z * np.conj(zm) + np.conj(z) * zp - 2 * az2
            + w * (-b * E * az2) + (al / n) * (-z * np.conj(zm) + az2))
    off = (z * zm + z * zp - 2 * z * z
           + w * (-b * E * z * z) + (al / n) * (-z * zm + z * z))
    det = zp * np.conj(z) - np.conj(zp) * z
    return complex(diag), complex(off), complex(det)


def block_product(p: ModelParams, E: float, n: int) -> np.ndarray:
    """Unscaled ``B_n ... B_1``; only for small ``n`` (no overflow guard)."""
    M = _I2.copy()
    for k in range(1, n + 1):
        M = block_B(k, E, p) @ M
    return M
