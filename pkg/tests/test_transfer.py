import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from critjac.errors import DomainError, SingularConjugator
from critjac.model import A0Convention, ModelParams
from critjac.regression import decay_slope
from critjac.transfer import (
    ansatz_coefficients,
    ansatz_entries,
    ansatz_matrix,
    ansatz_residual,
    block_B,
    block_product,
    conjugacy_residual,
    det2,
    frobenius,
    inv2,
    mat2,
    matrix_Btilde,
    matrix_C,
    transfer_T,
    zero_energy_block,
)

ONE = A0Convention.ONE


def exact_T(n, E, alpha, b):
    """Exact rational transfer matrix for alpha = 1 (a_0 = 0)."""
    a = lambda k: sp.Integer(k) ** alpha
    bn = b * a(n) if n % 2 else 0
    return sp.Matrix([[0, 1], [-a(n - 1) / a(n), (E - bn) / a(n)]])


def test_transfer_examples():
    np.testing.assert_allclose(transfer_T(2, -1, ModelParams(1, 2)), [[0, 1], [-0.5, -0.5]])
    np.testing.assert_allclose(transfer_T(1, 0, ModelParams(1, 2, ONE)), [[0, 1], [-1, -2]])
    E = 0.7
    np.testing.assert_allclose(transfer_T(1, E, ModelParams(0.6, 2)), [[0, 1], [0, E - 2]])


def test_block_examples():
    np.testing.assert_allclose(block_B(2, 0, ModelParams(1, 2)), [[-2 / 3, -2], [0, -3 / 4]], atol=1e-15)
    np.testing.assert_allclose(block_B(1, 0, ModelParams(1, 2, ONE)), [[-1, -2], [0, -0.5]], atol=1e-15)


@pytest.mark.parametrize("n", [1, 2, 3, 7, 20])
def test_block_matches_exact_product(n):
    E, b = sp.Rational(-3, 7), sp.Integer(2)
    exact = exact_T(2 * n, E, 1, b) * exact_T(2 * n - 1, E, 1, b)
    got = block_B(n, float(E), ModelParams(1, 2))
    np.testing.assert_allclose(got, np.array(exact, dtype=float), rtol=1e-14, atol=1e-15)


@given(st.floats(0.05, 1.0), st.floats(-5, 5).filter(lambda x: abs(x) > 1e-3),
       st.integers(1, 100_000))
def test_zero_energy_block_upper_triangular(alpha, b, n):
    p = ModelParams(alpha, b)
    B = block_B(n, 0.0, p)
    assert B[1, 0] == 0
    np.testing.assert_allclose(B, zero_energy_block(n, p), rtol=1e-13, atol=1e-300)


def test_zero_energy_block_expansion():
    # B_n = -M_b + alpha/(2n) I + O(n^-2)
    p = ModelParams(0.6, 1.5)
    M_b = mat2(1, p.b, 0, 1)
    for n in (100, 1000, 10_000):
        err = frobenius(block_B(n, 0, p) - (-M_b + p.alpha / (2 * n) * np.eye(2)))
        assert err < 1.0 / n**2


def test_C_and_Btilde_examples():
    p = ModelParams(1, 2)
    np.testing.assert_allclose(matrix_C(1, 0, p), [[1, -2], [0.5, 1]])
    np.testing.assert_allclose(matrix_Btilde(1, 0, p), [[0, 1], [0, 1]])
    far = matrix_C(10**12, 1.0, ModelParams(1, 3))
    np.testing.assert_allclose(far, [[1, -3], [1, 0]], atol=1e-11)
    assert det2(mat2(1, -3, 1, 0)) == 3


@given(st.floats(0.05, 1.0), st.floats(-5, 5).filter(lambda x: abs(x) > 1e-3),
       st.floats(-5, 5), st.integers(1, 10_000))
def test_Btilde_trace(alpha, b, E, n):
    p = ModelParams(alpha, b)
    tr = np.trace(matrix_Btilde(n, E, p)).real
    assert tr == pytest.approx(2 + b * E * (2 * n) ** -alpha - alpha / n, rel=1e-13, abs=1e-13)


@pytest.mark.parametrize("alpha,b,E", [(0.8, 1, -1), (1, 2, 0), (1, 2, -2),
                                        (0.7, 1, -0.5), (0.9, 1, -1), (0.5, 3, -1)])
def test_conjugacy_decay(alpha, b, E):
    fit = decay_slope(lambda n: conjugacy_residual(n, E, ModelParams(alpha, b)))
    assert fit.slope <= -2 * alpha + 0.1


def test_conjugacy_slope_example():
    fit = decay_slope(lambda n: conjugacy_residual(n, -1, ModelParams(0.8, 1)))
    assert fit.slope == pytest.approx(-1.6, abs=0.1)


def test_conjugacy_two_point_decay():
    p = ModelParams(1, 2)
    r2, r4 = conjugacy_residual(100, 0, p), conjugacy_residual(10_000, 0, p)
    assert r4 <= 1.01 * r2 * (1e2) ** -2


def test_residuals_finite_nonnegative():
    p = ModelParams(0.8, 1)
    for n in (1, 2, 5, 50, 10**6):
        r = conjugacy_residual(n, -1, p)
        assert np.isfinite(r) and r >= 0


@pytest.mark.parametrize("alpha", [0.7, 0.8, 0.9, 1.0])
def test_ansatz_decay(alpha):
    fit = decay_slope(lambda n: ansatz_residual(n, -1, ModelParams(alpha, 1)))
    assert fit.slope <= -1.5 * alpha + 0.1


def test_ansatz_slope_example():
    fit = decay_slope(lambda n: ansatz_residual(n, -1, ModelParams(0.9, 1)))
    assert fit.slope <= -1.35 + 0.1


@pytest.mark.parametrize("n", [2, 10, 1000, 99_999])
def test_ansatz_diagonal_identity(n):
    p = ModelParams(0.9, 1)
    diag, off, det = ansatz_entries(n, -1.0, p)
    assert abs(abs(diag - det) - abs(off)) <= 1e-12 * abs(det)


@pytest.mark.parametrize("n", [5, 300, 40_000])
def test_ansatz_entries_match_matrix(n):
    p = ModelParams(0.8, 1.5)
    diag, off, det = ansatz_entries(n, -0.7, p)
    M = np.array([[diag, off], [-np.conj(off), -np.conj(diag)]]) / det
    np.testing.assert_allclose(ansatz_matrix(n, -0.7, p), M, rtol=1e-9, atol=1e-12)


def test_ansatz_residual_summable():
    p = ModelParams(0.9, 1)
    ns = np.arange(2, 100_001)
    s = np.cumsum([ansatz_residual(int(n), -1, p) for n in ns])
    dec = [s[10**k - 2] for k in (3, 4, 5)]
    inc = np.diff(dec)
    assert inc[1] < 0.5 * inc[0]
    # residual decays at least like n^{-1.35}, so decade increments shrink by 10^{-0.35} or faster
    assert inc[1] / inc[0] <= 10 ** (1 - 1.35)


def test_ansatz_coefficients_branch():
    gamma, A, delta = ansatz_coefficients(-2.0, ModelParams(1, 2))
    assert gamma == -0.25 and delta == 0.5
    assert A.real == 0 and A.imag == pytest.approx(2 / (2**0.5 * 0.5))


def test_ansatz_domain():
    with pytest.raises(DomainError):
        ansatz_residual(10, 1.0, ModelParams(0.9, 1))
    with pytest.raises(DomainError):
        ansatz_residual(10, -1.0, ModelParams(0.6, 1))


def test_singular_inverse():
    with pytest.raises(SingularConjugator):
        inv2(mat2(1, 2, 2, 4))


mats = st.lists(st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False),
                min_size=4, max_size=4).map(lambda v: mat2(*v))


@given(mats, mats, mats)
def test_mat2_algebra(A, B, C):
    np.testing.assert_allclose((A @ B) @ C, A @ (B @ C), atol=1e-11)
    assert det2(A @ B) == pytest.approx(det2(A) * det2(B), abs=1e-10)


@given(mats)
def test_mat2_inverse(A):
    d = det2(A)
    if abs(d) < 1e-2 or frobenius(A) ** 2 / abs(d) > 1e3:
        return
    np.testing.assert_allclose(A @ inv2(A), np.eye(2), atol=1e-14 * frobenius(A) ** 2 / abs(d))


def test_det_telescopes():
    p = ModelParams(0.8, 1, ONE)
    # growing products at E > 0 lose digits in det by cancellation; keep them short
    for E, n in ((-1.0, 30), (0.0, 30), (2.5, 6)):
        P = block_product(p, E, n)
        expected = np.prod([det2(block_B(k, E, p)) for k in range(1, n + 1)])
        # det T_n = a_{n-1}/a_n, so the product collapses to a_0 / a_{2n}
        assert det2(P) == pytest.approx(expected, rel=1e-12)
        assert det2(P).real == pytest.approx(1 / (2 * n) ** 0.8, rel=1e-12)
