import math

import numpy as np
import pytest
import sympy as sp
from hypothesis import given
from hypothesis import strategies as st

from critjac.asymptotics import (
    FitMethod,
    FitReport,
    Subsample,
    birkhoff_adams_coefficients,
    count_sign_changes,
    envelope_exponent_fit,
    envelope_fit_samples,
    phase_frequency_fit,
    phase_rate,
    predicted_U,
    predicted_v,
    predicted_zero_energy,
    signed_even_sites,
    subordinacy_ratio,
    subordinacy_ratios,
)
from critjac.errors import DegenerateAnchor, DomainError, InsufficientData
from critjac.model import ModelParams
from critjac.propagate import partial_norms, solve_recurrence
from critjac.regression import geometric_indices
from critjac.transfer import matrix_Btilde

WINDOW = (1000, 100_000)


def trace(alpha, b, E, anchor=(1.0, 0.0), blocks=100_000):
    return solve_recurrence(ModelParams(alpha, b), E, 1, anchor, 2 * blocks + 1)


def test_predicted_v_example():
    v = predicted_v(100, -2.0, ModelParams(1, 2), +1)
    assert abs(v) == pytest.approx(100**-0.25, rel=1e-14)
    assert v == pytest.approx(0.31623 * np.exp(1j * 28.2843), rel=1e-4)
    assert 2 * math.sqrt(2) * 10 == pytest.approx(28.2843, abs=1e-4)


@given(st.floats(0.67, 1.0), st.floats(0.1, 5), st.floats(-5, -0.01), st.integers(1, 10**7))
def test_predicted_v_modulus_sign_independent(alpha, b, E, n):
    p = ModelParams(alpha, b)
    assert abs(predicted_v(n, E, p, 1)) == pytest.approx(abs(predicted_v(n, E, p, -1)), rel=1e-14)


@given(st.floats(0.1, 5), st.floats(-5, -0.01), st.integers(1, 10**6))
def test_alpha_one_phase(b, E, n):
    v = predicted_v(n, E, ModelParams(1.0, b))
    phase = phase_rate(E, ModelParams(1.0, b)) * math.sqrt(n)
    assert phase == pytest.approx(math.sqrt(-2 * b * E * n), rel=1e-13)
    assert v * n**0.25 == pytest.approx(np.exp(1j * phase), abs=1e-9)


def test_predicted_v_domain():
    with pytest.raises(DomainError):
        predicted_v(10, 0.5, ModelParams(0.9, 1))
    with pytest.raises(DomainError):
        predicted_v(10, -1, ModelParams(0.5, 1))
    with pytest.raises(DomainError):
        predicted_v(10, -1, ModelParams(0.9, -1))


def test_predicted_U_structure():
    p = ModelParams(0.9, 2.0)
    for n in (5, 6, 1000):
        U = predicted_U(n, -1.0, p)
        s = (-1) ** n
        vn, vm = predicted_v(n, -1.0, p), predicted_v(n - 1, -1.0, p)
        assert U[0] == pytest.approx(s * vn, rel=1e-14)
        assert U[1] == pytest.approx(s * (vn - vm) / p.b, rel=1e-12)
    T = np.array([[0, 2.0], [-1, 1]]) / 2.0
    assert np.linalg.det(T) == pytest.approx(1 / 2.0)


def test_predicted_zero_energy():
    p = ModelParams(0.6, 2.0)
    for n in range(1, 30):
        e1, o1 = predicted_zero_energy(n, p, 1)
        e2, o2 = predicted_zero_energy(n, p, 2)
        assert o1 == 0.0
        assert e1 == pytest.approx((-1) ** n * n**-0.3)
        assert e2 == pytest.approx((-1) ** n * 2 * n**0.7)
        assert o2 == pytest.approx((-1) ** n * n**-0.3)
        assert np.sign(predicted_zero_energy(n + 1, p, 2)[0]) == -np.sign(e2)
    with pytest.raises(ValueError):
        predicted_zero_energy(3, p, 3)


def test_birkhoff_adams_coefficients_symbolic():
    n, m, b, E = sp.symbols("n m b E")
    # bottom row of the alpha = 1 auxiliary block: v_{n+1} = r v_{n-1} + s v_n
    r = -1 + 1 / n
    s = 2 + b * E / (2 * n) - 1 / n
    for k in (1, 7, 300):
        M = matrix_Btilde(k, -0.8, ModelParams(1.0, 1.7))
        assert M[1, 0].real == pytest.approx(float(r.subs(n, k)))
        assert M[1, 1].real == pytest.approx(float(s.subs({n: k, b: 1.7, E: -0.8})))
    # x(m) = v_{m-1}: x(m+2) + p1(m) x(m+1) + p2(m) x(m) = 0 with n = m + 1
    p1 = sp.series(-s.subs(n, m + 1), m, sp.oo, 3).removeO()
    p2 = sp.series(-r.subs(n, m + 1), m, sp.oo, 3).removeO()
    got = {
        "c0": sp.limit(p1, m, sp.oo),
        "c1": sp.limit(m * (p1 - sp.limit(p1, m, sp.oo)), m, sp.oo),
        "d0": sp.limit(p2, m, sp.oo),
        "d1": sp.limit(m * (p2 - sp.limit(p2, m, sp.oo)), m, sp.oo),
    }
    for bv, Ev in ((1.7, -0.8), (2.0, -2.0)):
        want = birkhoff_adams_coefficients(Ev, bv)
        for key, expr in got.items():
            assert float(expr.subs({b: bv, E: Ev})) == pytest.approx(want[key], abs=1e-14)
    lam = sp.Symbol("lam")
    assert sp.roots(lam**2 + got["c0"] * lam + got["d0"], lam) == {1: 2}
    # Birkhoff-Adams case (b) needs 2 d1 != c0 c1, i.e. bE != 0
    assert sp.simplify(2 * got["d1"] - got["c0"] * got["c1"]) == -b * E


@pytest.mark.parametrize("alpha,b,E", [(0.8, 1, -1), (1, 2, -2)])
def test_envelope_examples(alpha, b, E):
    fit = envelope_exponent_fit(trace(alpha, b, E), Subsample.EVEN_SITES_SIGNED, WINDOW)
    assert fit.predicted_value == -alpha / 4
    assert fit.abs_error <= 0.02
    assert fit.method is FitMethod.LOGLOG_OLS
    assert 0.9 < fit.r_squared <= 1


@pytest.mark.parametrize("alpha", [1.0, 0.8, 0.5])
def test_zero_energy_envelopes(alpha):
    t1 = trace(alpha, 2.0, 0.0, anchor=(0.0, 1.0))
    t2 = trace(alpha, 2.0, 0.0, anchor=(1.0, 0.0))
    odd = np.arange(1, t1.stop + 1, 2)
    assert np.all(t1.u(odd) == 0.0)
    assert envelope_exponent_fit(t1, window=WINDOW).fitted_value == pytest.approx(-alpha / 2, abs=0.02)
    assert envelope_exponent_fit(t2, window=WINDOW).fitted_value == pytest.approx(1 - alpha / 2, abs=0.02)


@pytest.mark.parametrize("alpha", [1.0, 0.8, 0.5])
def test_zero_energy_partial_norm_divergence(alpha):
    t2 = trace(alpha, 2.0, 0.0, anchor=(1.0, 0.0))
    Ns = geometric_indices(1000, t2.stop, 40)
    logs = partial_norms(t2, Ns)
    inc = np.diff(logs) / np.diff(np.log(Ns))
    assert np.all(inc >= 0.9 * (1 - alpha))
    assert np.all(np.diff(logs) > 0)


def test_fitter_self_test():
    n = np.arange(*WINDOW)
    for alpha, b, E in ((0.8, 1, -1), (1, 2, -2), (0.7, 1, -0.5)):
        v = predicted_v(n, E, ModelParams(alpha, b))
        assert envelope_fit_samples(n, np.abs(v), (n[0], n[-1]), -alpha / 4).abs_error <= 1e-6
        # the oscillating real part only adds a small windowing bias
        assert envelope_fit_samples(n, v.real, (n[0], n[-1]), -alpha / 4).abs_error <= 1e-3


@pytest.mark.parametrize("alpha,b,E", [(0.8, 1, -1), (1, 2, -2), (0.7, 1, -0.5)])
def test_trace_prediction_ratio_flattens(alpha, b, E):
    tr = trace(alpha, b, E)
    n = np.arange(*WINDOW)
    ratio = signed_even_sites(tr, n) * n ** (alpha / 4)
    fit = envelope_fit_samples(n, ratio, (n[0], n[-1]), 0.0)
    assert abs(fit.fitted_value) <= 0.03


def test_raw_subsample():
    fit = envelope_exponent_fit(trace(0.9, 1, -1), Subsample.RAW, (2000, 200_000))
    assert np.isfinite(fit.fitted_value)


def test_envelope_insufficient_data():
    tr = trace(0.8, 1, -1, blocks=2000)
    with pytest.raises(InsufficientData):
        envelope_exponent_fit(tr, window=(1000, 1200))
    with pytest.raises(InsufficientData):
        envelope_exponent_fit(tr, window=(1000, 100_000))


def test_frequency_examples():
    f1 = phase_frequency_fit(trace(1, 2, -2), ModelParams(1, 2), -2, WINDOW)
    assert f1.predicted_value == pytest.approx(2 * math.sqrt(2) / math.pi)
    assert f1.rel_error <= 0.01
    assert f1.method is FitMethod.ZERO_CROSSING
    p = ModelParams(0.8, 1)
    f2 = phase_frequency_fit(trace(0.8, 1, -0.5), p, -0.5, WINDOW)
    assert f2.predicted_value == pytest.approx(math.sqrt(0.5) / (2**0.4 * 0.6 * math.pi))
    assert f2.rel_error <= 0.02


def test_frequency_vanishes_at_zero():
    p = ModelParams(0.9, 1)
    rates = [phase_rate(E, p) for E in (-1e-2, -1e-4, -1e-8)]
    assert rates[0] > rates[1] > rates[2] and rates[2] < 1e-3


def test_count_sign_changes():
    assert count_sign_changes(np.array([1.0, -1.0, 2.0])).tolist() == [0, 1, 2]
    # a zero sample between opposite signs is one crossing
    assert count_sign_changes(np.array([1.0, 0.0, -1.0]))[-1] == 1
    assert count_sign_changes(np.array([1.0, 0.0, 1.0]))[-1] == 0
    assert count_sign_changes(np.array([0.0, 0.0, -3.0, 4.0]))[-1] == 1


def test_subordinacy():
    p = ModelParams(0.9, 1)
    Ns = geometric_indices(1000, 100_000, 30)
    same = subordinacy_ratios(p, -1, Ns, ((1.0, 0.0), (1.0, 0.0)))
    assert np.all(same == 1.0)
    r = subordinacy_ratios(p, -1, Ns, ((1.0, 0.0), (0.0, 1.0)))
    assert r.min() > 1e-2 and r.max() < 1e2
    r_swap = subordinacy_ratios(p, -1, Ns, ((0.0, 1.0), (1.0, 0.0)))
    np.testing.assert_allclose(r * r_swap, 1.0, rtol=1e-10)
    assert subordinacy_ratio(p, -1, 5000, ((1.0, 0.0), (0.0, 1.0))) > 0
    with pytest.raises(DegenerateAnchor):
        subordinacy_ratio(p, -1, 100, ((0.0, 0.0), (1.0, 0.0)))


def test_fit_report_invariants():
    r = FitReport.build(-0.21, -0.2, (10, 100), 0.99, "loglog_ols")
    assert r.abs_error == pytest.approx(0.01)
    assert r.as_dict()["method"] == "loglog_ols"
    with pytest.raises(ValueError):
        FitReport.build(0, 0, (100, 10), 1.0, "loglog_ols")
