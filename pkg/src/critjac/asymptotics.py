"""Closed-form solution asymptotics for E <= 0 and fitters that test them.

For ``E < 0`` and ``2/3 < alpha <= 1`` the signed even-site sequence
``s_n = (-1)**n u_{2n}`` behaves like ``n**(-alpha/4) cos(k n**delta + theta)``
with ``delta = 1 - alpha/2`` and ``k = sqrt(-bE) / (2**(alpha/2) delta)``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateAnchor, DomainError, InsufficientData
from .model import ModelParams
from .propagate import SolutionTrace, partial_norms, solve_recurrence
from .regression import geometric_indices, loglog_ols, ols


class FitMethod(str, enum.Enum):
    LOGLOG_OLS = "loglog_ols"
    ZERO_CROSSING = "zero_crossing"
    RATIO_LIMIT = "ratio_limit"


class Subsample(str, enum.Enum):
    EVEN_SITES_SIGNED = "even_sites_signed"
    RAW = "raw"


@dataclass(frozen=True)
class FitReport:
    fitted_value: float
    predicted_value: float
    abs_error: float
    window: tuple[int, int]
    r_squared: float
    method: FitMethod

    @classmethod
    def build(cls, fitted, predicted, window, r_squared, method) -> "FitReport":
        fitted = float(fitted)
        predicted = float(predicted)
        n0, n1 = int(window[0]), int(window[1])
        if not n0 < n1:
            raise ValueError("window must satisfy n_min < n_max")
        return cls(fitted, predicted, abs(fitted - predicted), (n0, n1),
                   float(r_squared), FitMethod(method))

    @property
    def rel_error(self) -> float:
        return self.abs_error / abs(self.predicted_value) if self.predicted_value else math.inf

    def as_dict(self) -> dict:
        return {
            "fitted_value": self.fitted_value,
            "predicted_value": self.predicted_value,
            "abs_error": self.abs_error,
            "window": list(self.window),
            "r_squared": self.r_squared,
            "method": self.method.value,
        }


def _check_negative_regime(E: float, p: ModelParams) -> None:
    if E >= 0:
        raise DomainError("negative-energy asymptotics need E < 0")
    if not (2 / 3 < p.alpha <= 1):
        raise DomainError("negative-energy asymptotics need 2/3 < alpha <= 1")


def phase_rate(E: float, p: ModelParams) -> float:
    """Coefficient ``k`` of ``n**(1 - alpha/2)`` in the oscillation phase."""
    return math.sqrt(-p.b * E) / (2 ** (p.alpha / 2) * (1 - p.alpha / 2))


def predicted_v(n, E: float, p: ModelParams, sign: int = 1) -> np.ndarray | complex:
    _check_negative_regime(E, p)
    if p.b <= 0:
        raise DomainError("negative-energy asymptotics are stated for b > 0")
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    x = np.asarray(n, dtype=float)
    delta = 1 - p.alpha / 2
    out = x ** (-p.alpha / 4) * np.exp(sign * 1j * phase_rate(E, p) * x**delta)
    return complex(out) if out.ndim == 0 else out


def predicted_U(n: int, E: float, p: ModelParams, sign: int = 1) -> np.ndarray:
    """Leading behaviour of ``(u_{2n}, u_{2n+1})``: ``(-1)**n T (v_{n-1}, v_n)``."""
    T = np.array([[0.0, p.b], [-1.0, 1.0]]) / p.b
    V = np.array([predicted_v(n - 1, E, p, sign), predicted_v(n, E, p, sign)])
    return (-1) ** n * (T @ V)


def predicted_zero_energy(n: int, p: ModelParams, branch: int) -> tuple[float, float]:
    """Leading terms of ``(u_{2n}, u_{2n+1})`` at ``E = 0`` (amplitudes set to 1)."""
    s = (-1.0) ** n
    x = float(n)
    if branch == 1:
        return s * x ** (-p.alpha / 2), 0.0
    if branch == 2:
        return s * p.b * x ** (1 - p.alpha / 2), s * x ** (-p.alpha / 2)
    raise ValueError("branch must be 1 or 2")


def birkhoff_adams_coefficients(E: float, b: float) -> dict[str, float]:
    """Leading expansion coefficients of the alpha = 1 auxiliary recurrence.

    The recurrence ``x(n+2) + p1(n) x(n+1) + p2(n) x(n) = 0`` has
    ``p1 = c0 + c1/n + ...`` and ``p2 = d0 + d1/n + ...``.
    """
    return {"c0": -2.0, "c1": 1.0 - b * E / 2.0, "d0": 1.0, "d1": -1.0}


def signed_even_sites(trace: SolutionTrace, n: np.ndarray) -> np.ndarray:
    """``(-1)**n u_{2n}``."""
    n = np.asarray(n, dtype=np.int64)
    return np.where(n % 2 == 0, 1.0, -1.0) * trace.u(2 * n)


def _window_rms(index: np.ndarray, vals: np.ndarray, n0: int, n1: int,
                ratio: float, min_points: int, step: float):
    """Sliding geometric windows ``[x, ratio * x]`` with start points spaced by ``step``."""
    lows, highs, rms = [], [], []
    x = float(n0)
    while x * ratio <= n1:
        i0 = int(math.ceil(x))
        i1 = int(math.floor(x * ratio))
        if i1 - i0 + 1 >= min_points:
            seg = vals[i0 - index[0]: i1 - index[0] + 1]
            lows.append(i0)
            highs.append(i1)
            rms.append(math.sqrt(float(np.mean(seg * seg))))
        x *= step
    return np.array(lows), np.array(highs), np.array(rms)


def envelope_fit_samples(index, values, window, predicted: float,
                         ratio: float = 1.2, min_points: int = 32,
                         step: float = 1.02) -> FitReport:
    """Fit the power-law exponent of the RMS envelope of ``values``.

    Each window's abscissa is the power-mean centre ``c`` with
    ``c**(2g) = mean(n**(2g))`` for the current exponent estimate ``g``, so
    a pure power law is recovered exactly; two refinement passes suffice.
    """
    index = np.asarray(index, dtype=np.int64)
    values = np.asarray(values, dtype=float)
    n0, n1 = int(window[0]), int(window[1])
    if n0 < index[0] or n1 > index[-1]:
        raise InsufficientData("window exceeds the sampled range")
    lows, highs, rms = _window_rms(index, values, n0, n1, ratio, min_points, step)
    if rms.size < 10:
        raise InsufficientData(f"only {rms.size} geometric windows in {window}")
    if np.any(rms <= 0):
        raise InsufficientData("a window has vanishing RMS")
    centre = np.sqrt(lows * highs.astype(float))
    fit = loglog_ols(centre, rms)
    for _ in range(3):
        g = fit.slope
        if abs(g) < 1e-14:
            break
        centre = np.array([
            np.mean(np.arange(lo, hi + 1, dtype=float) ** (2 * g)) ** (1 / (2 * g))
            for lo, hi in zip(lows, highs)
        ])
        fit = loglog_ols(centre, rms)
    return FitReport.build(fit.slope, predicted, (n0, n1), fit.r_squared, FitMethod.LOGLOG_OLS)


def envelope_exponent_fit(trace: SolutionTrace,
                          subsample: Subsample | str = Subsample.EVEN_SITES_SIGNED,
                          window: tuple[int, int] = (1000, 100_000),
                          predicted: float | None = None) -> FitReport:
    """Envelope exponent of the trace; predicted value defaults to ``-alpha/4``.

    With ``even_sites_signed`` the window is in block index ``n`` of ``u_{2n}``,
    with ``raw`` it is in site index.
    """
    subsample = Subsample(subsample)
    n0, n1 = window
    if predicted is None:
        predicted = -trace.params.alpha / 4
    if subsample is Subsample.EVEN_SITES_SIGNED:
        if 2 * n1 > trace.stop or 2 * n0 < trace.start:
            raise InsufficientData("trace too short for the requested window")
        n = np.arange(n0, n1 + 1)
        vals = signed_even_sites(trace, n)
    else:
        if n1 > trace.stop or n0 < trace.start:
            raise InsufficientData("trace too short for the requested window")
        n = np.arange(n0, n1 + 1)
        vals = trace.u(n)
    return envelope_fit_samples(n, vals, window, predicted)


def count_sign_changes(vals: np.ndarray) -> np.ndarray:
    """Cumulative strict sign changes; exact zeros are skipped, so a crossing
    through a zero sample counts once."""
    s = np.sign(vals)
    out = np.zeros(s.size, dtype=np.int64)
    last = 0.0
    total = 0
    for i, v in enumerate(s.tolist()):
        if v != 0.0:
            if last != 0.0 and v != last:
                total += 1
            last = v
        out[i] = total
    return out


def phase_frequency_fit(trace: SolutionTrace, p: ModelParams, E: float,
                        window: tuple[int, int] = (1000, 100_000),
                        samples: int = 400) -> FitReport:
    """Fit the zero-crossing count of ``s_n`` against ``n**(1 - alpha/2)``.

    Predicted slope is ``k / pi``: one sign change per half period.
    """
    _check_negative_regime(E, p)
    n0, n1 = window
    if 2 * n1 > trace.stop or 2 * n0 < trace.start:
        raise InsufficientData("trace too short for the requested window")
    n = np.arange(n0, n1 + 1)
    crossings = count_sign_changes(signed_even_sites(trace, n))
    pick = geometric_indices(n0, n1, samples) - n0
    if pick.size < 10:
        raise InsufficientData("too few sample points for the crossing fit")
    delta = 1 - p.alpha / 2
    fit = ols(n[pick].astype(float) ** delta, crossings[pick].astype(float))
    return FitReport.build(fit.slope, phase_rate(E, p) / math.pi, (n0, n1),
                           fit.r_squared, FitMethod.ZERO_CROSSING)


def norm_growth_fit(trace: SolutionTrace, window: tuple[int, int] = (1000, 100_000),
                    predicted: float | None = None, samples: int = 60) -> FitReport:
    """Log-log slope of the partial sums ``sum_{n <= N} u_n**2`` over site index N."""
    n0, n1 = window
    if n1 > trace.stop or n0 < trace.start:
        raise InsufficientData("trace too short for the requested window")
    if predicted is None:
        predicted = 1 - trace.params.alpha / 2
    Ns = geometric_indices(n0, n1, samples)
    logs = partial_norms(trace, Ns)
    fit = ols(np.log(Ns), logs)
    return FitReport.build(fit.slope, predicted, (n0, n1), fit.r_squared, FitMethod.LOGLOG_OLS)


def subordinacy_ratios(p: ModelParams, E: float, Ns, anchors, anchor_index: int = 1) -> np.ndarray:
    """``sum u**2 / sum v**2`` up to each ``N`` for solutions with the two anchors."""
    (ua, va) = anchors
    for anc in (ua, va):
        if all(float(x) == 0.0 for x in anc):
            raise DegenerateAnchor("anchor values are both zero")
    Ns = np.asarray(Ns, dtype=np.int64)
    top = int(Ns.max())
    if top <= anchor_index + 1:
        raise ValueError("N must exceed anchor_index + 1")
    t1 = solve_recurrence(p, E, anchor_index, ua, top)
    t2 = solve_recurrence(p, E, anchor_index, va, top)
    return np.exp(partial_norms(t1, Ns) - partial_norms(t2, Ns))


def subordinacy_ratio(p: ModelParams, E: float, N: int, anchors, anchor_index: int = 1) -> float:
    return float(subordinacy_ratios(p, E, [N], anchors, anchor_index)[0])
