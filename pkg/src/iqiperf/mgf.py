"""Moment generating functions ``M(s) = E[exp(s * gamma)]`` of the SINR.

Two independent routes are provided:

* :func:`mgf_closed` -- the scenario-specific closed forms (extended
  incomplete gamma, exponential integral, and the three-regime series of the
  multi-carrier joint link),
* :func:`mgf_quadrature` -- direct quadrature of the defining integral,
  either ``int exp(s x) f(x) dx`` or its integrated-by-parts twin
  ``1 + s int exp(s x) S(x) dx``.

Only ``s <= 0`` is supported; that is all the SER integrals need.
"""

from __future__ import annotations

import enum
import functools
import math
from dataclasses import dataclass
from .distributions import sinr_pdf, sinr_quantile, sinr_support, sinr_survival
from .errors import AccuracyError, DegenerateModelError, DomainError
from .iqi import CarrierMode, CompositeCoefficients, Impairment, SinrModel
from .special import (
    DEFAULT_QUAD,
    QuadratureSpec,
    exp_integral_ei_scaled,
    gamma_type_integral,
    piecewise_quad,
)

__all__ = [
    "SeriesSpec",
    "DEFAULT_SERIES",
    "JointRegime",
    "JointMgfConstants",
    "joint_constants",
    "mgf_closed",
    "mgf_quadrature",
]

#: relative closeness that counts as a tie (|xi12|^2 = |xi21|^2, or ratio = U)
TIE_TOL = 1e-6


@dataclass(frozen=True)
class SeriesSpec:
    rel_tol: float = 1e-12
    max_terms: int = 200
    fallback: bool = True

    def __post_init__(self):
        if not self.rel_tol > 0 or self.max_terms < 1:
            raise DomainError("SeriesSpec needs rel_tol > 0 and max_terms >= 1")


DEFAULT_SERIES = SeriesSpec()


class JointRegime(enum.Enum):
    EQUAL = "equal"
    SERIES_LT = "series_lt"
    SERIES_GT = "series_gt"


@dataclass(frozen=True)
class JointMgfConstants:
    """Constants of the multi-carrier joint TX/RX MGF.

    ``ratio = |d / delta|`` decides the regime: ``SERIES_GT`` when it exceeds
    ``|xi11|^2`` (the expansion in powers of ``z delta / d`` converges on the
    whole integration range), ``SERIES_LT`` otherwise.  ``tie`` flags a ratio
    within ``TIE_TOL`` of ``|xi11|^2``, where neither series is useful.
    """

    C: float
    d: float
    delta: float
    ratio: float
    regime: JointRegime
    tie: bool = False


def _regime(d, delta, u):
    if delta == 0.0:
        return math.inf, JointRegime.EQUAL, False
    ratio = abs(d / delta)
    tie = abs(ratio - u) <= TIE_TOL * u
    return ratio, (JointRegime.SERIES_GT if ratio > u else JointRegime.SERIES_LT), tie


def joint_constants(xi: CompositeCoefficients) -> JointMgfConstants:
    x11, x22, x12, x21 = xi.powers
    if not x11 > x22:
        raise DegenerateModelError("joint multi-carrier MGF needs |xi11|^2 > |xi22|^2")
    d = x11 * x21 - x22 * x12
    delta = x12 - x21
    if abs(delta) <= TIE_TOL * max(x12, x21):
        return JointMgfConstants(x11 / (x11 - x22), d, delta, math.inf, JointRegime.EQUAL)
    ratio, regime, tie = _regime(d, delta, x11)
    return JointMgfConstants(x11 / (x11 - x22), d, delta, ratio, regime, tie)


def _check_s(s):
    s = float(s)
    if not s <= 0.0:
        raise DomainError(f"MGF is evaluated for s <= 0 only, got {s}")
    return s


# ---------------------------------------------------------------------------
# closed forms


def _mgf_canonical(alpha, beta, a, gamma_bar, s, q):
    # exp(s alpha/beta + x0) Gamma(1, x0; s alpha A / (beta^2 gamma_bar)), x0 = A/(gamma_bar beta),
    # after t = x0 + u the exponent -t - b/t + b/x0 + x0 collapses to
    # -u + s alpha u / (A/gamma_bar + beta u): no large cancelling terms, and beta = 0 is allowed.
    k = a / gamma_bar

    def f(u):
        return math.exp(-u + s * alpha * u / (k + beta * u))

    slope0 = 1.0 - s * alpha / k
    pts = [4.0**j / slope0 for j in range(-1, 30) if 4.0**j / slope0 < 50.0]
    if beta > 0:
        x0 = k / beta
        pts += [x0 * 0.25, x0, x0 * 4.0]
    pts += [1.0, 10.0, 50.0]
    val, err = piecewise_quad(f, 0.0, math.inf, [t for t in pts if t > 0], q)
    if err > 10.0 * q.rel_tol * val:
        raise AccuracyError(f"canonical MGF quadrature error {err:.3g}", best_estimate=val)
    return val


def _mgf_image_ei(x11, x21, lam, gamma_bar, s):
    # S(x) = exp(-x Lambda/(gamma_bar X11)) / (1 + x X21/X11) on [0, inf)
    if x21 == 0.0:
        return 1.0 / (1.0 - s * gamma_bar * x11 / lam)
    r = x11 / x21
    y = -lam / (gamma_bar * x21) + s * r
    return 1.0 - s * r * exp_integral_ei_scaled(y)


def _k_weights(u, v, lam, gamma_bar, d):
    # K(U, V) = e^{shift} int_0^U e^{-(s/V) z - c/z} [w1 / (z (d + z delta)) + w2 / (d + z delta)^2] dz
    return lam * u / gamma_bar, d * v


def _k_direct(s, u, v, lam, gamma_bar, d, delta, q):
    c = u * lam / (v * gamma_bar)
    w1, w2 = _k_weights(u, v, lam, gamma_bar, d)

    def f(z):
        if z <= 0.0:
            return 0.0
        # exponent relative to its maximum at z = U
        e = -(s / v) * (z - u) + c * (z - u) / (z * u)
        if e < -745.0:
            return 0.0
        p = d + z * delta
        return math.exp(e) * (w1 / (z * p) + w2 / (p * p))

    slope = -s / v + c / (u * u)
    width = 1.0 / slope if slope > 0 else u
    pts = [u - width * 4.0**j for j in range(0, 30)] + [c * 0.25, c, c * 4.0]
    val, err = piecewise_quad(f, 0.0, u, [t for t in pts if 0.0 < t < u], q)
    if err > 10.0 * q.rel_tol * abs(val):
        raise AccuracyError(f"joint MGF quadrature error {err:.3g}", best_estimate=val)
    return val


def _k_series(s, u, v, lam, gamma_bar, d, delta, regime, ss: SeriesSpec, q):
    """Series for K(U, V); returns None when it does not converge."""
    c = u * lam / (v * gamma_bar)
    w1, w2 = _k_weights(u, v, lam, gamma_bar, d)

    def g(p):
        # the prefactor exp(s U/V + Lambda/(V gamma_bar)) is exactly the anchor factor at z = U
        return gamma_type_integral(p, 0.0, u, s / v, c, q=q, anchor=u)

    total = 0.0
    prev = math.inf
    for k in range(ss.max_terms):
        if regime is JointRegime.SERIES_LT:
            # 1/(d + z delta) = sum (-d)^k / (delta^{k+1} z^{k+1})
            if d == 0.0 and k > 0:
                return total
            coef = (-d / delta) ** k / delta
            term = coef * (w1 + (k + 1) * w2 / delta) * g(-k - 2.0)
        else:
            # 1/(d + z delta) = sum (-delta)^k z^k / d^{k+1}
            if delta == 0.0 and k > 0:
                return total
            coef = (-delta / d) ** k / d
            term = coef * (w1 * g(k - 1.0) + (k + 1) * w2 / d * g(float(k)))
        total += term
        if not math.isfinite(total):
            return None
        if abs(term) <= ss.rel_tol * abs(total):
            return total
        if k > 2 and abs(term) > abs(prev):
            return None  # asymptotic series has started to diverge
        prev = term
    return None


def _k_value(s, u, v, lam, gamma_bar, d, delta, regime, tie, ss, q):
    if u == 0.0:
        return 0.0
    if not tie:
        val = _k_series(s, u, v, lam, gamma_bar, d, delta, regime, ss, q)
        if val is not None:
            return val
        if not ss.fallback:
            raise AccuracyError(
                f"{regime.value} series did not reach rel_tol={ss.rel_tol} in {ss.max_terms} terms"
            )
    return _k_direct(s, u, v, lam, gamma_bar, d, delta, q)


def _mgf_joint(m: SinrModel, s, ss, q):
    x11, x22, x12, x21 = m.xi.powers
    lam = m.xi.lambda_rx
    gb = m.gamma_bar
    if x12 == 0.0:
        # ideal TX: the image enters only through the RX mixing (X22 = 0 as well)
        return _mgf_image_ei(x11, x21, lam, gb, s)
    k = joint_constants(m.xi)
    main_regime = JointRegime.SERIES_GT if k.regime is JointRegime.EQUAL else k.regime
    delta = 0.0 if k.regime is JointRegime.EQUAL and k.delta == 0.0 else k.delta
    val = _k_value(s, x11, x12, lam, gb, k.d, delta, main_regime, k.tie, ss, q)
    if x22 > 0.0:
        ratio, reg2, tie2 = _regime(k.d, delta, x22)
        if reg2 is JointRegime.EQUAL:
            reg2 = JointRegime.SERIES_GT
        val -= _k_value(s, x22, x21, lam, gb, k.d, delta, reg2, tie2, ss, q)
    return val


def mgf_closed(
    m: SinrModel,
    s: float,
    series: SeriesSpec = DEFAULT_SERIES,
    q: QuadratureSpec = DEFAULT_QUAD,
) -> float:
    """Closed-form SINR MGF at ``s <= 0``.

    The multi-carrier joint link is evaluated from its density in the
    substituted variable ``z = |xi11|^2 - x |xi12|^2`` (and the analogous
    image-side variable), expanding ``1/(d + z delta)`` as a power series:
    a single term when ``|xi12|^2 = |xi21|^2``, powers of ``z delta / d``
    when ``|d/delta|`` exceeds the integration range, inverse powers
    otherwise.  Every series coefficient is an extended-gamma-type integral.
    Series that do not converge fall back to quadrature of the unexpanded
    integrand (unless ``series.fallback`` is False).
    """
    s = _check_s(s)
    if s == 0.0:
        return 1.0
    if m.impairment is Impairment.IDEAL:
        return 1.0 / (1.0 - s * m.gamma_bar)
    if m.canonical:
        val = _mgf_canonical(m.alpha, m.beta, m.A, m.gamma_bar, s, q)
    elif m.impairment is Impairment.RX:
        x11, _, _, x21 = m.xi.powers
        val = _mgf_image_ei(x11, x21, m.xi.lambda_rx, m.gamma_bar, s)
    else:
        val = _mgf_joint(m, s, series, q)
    return min(max(val, 0.0), 1.0)


# ---------------------------------------------------------------------------
# quadrature oracle

_QUANTILE_PROBS = (1e-14, 1e-10, 1e-6, 1e-3, 0.01, 0.1, 0.3, 0.5, 0.7, 0.9, 0.99, 0.999,
                   1 - 1e-6, 1 - 1e-10, 1 - 1e-14)


@functools.lru_cache(maxsize=256)
def _quantile_points(m: SinrModel):
    return tuple(sinr_quantile(m, p) for p in _QUANTILE_PROBS)


def _breakpoints(m: SinrModel, s):
    pts = list(_quantile_points(m))
    kink = sinr_support(m).kink
    if kink is not None:
        pts.append(kink)
    if s < 0:
        pts += [4.0**j / -s for j in range(-2, 8)]
    return pts


def mgf_quadrature(m: SinrModel, s: float, form: str = "density", q: QuadratureSpec = DEFAULT_QUAD) -> float:
    """SINR MGF by adaptive quadrature of its defining integral.

    ``form="density"`` integrates ``exp(s x) f(x)``; ``form="parts"``
    evaluates ``1 + s int exp(s x) S(x) dx``.  Breakpoints are placed at SINR
    quantiles, at the density's kink and at multiples of ``1/|s|`` so the subintervals resolve both
    the density and the exponential weight.  The parts form loses relative
    accuracy when ``M(s)`` is small (it computes ``1 - something close to
    1``); its tolerance applies to the integral, not the result.
    """
    s = _check_s(s)
    if form not in ("density", "parts"):
        raise DomainError(f"unknown form {form!r}")
    if s == 0.0:
        return 1.0
    hi = sinr_support(m).hi
    pts = _breakpoints(m, s)

    if form == "density":
        def f(x):
            return math.exp(s * x) * sinr_pdf(m, x)
    else:
        def f(x):
            return math.exp(s * x) * sinr_survival(m, x)

    val, err = piecewise_quad(f, 0.0, hi, pts, q)
    # the parts form subtracts from 1, so only its integral can be held to rel_tol
    scale = abs(val)
    if form == "parts":
        val, err, scale = 1.0 + s * val, -s * err, -s * val
    if err > q.rel_tol * scale:
        raise AccuracyError(f"MGF quadrature ({form}) error estimate {err:.3g}", best_estimate=val)
    return val
