"""Special functions used by the SINR moment generating functions.

The extended incomplete gamma functions

    Gamma(a, x; b) = int_x^inf t^(a-1) exp(-t - b/t) dt
    gamma(a, x; b) = int_0^x  t^(a-1) exp(-t - b/t) dt

are evaluated by adaptive quadrature.  All of them go through
:func:`gamma_type_integral`, which integrates ``t^p exp(-r t - c/t)`` over a
real interval after shifting the exponent by its maximum, so arguments that
would overflow term by term (large negative ``b``) stay finite.  Callers can
fold an outer ``exp(log_shift)`` prefactor into the same shift.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, special as sps

from .errors import AccuracyError, DomainError, UnsupportedError

__all__ = [
    "QuadratureSpec",
    "DEFAULT_QUAD",
    "gamma_type_integral",
    "piecewise_quad",
    "ext_upper_gamma",
    "ext_lower_gamma",
    "exp_integral_ei",
    "exp_integral_ei_scaled",
    "ei_complement",
    "lower_inc_gamma_signed",
]

EULER_GAMMA = 0.57721566490153286061


@dataclass(frozen=True)
class QuadratureSpec:
    rel_tol: float = 1e-10
    abs_tol: float = 1e-14
    max_subdivisions: int = 2000

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise DomainError("quadrature tolerances must be positive")
        if self.max_subdivisions < 10:
            raise DomainError("max_subdivisions must be >= 10")


DEFAULT_QUAD = QuadratureSpec()


def _stationary_points(p, rate, c):
    # roots of d/dt [p ln t - rate t - c/t] = 0  <=>  rate t^2 - p t - c = 0
    if rate == 0.0:
        return [-c / p] if p != 0 else []
    disc = p * p + 4.0 * rate * c
    if disc < 0:
        return []
    sq = math.sqrt(disc)
    # numerically stable quadratic roots
    qq = -0.5 * (-p + math.copysign(sq, -p)) if p != 0 else 0.5 * sq
    roots = []
    if qq != 0:
        roots.append(qq / rate)
        roots.append(-c / qq)
    else:
        roots.append(0.0)
    return [t for t in roots if t > 0 and math.isfinite(t)]


def gamma_type_integral(p, lo, hi, rate, c, log_shift=0.0, q: QuadratureSpec = DEFAULT_QUAD, anchor=None):
    """``exp(log_shift) * int_lo^hi t^p exp(-rate*t - c/t) dt`` on ``0 <= lo < hi <= inf``.

    Convergence requires ``rate > 0`` when ``hi`` is infinite, and ``c > 0``
    or ``p > -1`` when ``lo`` is zero.  ``rate`` and ``c`` may be negative
    as long as the integrand stays bounded on the interval (``c < 0`` needs
    ``lo > 0``).

    With ``anchor = a`` the integrand is ``t^p exp(-rate (t - a) - c (1/t - 1/a))``
    instead, i.e. the factor ``exp(rate a + c/a)`` is folded in exactly.  Use
    it when the caller's prefactor cancels a large exponent, which would
    otherwise lose ``|rate a| * eps`` relative accuracy.
    """
    p, lo, hi, rate, c = float(p), float(lo), float(hi), float(rate), float(c)
    if not (0.0 <= lo < hi):
        if lo == hi:
            return 0.0
        raise DomainError(f"need 0 <= lo < hi, got [{lo}, {hi}]")
    if math.isinf(hi) and rate <= 0:
        raise DomainError("integral diverges at infinity (rate <= 0)")
    if lo == 0.0 and (c < 0 or (c == 0 and p <= -1)):
        raise DomainError("integral diverges at t = 0")

    def phi(t):
        return p * math.log(t) - rate * t - c / t

    def dphi(t):
        return p / t - rate + c / (t * t)

    # locate the exponent maximum over [lo, hi]
    cands = [t for t in _stationary_points(p, rate, c) if lo < t < hi]
    if lo > 0:
        cands.append(lo)
    if math.isfinite(hi):
        cands.append(hi)
    if not cands:
        # lo == 0 with c == 0 and an infinite upper limit: integrand decreasing from t=0
        cands.append(min(1.0, 1.0 / rate) if rate > 0 else 1.0)
    vals = [phi(t) for t in cands]
    k = int(np.argmax(vals))
    t_peak = cands[k]

    def rel(t, t0):
        # phi(t) - phi(t0) without forming the (possibly huge) terms separately
        return p * math.log(t / t0) - rate * (t - t0) + c * (t - t0) / (t * t0)

    if anchor is None:
        phi_peak = vals[k]
    else:
        phi_peak = rel(t_peak, float(anchor)) + p * math.log(float(anchor))

    # characteristic width of the peak, used to place breakpoints
    slope = dphi(t_peak)
    curv = -p / t_peak**2 - 2.0 * c / t_peak**3
    widths = []
    if abs(slope) > 1e-300:
        widths.append(1.0 / abs(slope))
    if curv < 0:
        widths.append(1.0 / math.sqrt(-curv))
    width = min(widths) if widths else max(t_peak, 1.0)

    # effective lower limit: drop the region where exp(-c/t) is negligible
    log_floor = math.log(q.abs_tol) + math.log(q.rel_tol) - 10.0
    a_eff = lo
    if lo == 0.0 and c > 0:
        left = t_peak
        if rel(left, t_peak) > log_floor:
            right = left
            left = left / 2.0
            while rel(left, t_peak) > log_floor:
                right = left
                left /= 2.0
            for _ in range(80):
                mid = 0.5 * (left + right)
                if rel(mid, t_peak) > log_floor:
                    right = mid
                else:
                    left = mid
        a_eff = left

    # effective upper limit X* with an analytic tail bound
    b_eff = hi
    tail_bound = 0.0
    if math.isinf(hi):
        x_star = max(t_peak, lo, p / rate if p > 0 else 0.0) + 40.0 / rate
        while True:
            tail_bound = _tail_bound(p, rate, c, x_star, phi(t_peak))
            if tail_bound <= 1e-3 * min(q.abs_tol, q.rel_tol * width):
                break
            x_star *= 2.0
        b_eff = x_star

    # integrate in the displacement d = t - t_peak: near a sharp peak the
    # difference t - t_peak must not be formed from two nearby absolute values
    pts = []
    for m in (1.0, 4.0, 16.0, 64.0, 256.0, 1024.0):
        for d in (-m * width, m * width):
            if a_eff < t_peak + d < b_eff:
                pts.append(d)
    # the exp(-c/t) shoulder can sit many decades below the peak: cover it geometrically
    if a_eff > 0.0:
        t = a_eff * 4.0
        while t < t_peak:
            pts.append(t - t_peak)
            t *= 4.0
    pts = sorted(set(pts))

    def f(d):
        t = t_peak + d
        if t <= 0.0:
            return 0.0
        e = p * math.log1p(d / t_peak) - rate * d + c * d / (t * t_peak)
        return math.exp(e) if e > -745.0 else 0.0

    val, err, info = _quad(f, a_eff - t_peak, b_eff - t_peak, pts, q)
    val = max(val, 0.0)
    scale = phi_peak + log_shift
    if scale > 709.0:
        raise AccuracyError("extended gamma value overflows", best_estimate=math.inf)
    out = math.exp(scale) * val if scale > -745.0 else 0.0
    if not _accurate(val, err, q):
        raise AccuracyError(
            f"gamma_type_integral(p={p}, [{lo}, {hi}], rate={rate}, c={c}) "
            f"error estimate {err:.3g} exceeds tolerance",
            best_estimate=out,
        )
    return out


def _tail_bound(p, rate, c, x_star, phi_peak):
    # int_{x*}^inf t^p e^{-rate t - c/t} dt <= e^{max(-c,0)/x*} int_{x*}^inf t^p e^{-rate t} dt
    # and int_{x*}^inf t^p e^{-rate t} dt = rate^{-p-1} Gamma(p+1, y), y = rate x*, with
    # Gamma(s, y) <= y^{s-1} e^{-y} / (1 - max(s-1, 0)/y) for y > s-1; kept in logs
    # because Gamma(s, y) underflows long before the relative tail is negligible
    extra = max(-c, 0.0) / x_star
    y = rate * x_star
    if p > 0 and y <= p:
        return math.inf
    log_gamma_tail = p * math.log(y) - y - (math.log1p(-p / y) if p > 0 else 0.0)
    log_tail = -(p + 1) * math.log(rate) + log_gamma_tail
    return math.exp(min(log_tail + extra - phi_peak, 700.0))


def piecewise_quad(f, a, b, pts=(), q: QuadratureSpec = DEFAULT_QUAD):
    """Integrate ``f`` over ``[a, b]`` split at the breakpoints ``pts``.

    Each piece goes to QUADPACK separately (``b`` may be ``inf``); returns
    ``(value, summed error estimate)``.
    """
    edges = [a] + sorted({t for t in pts if a < t < b}) + [b]
    total, err = 0.0, 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        v, e, *_ = integrate.quad(
            f, lo, hi, epsabs=0.0, epsrel=q.rel_tol * 0.1, limit=q.max_subdivisions, full_output=1
        )
        total += v
        err += e
    return total, err


def _quad(f, a, b, pts, q):
    val, err = piecewise_quad(f, a, b, pts, q)
    return val, err, None


def _accurate(val, err, q):
    return err <= max(q.rel_tol * abs(val) * 10.0, 1e-300)


def ext_upper_gamma(a, x, b, q: QuadratureSpec = DEFAULT_QUAD, log_shift=0.0):
    """Extended upper incomplete gamma ``Gamma(a, x; b)`` for ``x > 0``, any sign of ``b``.

    ``log_shift`` multiplies the result by ``exp(log_shift)`` inside the
    quadrature, so ``exp(big) * Gamma(...)`` pairs that cancel do not overflow.
    """
    if not x > 0:
        if b < 0 or x < 0:
            raise DomainError(f"Gamma(a, x; b) needs x > 0 (got x={x}, b={b})")
    return gamma_type_integral(a - 1.0, x, math.inf, 1.0, b, log_shift=log_shift, q=q)


def ext_lower_gamma(a, x, b, q: QuadratureSpec = DEFAULT_QUAD, log_shift=0.0):
    """Extended lower incomplete gamma ``gamma(a, x; b)`` for ``x > 0``, ``b >= 0``."""
    if not x > 0:
        raise DomainError(f"gamma(a, x; b) needs x > 0, got {x}")
    if b < 0:
        raise DomainError("gamma(a, x; b) with b < 0 diverges at t -> 0")
    if b == 0 and a <= 0:
        raise DomainError("gamma(a, x; 0) diverges for a <= 0")
    if b == 0:
        return math.exp(log_shift + sps.gammaln(a)) * sps.gammainc(a, x)
    return gamma_type_integral(a - 1.0, 0.0, x, 1.0, b, log_shift=log_shift, q=q)


def _e1_series(y):
    # E1(y) = -gamma - ln y - sum_{k>=1} (-y)^k / (k k!)
    term = 1.0
    s = 0.0
    for k in range(1, 200):
        term *= -y / k
        add = term / k
        s += add
        if abs(add) < 1e-17 * abs(s):
            break
    return -EULER_GAMMA - math.log(y) - s


def _e1_scaled_cf(y):
    # e^y E1(y) by the modified Lentz continued fraction, y > 1
    tiny = 1e-300
    b = y + 1.0
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for i in range(1, 500):
        an = -float(i * i)
        b += 2.0
        d = 1.0 / (an * d + b)
        c = b + an / c
        de = c * d
        h *= de
        if abs(de - 1.0) < 1e-16:
            return h
    raise AccuracyError("E1 continued fraction did not converge", best_estimate=h)


def exp_integral_ei(x):
    """Exponential integral ``Ei(x)`` for ``x < 0``."""
    x = float(x)
    if not x < 0:
        raise DomainError(f"exp_integral_ei is implemented for x < 0 only, got {x}")
    y = -x
    if y <= 1.0:
        return -_e1_series(y)
    return -math.exp(-y) * _e1_scaled_cf(y)


def exp_integral_ei_scaled(x):
    """``exp(-x) * Ei(x)`` for ``x < 0``; finite for arbitrarily large ``|x|``."""
    x = float(x)
    if not x < 0:
        raise DomainError(f"exp_integral_ei_scaled is implemented for x < 0 only, got {x}")
    y = -x
    if y <= 1.0:
        return -math.exp(y) * _e1_series(y)
    return -_e1_scaled_cf(y)


def ei_complement(x):
    """``1 + x e^{x} Ei(-x)`` for ``x > 0``, without cancellation for large ``x``.

    Equals ``int_0^inf e^{-t} t / (x + t) dt``; decays like ``1/x``.
    """
    x = float(x)
    if not x > 0:
        raise DomainError(f"ei_complement needs x > 0, got {x}")
    if x <= 50.0:
        return 1.0 + x * exp_integral_ei_scaled(-x)
    # asymptotic series sum_{n>=1} (-1)^{n+1} n! / x^n, truncated at its smallest term
    term = 1.0 / x
    total = term
    n = 1
    while n < 60:
        nxt = -term * (n + 1) / x
        if abs(nxt) >= abs(term) or abs(nxt) < 1e-17 * abs(total):
            break
        total += nxt
        term = nxt
        n += 1
    return total


def lower_inc_gamma_signed(a, x, scaled=False):
    """Lower incomplete gamma ``gamma(a, x)`` for integer ``a >= 1`` and any real ``x``.

    Uses ``(a-1)! (1 - e^{-x} sum_{k<a} x^k/k!)``.  With ``scaled`` the value
    ``e^{x} gamma(a, x) = (a-1)! sum_{k>=a} x^k/k!`` is returned instead,
    which stays accurate when ``gamma`` itself under- or overflows.
    """
    if int(a) != a or a < 1:
        raise UnsupportedError("lower_inc_gamma_signed supports integer a >= 1 only")
    a = int(a)
    x = float(x)
    fact = math.factorial(a - 1)
    if abs(x) < max(1.0, a):
        # tail series sum_{k>=a} x^k/k!: terms shrink from the first, no cancellation
        term = x**a / math.factorial(a)
        tail = term
        k = a
        while abs(term) > 1e-18 * abs(tail) and k < a + 400:
            k += 1
            term *= x / k
            tail += term
        return fact * tail if scaled else fact * math.exp(-x) * tail
    head = math.fsum(x**k / math.factorial(k) for k in range(a))
    if scaled:
        return fact * (math.exp(x) - head)
    return fact * (1.0 - math.exp(-x) * head)
