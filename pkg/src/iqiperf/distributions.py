"""SINR distributions (CDF, PDF, support) for every link scenario.

All functions accept a scalar or an array of SINR values (linear scale) and
return a float or an array of the same shape.

Canonical-form links (single-carrier, multi-carrier TX-only) have
``gamma = alpha / (beta + A / gamma_id)`` with ``gamma_id ~ Exp(gamma_bar)``, so

    S(x) = exp(-A x / (gamma_bar (alpha - beta x))),   0 <= x < alpha / beta.

Multi-carrier links with RX imbalance mix the desired carrier ``k`` with its
image ``-k``, whose channel is independent:

    gamma = (X11 g1 + X22 g2) / (X12 g1 + X21 g2 + Lambda),   g1, g2 ~ Exp(gamma_bar)

with ``Xij = |xi_ij|^2``.  Conditioning on ``g2`` and averaging gives the
survival function

    S(x) = [D exp(-x Lambda / (gamma_bar D)) + min(B, 0) exp(-x Lambda / (gamma_bar |B|))] / (D + B)

with ``D = X11 - x X12`` and ``B = x X21 - X22``.  The second term accounts
for image-channel realizations that push the SINR above ``x`` on their own;
it only contributes for ``x < X22 / X21`` and keeps ``S(0) = 1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DomainError
from .iqi import CarrierMode, Impairment, SinrModel

__all__ = ["Support", "sinr_support", "sinr_cdf", "sinr_pdf", "sinr_survival", "sinr_quantile"]

#: relative distance to the upper support edge treated as the edge itself
EDGE_CLAMP = 1e-12


@dataclass(frozen=True)
class Support:
    """SINR range; ``kink`` is an interior point where the density changes form.

    At high SNR the density rises steeply just below the kink and is nearly
    flat above it, so numerical integration should split there.
    """

    lo: float = 0.0
    hi: float = math.inf
    kink: Optional[float] = None

    def __contains__(self, x) -> bool:
        return self.lo <= x <= self.hi


def sinr_support(m: SinrModel) -> Support:
    """Range of the instantaneous SINR."""
    if m.impairment is Impairment.IDEAL:
        return Support()
    if m.canonical:
        return Support(0.0, m.alpha / m.beta if m.beta > 0 else math.inf)
    x11, x22, x12, x21 = m.xi.powers
    hi = x11 / x12 if x12 > 0 else math.inf
    kink = x22 / x21 if x21 > 0 and x22 > 0 else None
    return Support(0.0, hi, kink if kink is not None and kink < hi else None)


def _as_array(x):
    arr = np.asarray(x, dtype=float)
    if np.any(np.isnan(arr)) or np.any(arr < 0):
        raise DomainError("SINR argument must be >= 0")
    return arr


def _ret(x, out):
    return float(out) if np.ndim(x) == 0 else out


def _canonical_survival(alpha, beta, a, gamma_bar, x, hi):
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        inside = x < hi * (1.0 - EDGE_CLAMP)
        den = gamma_bar * (alpha - beta * x)
        s = np.where(inside, np.exp(-a * x / np.where(inside, den, 1.0)), 0.0)
    return s


def _canonical_pdf(alpha, beta, a, gamma_bar, x, hi):
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        inside = x < hi * (1.0 - EDGE_CLAMP)
        den = np.where(inside, alpha - beta * x, 1.0)
        f = alpha * a * np.exp(-a * x / (gamma_bar * den)) / (gamma_bar * den**2)
    return np.where(inside, f, 0.0)


def _image_terms(m: SinrModel, x):
    x11, x22, x12, x21 = m.xi.powers
    lam = m.xi.lambda_rx
    gb = m.gamma_bar
    d_ = x11 - x * x12
    b_ = x * x21 - x22
    p_ = d_ + b_
    dd = x11 * x21 - x22 * x12
    return x11, x22, lam, gb, d_, b_, p_, dd


def _image_survival(m: SinrModel, x, hi):
    x11, x22, lam, gb, d_, b_, p_, _ = _image_terms(m, x)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore", under="ignore"):
        inside = x < hi * (1.0 - EDGE_CLAMP) if math.isfinite(hi) else np.ones_like(x, dtype=bool)
        d_safe = np.where(inside, d_, 1.0)
        main = d_safe * np.exp(-x * lam / (gb * d_safe))
        neg = b_ < 0
        v = np.where(neg, -b_, 1.0)
        corr = np.where(neg, -v * np.exp(-x * lam / (gb * v)), 0.0)
        s = (main + corr) / np.where(inside, p_, 1.0)
    return np.where(inside, np.clip(s, 0.0, 1.0), 0.0)


def _image_pdf(m: SinrModel, x, hi):
    x11, x22, lam, gb, d_, b_, p_, dd = _image_terms(m, x)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore", under="ignore"):
        inside = x < hi * (1.0 - EDGE_CLAMP) if math.isfinite(hi) else np.ones_like(x, dtype=bool)
        d_safe = np.where(inside, d_, 1.0)
        p_safe = np.where(inside, p_, 1.0)
        f = np.exp(-x * lam / (gb * d_safe)) / p_safe * (lam * x11 / (gb * d_safe) + dd / p_safe)
        neg = b_ < 0
        v = np.where(neg, -b_, 1.0)
        corr = np.exp(-x * lam / (gb * v)) / p_safe * (lam * x22 / (gb * v) + dd / p_safe)
        f = f - np.where(neg, corr, 0.0)
    return np.where(inside, np.maximum(f, 0.0), 0.0)


def sinr_survival(m: SinrModel, x):
    """``P(gamma > x)``."""
    arr = _as_array(x)
    hi = sinr_support(m).hi
    if m.impairment is Impairment.IDEAL:
        out = np.exp(-arr / m.gamma_bar)
    elif m.canonical:
        out = _canonical_survival(m.alpha, m.beta, m.A, m.gamma_bar, arr, hi)
    else:
        out = _image_survival(m, arr, hi)
    return _ret(x, out)


def sinr_cdf(m: SinrModel, x):
    """``P(gamma <= x)``; exactly 1 at and beyond the upper support edge."""
    arr = _as_array(x)
    if m.impairment is Impairment.IDEAL:
        out = -np.expm1(-arr / m.gamma_bar)
    else:
        out = 1.0 - np.asarray(sinr_survival(m, arr))
    return _ret(x, np.clip(out, 0.0, 1.0))


def sinr_pdf(m: SinrModel, x):
    """SINR density; zero at and beyond the upper support edge."""
    arr = _as_array(x)
    hi = sinr_support(m).hi
    if m.impairment is Impairment.IDEAL:
        out = np.exp(-arr / m.gamma_bar) / m.gamma_bar
    elif m.canonical:
        out = _canonical_pdf(m.alpha, m.beta, m.A, m.gamma_bar, arr, hi)
    else:
        out = _image_pdf(m, arr, hi)
    return _ret(x, out)


def sinr_quantile(m: SinrModel, p: float) -> float:
    """Smallest ``x`` with ``F(x) >= p`` (bisection on the CDF)."""
    if not 0.0 <= p <= 1.0:
        raise DomainError(f"probability must be in [0, 1], got {p}")
    hi = sinr_support(m).hi
    if p == 0.0:
        return 0.0
    if p == 1.0:
        return hi
    if m.impairment is Impairment.IDEAL:
        return -m.gamma_bar * math.log1p(-p)
    # bisect on whichever tail is small, so quantiles near 1 keep their digits
    if p <= 0.5:
        below = lambda t: sinr_cdf(m, t) < p  # noqa: E731
    else:
        below = lambda t: sinr_survival(m, t) > 1.0 - p  # noqa: E731
    lo = 0.0
    if math.isinf(hi):
        up = m.gamma_bar
        while below(up):
            up *= 2.0
    else:
        up = hi
    for _ in range(200):
        mid = 0.5 * (lo + up)
        if mid == lo or mid == up or up - lo <= 1e-15 * up:
            break
        if below(mid):
            lo = mid
        else:
            up = mid
    return up
