import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate

from iqiperf.distributions import (
    sinr_cdf,
    sinr_pdf,
    sinr_quantile,
    sinr_support,
    sinr_survival,
)
from iqiperf.errors import DomainError
from iqiperf.iqi import CarrierMode, Impairment
from iqiperf.special import piecewise_quad

from conftest import model

# P(gamma > x) for multi-carrier links at IRR 20 dB / 3 deg on both sides, 20 dB SNR,
# from mpmath quadrature of the conditional law (condition on the image gain).
MULTI_RX_SURVIVAL = [
    (0.05, 0.9989956296762000058),
    (1.0, 0.98014934031274981101),
    (10.0, 0.8217573026235128677),
    (50.0, 0.40233705028469379988),
    (90.0, 0.21206681557204522268),
]
MULTI_JOINT_SURVIVAL = [
    (0.001, 0.99999944311983466485),  # below X22/X21: image-only realizations count
    (0.005, 0.99998096645331916966),
    (0.0099, 0.99990000520033318771),
    (0.05, 0.99908998911734895982),
    (1.0, 0.97994937064697192895),
    (10.0, 0.80363912899152416195),
    (50.0, 0.18029747098808682813),
    (90.0, 0.000010299810221519260637),
]


def survival_by_conditioning(m, x):
    """Independent oracle: average exp(-g1 threshold) over the image gain g2."""
    if m.impairment is Impairment.IDEAL:
        return math.exp(-x / m.gamma_bar)
    if m.canonical:
        if x >= m.alpha / m.beta:
            return 0.0
        return math.exp(-m.A * x / (m.gamma_bar * (m.alpha - m.beta * x)))
    x11, x22, x12, x21 = m.xi.powers
    lam, gb = m.xi.lambda_rx, m.gamma_bar
    d = x11 - x * x12
    if d <= 0:
        return 0.0

    def f(g2):
        need = (x * (x21 * g2 + lam) - x22 * g2) / d
        return math.exp(-g2 / gb) / gb * math.exp(-max(need, 0.0) / gb)

    pts = [gb, 10 * gb]
    if x22 > x * x21:
        pts.append(x * lam / (x22 - x * x21))
    return piecewise_quad(f, 0.0, math.inf, sorted(pts))[0]


class TestReferenceValues:
    @pytest.mark.parametrize("x, ref", MULTI_RX_SURVIVAL)
    def test_multi_rx(self, x, ref):
        m = model(CarrierMode.MULTI, Impairment.RX, 20)
        assert sinr_survival(m, x) == pytest.approx(ref, rel=1e-13)

    @pytest.mark.parametrize("x, ref", MULTI_JOINT_SURVIVAL)
    def test_multi_joint(self, x, ref):
        m = model(CarrierMode.MULTI, Impairment.JOINT, 20)
        assert sinr_survival(m, x) == pytest.approx(ref, rel=1e-13)

    def test_canonical_closed_form(self):
        m = model(CarrierMode.SINGLE, Impairment.JOINT, 20)
        x = 30.0
        ref = math.exp(-m.A * x / (m.gamma_bar * (m.alpha - m.beta * x)))
        assert sinr_survival(m, x) == pytest.approx(ref, rel=1e-14)


class TestDistributionShape:
    @pytest.mark.parametrize("snr_db", [0, 20, 35, 40])
    def test_pdf_integrates_to_one(self, scenario, snr_db):
        m = model(*scenario, snr_db)
        hi = sinr_support(m).hi
        pts = [sinr_quantile(m, p) for p in (1e-6, 0.01, 0.1, 0.5, 0.9, 0.99, 0.999999)]
        pts += [sinr_support(m).kink] if sinr_support(m).kink is not None else []
        total, _ = piecewise_quad(lambda x: sinr_pdf(m, x), 0.0, hi, pts)
        assert total == pytest.approx(1.0, abs=1e-9)

    def test_kink(self, scenario):
        m = model(*scenario, 35)
        kink = sinr_support(m).kink
        if m.canonical or m.impairment is Impairment.IDEAL:
            assert kink is None
            return
        x11, x22, x12, x21 = m.xi.powers
        if x22 == 0.0:
            # no image-side signal (ideal transmitter): a single analytic form
            assert kink is None
            return
        assert kink == x22 / x21
        # steep rise below the kink, nearly flat above it
        below, at, above = sinr_pdf(m, [0.9 * kink, kink, 1.1 * kink])
        assert below < 0.5 * at and above == pytest.approx(at, rel=1e-3)

    @pytest.mark.parametrize("snr_db", [5, 25])
    def test_pdf_is_cdf_derivative(self, scenario, snr_db):
        m = model(*scenario, snr_db)
        hi = sinr_support(m).hi
        worst = 0.0
        for p in (0.05, 0.3, 0.6, 0.9, 0.99):
            x = sinr_quantile(m, p)
            # the step must shrink near a finite support edge, where derivatives blow up
            h = 1e-4 * min(x, hi - x)
            # five-point stencil on the survival function
            s = [sinr_survival(m, x + k * h) for k in (-2, -1, 1, 2)]
            fd = -(s[0] - 8 * s[1] + 8 * s[2] - s[3]) / (12 * h)
            worst = max(worst, abs(fd - sinr_pdf(m, x)) / sinr_pdf(m, x))
        assert worst <= 1e-6

    def test_boundaries(self, scenario):
        m = model(*scenario, 15)
        assert sinr_survival(m, 0.0) == 1.0
        assert sinr_cdf(m, 0.0) == 0.0
        hi = sinr_support(m).hi
        if math.isfinite(hi):
            assert sinr_cdf(m, hi) == 1.0
            assert sinr_pdf(m, hi) == 0.0
            assert sinr_pdf(m, 2 * hi) == 0.0

    def test_support_edges(self):
        single = model(CarrierMode.SINGLE, Impairment.TX, 10)
        assert sinr_support(single).hi == pytest.approx(single.alpha / single.beta)
        rx = model(CarrierMode.MULTI, Impairment.RX, 10)
        assert sinr_support(rx).hi == math.inf
        joint = model(CarrierMode.MULTI, Impairment.JOINT, 10)
        x11, _, x12, _ = joint.xi.powers
        assert sinr_support(joint).hi == pytest.approx(x11 / x12)

    def test_vectorized(self, scenario):
        m = model(*scenario, 10)
        xs = np.array([0.1, 1.0, 5.0])
        out = sinr_cdf(m, xs)
        assert isinstance(out, np.ndarray)
        assert out == pytest.approx([sinr_cdf(m, x) for x in xs], rel=1e-15)
        assert isinstance(sinr_pdf(m, 1.0), float)

    def test_rejects_negative(self, scenario):
        with pytest.raises(DomainError):
            sinr_cdf(model(*scenario, 10), -1.0)

    @settings(max_examples=25, deadline=None)
    @given(st.floats(min_value=0.0, max_value=1.0), st.sampled_from([0.0, 10.0, 30.0]))
    def test_matches_conditioning_oracle(self, u, snr_db):
        for carrier, imp in [(CarrierMode.SINGLE, Impairment.JOINT), (CarrierMode.MULTI, Impairment.RX),
                             (CarrierMode.MULTI, Impairment.JOINT)]:
            m = model(carrier, imp, snr_db)
            hi = sinr_support(m).hi
            x = u * (hi if math.isfinite(hi) else 50 * m.gamma_bar)
            assert sinr_survival(m, x) == pytest.approx(survival_by_conditioning(m, x), rel=1e-9, abs=1e-15)

    @settings(max_examples=30, deadline=None)
    @given(st.floats(min_value=1e-4, max_value=1 - 1e-4))
    def test_quantile_inverts_cdf(self, p):
        for carrier, imp in [(CarrierMode.SINGLE, Impairment.RX), (CarrierMode.MULTI, Impairment.JOINT)]:
            m = model(carrier, imp, 15)
            assert sinr_cdf(m, sinr_quantile(m, p)) == pytest.approx(p, rel=1e-9)

    def test_more_imbalance_lowers_sinr(self):
        # stochastic ordering: a worse IRR never increases P(gamma > x)
        from iqiperf.iqi import Side, coefficients_from_irr

        phi = math.radians(1)
        good = model(CarrierMode.MULTI, Impairment.RX, 20, rx=coefficients_from_irr(30, phi, Side.RX))
        bad = model(CarrierMode.MULTI, Impairment.RX, 20, rx=coefficients_from_irr(15, phi, Side.RX))
        xs = np.linspace(0.1, 100, 50)
        assert np.all(sinr_survival(bad, xs) <= sinr_survival(good, xs) + 1e-15)


def test_cdf_quadrature_identity():
    # E[gamma] from the survival function equals the sample-free expectation of the ratio
    m = model(CarrierMode.SINGLE, Impairment.RX, 10)
    hi = sinr_support(m).hi
    mean, _ = integrate.quad(lambda x: sinr_survival(m, x), 0, hi, epsabs=0, epsrel=1e-11, limit=200)
    direct, _ = integrate.quad(
        lambda g: math.exp(-g / m.gamma_bar) / m.gamma_bar * m.alpha / (m.beta + m.A / g) if g > 0 else 0.0,
        0, math.inf, epsabs=0, epsrel=1e-11, limit=200,
    )
    assert mean == pytest.approx(direct, rel=1e-9)
