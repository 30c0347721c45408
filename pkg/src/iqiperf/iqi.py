"""I/Q imbalance coefficients and the SINR scenario descriptors built from them.

A frequency-independent imbalance maps a baseband signal ``g`` to
``mu * g + nu * conj(g)``.  The TX and RX up/down-converters use opposite
phase pairings for ``mu``; both share ``nu = (1 - eps * exp(j*phi)) / 2``.
"""

from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass, field, replace
from typing import Optional

from .errors import DomainError, InfeasibleParametersError, UsageError

__all__ = [
    "Side",
    "CarrierMode",
    "Impairment",
    "IqiParams",
    "MismatchCoefficients",
    "CompositeCoefficients",
    "SinrModel",
    "tx_coefficients",
    "rx_coefficients",
    "coefficients_from_irr",
    "irr_db",
    "eps_for_irr",
    "composite_coefficients",
    "build_sinr_model",
    "SCENARIOS",
    "db2lin",
    "lin2db",
]


def db2lin(x_db: float) -> float:
    return 10.0 ** (x_db / 10.0)


def lin2db(x: float) -> float:
    if x == math.inf:
        return math.inf
    return 10.0 * math.log10(x)


class Side(enum.Enum):
    TX = "tx"
    RX = "rx"


class CarrierMode(enum.Enum):
    SINGLE = "single"
    MULTI = "multi"


class Impairment(enum.Enum):
    IDEAL = "ideal"
    TX = "tx"
    RX = "rx"
    JOINT = "joint"


#: The seven distinct scenarios (the ideal link is the same in both carrier modes).
SCENARIOS = (
    (CarrierMode.SINGLE, Impairment.IDEAL),
    (CarrierMode.SINGLE, Impairment.TX),
    (CarrierMode.SINGLE, Impairment.RX),
    (CarrierMode.SINGLE, Impairment.JOINT),
    (CarrierMode.MULTI, Impairment.TX),
    (CarrierMode.MULTI, Impairment.RX),
    (CarrierMode.MULTI, Impairment.JOINT),
)


@dataclass(frozen=True)
class IqiParams:
    """Amplitude (ratio) and phase (radians) mismatch of both converters."""

    eps_t: float = 1.0
    phi_t: float = 0.0
    eps_r: float = 1.0
    phi_r: float = 0.0

    def __post_init__(self):
        for name in ("eps_t", "eps_r"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise DomainError(f"{name} must be finite and > 0, got {v!r}")
        for name in ("phi_t", "phi_r"):
            v = getattr(self, name)
            if not (math.isfinite(v) and abs(v) < math.pi / 2):
                raise DomainError(f"|{name}| must be < pi/2, got {v!r}")

    @property
    def tx(self) -> "MismatchCoefficients":
        return tx_coefficients(self.eps_t, self.phi_t)

    @property
    def rx(self) -> "MismatchCoefficients":
        return rx_coefficients(self.eps_r, self.phi_r)


@dataclass(frozen=True)
class MismatchCoefficients:
    mu: complex
    nu: complex
    side: Side

    def __post_init__(self):
        if abs(self.mu) ** 2 + abs(self.nu) ** 2 <= 0:
            raise DomainError("|mu|^2 + |nu|^2 must be positive")

    @classmethod
    def ideal(cls, side: Side) -> "MismatchCoefficients":
        return cls(1.0 + 0j, 0j, side)

    @property
    def power(self) -> float:
        """|mu|^2 + |nu|^2, the power gain of the imbalanced converter."""
        return abs(self.mu) ** 2 + abs(self.nu) ** 2

    @property
    def irr(self) -> float:
        """Linear image rejection ratio (inf for an ideal converter)."""
        nu2 = abs(self.nu) ** 2
        return math.inf if nu2 == 0 else abs(self.mu) ** 2 / nu2

    def normalized(self) -> "MismatchCoefficients":
        p = math.sqrt(self.power)
        return MismatchCoefficients(self.mu / p, self.nu / p, self.side)

    def scaled(self, c: complex) -> "MismatchCoefficients":
        return MismatchCoefficients(self.mu * c, self.nu * c, self.side)

    def apply(self, g):
        """Impair a baseband signal (scalar or numpy array)."""
        return self.mu * g + self.nu * g.conjugate()


def _check_eps(eps: float) -> None:
    if not (isinstance(eps, (int, float)) and math.isfinite(eps) and eps > 0):
        raise DomainError(f"amplitude mismatch must be finite and > 0, got {eps!r}")


def tx_coefficients(eps: float, phi: float) -> MismatchCoefficients:
    """TX convention: ``mu = (1 + eps e^{+j phi})/2``, ``nu = (1 - eps e^{+j phi})/2``."""
    _check_eps(eps)
    e = eps * cmath.exp(1j * phi)
    return MismatchCoefficients((1 + e) / 2, (1 - e) / 2, Side.TX)


def rx_coefficients(eps: float, phi: float) -> MismatchCoefficients:
    """RX convention: ``mu = (1 + eps e^{-j phi})/2``, ``nu = (1 - eps e^{+j phi})/2``."""
    _check_eps(eps)
    return MismatchCoefficients(
        (1 + eps * cmath.exp(-1j * phi)) / 2, (1 - eps * cmath.exp(1j * phi)) / 2, Side.RX
    )


def irr_db(c: MismatchCoefficients) -> float:
    """Image rejection ratio in dB; ``+inf`` when ``nu == 0``."""
    return lin2db(c.irr)


def eps_for_irr(irr_db: float, phi: float) -> float:
    """Amplitude mismatch giving the requested IRR at phase mismatch ``phi``.

    ``|1 + eps e^{j phi}|^2 = R |1 - eps e^{j phi}|^2`` is the quadratic
    ``eps^2 - 2 k eps + 1 = 0`` with ``k = cos(phi) (R + 1) / (R - 1)``.
    Its roots are reciprocal; the one with ``eps >= 1`` is returned.
    """
    if not irr_db > 0:
        raise DomainError(f"IRR must be > 0 dB, got {irr_db!r}")
    c = math.cos(phi)
    one_minus_c = 2.0 * math.sin(phi / 2) ** 2
    if irr_db == math.inf:
        k, km1 = c, -one_minus_c
    else:
        r = db2lin(irr_db)
        k = c * (r + 1) / (r - 1)
        # k - 1 without cancellation
        km1 = (2.0 - one_minus_c * (r + 1)) / (r - 1)
    if km1 < 0:
        raise InfeasibleParametersError(
            f"phase mismatch {math.degrees(phi):.4g} deg alone limits the IRR below {irr_db} dB"
        )
    return k + math.sqrt(km1 * (k + 1))


def coefficients_from_irr(irr_db_value: float, phi: float, side: Side) -> MismatchCoefficients:
    eps = eps_for_irr(irr_db_value, phi)
    return tx_coefficients(eps, phi) if side is Side.TX else rx_coefficients(eps, phi)


@dataclass(frozen=True)
class CompositeCoefficients:
    """Cross terms of a cascaded TX/RX imbalance."""

    xi11: complex
    xi22: complex
    xi12: complex
    xi21: complex
    lambda_rx: float

    @property
    def powers(self):
        """(|xi11|^2, |xi22|^2, |xi12|^2, |xi21|^2)"""
        return (abs(self.xi11) ** 2, abs(self.xi22) ** 2, abs(self.xi12) ** 2, abs(self.xi21) ** 2)


def composite_coefficients(tx: MismatchCoefficients, rx: MismatchCoefficients) -> CompositeCoefficients:
    if tx.side is not Side.TX or rx.side is not Side.RX:
        raise UsageError("composite_coefficients expects (TX, RX) coefficients in that order")
    return CompositeCoefficients(
        xi11=rx.mu * tx.mu,
        xi22=rx.nu * tx.nu.conjugate(),
        xi12=rx.mu * tx.nu,
        xi21=rx.nu * tx.mu.conjugate(),
        lambda_rx=rx.power,
    )


@dataclass(frozen=True)
class SinrModel:
    """One link scenario at a given average SNR.

    Single-carrier links (and the multi-carrier TX-only link) are described by
    the canonical triple ``(alpha, beta, A)`` with SINR
    ``alpha / (beta + A / gamma_id)``.  Multi-carrier RX-only and joint links
    carry the composite bundle ``xi`` instead and leave the triple as NaN.
    ``tx``/``rx`` hold the (possibly power-normalized) coefficients actually
    used, which the link simulator needs.
    """

    carrier_mode: CarrierMode
    impairment: Impairment
    gamma_bar: float
    alpha: float = 1.0
    beta: float = 0.0
    A: float = 1.0
    xi: Optional[CompositeCoefficients] = None
    tx: MismatchCoefficients = field(default_factory=lambda: MismatchCoefficients.ideal(Side.TX))
    rx: MismatchCoefficients = field(default_factory=lambda: MismatchCoefficients.ideal(Side.RX))
    normalized: bool = True

    def __post_init__(self):
        if not (self.gamma_bar > 0):
            raise DomainError(f"gamma_bar must be > 0, got {self.gamma_bar!r}")

    @property
    def canonical(self) -> bool:
        """True when the (alpha, beta, A) triple fully describes the SINR law."""
        return self.carrier_mode is CarrierMode.SINGLE or self.impairment in (
            Impairment.IDEAL,
            Impairment.TX,
        )

    @property
    def label(self) -> str:
        if self.impairment is Impairment.IDEAL:
            return "ideal"
        return f"{self.carrier_mode.value}-{self.impairment.value}"

    def with_gamma_bar(self, gamma_bar: float) -> "SinrModel":
        return replace(self, gamma_bar=gamma_bar)


def build_sinr_model(
    carrier_mode: CarrierMode,
    impairment: Impairment,
    tx: Optional[MismatchCoefficients],
    rx: Optional[MismatchCoefficients],
    gamma_bar: float,
    normalize: bool = True,
) -> SinrModel:
    """Assemble the scenario parameters for the given front-ends.

    Coefficients of a side that the scenario treats as ideal are ignored.
    With ``normalize`` each impaired side is rescaled to unit power gain,
    which keeps the transmit (and post-conversion) power fixed.
    """
    if not gamma_bar > 0:
        raise DomainError(f"gamma_bar must be > 0, got {gamma_bar!r}")
    ideal_tx = MismatchCoefficients.ideal(Side.TX)
    ideal_rx = MismatchCoefficients.ideal(Side.RX)
    if impairment is Impairment.IDEAL:
        return SinrModel(carrier_mode, impairment, gamma_bar, 1.0, 0.0, 1.0, None, ideal_tx, ideal_rx, normalize)

    use_tx = impairment in (Impairment.TX, Impairment.JOINT)
    use_rx = impairment in (Impairment.RX, Impairment.JOINT)
    if use_tx and tx is None or use_rx and rx is None:
        raise UsageError(f"{impairment.value} impairment needs the corresponding coefficients")
    t = tx if use_tx else ideal_tx
    r = rx if use_rx else ideal_rx
    if normalize:
        t, r = t.normalized(), r.normalized()
    xi = composite_coefficients(t, r)
    x11, x22, x12, x21 = xi.powers
    lam = xi.lambda_rx

    nan = math.nan
    if impairment is Impairment.TX:
        alpha, beta, a = abs(t.mu) ** 2, abs(t.nu) ** 2, 1.0
        bundle = None
    elif carrier_mode is CarrierMode.MULTI:
        alpha = beta = a = nan
        bundle = xi
    elif impairment is Impairment.RX:
        alpha, beta, a = abs(r.mu) ** 2, abs(r.nu) ** 2, lam
        bundle = None
    else:
        alpha, beta, a = x11 + x22, x12 + x21, lam
        bundle = xi
    return SinrModel(carrier_mode, impairment, gamma_bar, alpha, beta, a, bundle, t, r, normalize)
