"""SER upper bounds and high-SNR error floors for PSK and DPSK.

The SER integrands are largest where the MGF argument is least negative:
``theta = pi/2`` for PSK (argument ``-g``) and ``theta = 0`` for DPSK
(argument ``-g / (1 + rho)``).  Replacing the integrand by that maximum over
an interval of length ``(M-1) pi / M`` gives

    P_s <= (M-1)/M * M_gamma(-g_eff)

with ``g_eff = g`` (PSK) or ``g / (1 + rho)`` (DPSK).  The asymptotic bound
(error floor) is the ``gamma_bar -> inf`` limit of the same expression.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .errors import UnsupportedError
from .iqi import CarrierMode, Impairment, SinrModel
from .mgf import JointRegime, joint_constants, mgf_closed
from .ser import ModulationSpec, Scheme
from .special import ei_complement

__all__ = ["BoundKind", "BoundResult", "ser_upper_bound", "error_floor", "effective_g"]


class BoundKind(enum.Enum):
    FINITE_SNR = "finite_snr"
    ASYMPTOTIC = "asymptotic"


@dataclass(frozen=True)
class BoundResult:
    value: float
    kind: BoundKind
    scenario: str
    modulation: str


def effective_g(mod: ModulationSpec) -> float:
    """MGF argument magnitude at the maximizing angle."""
    if mod.scheme is Scheme.PSK:
        return mod.g_psk
    if mod.scheme is Scheme.DPSK:
        return mod.g_psk / (1.0 + mod.rho)
    raise UnsupportedError("no closed-form SER upper bound exists for FSK")


def _check_joint(m: SinrModel):
    if m.carrier_mode is CarrierMode.MULTI and m.impairment is Impairment.JOINT:
        x11, x22, x12, x21 = m.xi.powers
        if x12 == 0.0 or x21 == 0.0:
            return  # one side ideal: reduces to a single-impairment law
        if joint_constants(m.xi).regime is not JointRegime.EQUAL:
            raise UnsupportedError(
                "the multi-carrier joint bound needs |xi12|^2 = |xi21|^2 (equal TX and RX IRR)"
            )


def _floor_value(g, m: SinrModel) -> float:
    """``lim_{gamma_bar -> inf} M_gamma(-g)``."""
    if m.impairment is Impairment.IDEAL:
        return 0.0
    if m.canonical:
        return math.exp(-g * m.alpha / m.beta) if m.beta > 0 else 0.0
    x11, x22, x12, x21 = m.xi.powers
    if x12 == 0.0:
        # image enters through the RX only: SINR -> X11 g1 / (X21 g2), an F-type ratio
        return 0.0 if x21 == 0.0 else ei_complement(g * x11 / x21)
    if x21 == 0.0:
        return math.exp(-g * x11 / x12)
    # equal TX/RX imbalance: SINR -> (X11 u + X22 (1 - u)) / X with u ~ U(0, 1)
    d = x11 * x21 - x22 * x12
    num = x12**2 * -math.expm1(-g * x11 / x12) - x21**2 * -math.expm1(-g * x22 / x21)
    return num / (g * d)


def ser_upper_bound(mod: ModulationSpec, m: SinrModel, kind: BoundKind = BoundKind.FINITE_SNR) -> BoundResult:
    """Upper bound on the PSK/DPSK SER, at the model's SNR or as ``gamma_bar -> inf``."""
    g = effective_g(mod)
    _check_joint(m)
    if kind is BoundKind.FINITE_SNR:
        raw = mod.guess_rate * mgf_closed(m, -g)
    else:
        raw = mod.guess_rate * _floor_value(g, m)
    return BoundResult(min(max(raw, 0.0), 1.0), kind, m.label, mod.label)


def error_floor(mod: ModulationSpec, m: SinrModel) -> float:
    """High-SNR error floor implied by the asymptotic bound (0 for an ideal link)."""
    return ser_upper_bound(mod, m, BoundKind.ASYMPTOTIC).value
