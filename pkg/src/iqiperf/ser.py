"""Average symbol error rates of M-PSK, M-DPSK and noncoherent M-FSK.

Fading results follow the MGF approach: the conditional AWGN error
probability is written as a finite-range integral (PSK, DPSK) or a finite sum
(FSK) of exponentials in the SNR, and averaging over the SINR law replaces
each ``exp(-a * gamma)`` by ``M(-a)``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from scipy import integrate

from .errors import AccuracyError, DomainError, UnsupportedError
from .iqi import SinrModel
from .mgf import DEFAULT_SERIES, SeriesSpec, mgf_closed
from .special import DEFAULT_QUAD, QuadratureSpec

__all__ = ["Scheme", "ModulationSpec", "ser_awgn", "ser_fading", "FSK_MAX_ORDER"]

#: largest FSK order for which the alternating binomial sum keeps ~1e-9 accuracy
FSK_MAX_ORDER = 32

#: distance from the singular end of the PSK angle range
THETA_CLIP = 1e-9


class Scheme(enum.Enum):
    PSK = "psk"
    DPSK = "dpsk"
    FSK = "fsk"


@dataclass(frozen=True)
class ModulationSpec:
    scheme: Scheme
    M: int

    def __post_init__(self):
        if isinstance(self.M, bool) or int(self.M) != self.M or self.M < 2:
            raise DomainError(f"modulation order must be an integer >= 2, got {self.M!r}")
        object.__setattr__(self, "M", int(self.M))
        if self.scheme is Scheme.FSK and self.M > FSK_MAX_ORDER:
            raise UnsupportedError(
                f"FSK order {self.M} > {FSK_MAX_ORDER}: the alternating binomial sum cancels catastrophically"
            )

    @property
    def g_psk(self) -> float:
        if self.scheme is Scheme.FSK:
            raise UnsupportedError("g_psk is defined for PSK/DPSK only")
        return math.sin(math.pi / self.M) ** 2

    @property
    def rho(self) -> float:
        if self.scheme is Scheme.FSK:
            raise UnsupportedError("rho is defined for PSK/DPSK only")
        # sqrt(1 - sin^2) without cancellation
        return abs(math.cos(math.pi / self.M))

    @property
    def label(self) -> str:
        return f"{self.M}-{self.scheme.value.upper()}"

    @property
    def guess_rate(self) -> float:
        """``(M-1)/M``, the SER of a receiver that guesses."""
        return (self.M - 1) / self.M


def _fsk_terms(M):
    for k in range(1, M):
        yield k, (-1) ** (k + 1) * math.comb(M - 1, k) / (k + 1)


def _theta_integral(fn, upper, q: QuadratureSpec):
    val, err = integrate.quad(fn, 0.0, upper, epsabs=0.0, epsrel=q.rel_tol, limit=q.max_subdivisions)
    if err > 100.0 * q.rel_tol * max(abs(val), 1e-300) and err > 1e-15:
        raise AccuracyError(f"angle integral error estimate {err:.3g}", best_estimate=val / math.pi)
    return val / math.pi


def ser_awgn(mod: ModulationSpec, gamma: float, q: QuadratureSpec = DEFAULT_QUAD) -> float:
    """SER over AWGN at SNR ``gamma`` (linear)."""
    gamma = float(gamma)
    if not gamma >= 0:
        raise DomainError(f"SNR must be >= 0, got {gamma}")
    M = mod.M
    upper = (M - 1) * math.pi / M
    if mod.scheme is Scheme.PSK:
        g = mod.g_psk
        val = _theta_integral(
            lambda t: math.exp(-g * gamma / math.sin(max(t, THETA_CLIP)) ** 2), upper, q
        )
    elif mod.scheme is Scheme.DPSK:
        g, rho = mod.g_psk, mod.rho
        val = _theta_integral(lambda t: math.exp(-g * gamma / (1.0 + rho * math.cos(t))), upper, q)
    else:
        val = math.fsum(c * math.exp(-k * gamma / (k + 1)) for k, c in _fsk_terms(M))
    return min(max(val, 0.0), 1.0)


def ser_fading(
    mod: ModulationSpec,
    m: SinrModel,
    q: QuadratureSpec = DEFAULT_QUAD,
    series: SeriesSpec = DEFAULT_SERIES,
) -> float:
    """Average SER over Rayleigh fading for the SINR law of ``m``."""
    M = mod.M
    upper = (M - 1) * math.pi / M

    def mgf(s):
        return mgf_closed(m, s, series=series, q=q)

    if mod.scheme is Scheme.PSK:
        g = mod.g_psk
        val = _theta_integral(lambda t: mgf(-g / math.sin(max(t, THETA_CLIP)) ** 2), upper, q)
    elif mod.scheme is Scheme.DPSK:
        g, rho = mod.g_psk, mod.rho
        val = _theta_integral(lambda t: mgf(-g / (1.0 + rho * math.cos(t))), upper, q)
    else:
        val = math.fsum(c * mgf(-k / (k + 1)) for k, c in _fsk_terms(M))
    return min(max(val, 0.0), 1.0)
