"""Monte Carlo link simulation with symbol error counting.

Two simulation models are available:

``"baseband"``
    The full signal chain.  Data symbols (and independent image-carrier
    symbols in multi-carrier links) are mapped through the TX imbalance,
    Rayleigh channel(s), additive noise and the RX imbalance
    ``y -> mu_r y + nu_r conj(y_image)``.  PSK is detected coherently after
    dividing by the composite coefficient of the wanted symbol (genie CSI);
    DPSK differentially over symbol pairs sharing one channel draw; FSK
    noncoherently with a correlator bank over ``samples_per_symbol`` samples.
    The image term is never treated; it is whatever it physically is.

``"sinr"``
    Draw the instantaneous SINR from the scenario's channel statistics and
    detect symbols in complex AWGN at that SINR.  This is the link the
    analytic SER expressions describe (image leakage acting as Gaussian
    interference), exercised symbol by symbol.

Batches draw from independent streams spawned from the master seed with
:class:`numpy.random.SeedSequence`, so results depend only on the
configuration and seed, never on the number of workers.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import stats

from .errors import DomainError
from .iqi import CarrierMode, Impairment, SinrModel
from .ser import ModulationSpec, Scheme

__all__ = [
    "SimConfig",
    "SerEstimate",
    "wilson_interval",
    "sample_channel",
    "sample_sinr",
    "simulate_ser",
    "batch_seeds",
]

MODELS = ("baseband", "sinr")


@dataclass(frozen=True)
class SimConfig:
    """Monte Carlo settings.

    ``samples_per_symbol`` defaults to ``8 * M`` for FSK waveforms.
    ``batch`` only bounds memory; it is part of the stream layout, so changing
    it changes the (equally valid) random draws.
    """

    n_symbols: int = 1_000_000
    seed: int = 0
    samples_per_symbol: Optional[int] = None
    batch: int = 50_000
    model: str = "baseband"
    confidence: float = 0.997
    workers: int = 1

    def __post_init__(self):
        if int(self.n_symbols) != self.n_symbols or self.n_symbols < 1000:
            raise DomainError(f"n_symbols must be an integer >= 1000, got {self.n_symbols!r}")
        if not 0 <= int(self.seed) < 2**64:
            raise DomainError("seed must be a 64-bit unsigned integer")
        if self.samples_per_symbol is not None and self.samples_per_symbol < 2:
            raise DomainError("samples_per_symbol must be >= 2")
        if self.batch < 1:
            raise DomainError("batch must be >= 1")
        if self.model not in MODELS:
            raise DomainError(f"model must be one of {MODELS}, got {self.model!r}")
        if not 0.0 < self.confidence < 1.0:
            raise DomainError("confidence must be in (0, 1)")
        if self.workers < 1:
            raise DomainError("workers must be >= 1")


@dataclass(frozen=True)
class SerEstimate:
    errors: int
    trials: int
    p_hat: float
    ci_lo: float
    ci_hi: float

    @property
    def ci(self):
        return (self.ci_lo, self.ci_hi)

    def covers(self, p: float) -> bool:
        return self.ci_lo <= p <= self.ci_hi


def wilson_interval(errors: int, trials: int, confidence: float = 0.997):
    """Wilson score interval for a binomial proportion."""
    if trials <= 0 or not 0 <= errors <= trials:
        raise DomainError("need 0 <= errors <= trials and trials > 0")
    z = stats.norm.ppf(0.5 + confidence / 2.0)
    p = errors / trials
    z2n = z * z / trials
    centre = (p + z2n / 2.0) / (1.0 + z2n)
    half = z * math.sqrt(p * (1.0 - p) / trials + z2n / (4.0 * trials)) / (1.0 + z2n)
    return max(0.0, float(centre - half)), min(1.0, float(centre + half))


def sample_channel(rng: np.random.Generator, size=None):
    """Rayleigh block-fading coefficient: circularly symmetric CN(0, 1)."""
    re = rng.standard_normal(size)
    im = rng.standard_normal(size)
    return (re + 1j * im) * math.sqrt(0.5)


def _sinr_from_gains(m: SinrModel, g1, g2):
    if m.impairment is Impairment.IDEAL:
        return g1
    with np.errstate(divide="ignore"):
        if m.canonical:
            return m.alpha / (m.beta + m.A / g1)
        x11, x22, x12, x21 = m.xi.powers
        return (x11 * g1 + x22 * g2) / (x12 * g1 + x21 * g2 + m.xi.lambda_rx)


def sample_sinr(m: SinrModel, rng: np.random.Generator, size=None):
    """Instantaneous SINR draws; the image-carrier gain is drawn independently."""
    g1 = m.gamma_bar * np.abs(sample_channel(rng, size)) ** 2
    g2 = m.gamma_bar * np.abs(sample_channel(rng, size)) ** 2
    return _sinr_from_gains(m, g1, g2)


def batch_seeds(seed: int, n_symbols: int, batch: int):
    """(symbols, SeedSequence) for every batch, spawned from the master seed."""
    n_batches = -(-n_symbols // batch)
    children = np.random.SeedSequence(int(seed)).spawn(n_batches)
    sizes = [batch] * (n_batches - 1) + [n_symbols - batch * (n_batches - 1)]
    return list(zip(sizes, children))


# ---------------------------------------------------------------------------
# baseband link


def _psk_points(idx, M):
    return np.exp(2j * np.pi * idx / M)


def _psk_decide(z, M):
    return np.mod(np.rint(np.angle(z) * M / (2 * np.pi)).astype(np.int64), M)


def _cn(rng, shape, var):
    """CN(0, var) draws; the real/imaginary pairs come from one normal array."""
    shape = (shape,) if np.ndim(shape) == 0 else tuple(shape)
    w = rng.standard_normal(shape[:-1] + (2 * shape[-1],)).view(np.complex128)
    w *= math.sqrt(0.5 * var)
    return w


class _Link:
    """Baseband front-end of one scenario (TX map, channel(s), noise, RX map)."""

    def __init__(self, m: SinrModel):
        self.m = m
        self.multi = m.carrier_mode is CarrierMode.MULTI
        self.tx, self.rx = m.tx, m.rx
        self.n0 = 1.0 / m.gamma_bar

    @property
    def uses_image(self) -> bool:
        """Whether the image carrier's channel and noise reach the wanted carrier."""
        return self.multi and self.rx.nu != 0

    def receive(self, s, s_im, h, h_im, n, n_im):
        """Received sample(s) on the wanted carrier.

        ``s_im``/``h_im``/``n_im`` belong to the image carrier.  Single-carrier
        links ignore them (the conjugate partner is the signal itself), as do
        multi-carrier links whose receiver is balanced.
        """
        y = self._channel(h, s, s_im if self.multi else s, n)
        r = self.rx.mu * y
        if self.rx.nu != 0:
            y_im = self._channel(h_im, s_im, s, n_im) if self.multi else y
            r += self.rx.nu * np.conj(y_im)
        return r

    def _channel(self, h, s, partner, n):
        """``h (mu_t s + nu_t conj(partner)) + n``."""
        y = self.tx.mu * s
        if self.tx.nu != 0:
            y += self.tx.nu * np.conj(partner)
        y *= h
        y += n
        return y

    def draw_image(self, rng, shape, var):
        """Image-carrier channel and noise, or ``(None, None)`` when unused."""
        if not self.uses_image:
            return None, None
        hs = shape if np.ndim(shape) == 0 else (shape[0], 1)
        return sample_channel(rng, hs), _cn(rng, shape, var)

    def signal_coefficient(self, h, h_im):
        """Coefficient multiplying the wanted symbol in :meth:`receive`."""
        if self.rx.nu == 0:
            return self.rx.mu * self.tx.mu * h
        partner = h_im if self.multi else h
        return self.rx.mu * self.tx.mu * h + self.rx.nu * np.conj(self.tx.nu) * np.conj(partner)


def _baseband_psk(link: _Link, M, n, rng):
    idx = rng.integers(0, M, n)
    s_im = _psk_points(rng.integers(0, M, n), M)
    h = sample_channel(rng, n)
    w = _cn(rng, n, link.n0)
    h_im, w_im = link.draw_image(rng, n, link.n0)
    r = link.receive(_psk_points(idx, M), s_im, h, h_im, w, w_im)
    z = r / link.signal_coefficient(h, h_im)
    return int(np.count_nonzero(_psk_decide(z, M) != idx))


def _baseband_dpsk(link: _Link, M, n, rng):
    idx0 = rng.integers(0, M, n)
    dif = rng.integers(0, M, n)
    h = sample_channel(rng, n)
    h_im, _ = link.draw_image(rng, n, link.n0)
    r = []
    for idx in (idx0, idx0 + dif):
        # the image carrier carries its own (independent) data in each symbol slot
        s_im = _psk_points(rng.integers(0, M, n), M)
        n_im = _cn(rng, n, link.n0) if link.uses_image else None
        r.append(link.receive(_psk_points(idx, M), s_im, h, h_im, _cn(rng, n, link.n0), n_im))
    return int(np.count_nonzero(_psk_decide(np.conj(r[0]) * r[1], M) != dif))


def fsk_tones(M: int, N: int):
    """Tone matrix ``(M, N)``: ``exp(j 2 pi f_m t_n)`` with ``f_m T_s = 2m + 1 - M``."""
    k = 2 * np.arange(M) + 1 - M
    return np.exp(2j * np.pi * np.outer(k, np.arange(N)) / N)


def _baseband_fsk(link: _Link, M, N, n, rng):
    tones = fsk_tones(M, N)
    idx = rng.integers(0, M, n)
    s_im = tones[rng.integers(0, M, n)]
    h = sample_channel(rng, (n, 1))
    # per-sample noise variance N / gamma_bar gives SNR gamma_bar at the correlator output
    w = _cn(rng, (n, N), N * link.n0)
    h_im, w_im = link.draw_image(rng, (n, N), N * link.n0)
    r = link.receive(tones[idx], s_im, h, h_im, w, w_im)
    z = r @ np.conj(tones).T
    return int(np.count_nonzero(np.argmax(np.abs(z), axis=1) != idx))


# ---------------------------------------------------------------------------
# SINR-equivalent AWGN link


def _sinr_link(m: SinrModel, mod: ModulationSpec, n, rng):
    gamma = sample_sinr(m, rng, n)
    amp = np.sqrt(gamma)
    M = mod.M
    phase = np.exp(2j * np.pi * rng.random(n))
    if mod.scheme is Scheme.PSK:
        idx = rng.integers(0, M, n)
        r = amp * phase * _psk_points(idx, M) + sample_channel(rng, n)
        return int(np.count_nonzero(_psk_decide(r * np.conj(phase), M) != idx))
    if mod.scheme is Scheme.DPSK:
        idx0 = rng.integers(0, M, n)
        dif = rng.integers(0, M, n)
        r0 = amp * phase * _psk_points(idx0, M) + sample_channel(rng, n)
        r1 = amp * phase * _psk_points(idx0 + dif, M) + sample_channel(rng, n)
        return int(np.count_nonzero(_psk_decide(np.conj(r0) * r1, M) != dif))
    idx = rng.integers(0, M, n)
    z = sample_channel(rng, (n, M))
    z[np.arange(n), idx] += amp * phase
    return int(np.count_nonzero(np.argmax(np.abs(z), axis=1) != idx))


# ---------------------------------------------------------------------------


def _run_batch(args):
    mod, m, cfg, n, seq = args
    rng = np.random.default_rng(seq)
    if cfg.model == "sinr":
        return _sinr_link(m, mod, n, rng)
    link = _Link(m)
    if mod.scheme is Scheme.PSK:
        return _baseband_psk(link, mod.M, n, rng)
    if mod.scheme is Scheme.DPSK:
        return _baseband_dpsk(link, mod.M, n, rng)
    N = cfg.samples_per_symbol or 8 * mod.M
    if N < 2 * mod.M:
        raise DomainError(f"FSK needs samples_per_symbol >= 2M = {2 * mod.M}, got {N}")
    return _baseband_fsk(link, mod.M, N, n, rng)


def simulate_ser(mod: ModulationSpec, m: SinrModel, cfg: SimConfig = SimConfig()) -> SerEstimate:
    """Count symbol errors over ``cfg.n_symbols`` decisions."""
    batch = cfg.batch
    if mod.scheme is Scheme.FSK and cfg.model == "baseband":
        # waveform batches are (batch x samples) complex arrays; keep them ~64 MB
        N = cfg.samples_per_symbol or 8 * mod.M
        batch = max(1, min(batch, 4_000_000 // N))
    jobs = [(mod, m, cfg, n, seq) for n, seq in batch_seeds(cfg.seed, cfg.n_symbols, batch)]
    if cfg.workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            errors = sum(pool.map(_run_batch, jobs))
    else:
        errors = sum(map(_run_batch, jobs))
    lo, hi = wilson_interval(errors, cfg.n_symbols, cfg.confidence)
    return SerEstimate(errors, cfg.n_symbols, errors / cfg.n_symbols, lo, hi)
