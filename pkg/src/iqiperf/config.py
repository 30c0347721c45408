"""Sweep configuration files.

A configuration is an INI document with up to four flat sections::

    [sweep]
    scenarios   = single-tx, single-rx, single-joint, ideal
    modulations = psk-2, psk-4, psk-8, psk-16
    snr_db      = 0:40:5          ; start:stop:step (inclusive) or a comma list
    irr_db      = 10:35:1         ; optional IRR sweep (both impaired sides); needs a single snr_db
    simulate    = yes
    bound       = no
    output      = results/fig1    ; CSV path prefix (".csv" is appended)

    [iqi]
    tx_irr_db = 20                ; or tx_eps = 1.2 (amplitude ratio)
    tx_phi_deg = 3
    rx_irr_db = 20
    rx_phi_deg = 3
    normalize = yes

    [simulation]
    n_symbols = 1000000
    seed = 12345                  ; drawn at random (and recorded) when absent
    model = baseband              ; or "sinr"
    samples_per_symbol = 0        ; FSK waveform length, 0 = 8 M
    batch = 50000
    workers = 1
    confidence = 0.997

    [quadrature]
    rel_tol = 1e-10
    abs_tol = 1e-14
    max_subdivisions = 2000

Scenario names are ``ideal`` and ``<single|multi>-<tx|rx|joint>``;
modulations are ``<psk|dpsk|fsk>-<M>``.
"""

from __future__ import annotations

import configparser
import dataclasses
import hashlib
import json
import math
import secrets
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .errors import ConfigError, InfeasibleParametersError, IqiError
from .iqi import (
    CarrierMode,
    Impairment,
    MismatchCoefficients,
    Side,
    coefficients_from_irr,
    irr_db,
    rx_coefficients,
    tx_coefficients,
)
from .montecarlo import SimConfig
from .ser import ModulationSpec, Scheme
from .special import QuadratureSpec

__all__ = [
    "SideSpec",
    "SweepSpec",
    "parse_config",
    "load_config",
    "parse_scenario",
    "parse_modulation",
    "parse_range",
    "fixture_path",
]

_KEYS = {
    "sweep": {"scenarios", "modulations", "snr_db", "irr_db", "simulate", "bound", "output"},
    "iqi": {
        "tx_irr_db", "tx_eps", "tx_phi_deg",
        "rx_irr_db", "rx_eps", "rx_phi_deg",
        "normalize",
    },
    "simulation": {"n_symbols", "seed", "model", "samples_per_symbol", "batch", "workers", "confidence"},
    "quadrature": {"rel_tol", "abs_tol", "max_subdivisions"},
}


@dataclass(frozen=True)
class SideSpec:
    """Imbalance of one converter, given by IRR (dB) or amplitude ratio, plus phase (deg)."""

    side: Side
    phi_deg: float = 0.0
    irr_db: Optional[float] = None
    eps: Optional[float] = None

    def coefficients(self, irr_override: Optional[float] = None) -> MismatchCoefficients:
        phi = math.radians(self.phi_deg)
        if irr_override is not None:
            return coefficients_from_irr(irr_override, phi, self.side)
        if self.eps is not None:
            make = tx_coefficients if self.side is Side.TX else rx_coefficients
            return make(self.eps, phi)
        if self.irr_db is None:
            raise ConfigError(f"{self.side.value}: give either irr_db or eps")
        return coefficients_from_irr(self.irr_db, phi, self.side)

    def irr_value(self) -> float:
        return irr_db(self.coefficients())


@dataclass(frozen=True)
class SweepSpec:
    scenarios: tuple
    modulations: tuple
    snr_db: tuple
    tx: SideSpec = field(default_factory=lambda: SideSpec(Side.TX, 0.0, irr_db=math.inf))
    rx: SideSpec = field(default_factory=lambda: SideSpec(Side.RX, 0.0, irr_db=math.inf))
    irr_db: Optional[tuple] = None
    normalize: bool = True
    simulate: bool = False
    bound: bool = False
    sim: SimConfig = field(default_factory=SimConfig)
    quad: QuadratureSpec = field(default_factory=QuadratureSpec)
    output: Optional[str] = None

    def __post_init__(self):
        if not self.scenarios:
            raise ConfigError("at least one scenario is required")
        if not self.modulations:
            raise ConfigError("at least one modulation is required")
        if not self.snr_db:
            raise ConfigError("snr_db must list at least one value")
        if self.irr_db is not None:
            if len(self.snr_db) != 1:
                raise ConfigError("an IRR sweep runs at a single snr_db value")
            if not self.irr_db:
                raise ConfigError("irr_db must list at least one value")
        if self.bound and any(mod.scheme is Scheme.FSK for mod in self.modulations):
            raise ConfigError("bound requested for FSK: no upper bound exists for FSK")

    def with_overrides(self, snr_db=None, seed=None, output=None) -> "SweepSpec":
        spec = self
        if snr_db is not None:
            spec = dataclasses.replace(spec, snr_db=tuple(snr_db))
        if seed is not None:
            spec = dataclasses.replace(spec, sim=dataclasses.replace(spec.sim, seed=int(seed)))
        if output is not None:
            spec = dataclasses.replace(spec, output=str(output))
        return spec

    def canonical(self) -> dict:
        """Plain-data description of everything that affects the results."""
        def side(s: SideSpec):
            return {"phi_deg": s.phi_deg, "irr_db": s.irr_db, "eps": s.eps}

        return {
            "scenarios": [scenario_name(c, i) for c, i in self.scenarios],
            "modulations": [mod.label for mod in self.modulations],
            "snr_db": list(self.snr_db),
            "irr_db": None if self.irr_db is None else list(self.irr_db),
            "tx": side(self.tx),
            "rx": side(self.rx),
            "normalize": self.normalize,
            "simulate": self.simulate,
            "bound": self.bound,
            "sim": dataclasses.asdict(self.sim),
            "quad": dataclasses.asdict(self.quad),
        }

    @property
    def config_hash(self) -> str:
        blob = json.dumps(self.canonical(), sort_keys=True, default=repr)
        return hashlib.sha256(blob.encode()).hexdigest()[:16]


def scenario_name(carrier: CarrierMode, impairment: Impairment) -> str:
    if impairment is Impairment.IDEAL:
        return "ideal"
    return f"{carrier.value}-{impairment.value}"


def parse_scenario(text: str):
    name = text.strip().lower()
    if name == "ideal":
        return CarrierMode.SINGLE, Impairment.IDEAL
    try:
        carrier, imp = name.split("-")
        return CarrierMode(carrier), Impairment(imp)
    except ValueError:
        raise ConfigError(
            f"unknown scenario {text!r}; expected 'ideal' or '<single|multi>-<tx|rx|joint>'"
        ) from None


def parse_modulation(text: str) -> ModulationSpec:
    try:
        scheme, order = text.strip().lower().split("-")
        return ModulationSpec(Scheme(scheme), int(order))
    except IqiError as exc:
        raise ConfigError(f"modulation {text!r}: {exc}") from None
    except ValueError:
        raise ConfigError(f"unknown modulation {text!r}; expected '<psk|dpsk|fsk>-<M>'") from None


def parse_range(text: str) -> tuple:
    """``start:stop:step`` (stop included when hit) or a comma-separated list."""
    text = text.strip()
    try:
        if ":" in text:
            start, stop, step = (float(v) for v in text.split(":"))
            if step <= 0:
                raise ConfigError(f"range step must be > 0 in {text!r}")
            if stop < start:
                raise ConfigError(f"range stop < start in {text!r}")
            n = int(math.floor((stop - start) / step + 1e-9)) + 1
            return tuple(round(start + i * step, 12) for i in range(n))
        return tuple(float(v) for v in text.split(","))
    except ValueError:
        raise ConfigError(f"cannot parse range {text!r}") from None


def _list(text: str):
    return [item for item in (part.strip() for part in text.split(",")) if item]


def _side(sec, prefix: str, side: Side) -> SideSpec:
    irr = sec.get(f"{prefix}_irr_db")
    eps = sec.get(f"{prefix}_eps")
    if irr is not None and eps is not None:
        raise ConfigError(f"give {prefix}_irr_db or {prefix}_eps, not both")
    try:
        spec = SideSpec(
            side,
            phi_deg=float(sec.get(f"{prefix}_phi_deg", "0")),
            irr_db=None if irr is None else float(irr),
            eps=None if eps is None else float(eps),
        )
    except ValueError as exc:
        raise ConfigError(f"[iqi] {prefix}: {exc}") from None
    if irr is None and eps is None:
        return None
    return spec


def parse_config(text: str) -> SweepSpec:
    """Parse and validate a configuration document."""
    cp = configparser.ConfigParser(inline_comment_prefixes=(";", "#"), interpolation=None)
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed configuration: {exc}") from None
    for section in cp.sections():
        if section not in _KEYS:
            raise ConfigError(f"unknown section [{section}]")
        unknown = sorted(set(cp[section]) - _KEYS[section])
        if unknown:
            raise ConfigError(f"unknown key(s) in [{section}]: {', '.join(unknown)}")
    if not cp.has_section("sweep"):
        raise ConfigError("missing [sweep] section")

    sw = cp["sweep"]
    iqi = cp["iqi"] if cp.has_section("iqi") else {}
    simsec = cp["simulation"] if cp.has_section("simulation") else {}
    qsec = cp["quadrature"] if cp.has_section("quadrature") else {}

    def flag(sec, key, default):
        try:
            return sec.getboolean(key, fallback=default) if hasattr(sec, "getboolean") else default
        except ValueError:
            raise ConfigError(f"{key} must be yes/no, got {sec[key]!r}") from None

    for key in ("scenarios", "modulations", "snr_db"):
        if key not in sw:
            raise ConfigError(f"[sweep] needs '{key}'")
    scenarios = tuple(dict.fromkeys(parse_scenario(s) for s in _list(sw["scenarios"])))
    modulations = tuple(dict.fromkeys(parse_modulation(m) for m in _list(sw["modulations"])))
    snr = parse_range(sw["snr_db"])
    irr_sweep = parse_range(sw["irr_db"]) if "irr_db" in sw else None

    tx = _side(iqi, "tx", Side.TX)
    rx = _side(iqi, "rx", Side.RX)
    for carrier, imp in scenarios:
        if irr_sweep is not None:
            continue
        if imp in (Impairment.TX, Impairment.JOINT) and tx is None:
            raise ConfigError(f"scenario {scenario_name(carrier, imp)} needs tx_irr_db or tx_eps in [iqi]")
        if imp in (Impairment.RX, Impairment.JOINT) and rx is None:
            raise ConfigError(f"scenario {scenario_name(carrier, imp)} needs rx_irr_db or rx_eps in [iqi]")
    tx = tx or SideSpec(Side.TX, float(iqi.get("tx_phi_deg", "0")), irr_db=math.inf)
    rx = rx or SideSpec(Side.RX, float(iqi.get("rx_phi_deg", "0")), irr_db=math.inf)
    if irr_sweep is None:
        for s in (tx, rx):
            if s.irr_db is not None and math.isinf(s.irr_db):
                continue
            try:
                s.coefficients()
            except (InfeasibleParametersError, IqiError) as exc:
                raise ConfigError(f"[iqi] {s.side.value}: {exc}") from None

    try:
        seed = int(simsec["seed"]) if "seed" in simsec else secrets.randbits(63)
        sps = int(simsec.get("samples_per_symbol", "0")) or None
        sim = SimConfig(
            n_symbols=int(float(simsec.get("n_symbols", "1000000"))),
            seed=seed,
            samples_per_symbol=sps,
            batch=int(simsec.get("batch", "50000")),
            model=simsec.get("model", "baseband").strip(),
            confidence=float(simsec.get("confidence", "0.997")),
            workers=int(simsec.get("workers", "1")),
        )
        quad = QuadratureSpec(
            rel_tol=float(qsec.get("rel_tol", "1e-10")),
            abs_tol=float(qsec.get("abs_tol", "1e-14")),
            max_subdivisions=int(qsec.get("max_subdivisions", "2000")),
        )
    except (ValueError, IqiError) as exc:
        raise ConfigError(f"invalid setting: {exc}") from None

    return SweepSpec(
        scenarios=scenarios,
        modulations=modulations,
        snr_db=snr,
        tx=tx,
        rx=rx,
        irr_db=irr_sweep,
        normalize=flag(iqi, "normalize", True),
        simulate=flag(sw, "simulate", False),
        bound=flag(sw, "bound", False),
        sim=sim,
        quad=quad,
        output=sw.get("output"),
    )


def load_config(path) -> SweepSpec:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read configuration {path}: {exc}") from None
    return parse_config(text)


def fixture_path(name: str) -> Path:
    """Path of a configuration shipped with the package (e.g. ``"paper_fig1.cfg"``)."""
    path = Path(__file__).with_name("configs") / name
    if not path.is_file():
        raise ConfigError(f"no shipped configuration named {name!r}")
    return path
