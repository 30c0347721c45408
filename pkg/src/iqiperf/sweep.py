"""Sweep execution, CSV output and the validation report.

Every sweep point is one (scenario, modulation, SNR or IRR) triple.  The
analytic SER is always computed; Monte Carlo estimates and bounds follow the
spec flags.  A failure at one point is recorded in that row's ``error`` column
and the sweep carries on.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import astuple, dataclass, fields
from pathlib import Path
from typing import Optional

from . import __version__
from .bounds import BoundKind, ser_upper_bound
from .config import SweepSpec, scenario_name
from .errors import IqiError, UnsupportedError
from .iqi import CarrierMode, Impairment, build_sinr_model, db2lin
from .mgf import DEFAULT_SERIES, JointRegime, joint_constants, mgf_closed, mgf_quadrature
from .montecarlo import simulate_ser
from .ser import Scheme, ser_fading

__all__ = [
    "CurveRow",
    "run_sweep",
    "write_csv",
    "read_csv",
    "format_csv",
    "ValidationLine",
    "validate",
    "format_report",
    "MIN_CHECKED_SER",
    "MGF_CHECK_POINTS",
]

#: below this analytic SER a Monte Carlo point is not expected to resolve the curve
MIN_CHECKED_SER = 1e-4
#: MGF arguments at which validation compares the closed form with quadrature
MGF_CHECK_POINTS = (-0.01, -0.1, -1.0, -10.0, -100.0)
#: relative tolerance of the MGF check (the second value applies to the series regimes)
MGF_TOL = 1e-8
MGF_TOL_SERIES = 1e-6
#: relative slack of the dominance check, covering rounding in cases where bound == SER
DOMINANCE_RTOL = 1e-12


@dataclass
class CurveRow:
    scenario: str
    modulation: str
    M: int
    snr_db: float
    irr_db: Optional[float]
    phi_deg: Optional[float]
    ser_analytic: Optional[float] = None
    ser_mc: Optional[float] = None
    mc_ci_lo: Optional[float] = None
    mc_ci_hi: Optional[float] = None
    ser_bound: Optional[float] = None
    ser_floor: Optional[float] = None
    n_symbols: Optional[int] = None
    seed: Optional[int] = None
    error: str = ""
    note: str = ""


_FLOAT_FIELDS = {f.name for f in fields(CurveRow) if f.type == "Optional[float]"}
_INT_FIELDS = {"M", "n_symbols", "seed"}
_FLOAT_FIELDS.add("snr_db")


def _impaired_sides(imp: Impairment):
    return imp in (Impairment.TX, Impairment.JOINT), imp in (Impairment.RX, Impairment.JOINT)


def _build(spec: SweepSpec, carrier, imp, snr_db, irr_sweep):
    use_tx, use_rx = _impaired_sides(imp)
    tx = spec.tx.coefficients(irr_sweep) if use_tx else None
    rx = spec.rx.coefficients(irr_sweep) if use_rx else None
    return build_sinr_model(carrier, imp, tx, rx, db2lin(snr_db), normalize=spec.normalize)


def _row_iqi(spec: SweepSpec, imp: Impairment, irr_sweep):
    """IRR / phase reported for a row: the impaired side (RX for joint links)."""
    use_tx, use_rx = _impaired_sides(imp)
    if not (use_tx or use_rx):
        return None, None
    side = spec.rx if use_rx else spec.tx
    irr = irr_sweep if irr_sweep is not None else (side.irr_db if side.eps is None else side.irr_value())
    return irr, side.phi_deg


def _points(spec: SweepSpec):
    if spec.irr_db is None:
        return [(snr, None) for snr in spec.snr_db]
    return [(spec.snr_db[0], irr) for irr in spec.irr_db]


def run_sweep(spec: SweepSpec, simulate: Optional[bool] = None, bound: Optional[bool] = None) -> list:
    """Evaluate every sweep point; the flags default to the spec's."""
    simulate = spec.simulate if simulate is None else simulate
    bound = spec.bound if bound is None else bound
    rows = []
    for carrier, imp in spec.scenarios:
        for mod in spec.modulations:
            for snr, irr in _points(spec):
                row_irr, row_phi = _row_iqi(spec, imp, irr)
                row = CurveRow(scenario_name(carrier, imp), mod.label, mod.M, snr, row_irr, row_phi)
                try:
                    m = _build(spec, carrier, imp, snr, irr)
                    row.ser_analytic = ser_fading(mod, m, q=spec.quad)
                    if bound and mod.scheme is not Scheme.FSK:
                        try:
                            row.ser_bound = ser_upper_bound(mod, m, BoundKind.FINITE_SNR).value
                            row.ser_floor = ser_upper_bound(mod, m, BoundKind.ASYMPTOTIC).value
                        except UnsupportedError as exc:
                            row.note = f"no bound: {exc}"
                    if simulate:
                        est = simulate_ser(mod, m, spec.sim)
                        row.ser_mc, row.mc_ci_lo, row.mc_ci_hi = est.p_hat, est.ci_lo, est.ci_hi
                        row.n_symbols, row.seed = est.trials, spec.sim.seed
                        if row.ser_analytic < MIN_CHECKED_SER and est.trials * row.ser_analytic < 100:
                            row.note = "insufficient trials"
                except (IqiError, ArithmeticError, ValueError) as exc:
                    row.error = f"{type(exc).__name__}: {exc}"
                rows.append(row)
    return rows


# ---------------------------------------------------------------------------
# CSV


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def format_csv(rows, spec: Optional[SweepSpec] = None, extra: Optional[dict] = None) -> str:
    """CSV text: ``# key=value`` metadata lines, a header, one line per row."""
    buf = io.StringIO()
    meta = {"tool": "iqiperf", "version": __version__}
    if spec is not None:
        meta.update(config_hash=spec.config_hash, seed=spec.sim.seed, sim_model=spec.sim.model,
                    normalize=spec.normalize)
    meta.update(extra or {})
    for key, value in meta.items():
        buf.write(f"# {key}={value}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow([f.name for f in fields(CurveRow)])
    for row in rows:
        writer.writerow([_fmt(v) for v in astuple(row)])
    return buf.getvalue()


def write_csv(path, rows, spec: Optional[SweepSpec] = None, extra: Optional[dict] = None) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(format_csv(rows, spec, extra))
    return path


def read_csv(path_or_text):
    """Parse a CSV written by :func:`write_csv`; returns ``(metadata, rows)``."""
    text = str(path_or_text)
    if "\n" not in text:
        text = Path(text).read_text()
    meta, body = {}, []
    for line in text.splitlines(keepends=True):
        if line.startswith("# ") and not body:
            key, _, value = line[2:].rstrip("\n").partition("=")
            meta[key] = value
        else:
            body.append(line)
    rows = []
    for rec in csv.DictReader(body):
        values = {}
        for f in fields(CurveRow):
            raw = rec[f.name]
            if f.name in _INT_FIELDS:
                values[f.name] = int(raw) if raw else None
            elif f.name in _FLOAT_FIELDS:
                values[f.name] = float(raw) if raw else None
            else:
                values[f.name] = raw
        rows.append(CurveRow(**values))
    return meta, rows


# ---------------------------------------------------------------------------
# validation


@dataclass(frozen=True)
class ValidationLine:
    scenario: str
    modulation: str
    snr_db: float
    irr_db: Optional[float]
    coverage: str  # pass / fail / skip
    dominance: str  # pass / fail / n/a
    mgf_max_rel_err: float
    mgf: str  # pass / fail
    error: str = ""

    @property
    def ok(self) -> bool:
        return not self.error and "fail" not in (self.coverage, self.dominance, self.mgf)

    def format(self) -> str:
        irr = "" if self.irr_db is None else _fmt(float(self.irr_db))
        return (
            f"{'PASS' if self.ok else 'FAIL'} scenario={self.scenario} modulation={self.modulation} "
            f"snr_db={_fmt(float(self.snr_db))} irr_db={irr} coverage={self.coverage} "
            f"dominance={self.dominance} mgf={self.mgf} mgf_max_rel_err={self.mgf_max_rel_err:.3e}"
            + (f" error={self.error!r}" if self.error else "")
        )


def _mgf_tol(m) -> float:
    if m.carrier_mode is CarrierMode.MULTI and m.impairment is Impairment.JOINT:
        if joint_constants(m.xi).regime is not JointRegime.EQUAL:
            return MGF_TOL_SERIES
    return MGF_TOL


def mgf_oracle_error(m, q=None) -> float:
    """Largest relative gap between closed-form and quadrature MGFs."""
    kw = {} if q is None else {"q": q}
    worst = 0.0
    for s in MGF_CHECK_POINTS:
        ref = mgf_quadrature(m, s, **kw)
        val = mgf_closed(m, s, series=DEFAULT_SERIES, **kw)
        worst = max(worst, abs(val - ref) / abs(ref))
    return worst


def validate(spec: SweepSpec, rows=None):
    """Check every point; returns ``(rows, report_lines)``.

    Coverage: the analytic SER lies inside the Monte Carlo CI (checked only
    when SER >= :data:`MIN_CHECKED_SER`).  Dominance: the finite-SNR bound is
    not below the analytic SER.  MGF: closed form agrees with quadrature.
    """
    if rows is None:
        rows = run_sweep(spec, simulate=True, bound=True)
    mgf_cache = {}
    lines = []
    for row in rows:
        carrier, imp = next((c, i) for c, i in spec.scenarios if scenario_name(c, i) == row.scenario)
        irr = row.irr_db if spec.irr_db is not None else None
        key = (row.scenario, row.snr_db, irr)
        err = row.error
        if key not in mgf_cache:
            try:
                m = _build(spec, carrier, imp, row.snr_db, irr)
                mgf_cache[key] = (mgf_oracle_error(m, spec.quad), _mgf_tol(m))
            except (IqiError, ArithmeticError, ValueError) as exc:
                mgf_cache[key] = (math.nan, 0.0)
                err = err or f"{type(exc).__name__}: {exc}"
        mgf_err, tol = mgf_cache[key]
        if row.ser_mc is None or row.ser_analytic is None or row.ser_analytic < MIN_CHECKED_SER:
            coverage = "skip"
        else:
            coverage = "pass" if row.mc_ci_lo <= row.ser_analytic <= row.mc_ci_hi else "fail"
        if row.ser_bound is None or row.ser_analytic is None:
            dominance = "n/a"
        else:
            ok = row.ser_bound >= row.ser_analytic * (1.0 - DOMINANCE_RTOL)
            dominance = "pass" if ok else "fail"
        mgf = "pass" if mgf_err <= tol else "fail"
        lines.append(ValidationLine(row.scenario, row.modulation, row.snr_db, row.irr_db,
                                    coverage, dominance, mgf_err, mgf, err))
    return rows, lines


def format_report(lines) -> str:
    n_fail = sum(not line.ok for line in lines)
    body = "\n".join(line.format() for line in lines)
    return f"{body}\n# points={len(lines)} failures={n_fail}\n"
