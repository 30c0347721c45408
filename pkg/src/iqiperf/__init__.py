"""Error-rate analysis and Monte Carlo validation of links with I/Q imbalance.

The analytic chain is ``iqi`` (front-end coefficients and SINR models) ->
``distributions`` (SINR laws) -> ``mgf`` (closed-form and quadrature MGFs) ->
``ser`` (average symbol error rates) -> ``bounds`` (upper bounds and error
floors).  ``montecarlo`` simulates the same links symbol by symbol, and
``sweep``/``cli`` drive configured sweeps and write CSV.
"""

from .bounds import BoundKind, error_floor, ser_upper_bound
from .distributions import sinr_cdf, sinr_pdf, sinr_quantile, sinr_support, sinr_survival
from .iqi import (
    SCENARIOS,
    CarrierMode,
    Impairment,
    IqiParams,
    MismatchCoefficients,
    Side,
    SinrModel,
    build_sinr_model,
    coefficients_from_irr,
    db2lin,
    lin2db,
)
from .mgf import mgf_closed, mgf_quadrature
from .montecarlo import SerEstimate, SimConfig, sample_sinr, simulate_ser
from .ser import ModulationSpec, Scheme, ser_awgn, ser_fading

__version__ = "0.1.0"

__all__ = [
    "SCENARIOS",
    "BoundKind",
    "CarrierMode",
    "Impairment",
    "IqiParams",
    "MismatchCoefficients",
    "ModulationSpec",
    "Scheme",
    "SerEstimate",
    "Side",
    "SimConfig",
    "SinrModel",
    "build_sinr_model",
    "coefficients_from_irr",
    "db2lin",
    "error_floor",
    "lin2db",
    "mgf_closed",
    "mgf_quadrature",
    "sample_sinr",
    "ser_awgn",
    "ser_fading",
    "ser_upper_bound",
    "simulate_ser",
    "sinr_cdf",
    "sinr_pdf",
    "sinr_quantile",
    "sinr_support",
    "sinr_survival",
]
