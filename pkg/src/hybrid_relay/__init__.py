"""Outage and DPSK BER of multihop detect-and-forward hybrid FSO/RF relays."""
from .analytics import (
    BerMethod,
    BerResult,
    NotBracketedError,
    OutageResult,
    PrecisionError,
    QuadratureError,
    ber_dpsk,
    ber_dpsk_closed,
    ber_dpsk_quadrature,
    cdf_snr_fso,
    cdf_snr_rf,
    end_to_end_cdf,
    find_avg_snr_for_target,
    outage,
)
from .model import LinkParams, Metric, ParameterError, StructureKind, db_to_linear, linear_to_db, validate
from .numerics import QuadratureSpec
from .simulator import (
    ChannelSample,
    HopSnr,
    McEstimate,
    end_to_end_snr,
    estimate_ber,
    estimate_ber_bit_propagation,
    estimate_outage,
)

__version__ = "0.1.0"

__all__ = [
    "BerMethod",
    "BerResult",
    "ChannelSample",
    "HopSnr",
    "LinkParams",
    "McEstimate",
    "Metric",
    "NotBracketedError",
    "OutageResult",
    "ParameterError",
    "PrecisionError",
    "QuadratureError",
    "QuadratureSpec",
    "StructureKind",
    "ber_dpsk",
    "ber_dpsk_closed",
    "ber_dpsk_quadrature",
    "cdf_snr_fso",
    "cdf_snr_rf",
    "db_to_linear",
    "end_to_end_cdf",
    "end_to_end_snr",
    "estimate_ber",
    "estimate_ber_bit_propagation",
    "estimate_outage",
    "find_avg_snr_for_target",
    "linear_to_db",
    "outage",
    "validate",
]
