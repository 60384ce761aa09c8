"""Scenario parameters and unit conventions shared by every other module.

All SNR quantities are linear inside the package; decibels only appear at
the CSV / config boundary through :func:`db_to_linear` and
:func:`linear_to_db`.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

MAX_HOPS = 64


class StructureKind(str, enum.Enum):
    """Relay architecture being evaluated."""

    SELECT_EACH_HOP = "select_each_hop"
    SELECT_AT_DESTINATION = "select_at_destination"

    def __str__(self) -> str:
        return self.value


class Metric(str, enum.Enum):
    OUTAGE = "outage"
    BER = "ber"

    def __str__(self) -> str:
        return self.value


class ParameterError(ValueError):
    """Raised when a :class:`LinkParams` field violates its invariant.

    ``violations`` holds the offending field names in declaration order so
    callers can tell combinations apart without parsing the message.
    """

    def __init__(self, violations: list[tuple[str, str]]):
        self.violations = tuple(field for field, _ in violations)
        self.messages = tuple(msg for _, msg in violations)
        super().__init__("; ".join(self.messages))


def db_to_linear(x_db: float) -> float:
    x_db = float(x_db)
    if not math.isfinite(x_db):
        raise ValueError(f"dB value must be finite, got {x_db!r}")
    return 10.0 ** (x_db / 10.0)


def linear_to_db(x: float) -> float:
    x = float(x)
    if not x > 0 or not math.isfinite(x):
        raise ValueError(f"linear value must be positive and finite, got {x!r}")
    return 10.0 * math.log10(x)


def _positive_finite(value) -> bool:
    return isinstance(value, (int, float)) and math.isfinite(value) and value > 0


def _violations(p: "LinkParams") -> list[tuple[str, str]]:
    out = []
    if not _positive_finite(p.lam):
        out.append(("lam", "lambda must be positive"))
    if not _positive_finite(p.gamma_bar_fso):
        out.append(("gamma_bar_fso", "gamma_bar_fso must be positive"))
    if not _positive_finite(p.gamma_bar_rf):
        out.append(("gamma_bar_rf", "gamma_bar_rf must be positive"))
    if isinstance(p.hops, bool) or not isinstance(p.hops, int):
        out.append(("hops", "hops must be an integer"))
    elif p.hops < 1:
        out.append(("hops", "hops must be ≥ 1"))
    elif p.hops > MAX_HOPS:
        out.append(("hops", f"hops must be ≤ {MAX_HOPS}"))
    if not (isinstance(p.gamma_th, (int, float)) and math.isfinite(p.gamma_th) and p.gamma_th >= 0):
        out.append(("gamma_th", "gamma_th must be nonnegative"))
    return out


@dataclass(frozen=True)
class LinkParams:
    """One evaluation scenario.

    Attributes
    ----------
    lam : float
        Rate of the Negative Exponential turbulence (mean ``1/lam``).
    gamma_bar_fso, gamma_bar_rf : float
        Average per-hop SNRs, linear scale.
    hops : int
        Number of relay hops ``M`` (1..64).
    gamma_th : float
        Outage threshold SNR, linear scale. Ignored by the BER routines.
    """

    lam: float
    gamma_bar_fso: float
    gamma_bar_rf: float
    hops: int
    gamma_th: float = 10.0

    def __post_init__(self):
        problems = _violations(self)
        if problems:
            raise ParameterError(problems)

    @classmethod
    def from_db(cls, lam: float, snr_db: float, hops: int, gamma_th_db: float = 10.0) -> "LinkParams":
        """Equal-average-SNR scenario with both links at ``snr_db``."""
        g = db_to_linear(snr_db)
        return cls(lam=lam, gamma_bar_fso=g, gamma_bar_rf=g, hops=hops, gamma_th=db_to_linear(gamma_th_db))

    def with_avg_snr(self, gamma_avg: float) -> "LinkParams":
        return LinkParams(self.lam, gamma_avg, gamma_avg, self.hops, self.gamma_th)


def validate(params: LinkParams) -> LinkParams:
    """Re-check ``params`` and return it unchanged.

    Construction already validates, but objects can be forged through
    ``object.__setattr__`` or unpickling, so entry points call this too.
    """
    problems = _violations(params)
    if problems:
        raise ParameterError(problems)
    return params
