"""Closed-form outage probability and DPSK BER for both relay structures.

Notation: ``a = lam / sqrt(gamma_bar_fso)`` and ``b = 1 / gamma_bar_rf`` so
the per-hop CDFs are ``1 - exp(-a sqrt(g))`` (FSO) and ``1 - exp(-b g)``
(RF).
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .model import LinkParams, Metric, StructureKind, db_to_linear, validate
from .numerics import (
    QuadratureSpec,
    compensated_signed_sum,
    dd_mul,
    dd_powers,
    integrate_semi_infinite,
    laplace_exp_sqrt_complement,
    two_prod,
)

# Σ|terms| / |sum| above which a double-precision term list is not trusted
CANCELLATION_LIMIT = 1e9
# expanded outage terms carry ~2**-104 relative error, so the same error
# budget admits a 2**52 times larger ratio
_DD_CANCELLATION_LIMIT = CANCELLATION_LIMIT * 2.0**52
# round-off excursion outside [0, 1] that is still clamped rather than raised
CLAMP_SLACK = 1e-9


class PrecisionError(ArithmeticError):
    def __init__(self, ratio: float, limit: float, hint: str):
        self.cancellation_ratio = ratio
        super().__init__(f"alternating sum cancels by a factor {ratio:.3g} (limit {limit:.3g}); {hint}")


class NotBracketedError(ValueError):
    def __init__(self, target: float, lo_db: float, hi_db: float, f_lo: float, f_hi: float):
        self.values = (f_lo, f_hi)
        super().__init__(
            f"target {target:g} not bracketed: metric({lo_db:g} dB) = {f_lo:.6g}, "
            f"metric({hi_db:g} dB) = {f_hi:.6g}"
        )


class QuadratureError(ArithmeticError):
    def __init__(self, achieved: float, wanted: float):
        self.achieved_rel_tol = achieved
        super().__init__(f"quadrature reached rel. tol {achieved:.3g}, wanted {wanted:.3g}")


class BerMethod(str, enum.Enum):
    CLOSED_FORM = "closed_form"
    QUADRATURE = "quadrature"


@dataclass(frozen=True)
class OutageResult:
    p_out: float
    cancellation_ratio: float = 1.0


@dataclass(frozen=True)
class BerResult:
    p_e: float
    method: BerMethod
    achieved_rel_tol: float = 0.0


def _clamp(x: float, lo: float, hi: float, what: str) -> float:
    if x < lo - CLAMP_SLACK or x > hi + CLAMP_SLACK or math.isnan(x):
        raise ArithmeticError(f"{what} = {x!r} outside [{lo}, {hi}] beyond round-off")
    return min(max(x, lo), hi)


def _check_gamma(gamma) -> np.ndarray:
    g = np.asarray(gamma, dtype=float)
    if np.any(g < 0) or np.any(np.isnan(g)):
        raise ValueError("gamma must be nonnegative")
    return g


def cdf_snr_fso(gamma, lam: float, gamma_bar_fso: float):
    """CDF of ``gamma_bar_fso * I**2`` with ``I ~ Exp(lam)``. Vectorised."""
    g = _check_gamma(gamma)
    out = -np.expm1(-lam * np.sqrt(g / gamma_bar_fso))
    return float(out) if out.ndim == 0 else out


def cdf_snr_rf(gamma, gamma_bar_rf: float):
    """CDF of the Rayleigh-faded RF SNR, exponential with mean ``gamma_bar_rf``."""
    g = _check_gamma(gamma)
    out = -np.expm1(-g / gamma_bar_rf)
    return float(out) if out.ndim == 0 else out


def end_to_end_cdf(gamma, params: LinkParams, kind: StructureKind):
    """Product-form CDF of the end-to-end SNR (vectorised in ``gamma``)."""
    g = _check_gamma(gamma)
    m = params.hops
    if kind is StructureKind.SELECT_EACH_HOP:
        x = cdf_snr_fso(g, params.lam, params.gamma_bar_fso) * cdf_snr_rf(g, params.gamma_bar_rf)
        x = np.asarray(x)
        with np.errstate(divide="ignore"):
            out = np.where(x < 1.0, -np.expm1(m * np.log1p(-np.minimum(x, 1.0))), 1.0)
    elif kind is StructureKind.SELECT_AT_DESTINATION:
        out = -np.expm1(-m * g / params.gamma_bar_rf) * -np.expm1(
            -params.lam * m * np.sqrt(g / params.gamma_bar_fso)
        )
    else:
        raise TypeError(f"unknown structure {kind!r}")
    return float(out) if np.ndim(out) == 0 else out


def _expanded_outage(params: LinkParams) -> OutageResult:
    """Triple binomial sum of the each-hop outage, term by term.

    Powers of ``exp(-gamma_th b)`` and ``exp(-a sqrt(gamma_th))`` and the
    integer coefficients are carried as double-double pairs, then every
    (hi, lo) half goes through the compensated sum. Without that, rounding
    inside the terms alone swamps the result once M grows past ~10.
    """
    m = params.hops
    a = params.lam * math.sqrt(params.gamma_th / params.gamma_bar_fso)
    b = params.gamma_th / params.gamma_bar_rf
    x_hi, x_lo = dd_powers(math.exp(-b), m)
    y_hi, y_lo = dd_powers(math.exp(-a), m)

    terms = [1.0]
    for k in range(m + 1):
        v = np.arange(k + 1)
        cv = np.array([math.comb(k, j) for j in v], dtype=object)
        coeff = math.comb(m, k) * np.outer(cv, cv)
        sign = np.where((k + v[:, None] + v[None, :]) % 2 == 0, -1, 1)
        c = (coeff * sign).ravel()
        c_hi = np.array([float(ci) for ci in c])
        c_lo = np.array([float(ci - int(h)) for ci, h in zip(c, c_hi)])
        p_hi, p_lo = dd_mul(
            np.repeat(x_hi[: k + 1], k + 1), np.repeat(x_lo[: k + 1], k + 1),
            np.tile(y_hi[: k + 1], k + 1), np.tile(y_lo[: k + 1], k + 1),
        )
        t_hi, t_lo = two_prod(c_hi, p_hi)
        t_lo = t_lo + (c_hi * p_lo + c_lo * p_hi)
        terms.extend(np.column_stack([t_hi, t_lo]).ravel().tolist())

    total, ratio = compensated_signed_sum(terms)
    if total != 0.0 and ratio > _DD_CANCELLATION_LIMIT:
        raise PrecisionError(ratio, _DD_CANCELLATION_LIMIT, "use the product form (expand=False)")
    return OutageResult(_clamp(total, 0.0, 1.0, "p_out"), ratio)


def outage(params: LinkParams, kind: StructureKind, expand: bool = False) -> OutageResult:
    """Outage probability ``P(gamma_end < gamma_th)``.

    ``expand=True`` evaluates the each-hop structure through its binomial
    expansion instead of the product form; it exists as a consistency check
    and is ignored for the destination-selection structure, whose closed
    form has no alternating sum.
    """
    validate(params)
    if params.gamma_th == 0:
        return OutageResult(0.0, 1.0)
    if expand and kind is StructureKind.SELECT_EACH_HOP:
        return _expanded_outage(params)
    p = end_to_end_cdf(params.gamma_th, params, kind)
    return OutageResult(_clamp(p, 0.0, 1.0, "p_out"), 1.0)


def _ber_each_hop_terms(params: LinkParams) -> list[float]:
    # e^{-u a √γ} = 1 - (1 - e^{-u a √γ}); the unit parts cancel exactly
    # for every k ≥ 1 and the k = 0 term cancels the leading 1, leaving
    # Laplace transforms of (1 - e^{-u a √γ}) only
    m = params.hops
    a = params.lam / math.sqrt(params.gamma_bar_fso)
    b = 1.0 / params.gamma_bar_rf
    g = [[laplace_exp_sqrt_complement(1.0 + v * b, u * a) for u in range(m + 1)] for v in range(m + 1)]
    terms = []
    for k in range(1, m + 1):
        ck = math.comb(m, k)
        for v in range(k + 1):
            cv = ck * math.comb(k, v)
            for u in range(1, k + 1):
                sign = -1.0 if (k + v + u) % 2 else 1.0
                terms.append(sign * float(cv * math.comb(k, u)) * g[v][u])
    return terms


def ber_dpsk_closed(params: LinkParams, kind: StructureKind) -> BerResult:
    """DPSK bit error probability from termwise Laplace transforms.

    Each-hop selection sums the expanded CDF against ``e^{-g}``; destination
    selection reduces to ``(G(1, Ma) - G(1 + Mb, Ma)) / 2`` with ``G`` the
    transform of ``1 - exp(-a sqrt(g))``. At ``M = 1`` both reduce to the
    same two-term expression, so they agree bit for bit.
    """
    validate(params)
    m = params.hops
    if kind is StructureKind.SELECT_EACH_HOP:
        total, ratio = compensated_signed_sum(_ber_each_hop_terms(params))
        if ratio > CANCELLATION_LIMIT:
            raise PrecisionError(ratio, CANCELLATION_LIMIT, "use ber_dpsk_quadrature")
        p = 0.5 * total
    elif kind is StructureKind.SELECT_AT_DESTINATION:
        a = m * params.lam / math.sqrt(params.gamma_bar_fso)
        s = 1.0 + m / params.gamma_bar_rf
        p = 0.5 * (laplace_exp_sqrt_complement(1.0, a) - laplace_exp_sqrt_complement(s, a))
    else:
        raise TypeError(f"unknown structure {kind!r}")
    return BerResult(_clamp(p, 0.0, 0.5, "p_e"), BerMethod.CLOSED_FORM, 0.0)


def ber_dpsk_quadrature(params: LinkParams, kind: StructureKind, spec: QuadratureSpec = QuadratureSpec()) -> BerResult:
    """Independent BER path: integrate ``F_end(g) / 2`` against ``e^{-g}``."""
    validate(params)
    value, achieved = integrate_semi_infinite(lambda g: 0.5 * end_to_end_cdf(g, params, kind), spec)
    if achieved > spec.rel_tol:
        raise QuadratureError(achieved, spec.rel_tol)
    return BerResult(_clamp(value, 0.0, 0.5, "p_e"), BerMethod.QUADRATURE, achieved)


def ber_dpsk(params: LinkParams, kind: StructureKind) -> BerResult:
    """Closed-form BER, or the quadrature path where the closed form cancels.

    The each-hop sum loses accuracy roughly like ``gamma_bar_rf ** k``; past
    ~70 dB average SNR its cancellation ratio exceeds the limit.
    """
    try:
        return ber_dpsk_closed(params, kind)
    except PrecisionError:
        return ber_dpsk_quadrature(params, kind)


def metric_value(params: LinkParams, kind: StructureKind, metric: Metric) -> float:
    if metric is Metric.OUTAGE:
        return outage(params, kind).p_out
    if metric is Metric.BER:
        return ber_dpsk(params, kind).p_e
    raise TypeError(f"unknown metric {metric!r}")


def find_avg_snr_for_target(
    target: float,
    params_template: LinkParams,
    kind: StructureKind,
    metric: Metric,
    bracket_db: tuple[float, float] = (-10.0, 80.0),
) -> float:
    """Average SNR (dB, both links equal) at which ``metric`` hits ``target``.

    Bisection in dB; relies on the metric decreasing in the average SNR.
    """
    if not 0 < target < 1:
        raise ValueError("target must lie in (0, 1)")

    def at(snr_db: float) -> float:
        return metric_value(params_template.with_avg_snr(db_to_linear(snr_db)), kind, metric)

    lo, hi = bracket_db
    f_lo, f_hi = at(lo), at(hi)
    if not f_lo > target > f_hi:
        raise NotBracketedError(target, lo, hi, f_lo, f_hi)
    while hi - lo > 1e-4:
        mid = 0.5 * (lo + hi)
        f_mid = at(mid)
        if abs(f_mid - target) <= 1e-6 * target:
            return mid
        if f_mid > target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
