import math

import numpy as np
import pytest

from hybrid_relay import analytics
from hybrid_relay.analytics import (
    BerMethod,
    NotBracketedError,
    PrecisionError,
    ber_dpsk,
    ber_dpsk_closed,
    ber_dpsk_quadrature,
    cdf_snr_fso,
    cdf_snr_rf,
    find_avg_snr_for_target,
    outage,
)
from hybrid_relay.model import LinkParams, Metric, StructureKind

A = StructureKind.SELECT_EACH_HOP
B = StructureKind.SELECT_AT_DESTINATION

# mpmath, 30 digits: (1 - e^-1)^2, 1 - (1 - that)^2, (1 - e^-2)^2
SINGLE_HOP_OUTAGE = 0.399576400893728048702951954650
EACH_HOP_M2_OUTAGE = 0.639491501636270824047653661437
AT_DEST_M2_OUTAGE = 0.747645072415508796505719031328


def _params(lam=1.0, snr=10.0, hops=1, th=10.0):
    return LinkParams(lam, snr, snr, hops, th)


def _empirical_cdf_check(samples, x, expected):
    p_hat = np.mean(samples <= x)
    se = math.sqrt(expected * (1 - expected) / samples.size)
    assert abs(p_hat - expected) <= 3 * se


class TestLinkCdfs:
    def test_fso_origin(self):
        assert cdf_snr_fso(0.0, 1.0, 10.0) == 0.0

    @pytest.mark.parametrize(
        "gamma, lam, gbar, expected",
        [(10, 1, 10, 0.632120558828557678), (40, 2, 10, 0.981684361111265820)],
    )
    def test_fso_values_against_sampling(self, gamma, lam, gbar, expected):
        assert cdf_snr_fso(gamma, lam, gbar) == pytest.approx(expected, rel=1e-15)
        rng = np.random.default_rng(2024)
        samples = gbar * rng.exponential(1 / lam, 10**7) ** 2
        _empirical_cdf_check(samples, gamma, expected)

    def test_rf_values_against_sampling(self):
        assert cdf_snr_rf(0.0, 10.0) == 0.0
        assert cdf_snr_rf(10.0, 10.0) == pytest.approx(0.632120558828557678, rel=1e-15)
        rng = np.random.default_rng(7)
        h = np.abs(rng.normal(size=10**7) + 1j * rng.normal(size=10**7)) / math.sqrt(2)
        _empirical_cdf_check(10.0 * h**2, 10.0, 0.632120558828557678)

    def test_rf_inversion(self):
        gbar = 37.0
        assert cdf_snr_rf(math.log(1e10) * gbar, gbar) == pytest.approx(1 - 1e-10, rel=1e-15)

    def test_negative_gamma(self):
        with pytest.raises(ValueError):
            cdf_snr_fso(-1.0, 1.0, 1.0)
        with pytest.raises(ValueError):
            cdf_snr_rf(-1e-9, 1.0)

    def test_vectorised_and_monotone(self):
        g = np.linspace(0, 500, 2001)
        for f in (cdf_snr_fso(g, 1.5, 20.0), cdf_snr_rf(g, 20.0)):
            assert f[0] == 0 and np.all(np.diff(f) >= 0) and f[-1] <= 1


class TestOutage:
    @pytest.mark.parametrize("kind", list(StructureKind))
    @pytest.mark.parametrize("expand", [False, True])
    def test_single_hop(self, kind, expand):
        assert outage(_params(), kind, expand).p_out == pytest.approx(SINGLE_HOP_OUTAGE, rel=1e-14)

    def test_two_hops(self):
        assert outage(_params(hops=2), A).p_out == pytest.approx(EACH_HOP_M2_OUTAGE, rel=1e-14)
        assert outage(_params(hops=2), A, expand=True).p_out == pytest.approx(EACH_HOP_M2_OUTAGE, rel=1e-14)
        assert outage(_params(hops=2), B).p_out == pytest.approx(AT_DEST_M2_OUTAGE, rel=1e-14)

    @pytest.mark.parametrize("kind", list(StructureKind))
    def test_zero_threshold(self, kind):
        assert outage(_params(hops=3, th=0.0), kind).p_out == 0.0
        assert outage(_params(hops=3, th=0.0), kind, expand=True).p_out == 0.0

    def test_expanded_reports_cancellation(self):
        res = outage(_params(snr=1e3, hops=10), A, expand=True)
        assert res.cancellation_ratio > 1e6
        assert res.p_out == pytest.approx(outage(_params(snr=1e3, hops=10), A).p_out, abs=1e-12)

    def test_expanded_gives_up_when_hopeless(self):
        with pytest.raises(PrecisionError, match="product form"):
            outage(LinkParams(1.0, 1e12, 1e12, 64, 1e-3), A, expand=True)

    def test_saturated_links(self):
        p = LinkParams(5.0, 1e-6, 1e-6, 4, 100.0)
        assert outage(p, A).p_out == 1.0
        assert outage(p, B).p_out == 1.0


class TestBer:
    @pytest.mark.parametrize("kind", list(StructureKind))
    def test_vanishing_snr_gives_half(self, kind):
        p = LinkParams(1.0, 1e-9, 1e-9, 2, 10.0)
        assert ber_dpsk_closed(p, kind).p_e == pytest.approx(0.5, abs=1e-4)
        assert ber_dpsk_quadrature(p, kind).p_e == pytest.approx(0.5, abs=1e-4)

    def test_single_hop_coincidence(self):
        p = _params()
        a, b = ber_dpsk_closed(p, A), ber_dpsk_closed(p, B)
        assert a.p_e == b.p_e
        assert a.method is BerMethod.CLOSED_FORM and a.achieved_rel_tol == 0
        qa, qb = ber_dpsk_quadrature(p, A), ber_dpsk_quadrature(p, B)
        assert qa.p_e == pytest.approx(qb.p_e, abs=1e-15)

    @pytest.mark.parametrize("kind", list(StructureKind))
    def test_closed_form_matches_quadrature(self, kind):
        p = _params(snr=100.0, hops=2)
        closed = ber_dpsk_closed(p, kind)
        quad = ber_dpsk_quadrature(p, kind)
        assert quad.method is BerMethod.QUADRATURE
        assert 0 < quad.achieved_rel_tol <= 1e-9
        assert closed.p_e == pytest.approx(quad.p_e, rel=1e-8)

    def test_threshold_is_ignored(self):
        assert ber_dpsk_closed(_params(hops=3, th=1.0), A) == ber_dpsk_closed(_params(hops=3, th=1e3), A)

    def test_high_snr_falls_back_to_quadrature(self):
        p = _params(snr=1e8, hops=3)
        with pytest.raises(PrecisionError, match="quadrature"):
            ber_dpsk_closed(p, A)
        res = ber_dpsk(p, A)
        assert res.method is BerMethod.QUADRATURE
        assert 0 < res.p_e < 1e-10

    def test_quadrature_non_convergence(self):
        spec = analytics.QuadratureSpec(nodes=8, rel_tol=1e-15 * 1e3, max_doublings=1)
        with pytest.raises(analytics.QuadratureError) as info:
            ber_dpsk_quadrature(LinkParams(5.0, 1.0, 1.0, 5, 10.0), A, spec)
        assert info.value.achieved_rel_tol > spec.rel_tol


class TestFindAvgSnr:
    def test_inverts_single_hop_outage(self):
        got = find_avg_snr_for_target(SINGLE_HOP_OUTAGE, _params(), A, Metric.OUTAGE)
        assert got == pytest.approx(10.0, abs=1e-3)

    def test_half_ber_not_bracketed(self):
        with pytest.raises(NotBracketedError, match="not bracketed"):
            find_avg_snr_for_target(0.5, _params(), A, Metric.BER)

    def test_structure_gap_two_hops(self):
        tpl = _params(hops=2)
        gap = find_avg_snr_for_target(1e-3, tpl, B, Metric.BER) - find_avg_snr_for_target(1e-3, tpl, A, Metric.BER)
        assert gap == pytest.approx(2.0, abs=0.75)

    def test_result_hits_target(self):
        tpl = _params(lam=2.0, hops=3)
        snr = find_avg_snr_for_target(1e-4, tpl, B, Metric.BER)
        value = ber_dpsk_closed(tpl.with_avg_snr(10 ** (snr / 10)), B).p_e
        assert value == pytest.approx(1e-4, rel=1e-4)

    @pytest.mark.parametrize("target", [0.0, 1.0, -0.1])
    def test_target_domain(self, target):
        with pytest.raises(ValueError):
            find_avg_snr_for_target(target, _params(), A, Metric.OUTAGE)


class TestStructureProperties:
    """Randomised versions of the structural invariants (also in acceptance)."""

    def test_dominance_and_bounds(self):
        rng = np.random.default_rng(3)
        for _ in range(300):
            p = LinkParams(
                rng.uniform(0.2, 6), 10 ** rng.uniform(-1, 4), 10 ** rng.uniform(-1, 4), int(rng.integers(1, 8)),
                10 ** rng.uniform(-1, 2),
            )
            oa, ob = outage(p, A).p_out, outage(p, B).p_out
            ba, bb = ber_dpsk(p, A).p_e, ber_dpsk(p, B).p_e
            assert 0 <= oa <= ob + 1e-15 <= 1 + 1e-15
            assert 0 < ba <= bb * (1 + 1e-8) and bb <= 0.5
