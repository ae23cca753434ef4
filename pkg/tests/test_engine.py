from fractions import Fraction as F

import numpy as np
import pytest

from awarebid.distributions import (
    DiscreteFinite,
    FullInfo,
    RandomStream,
    UniformContinuous,
)
from awarebid.engine import (
    EstimationError,
    EstimatorConfig,
    BidProfile,
    bids,
    draw_state,
    estimate,
    exact_cap_check,
    sample_draws,
    settle,
    _uniform_chunk,
)
from awarebid.scenario import Perspective, validate
from conftest import EXACT, build_d1, build_noinfo_tie, build_u01


def test_draw_state_inverse_cdf_and_determinism():
    u = UniformContinuous(0, 5)
    s, _p = validate(1, 1, [[u]], [[1]], [{1: FullInfo()}])
    stream_u = RandomStream(5).take(1)[0]
    d = draw_state(s, RandomStream(5))
    assert d.value(1, 1) == pytest.approx(stream_u * 5)
    assert draw_state(s, RandomStream(5)) == draw_state(s, RandomStream(5))


def test_draw_state_matches_vectorized_stream():
    s, _p = build_d1()
    batch = sample_draws(s, seed=11, count=4)
    d0 = draw_state(s, RandomStream(11))
    assert np.allclose(batch[0], np.array(d0.values))


def test_draws_support_membership():
    s, _p = build_d1()
    draws = sample_draws(s, seed=3, count=500)
    assert set(np.unique(draws[:, :, 0])) <= {0.0, 1.0}
    assert set(np.unique(draws[:, :, 1])) <= {0.0, 2.0}


def test_uniform_chunk_is_chunking_invariant():
    whole = _uniform_chunk(9, 0, 100, 2, 3)
    parts = np.concatenate([_uniform_chunk(9, 0, 37, 2, 3),
                            _uniform_chunk(9, 37, 100, 2, 3)])
    assert np.array_equal(whole, parts)


def test_bids_full_info_sums_and_no_info_means(d1):
    s, p = d1
    d = draw_state(s, RandomStream(1))
    prof = bids(s, p, d, Perspective(s.full_set))
    assert prof.bids[0] == d.value(1, 1) + d.value(1, 2)
    assert prof.bids[1] == d.value(2, 1)
    # view restricted to {1}: both bidders bid their first characteristic
    prof1 = bids(s, p, d, Perspective(frozenset({1})))
    assert prof1.bids == (d.value(1, 1), d.value(2, 1))

    s2, p2 = build_noinfo_tie()
    d2 = draw_state(s2, RandomStream(2))
    prof2 = bids(s2, p2, d2, Perspective(s2.full_set))
    assert prof2.bids == (0.4, 0.4)


def test_settle_examples():
    out = settle(BidProfile((3.0, 1.0), Perspective(frozenset({1}))), RandomStream(0))
    assert (out.winner, out.price, out.tie_set) == (1, 1.0, frozenset({1}))
    out = settle(BidProfile((1.0, 5.0, 4.0), Perspective(frozenset({1}))), RandomStream(0))
    assert (out.winner, out.price) == (2, 4.0)
    tie = settle(BidProfile((2.0, 2.0), Perspective(frozenset({1}))), RandomStream(0))
    assert tie.price == 2.0 and tie.tie_set == frozenset({1, 2})
    assert tie.winner in (1, 2)
    with pytest.raises(EstimationError):
        settle(BidProfile((1.0,), Perspective(frozenset({1}))), RandomStream(0))


def test_settle_tie_breaks_roughly_uniform():
    wins = [settle(BidProfile((2.0, 2.0), Perspective(frozenset({1}))),
                   RandomStream(7, index=k)).winner
            for k in range(2000)]
    share = wins.count(1) / len(wins)
    assert 0.45 < share < 0.55


def test_exact_cap_check(d1):
    s, p = d1
    assert exact_cap_check(s, p) == 8
    d3 = DiscreteFinite([0, 1, 2], [F(1, 3)] * 3)
    s3, p3 = validate(3, 2, [[d3, d3]] * 3, [[1, 2]] * 3,
                      [{1: FullInfo(), 2: FullInfo()}] * 3)
    assert exact_cap_check(s3, p3) == 729
    su, pu = build_u01()
    assert exact_cap_check(su, pu) is None
    with pytest.raises(EstimationError):
        estimate(su, pu, EXACT)


def test_exact_cap_enforced(d1):
    s, p = d1
    with pytest.raises(EstimationError, match="cap"):
        estimate(s, p, EstimatorConfig(backend="exact", exact_cap=4))


def test_d1_exact_bundle(d1):
    s, p = d1
    b = estimate(s, p, EXACT)
    assert b.first_order_stat == F(13, 8)
    assert b.second_order_stat == F(3, 8)
    assert b.bidders[0].perceived_surplus == F(9, 8)
    assert b.bidders[0].actual_surplus == F(9, 8)
    assert b.bidders[1].perceived_surplus == F(1, 4)
    assert b.bidders[1].actual_surplus == F(1, 8)
    # bidder 2's hidden characteristic has mean 1 and he wins 1/4 of the time
    assert b.bidders[1].win_prob_actual == F(1, 4)
    assert b.bidders[1].hidden_win_value == F(1, 4)


def test_u01_analytic_values(u01):
    s, p = u01
    b = estimate(s, p, EstimatorConfig(backend="mc", n_samples=400_000, seed=31))
    assert abs(b.first_order_stat - 2 / 3) < 4 * b.se_first_order_stat
    assert abs(b.second_order_stat - 1 / 3) < 4 * b.se_second_order_stat
    for be in b.bidders:
        assert abs(be.perceived_surplus - 1 / 6) < 4 * be.se_perceived_surplus
        # full awareness: perceived and actual are the same numbers exactly
        assert be.perceived_surplus == be.actual_surplus
        assert be.hidden_win_value == 0.0


def test_noinfo_tie_scenario_is_degenerate():
    s, p = build_noinfo_tie()
    b = estimate(s, p, EXACT)
    assert b.first_order_stat == F(2, 5)
    assert b.second_order_stat == F(2, 5)
    for be in b.bidders:
        assert be.perceived_surplus == 0
        assert be.actual_surplus == 0
        assert be.win_prob_actual == F(1, 2)


def test_exact_matches_mc_within_four_se(d1):
    s, p = d1
    exact = estimate(s, p, EXACT)
    mc = estimate(s, p, EstimatorConfig(backend="mc", n_samples=300_000, seed=5))
    assert abs(mc.first_order_stat - float(exact.first_order_stat)) < 4 * mc.se_first_order_stat
    assert abs(mc.second_order_stat - float(exact.second_order_stat)) < 4 * mc.se_second_order_stat
    def close(est, truth, se):
        return abs(est - float(truth)) < 4 * se if se else est == truth

    for got, want in zip(mc.bidders, exact.bidders):
        assert close(got.perceived_surplus, want.perceived_surplus, got.se_perceived_surplus)
        assert close(got.actual_surplus, want.actual_surplus, got.se_actual_surplus)
        assert close(got.win_prob_actual, want.win_prob_actual, got.se_win_prob_actual)
        assert close(got.hidden_win_value, want.hidden_win_value, got.se_hidden_win_value)


def test_exact_matches_mc_on_random_corpus_scenarios():
    import random as _random

    from awarebid.disclosure import CorpusConfig, random_discrete_scenario
    from awarebid.scenario import lattice

    rng = _random.Random("engine-corpus")
    for index in range(5):
        _sid, s = random_discrete_scenario(CorpusConfig(count=5, seed=321), index)
        awareness = [rng.choice(lattice(s.m_characteristics))
                     for _ in range(s.n_bidders)]
        p = validate(s.n_bidders, s.m_characteristics, s.laws, awareness,
                     [{j: FullInfo() for j in sorted(a)} for a in awareness])[1]
        exact = estimate(s, p, EXACT)
        mc = estimate(s, p, EstimatorConfig(backend="mc", n_samples=150_000,
                                            seed=1000 + index))

        def close(est, truth, se):
            return abs(est - float(truth)) < 4 * se if se else est == truth

        assert close(mc.first_order_stat, exact.first_order_stat, mc.se_first_order_stat)
        assert close(mc.second_order_stat, exact.second_order_stat, mc.se_second_order_stat)
        for got, want in zip(mc.bidders, exact.bidders):
            assert close(got.perceived_surplus, want.perceived_surplus,
                         got.se_perceived_surplus)
            assert close(got.actual_surplus, want.actual_surplus, got.se_actual_surplus)
            assert close(got.win_prob_perceived, want.win_prob_perceived,
                         got.se_win_prob_perceived)
            assert close(got.win_prob_actual, want.win_prob_actual, got.se_win_prob_actual)
            assert close(got.hidden_win_value, want.hidden_win_value,
                         got.se_hidden_win_value)


def test_mc_worker_count_invariance(d1):
    s, p = d1
    one = estimate(s, p, EstimatorConfig(backend="mc", n_samples=200_000, seed=42, workers=1))
    four = estimate(s, p, EstimatorConfig(backend="mc", n_samples=200_000, seed=42, workers=4))
    assert one == four


def test_mc_kernel_backend_invariance(d1, monkeypatch):
    s, p = d1
    cfg = EstimatorConfig(backend="mc", n_samples=100_000, seed=9)
    monkeypatch.setenv("AWAREBID_KERNEL", "numba")
    with_numba = estimate(s, p, cfg)
    monkeypatch.setenv("AWAREBID_KERNEL", "numpy")
    with_numpy = estimate(s, p, cfg)
    assert with_numba == with_numpy


def test_common_random_numbers_across_policies():
    s, _ = build_d1()
    # same seed, policies differing in bidder 2's awareness: same draws
    assert np.array_equal(sample_draws(s, 17, 64), sample_draws(s, 17, 64))
    p_aware = validate(2, 2, s.laws, [[1, 2], [1, 2]],
                       [{1: FullInfo(), 2: FullInfo()}] * 2)[1]
    b_low = estimate(s, build_d1()[1], EXACT)
    b_high = estimate(s, p_aware, EXACT)
    # the raised policy prices bidder 1's extra component into the stats
    assert b_high.first_order_stat == F(17, 8)
    assert b_low.first_order_stat == F(13, 8)


def test_estimate_rejects_single_bidder():
    u = UniformContinuous(0, 1)
    s, p = validate(1, 1, [[u]], [[1]], [{1: FullInfo()}])
    with pytest.raises(EstimationError):
        estimate(s, p, EstimatorConfig(backend="mc", n_samples=10))


def test_mixed_continuous_partition_runs_through_mc():
    u = UniformContinuous(0, 4)
    from awarebid.distributions import Partition
    s, p = validate(2, 1, [[u], [u]], [[1], [1]],
                    [{1: Partition(cutpoints=[2.0])}, {1: FullInfo()}])
    b = estimate(s, p, EstimatorConfig(backend="mc", n_samples=200_000, seed=3))
    # bidder 1 bids the cell midpoint (1 or 3), bidder 2 the value itself;
    # E[max{cell(U), V}] with U, V iid U[0,4]: each cell case integrates to
    # E[max{1,V}]/2 + E[max{3,V}]/2 = (1*1/4 + E[V|V>1]*3/4)/2 + ...
    want = 0.5 * (1 * 0.25 + 2.5 * 0.75) + 0.5 * (3 * 0.75 + 3.5 * 0.25)
    assert abs(b.first_order_stat - want) < 4 * b.se_first_order_stat
