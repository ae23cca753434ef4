import random
from fractions import Fraction as F

import pytest

from awarebid.disclosure import (
    CorpusConfig,
    PolicyRegime,
    check_tradeoff,
    counterexample_search,
    optimize,
    policy_with_info,
    random_discrete_scenario,
    verify_suite,
)
from awarebid.distributions import DiscreteFinite, FullInfo, UniformContinuous
from awarebid.engine import EstimatorConfig
from awarebid.fees import revenue
from awarebid.scenario import Scenario, ScenarioError, validate
from conftest import EXACT, coin

MC = EstimatorConfig(backend="mc", n_samples=200_000, seed=17)


def example1_scenario():
    u1, u2 = UniformContinuous(0, 5), UniformContinuous(-6, 5)
    return validate(2, 2, [[u1, u2], [u1, u2]], [[1], [1]],
                    [{1: FullInfo()}, {1: FullInfo()}])[0]


def example1_discretized():
    third = [F(1, 3)] * 3
    x1 = DiscreteFinite([F(5, 6), F(5, 2), F(25, 6)], third)
    x2 = DiscreteFinite([F(-25, 6), F(-1, 2), F(19, 6)], third)
    return Scenario(2, 2, ((x1, x2), (x1, x2)))


def test_optimize_public_no_info_keeps_negative_mean():
    s = example1_scenario()
    res = optimize(s, PolicyRegime.PUBLIC_NO_INFO, MC)
    assert all(a == frozenset({1}) for a in res.policy.awareness)


def test_optimize_public_no_info_raises_positive_mean():
    u1 = UniformContinuous(0, 5)
    dpos = coin([0, 2])     # mean +1
    s, _ = validate(2, 2, [[u1, dpos], [u1, dpos]], [[1], [1]],
                    [{1: FullInfo()}, {1: FullInfo()}])
    res = optimize(s, PolicyRegime.PUBLIC_NO_INFO, MC)
    assert all(a == frozenset({1, 2}) for a in res.policy.awareness)


def test_optimize_public_no_info_boundary_mean_zero_keeps():
    zero = coin([-1, 1])
    base = coin([0, 1])
    s, _ = validate(2, 2, [[base, zero], [base, zero]], [[1], [1]],
                    [{1: FullInfo()}, {1: FullInfo()}])
    res = optimize(s, PolicyRegime.PUBLIC_NO_INFO, EXACT)
    revs = dict(res.trace)
    assert revs["common=[1, 2]"] == revs["common=[1]"]   # exact zero shift
    assert all(a == frozenset({1}) for a in res.policy.awareness)


def test_optimize_public_full_info_uniform_raise():
    # disclosing the U(-6,5) characteristic pays because E[max] = 4/3 > 0
    s = example1_scenario()
    res = optimize(s, PolicyRegime.PUBLIC_FULL_INFO, MC)
    assert all(a == frozenset({1, 2}) for a in res.policy.awareness)
    revs = dict(res.trace)
    assert revs["common=[1, 2]"] > revs["common=[1]"]


def test_optimize_public_full_info_keep_when_max_negative():
    uneg = UniformContinuous(-8, 1)       # E[max of two] = -2 < 0
    u1 = UniformContinuous(0, 5)
    s, _ = validate(2, 2, [[u1, uneg], [u1, uneg]], [[1], [1]],
                    [{1: FullInfo()}, {1: FullInfo()}])
    res = optimize(s, PolicyRegime.PUBLIC_FULL_INFO, MC)
    assert all(a == frozenset({1}) for a in res.policy.awareness)


def test_optimize_common_free_info_full_information_is_maximal():
    d = coin([0, 1])
    s, _ = validate(2, 1, [[d], [d]], [[1], [1]],
                    [{1: FullInfo()}, {1: FullInfo()}])
    res = optimize(s, PolicyRegime.COMMON_FREE_INFO, EXACT)
    # full information achieves the maximum (3/4, vs 1/2 under no info), but
    # E[max{X, 1/2}] = 3/4 ties it here, so the optimizer's less-disclosure
    # tie rule returns the coarser of the revenue-equal policies.
    assert res.report.total_revenue == F(3, 4)
    values = [v for _d, v in res.trace]
    assert F(1, 2) in values and max(values) == F(3, 4)
    assert sum(1 for v in values if v == F(3, 4)) == 3
    kinds = sorted(type(levels[1]).__name__ for levels in res.policy.info)
    assert kinds == ["NoInfo", "Partition"]


def test_optimize_individual_on_d1(d1):
    s, _p = d1
    res = optimize(s, PolicyRegime.INDIVIDUAL, EXACT)
    assert res.report.total_revenue == F(17, 8)
    assert all(a == frozenset({1, 2}) for a in res.policy.awareness)
    assert res.exhaustive


def test_optimize_exhaustive_is_argmax_of_trace():
    cfg = CorpusConfig(count=6, seed=42)
    for index in range(cfg.count):
        _sid, s = random_discrete_scenario(cfg, index)
        res = optimize(s, PolicyRegime.INDIVIDUAL, EXACT)
        best = res.report.total_revenue
        for _desc, val in res.trace:
            assert best >= val


def test_optimize_greedy_agrees_with_exhaustive_on_small_corpus():
    from awarebid.disclosure import _optimize_greedy

    cfg = CorpusConfig(count=6, seed=9)
    log = []
    for index in range(cfg.count):
        sid, s = random_discrete_scenario(cfg, index)
        full = optimize(s, PolicyRegime.INDIVIDUAL, EXACT)
        greedy = _optimize_greedy(s, EXACT, frozenset({1}), {}, PolicyRegime.INDIVIDUAL)
        log.append((sid, full.report.total_revenue, greedy.report.total_revenue))
        assert greedy.report.total_revenue == full.report.total_revenue, log[-1]
    assert len(log) == cfg.count


def test_optimize_cap_requires_greedy_flag():
    d = coin([0, 1])
    laws = [[d] * 7] * 3                      # 3 * 6 = 18 awareness bits
    s, _ = validate(3, 7, laws, [[1]] * 3, [{1: FullInfo()}] * 3)
    with pytest.raises(ScenarioError, match="greedy"):
        optimize(s, PolicyRegime.INDIVIDUAL, EXACT)
    res = optimize(s, PolicyRegime.INDIVIDUAL, EXACT, allow_greedy=True)
    assert not res.exhaustive


def test_tradeoff_d1_extended(d1):
    s, p = d1
    td = check_tradeoff(s, p, 2, 2, EXACT)
    assert td.delta_first_order_stat == F(1, 2)
    assert td.delta_rents_remaining_unaware == 0
    assert td.lost_rent_newly_aware == F(1, 8)
    assert td.decision == "raise"
    assert td.revenue_after == F(17, 8)


def test_tradeoff_nobody_left_to_raise(d1):
    s, _p = d1
    p_full = validate(2, 2, s.laws, [[1, 2], [1, 2]],
                      [{1: FullInfo(), 2: FullInfo()}] * 2)[1]
    td = check_tradeoff(s, p_full, None, 2, EXACT)
    assert td.delta_first_order_stat == 0
    assert td.lost_rent_newly_aware == 0
    assert td.decision == "keep"
    assert td.revenue_before == td.revenue_after


def test_tradeoff_rejects_malformed_base():
    d = coin([0, 1])
    s, p = validate(3, 3, [[d, d, d]] * 3,
                    [[1, 2], [1, 3], [1]],
                    [{1: FullInfo(), 2: FullInfo()},
                     {1: FullInfo(), 3: FullInfo()},
                     {1: FullInfo()}])
    with pytest.raises(ScenarioError, match="common set"):
        check_tradeoff(s, p, 3, 2, EXACT)
    with pytest.raises(ScenarioError, match="already aware"):
        check_tradeoff(s, p, 1, 2, EXACT)


def test_tradeoff_decision_consistent_with_revenue_on_corpus():
    cfg = CorpusConfig(count=25, seed=77)
    rng = random.Random("tradeoff")
    for index in range(cfg.count):
        _sid, s = random_discrete_scenario(cfg, index)
        k = rng.randint(1, s.n_bidders - 1)
        mprime = s.full_set - {2}
        info = {j: FullInfo() for j in range(1, s.m_characteristics + 1)}
        base = policy_with_info(
            s, [mprime | {2}] * k + [mprime] * (s.n_bidders - k), info)
        td = check_tradeoff(s, base, k + 1, 2, EXACT)
        assert (td.decision == "raise") == (td.revenue_after > td.revenue_before)
        identity = (td.revenue_after - td.revenue_before) - \
            (td.lhs - td.lost_rent_newly_aware)
        assert identity == 0
        if td.delta_first_order_stat != 0:
            assert td.delta_first_order_stat > 0     # mean of char 2 is positive


def test_verify_suite_small_corpus_all_pass():
    rep = verify_suite(CorpusConfig(count=20, seed=0))
    assert rep.all_pass
    assert not rep.failures
    for claim in ("Prop2", "Lem3", "Lem5", "Lem7", "Prop3", "Cor1", "Prop6"):
        assert rep.checked(claim), f"no hypothesis-satisfied instances of {claim}"


def test_prop4_shift_is_exactly_the_mean():
    base = coin([0, 1])
    extra = DiscreteFinite([F(-1, 2), 2], [F(1, 3), F(2, 3)])
    s, _ = validate(2, 2, [[base, extra], [base, extra]], [[1], [1]],
                    [{1: FullInfo()}, {1: FullInfo()}])
    from awarebid.distributions import NoInfo, mean
    without = revenue(s, policy_with_info(s, [frozenset({1})] * 2,
                                          {1: FullInfo()}), EXACT)
    withp = revenue(s, policy_with_info(s, [frozenset({1, 2})] * 2,
                                        {1: FullInfo(), 2: NoInfo()}), EXACT)
    assert withp.total_revenue - without.total_revenue == mean(extra)


def test_counterexample_search_finds_discretized_example1():
    found = counterexample_search("prop5-converse", CorpusConfig(count=0, seed=0),
                                  extra_scenarios=[example1_discretized()])
    kinds = {(f["scenario"], f.get("kind")) for f in found}
    assert ("extra-0", "negative-mean-raise") in kinds
    gain = [f for f in found if f["scenario"] == "extra-0"][0]["gain"]
    assert gain > 0


def test_counterexample_search_empty_corpus():
    assert counterexample_search("prop2-converse", CorpusConfig(count=0, seed=0)) == []
    with pytest.raises(ValueError):
        counterexample_search("bogus", CorpusConfig(count=0, seed=0))


def test_counterexample_search_positive_means_find_nothing():
    # characteristic 2 has positive means by construction, so the negative-mean
    # hunt can only trigger on other characteristics; restrict to m=2 corpora
    cfg = CorpusConfig(count=15, seed=5, max_characteristics=2)
    found = counterexample_search("prop2-converse", cfg)
    for f in found:
        assert f["mean"] < 0
