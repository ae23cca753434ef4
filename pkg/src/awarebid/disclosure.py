"""Disclosure-policy search and machine-checked theory verification.

Regimes
-------
* ``individual``: the seller chooses each bidder's awareness set; the
  information level of every characteristic is fixed exogenously (she
  cannot control how much a bidder learns once aware).
* ``public-no-info``: awareness can only be raised for all bidders at once
  and newly disclosed characteristics come with no information.
* ``public-full-info``: common awareness, full information on everything
  disclosed.
* ``common-free-info``: common awareness plus a free choice of finite
  partition information per (bidder, characteristic).

The verification suite replays the theory's claims on randomized
finite-support scenarios with the exact backend, recording for every claim
whether its hypothesis held and the exact rational margin by which the
conclusion held.  A false conclusion under a satisfied hypothesis is a
build-failing event, surfaced by the report.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from itertools import product as _iproduct
from typing import Optional, Sequence

import numpy as np

from .distributions import (
    DiscreteFinite,
    DistributionError,
    FullInfo,
    InfoLevel,
    NoInfo,
    Partition,
    PointMass,
    convolve,
    mean,
)
from .engine import EstimatorConfig
from .fees import RevenueReport, revenue
from .orderstats import OrderStatLaw, expected_order_stat, valuation_law
from .scenario import (
    DisclosurePolicy,
    Perspective,
    Scenario,
    ScenarioError,
    lattice,
    validate,
)

__all__ = [
    "PolicyRegime",
    "OptimizeResult",
    "TradeoffBreakdown",
    "CorpusConfig",
    "ClaimResult",
    "VerificationReport",
    "optimize",
    "check_tradeoff",
    "verify_suite",
    "counterexample_search",
    "random_discrete_scenario",
    "policy_with_info",
]


class PolicyRegime(str, Enum):
    INDIVIDUAL = "individual"
    PUBLIC_NO_INFO = "public-no-info"
    PUBLIC_FULL_INFO = "public-full-info"
    COMMON_FREE_INFO = "common-free-info"


_AWARENESS_BITS_CAP = 16


# ---------------------------------------------------------------------------
# Policy construction helpers
# ---------------------------------------------------------------------------

def policy_with_info(s: Scenario, awareness: Sequence, char_info: dict) -> DisclosurePolicy:
    """Policy with the given awareness sets and one exogenous info level per
    characteristic (defaulting to full information)."""
    info = [{j: char_info.get(j, FullInfo()) for j in sorted(a)} for a in awareness]
    return validate(s.n_bidders, s.m_characteristics, s.laws, list(awareness), info)[1]


def _common_policy(s: Scenario, aware: frozenset, char_info: dict) -> DisclosurePolicy:
    return policy_with_info(s, [aware] * s.n_bidders, char_info)


def _aware_pairs(p: DisclosurePolicy) -> int:
    return sum(len(a) for a in p.awareness)


def _disclosure_rank(level: InfoLevel) -> int:
    if isinstance(level, NoInfo):
        return 0
    if isinstance(level, Partition):
        return len(level.cells) if level.cells else len(level.cutpoints) + 1
    return 1 << 20      # FullInfo on a continuous law: finest


def _policy_disclosure(p: DisclosurePolicy) -> int:
    return sum(_disclosure_rank(lvl) for levels in p.info for lvl in levels.values())


# ---------------------------------------------------------------------------
# Revenue evaluation
# ---------------------------------------------------------------------------

def _common_awareness_revenue(s: Scenario, p: DisclosurePolicy):
    """Revenue of a common-awareness policy: with equal awareness all rents
    vanish, so revenue equals the expected maximum of the bidders' estimated
    valuation laws (exact for finitely supported laws)."""
    laws = [valuation_law(s, p, i, Perspective(s.full_set))
            for i in range(1, s.n_bidders + 1)]
    return expected_order_stat(OrderStatLaw(tuple(laws), 1))


def _revenue_value(s: Scenario, p: DisclosurePolicy, config: EstimatorConfig):
    if len(set(p.awareness)) == 1:
        try:
            return _common_awareness_revenue(s, p)
        except DistributionError:
            pass        # e.g. continuous partition: estimate through the engine
    return revenue(s, p, config).total_revenue


# ---------------------------------------------------------------------------
# Optimizer
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class OptimizeResult:
    policy: DisclosurePolicy
    report: RevenueReport
    trace: tuple                        # (description, revenue) per candidate
    regime: PolicyRegime
    exhaustive: bool


def _awareness_candidates(s: Scenario, base: frozenset):
    """All per-bidder awareness assignments extending ``base``, ordered by
    total aware pairs then canonically (the optimizer's tie order)."""
    per_bidder = [a for a in lattice(s.m_characteristics) if a >= base]
    combos = list(_iproduct(per_bidder, repeat=s.n_bidders))
    combos.sort(key=lambda c: (sum(len(a) for a in c),
                               tuple(tuple(sorted(a)) for a in c)))
    return combos


def optimize(s: Scenario, regime: PolicyRegime, config: EstimatorConfig,
             base_awareness: frozenset = frozenset({1}),
             char_info: Optional[dict] = None,
             allow_greedy: bool = False,
             partition_cap: int = 20000) -> OptimizeResult:
    """Best policy under the regime, by exhaustive enumeration when the
    space is small (ties resolved toward fewer aware pairs, then less
    disclosure, then canonical order) and greedy one-pair additions when the
    individual space exceeds the cap and ``allow_greedy`` is set."""
    regime = PolicyRegime(regime)
    base = frozenset(base_awareness) | {1}
    info = dict(char_info or {})

    if regime is PolicyRegime.INDIVIDUAL:
        bits = s.n_bidders * (s.m_characteristics - 1)
        if bits > _AWARENESS_BITS_CAP:
            if not allow_greedy:
                raise ScenarioError(
                    f"awareness space of {bits} bits exceeds the exhaustive cap; "
                    "pass the greedy flag")
            return _optimize_greedy(s, config, base, info, regime)
        candidates = [(f"awareness={[sorted(a) for a in combo]}",
                       policy_with_info(s, combo, info))
                      for combo in _awareness_candidates(s, base)]
    elif regime is PolicyRegime.PUBLIC_NO_INFO:
        candidates = []
        for aw in sorted(lattice(s.m_characteristics), key=lambda a: (len(a), tuple(sorted(a)))):
            if not aw >= base:
                continue
            levels = {j: (info.get(j, FullInfo()) if j in base else NoInfo()) for j in aw}
            candidates.append((f"common={sorted(aw)}", _common_policy(s, aw, levels)))
    elif regime is PolicyRegime.PUBLIC_FULL_INFO:
        candidates = [(f"common={sorted(aw)}",
                       _common_policy(s, aw, {j: FullInfo() for j in aw}))
                      for aw in sorted(lattice(s.m_characteristics),
                                       key=lambda a: (len(a), tuple(sorted(a))))
                      if aw >= base]
    else:  # COMMON_FREE_INFO
        candidates = _free_info_candidates(s, base, partition_cap)

    best = None
    trace = []
    for desc, pol in candidates:
        val = _revenue_value(s, pol, config)
        trace.append((desc, val))
        key = (val, -_aware_pairs(pol), -_policy_disclosure(pol))
        if best is None or key > best[0]:
            best = (key, pol)
    pol = best[1]
    return OptimizeResult(pol, revenue(s, pol, config), tuple(trace), regime, True)


def _optimize_greedy(s, config, base, info, regime) -> OptimizeResult:
    """Greedy hill climb: repeatedly add the single (bidder, characteristic)
    awareness pair with the largest strict revenue improvement."""
    current = [base] * s.n_bidders
    pol = policy_with_info(s, current, info)
    best_val = _revenue_value(s, pol, config)
    trace = [("start", best_val)]
    improved = True
    while improved:
        improved = False
        step = None
        for i in range(s.n_bidders):
            for j in range(2, s.m_characteristics + 1):
                if j in current[i]:
                    continue
                trial = list(current)
                trial[i] = trial[i] | {j}
                cand = policy_with_info(s, trial, info)
                val = _revenue_value(s, cand, config)
                trace.append((f"try bidder {i + 1} char {j}", val))
                if val > best_val and (step is None or val > step[0]):
                    step = (val, trial, cand)
        if step is not None:
            best_val, current, pol = step
            improved = True
    return OptimizeResult(pol, revenue(s, pol, config), tuple(trace), regime, False)


def _set_partitions(k: int):
    """All partitions of {0..k-1} into nonempty cells."""
    if k == 0:
        yield []
        return
    for rest in _set_partitions(k - 1):
        for i in range(len(rest)):
            yield [cell + [k - 1] if c == i else list(cell)
                   for c, cell in enumerate(rest)]
        yield [list(cell) for cell in rest] + [[k - 1]]


def _info_variants(law: DiscreteFinite):
    out = []
    for cells in _set_partitions(len(law.values)):
        if len(cells) == 1:
            out.append(NoInfo())
        else:
            out.append(Partition(cells=cells))
    return out


def _free_info_candidates(s: Scenario, base: frozenset, cap: int):
    """Common awareness x per-(bidder, characteristic) partition choices.

    For continuous laws only the no-information/full-information extremes
    are enumerable.  Candidate sets exceeding the cap are skipped for larger
    awareness sets, so the search always covers at least the base set.
    """
    all_sets = sorted(lattice(s.m_characteristics), key=lambda a: (len(a), tuple(sorted(a))))
    candidates = []
    for aw in all_sets:
        if not aw >= base:
            continue
        per_entry = []
        count = 1
        for i in range(1, s.n_bidders + 1):
            for j in sorted(aw):
                law = s.law(i, j)
                variants = (_info_variants(law) if isinstance(law, DiscreteFinite)
                            else [NoInfo(), FullInfo()])
                per_entry.append(((i, j), variants))
                count *= len(variants)
        if count > cap and len(aw) > len(base):
            continue
        if count > cap:
            per_entry = [(key, [FullInfo()]) for key, _v in per_entry]
        for assignment in _iproduct(*[v for _k, v in per_entry]):
            info = [dict() for _ in range(s.n_bidders)]
            for ((i, j), _variants), lvl in zip(per_entry, assignment):
                info[i - 1][j] = lvl
            pol = validate(s.n_bidders, s.m_characteristics, s.laws,
                           [aw] * s.n_bidders, info)[1]
            candidates.append((f"common={sorted(aw)} info={_policy_disclosure(pol)}", pol))
    return candidates


# ---------------------------------------------------------------------------
# Trade-off of raising one more bidder's awareness
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TradeoffBreakdown:
    """Inequality components for raising the target bidder's awareness of
    one characteristic; raise exactly when
    delta_first_order_stat + delta_rents_remaining_unaware exceeds
    lost_rent_newly_aware strictly."""

    delta_first_order_stat: object
    delta_rents_remaining_unaware: object
    lost_rent_newly_aware: object
    decision: str                       # "raise" | "keep"
    revenue_before: object
    revenue_after: object
    se_delta_first_order_stat: Optional[float] = None
    se_delta_rents_remaining_unaware: Optional[float] = None
    se_lost_rent_newly_aware: Optional[float] = None

    @property
    def lhs(self):
        return self.delta_first_order_stat + self.delta_rents_remaining_unaware


def _combine_se(a, b):
    if a is None or b is None:
        return None
    # draws are shared between the two policies, so this is an upper bound
    return math.sqrt(a * a + b * b)


def check_tradeoff(s: Scenario, base: DisclosurePolicy, target: Optional[int],
                   char: int, config: EstimatorConfig,
                   new_level: Optional[InfoLevel] = None) -> TradeoffBreakdown:
    """Evaluate the raise-one-more-bidder trade-off from a base policy in
    which some bidders are aware of ``char`` on top of a common set and the
    rest (including ``target``) are not.  ``target=None`` means nobody is
    left to make aware: all components are zero and the decision is keep."""
    zero = Fraction(0) if config.backend == "exact" else 0.0
    if target is None:
        rep = revenue(s, base, config)
        return TradeoffBreakdown(zero, zero, zero, "keep",
                                 rep.total_revenue, rep.total_revenue)

    aware_of_char = [i for i in range(1, s.n_bidders + 1) if char in base.aware(i)]
    if char in base.aware(target):
        raise ScenarioError(f"bidder {target} is already aware of characteristic {char}")
    core = base.aware(target)
    for i in range(1, s.n_bidders + 1):
        expected = core | {char} if i in aware_of_char else core
        if base.aware(i) != expected:
            raise ScenarioError(
                "base policy must split bidders between a common set and the "
                f"common set plus characteristic {char}; bidder {i} is aware of "
                f"{sorted(base.aware(i))}")
    if new_level is None:
        if aware_of_char:
            new_level = base.level(aware_of_char[0], char)
        else:
            new_level = FullInfo()

    awareness = list(base.awareness)
    info = [dict(levels) for levels in base.info]
    awareness[target - 1] = awareness[target - 1] | {char}
    info[target - 1][char] = new_level
    raised = validate(s.n_bidders, s.m_characteristics, s.laws, awareness, info)[1]

    before = revenue(s, base, config)
    after = revenue(s, raised, config)

    delta_first = after.expected_first_order_stat - before.expected_first_order_stat
    remaining = [i for i in range(1, s.n_bidders + 1)
                 if i != target and i not in aware_of_char]
    delta_rents = sum((after.fee_schedule.rents[i - 1] - before.fee_schedule.rents[i - 1]
                       for i in remaining), zero)
    lost = before.fee_schedule.rents[target - 1]
    decision = "raise" if delta_first + delta_rents > lost else "keep"

    se_first = _combine_se(before.se_first_order_stat, after.se_first_order_stat)
    if before.backend == "mc":
        se_rents = _combine_se(
            math.fsum((before.fee_schedule.se_fees[i - 1] or 0.0) ** 2 +
                      (before.fee_schedule.se_fees_fullview[i - 1] or 0.0) ** 2
                      for i in remaining) ** 0.5,
            math.fsum((after.fee_schedule.se_fees[i - 1] or 0.0) ** 2 +
                      (after.fee_schedule.se_fees_fullview[i - 1] or 0.0) ** 2
                      for i in remaining) ** 0.5)
        se_lost = _combine_se(before.fee_schedule.se_fees[target - 1],
                              before.fee_schedule.se_fees_fullview[target - 1])
    else:
        se_rents = se_lost = None
    return TradeoffBreakdown(delta_first, delta_rents, lost, decision,
                             before.total_revenue, after.total_revenue,
                             se_first, se_rents, se_lost)


# ---------------------------------------------------------------------------
# Randomized exact corpus
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CorpusConfig:
    count: int = 100
    seed: int = 0
    max_bidders: int = 3
    max_characteristics: int = 3
    max_atoms: int = 3
    partition_cap: int = 20000


_EXACT = EstimatorConfig(backend="exact", report_standard_errors=False)


def _random_probs(rng: random.Random, k: int):
    den = rng.choice([4, 6, 8, 12])
    cuts = sorted(rng.sample(range(1, den), k - 1))
    parts = [b - a for a, b in zip([0] + cuts, cuts + [den])]
    return [Fraction(c, den) for c in parts]


def _random_values(rng: random.Random, k: int, flavor: str):
    den = rng.choice([1, 2, 3])
    if flavor == "positive":
        pool = range(0, 9)
    elif flavor == "negative":
        pool = range(-8, 1)
    else:
        pool = range(-6, 9)
    nums = rng.sample(list(pool), k)
    return sorted(Fraction(v, den) for v in nums)


def random_discrete_scenario(cfg: CorpusConfig, index: int):
    """One seeded corpus scenario: per characteristic a common support across
    bidders (characteristic 2 positive-valued, the last characteristic
    negative-valued on odd indices) with independently drawn per-bidder
    probabilities, identical across bidders for about half the
    characteristics."""
    rng = random.Random(f"{cfg.seed}:{index}")
    n = rng.randint(2, cfg.max_bidders)
    m = rng.randint(2, cfg.max_characteristics)
    laws = [[None] * m for _ in range(n)]
    for j in range(1, m + 1):
        k = rng.randint(2, cfg.max_atoms)
        if j == 2:
            flavor = "positive"
        elif j == m and index % 2 == 1:
            flavor = "negative"
        else:
            flavor = "mixed"
        values = _random_values(rng, k, flavor)
        iid = rng.random() < 0.5
        shared = _random_probs(rng, k)
        for i in range(1, n + 1):
            probs = shared if iid else _random_probs(rng, k)
            laws[i - 1][j - 1] = DiscreteFinite(values, probs)
    scenario = Scenario(n, m, tuple(tuple(row) for row in laws))
    return f"corpus-{cfg.seed}-{index}", scenario


def _iid_chars(s: Scenario):
    out = []
    for j in range(1, s.m_characteristics + 1):
        first = s.law(1, j)
        if all(s.law(i, j) == first for i in range(2, s.n_bidders + 1)):
            out.append(j)
    return out


# ---------------------------------------------------------------------------
# Verification suite
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ClaimResult:
    claim: str
    scenario_id: str
    hypothesis_satisfied: bool
    holds: bool
    margin: object
    note: str = ""


@dataclass(frozen=True)
class VerificationReport:
    results: tuple
    corpus: CorpusConfig

    @property
    def failures(self):
        return tuple(r for r in self.results
                     if r.hypothesis_satisfied and not r.holds)

    @property
    def all_pass(self) -> bool:
        return not self.failures

    def checked(self, claim: str):
        return [r for r in self.results if r.claim == claim and r.hypothesis_satisfied]


def _full_info(s: Scenario) -> dict:
    return {j: FullInfo() for j in range(1, s.m_characteristics + 1)}


def _nonneg_support(s: Scenario, bidders, ell: int) -> bool:
    return all(s.law(i, ell).values[0] >= 0 for i in bidders)


def _claims_raise_first(sid: str, s: Scenario) -> list:
    """Prop 2 with its two lemmas: raising bidder 1's awareness of a
    positive-mean characteristic (full info fixed exogenously) strictly
    raises the first order statistic, leaves strictly positive rents with
    the remaining unaware bidders, and strictly raises revenue.

    The first-order-statistic claim needs only a positive mean.  The rent
    claims additionally require bidder 1's disclosed value to be almost
    surely nonnegative: that makes his full-view bid rise draw by draw,
    which is what pushes the unaware bidders' actual surplus below their
    perceived one.  A positive mean alone does not suffice - a value that
    is often negative can raise the remaining bidders' actual surplus and
    make their rents strictly negative (exact counterexamples exist), so
    the nonnegativity is part of the recorded hypothesis.
    """
    out = []
    info = _full_info(s)
    for ell in range(2, s.m_characteristics + 1):
        mprime = s.full_set - {ell}
        hyp_mean = mean(s.law(1, ell)) > 0
        hyp_rent = hyp_mean and _nonneg_support(s, [1], ell)
        base = _common_policy(s, mprime, info)
        raised = policy_with_info(
            s, [mprime | {ell}] + [mprime] * (s.n_bidders - 1), info)
        before = revenue(s, base, _EXACT)
        after = revenue(s, raised, _EXACT)
        d_first = (after.expected_first_order_stat - before.expected_first_order_stat)
        rents = after.fee_schedule.total_rents
        d_rev = after.total_revenue - before.total_revenue
        out.append(ClaimResult("Lem3", sid, hyp_mean, d_first > 0, d_first, f"ell={ell}"))
        out.append(ClaimResult("Lem4", sid, hyp_rent, rents > 0, rents, f"ell={ell}"))
        out.append(ClaimResult("Prop2", sid, hyp_rent, d_rev > 0, d_rev, f"ell={ell}"))
    return out


def _claims_tradeoff(sid: str, s: Scenario, rng: random.Random) -> list:
    """Prop 3 and Lemmas 5-7 on a random k-split: bidders 1..k aware of the
    extra characteristic, the rest not; the tested action raises bidder
    k+1."""
    out = []
    ell = 2                              # positive-valued by construction
    mprime = s.full_set - {ell}
    k = rng.randint(1, s.n_bidders - 1)
    awareness = [mprime | {ell}] * k + [mprime] * (s.n_bidders - k)
    base = policy_with_info(s, awareness, _full_info(s))
    target = k + 1
    td = check_tradeoff(s, base, target, ell, _EXACT)

    mu_target = mean(s.law(target, ell))
    remaining = range(target + 1, s.n_bidders + 1)
    before = revenue(s, base, _EXACT)
    competitive = any(before.fee_schedule.fees_fullview[i - 1] > 0 for i in remaining)
    hyp_l5 = mu_target > 0
    # rent claims carry the same nonnegative-support rider as in
    # _claims_raise_first (characteristic 2 satisfies it by construction);
    # the remaining-unaware rents can only move if some remaining bidder
    # wins the full-view auction with positive probability to begin with
    hyp_l6 = (mu_target > 0 and target < s.n_bidders
              and _nonneg_support(s, [target], ell) and competitive)
    hyp_l7 = (all(mean(s.law(i, ell)) > 0 for i in range(1, k + 1))
              and _nonneg_support(s, range(1, k + 1), ell))

    residual = (td.revenue_after - td.revenue_before) - (td.lhs - td.lost_rent_newly_aware)
    consistent = (td.decision == "raise") == (td.revenue_after > td.revenue_before)
    out.append(ClaimResult("Lem5", sid, hyp_l5, td.delta_first_order_stat > 0,
                           td.delta_first_order_stat, f"k={k}"))
    out.append(ClaimResult("Lem6", sid, hyp_l6, td.delta_rents_remaining_unaware > 0,
                           td.delta_rents_remaining_unaware, f"k={k}"))
    out.append(ClaimResult("Lem7", sid, hyp_l7, td.lost_rent_newly_aware > 0,
                           td.lost_rent_newly_aware, f"k={k}"))
    out.append(ClaimResult("Prop3", sid, True, residual == 0 and consistent,
                           residual, f"k={k} decision={td.decision}"))
    return out


def _claims_public_no_info(sid: str, s: Scenario, char_info: dict) -> list:
    """Prop 4: raising common awareness of an iid characteristic with no
    information shifts revenue by exactly its mean."""
    out = []
    iid = set(_iid_chars(s))
    for ell in range(2, s.m_characteristics + 1):
        hyp = ell in iid
        mprime = s.full_set - {ell}
        base_info = {j: char_info.get(j, FullInfo()) for j in mprime}
        without = _common_policy(s, mprime, base_info)
        with_info = dict(base_info)
        with_info[ell] = NoInfo()
        withp = _common_policy(s, s.full_set, with_info)
        shift = (revenue(s, withp, _EXACT).total_revenue
                 - revenue(s, without, _EXACT).total_revenue)
        resid = shift - mean(s.law(1, ell)) if hyp else Fraction(0)
        out.append(ClaimResult("Prop4", sid, hyp, resid == 0, resid, f"ell={ell}"))
    return out


def _claims_public_full_info(sid: str, s: Scenario) -> list:
    """Prop 5 (if direction): a characteristic whose max across bidders has
    strictly negative expectation is kept hidden under mandatory full
    information."""
    out = []
    info = _full_info(s)
    for ell in range(2, s.m_characteristics + 1):
        e_max = expected_order_stat(
            OrderStatLaw(tuple(s.law(i, ell) for i in range(1, s.n_bidders + 1)), 1))
        hyp = e_max < 0
        mprime = s.full_set - {ell}
        without = revenue(s, _common_policy(s, mprime, info), _EXACT).total_revenue
        withr = revenue(s, _common_policy(s, s.full_set, info), _EXACT).total_revenue
        margin = without - withr
        out.append(ClaimResult("Prop5", sid, hyp, margin > 0, margin,
                               f"ell={ell} Emax={e_max}"))
    return out


def _bid_law_atoms(s: Scenario, i: int, aware, levels):
    """Exact law of bidder i's bid under a common-awareness partition policy."""
    law = PointMass(0)
    for j in sorted(aware):
        base = s.law(i, j)
        lvl = levels[j]
        if isinstance(lvl, NoInfo):
            comp = PointMass(mean(base))
        else:
            cells_means = {}
            for cell in lvl.cells:
                mass = sum((base.probs[a] for a in cell), Fraction(0))
                val = sum((base.probs[a] * base.values[a] for a in cell), Fraction(0)) / mass
                cells_means[val] = cells_means.get(val, Fraction(0)) + mass
            if len(cells_means) == 1:
                comp = PointMass(next(iter(cells_means)))
            else:
                comp = DiscreteFinite(sorted(cells_means),
                                      [cells_means[v] for v in sorted(cells_means)])
        law = convolve(law, comp)
    return law


def _claim_full_info_optimal(sid: str, s: Scenario, cap: int) -> list:
    """Prop 6: with common awareness, full information is revenue-maximal
    over every per-bidder partition assignment.

    The scan enumerates all assignments on the largest awareness set whose
    candidate count fits the cap, computes expected maxima in floating
    point, and re-verifies any assignment within 1e-9 of the full-info value
    with exact rational arithmetic, so the verdict is exact.
    """
    sets = sorted(lattice(s.m_characteristics),
                  key=lambda a: (-len(a), tuple(sorted(a))))
    chosen = None
    for aw in sets:
        count = 1
        for i in range(1, s.n_bidders + 1):
            for j in sorted(aw):
                count *= _bell(len(s.law(i, j).values))
        if count <= cap:
            chosen = aw
            break
    if chosen is None:
        return [ClaimResult("Prop6", sid, False, True, Fraction(0), "over cap")]

    aware = sorted(chosen)
    # per bidder: every combination of per-characteristic partitions
    variants = []
    for i in range(1, s.n_bidders + 1):
        per_char = [[(j, lvl) for lvl in _info_variants(s.law(i, j))] for j in aware]
        rows = []
        for combo in _iproduct(*per_char):
            levels = dict(combo)
            rows.append((levels, _bid_law_atoms(s, i, aware, levels)))
        variants.append(rows)
    full_levels = [{j: Partition(cells=[(a,) for a in range(len(s.law(i, j).values))])
                    for j in aware} for i in range(1, s.n_bidders + 1)]
    full_laws = [_bid_law_atoms(s, i, aware, full_levels[i - 1])
                 for i in range(1, s.n_bidders + 1)]
    rev_full = expected_order_stat(OrderStatLaw(tuple(full_laws), 1))

    grid = sorted({Fraction(v) for rows in variants for _lvl, law in rows
                   for v in (law.values if isinstance(law, DiscreteFinite) else (law.value,))})
    gx = np.array([float(v) for v in grid])
    mats = []
    for rows in variants:
        mat = np.empty((len(rows), len(grid)))
        for r, (_lvl, law) in enumerate(rows):
            if isinstance(law, PointMass):
                mat[r] = (gx >= float(law.value)).astype(float)
            else:
                vals = np.array([float(v) for v in law.values])
                cum = np.concatenate([[0.0], np.cumsum([float(p) for p in law.probs])])
                mat[r] = cum[np.searchsorted(vals, gx, side="right")]
        mats.append(mat)

    idx = np.meshgrid(*[np.arange(len(rows)) for rows in variants], indexing="ij")
    idx = [ix.ravel() for ix in idx]
    prod = mats[0][idx[0]]
    for mat, ix in zip(mats[1:], idx[1:]):
        prod = prod * mat[ix]
    dv = np.diff(gx)
    e_max = gx[-1] - prod[:, :-1] @ dv
    margins = float(rev_full) - e_max

    # The full-info assignment itself is in the scan (margin 0), so exact
    # rechecking everything within float error of zero settles the verdict.
    holds = True
    worst = None
    for flat in np.nonzero(margins < 1e-9)[0]:
        levels = _unflatten(int(flat), variants)
        laws = [_bid_law_atoms(s, i + 1, aware, levels[i]) for i in range(s.n_bidders)]
        margin = rev_full - expected_order_stat(OrderStatLaw(tuple(laws), 1))
        if margin < 0:
            holds = False
        if worst is None or margin < worst:
            worst = margin
    if worst is None:
        worst = Fraction(0)
    return [ClaimResult("Prop6", sid, True, holds, worst,
                        f"set={aware} candidates={len(e_max)}")]


def _unflatten(flat, variants):
    levels = []
    rem = flat
    for rows in reversed(variants):
        levels.append(rows[rem % len(rows)][0])
        rem //= len(rows)
    levels.reverse()
    return levels


def _bell(k: int) -> int:
    return [1, 1, 2, 5, 15, 52][k] if k <= 5 else sum(1 for _ in _set_partitions(k))


def _claim_corollary1(sid: str, s: Scenario, char_info: dict, rng: random.Random) -> list:
    """Corollary 1: under any equal-awareness policy every rent is exactly
    zero and revenue equals the expected first order statistic."""
    aw = rng.choice(lattice(s.m_characteristics))
    pol = _common_policy(s, aw, {j: char_info.get(j, FullInfo()) for j in aw})
    rep = revenue(s, pol, _EXACT)
    rent = max((abs(r) for r in rep.fee_schedule.rents), default=Fraction(0))
    resid = abs(rep.total_revenue - rep.expected_first_order_stat)
    margin = max(rent, resid)
    return [ClaimResult("Cor1", sid, True, margin == 0, margin, f"set={sorted(aw)}")]


def _random_char_info(s: Scenario, rng: random.Random) -> dict:
    info = {}
    for j in range(1, s.m_characteristics + 1):
        k = len(s.law(1, j).values)
        choice = rng.random()
        if choice < 0.4:
            info[j] = FullInfo()
        elif choice < 0.7:
            info[j] = NoInfo()
        else:
            cells = rng.choice([c for c in _set_partitions(k) if len(c) > 1])
            info[j] = Partition(cells=cells)
    return info


def verify_suite(cfg: CorpusConfig) -> VerificationReport:
    """Replay every claim on the seeded exact corpus."""
    results = []
    for index in range(cfg.count):
        sid, s = random_discrete_scenario(cfg, index)
        rng = random.Random(f"{cfg.seed}:{index}:claims")
        common_info = _random_char_info(s, rng)
        results += _claims_raise_first(sid, s)
        results += _claims_tradeoff(sid, s, rng)
        results += _claims_public_no_info(sid, s, common_info)
        results += _claims_public_full_info(sid, s)
        results += _claim_full_info_optimal(sid, s, cfg.partition_cap)
        results += _claim_corollary1(sid, s, common_info, rng)
    return VerificationReport(tuple(results), cfg)


# ---------------------------------------------------------------------------
# Counterexample search
# ---------------------------------------------------------------------------

def counterexample_search(claim: str, cfg: CorpusConfig,
                          extra_scenarios: Sequence = ()) -> list:
    """Hunt for instances showing positive means are not necessary.

    ``prop2-converse``: individually raising bidder 1's awareness of a
    characteristic with negative bidder-1 mean that still strictly raises
    revenue.  ``prop5-converse``: under public full information, either a
    negative-mean characteristic whose disclosure strictly raises revenue
    (the Example-1 pattern), or a genuine violation of the only-if
    direction: E[max] >= 0 yet hiding is strictly better.
    """
    if claim not in ("prop2-converse", "prop5-converse"):
        raise ValueError(f"unknown claim {claim!r}")
    scenarios = [(f"extra-{i}", s) for i, s in enumerate(extra_scenarios)]
    scenarios += [random_discrete_scenario(cfg, i) for i in range(cfg.count)]
    found = []
    for sid, s in scenarios:
        info = _full_info(s)
        for ell in range(2, s.m_characteristics + 1):
            mprime = s.full_set - {ell}
            if claim == "prop2-converse":
                if not mean(s.law(1, ell)) < 0:
                    continue
                base = _common_policy(s, mprime, info)
                raised = policy_with_info(
                    s, [mprime | {ell}] + [mprime] * (s.n_bidders - 1), info)
                gain = (revenue(s, raised, _EXACT).total_revenue
                        - revenue(s, base, _EXACT).total_revenue)
                if gain > 0:
                    found.append({"scenario": sid, "char": ell, "gain": gain,
                                  "mean": mean(s.law(1, ell))})
            else:
                e_max = expected_order_stat(OrderStatLaw(
                    tuple(s.law(i, ell) for i in range(1, s.n_bidders + 1)), 1))
                without = revenue(s, _common_policy(s, mprime, info), _EXACT).total_revenue
                withr = revenue(s, _common_policy(s, s.full_set, info), _EXACT).total_revenue
                means = [mean(s.law(i, ell)) for i in range(1, s.n_bidders + 1)]
                if all(mu < 0 for mu in means) and withr > without:
                    found.append({"scenario": sid, "char": ell, "kind": "negative-mean-raise",
                                  "gain": withr - without, "e_max": e_max})
                if e_max >= 0 and without > withr:
                    found.append({"scenario": sid, "char": ell, "kind": "only-if-violation",
                                  "gain": without - withr, "e_max": e_max})
    return found
