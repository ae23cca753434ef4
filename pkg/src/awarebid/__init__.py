"""Second-price auctions with entry fees under bidder unawareness.

Simulation and policy search for a seller who can raise bidders' awareness
of value-relevant characteristics and disclose information about them:
optimal entry fees, revenue decomposition into the expected first order
statistic plus unawareness rents, analytic order-statistic laws, and
machine-checked verification of the theory on exact discrete scenarios.
"""

from .distributions import (
    DiscreteFinite,
    DistributionError,
    FullInfo,
    GridLaw,
    NoInfo,
    Normal,
    Partition,
    PointMass,
    RandomStream,
    TrapezoidLaw,
    UniformContinuous,
    cdf,
    cell_of,
    conditional_mean,
    convolve,
    mean,
    ppf,
    sample,
)
from .engine import (
    EstimateBundle,
    EstimatorConfig,
    EstimationError,
    bids,
    draw_state,
    estimate,
    exact_cap_check,
    settle,
)
from .fees import CurseReport, FeeSchedule, RevenueReport, curse_gap, entry_fees, revenue
from .orderstats import clark_normal_max, expected_order_stat, order_cdf, valuation_law
from .scenario import (
    DisclosurePolicy,
    Perspective,
    Scenario,
    ScenarioError,
    lattice,
    perceive,
    validate,
)

__version__ = "0.1.0"
