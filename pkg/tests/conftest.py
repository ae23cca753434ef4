import math
import pathlib
from fractions import Fraction as F

import numpy as np
import pytest

from awarebid.distributions import DiscreteFinite, FullInfo, NoInfo, UniformContinuous
from awarebid.engine import EstimatorConfig
from awarebid.scenario import validate

SCENARIO_DIR = pathlib.Path(__file__).resolve().parent.parent / "scenarios"

EXACT = EstimatorConfig(backend="exact", report_standard_errors=False)

# asymptotic Kolmogorov-Smirnov critical value at significance 0.001
KS_COEFF_001 = math.sqrt(-math.log(0.0005) / 2)


def ks_statistic(samples, cdf_fn, has_atoms=False):
    """sup_x |F_emp(x) - F(x)| for sorted-able samples.

    With atoms the left limits of both CDFs matter; the theoretical left
    limit is probed just below each distinct sample value (safe for atom
    spacings above 1e-6)."""
    xs = np.sort(np.asarray(samples, dtype=np.float64))
    n = xs.size
    probes = np.unique(xs)
    f_at = np.asarray(cdf_fn(probes), dtype=np.float64)
    emp_at = np.searchsorted(xs, probes, side="right") / n
    emp_before = np.searchsorted(xs, probes, side="left") / n
    if has_atoms:
        eps = 1e-7 * max(1.0, float(np.max(np.abs(probes))))
        f_before = np.asarray(cdf_fn(probes - eps), dtype=np.float64)
    else:
        f_before = f_at
    return float(max(np.max(np.abs(emp_at - f_at)),
                     np.max(np.abs(emp_before - f_before))))


def coin(values):
    return DiscreteFinite(values, [F(1, 2), F(1, 2)])


def build_d1():
    """Two bidders; characteristic 1 uniform on {0,1}, characteristic 2
    uniform on {0,2}; bidder 1 aware of both, bidder 2 only of the first;
    full information throughout."""
    return validate(
        2, 2,
        [[coin([0, 1]), coin([0, 2])], [coin([0, 1]), coin([0, 2])]],
        [[1, 2], [1]],
        [{1: FullInfo(), 2: FullInfo()}, {1: FullInfo()}])


def build_u01():
    """Two bidders, one characteristic uniform on [0,1], full awareness."""
    u = UniformContinuous(0.0, 1.0)
    return validate(2, 1, [[u], [u]], [[1], [1]],
                    [{1: FullInfo()}, {1: FullInfo()}])


def build_noinfo_tie(mean_val=F(2, 5)):
    """Symmetric no-information scenario: every bid equals the common mean."""
    d = DiscreteFinite([0, 1], [1 - mean_val, mean_val])
    return validate(2, 1, [[d], [d]], [[1], [1]],
                    [{1: NoInfo()}, {1: NoInfo()}])


@pytest.fixture
def d1():
    return build_d1()


@pytest.fixture
def u01():
    return build_u01()


@pytest.fixture
def scenario_dir():
    return SCENARIO_DIR
