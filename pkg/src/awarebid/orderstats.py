"""Analytic laws and moments of perceived-valuation order statistics.

A bidder's estimated valuation under a viewpoint is the sum of independent
per-characteristic contributions (the value law itself under full
information, a point mass at its mean under no information), so its law is
built by repeated convolution.  Order statistics of independent but not
identically distributed valuations have CDFs given by permanents of the
matrix whose columns repeat the individual CDFs and their complements; the
top-two ranks reduce to the familiar product and two-term formulas.

Expectations integrate the CDF: E = int_0^inf (1-G) - int_{-inf}^0 G, by
adaptive Simpson between analytic knots for closed forms, by grid trapezoid
when a grid law is involved, and by an exact rational atom sweep when every
component law is finitely supported.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, permutations

import numpy as np

from .distributions import (
    GRID_POINTS,
    DiscreteFinite,
    DistributionError,
    FullInfo,
    GridLaw,
    NoInfo,
    Partition,
    PointMass,
    breakpoints,
    cdf,
    cdf_exact,
    cell_probability,
    cells,
    conditional_mean,
    convolve,
    mean,
    quantile_range,
)
from .scenario import DisclosurePolicy, Perspective, Scenario, perceive

__all__ = [
    "OrderStatLaw",
    "valuation_law",
    "order_cdf",
    "expected_order_stat",
    "clark_normal_max",
    "permanent",
    "SIMPSON_TOL",
]

SIMPSON_TOL = 1e-10
_GENERAL_RANK_MAX = 12


def valuation_law(s: Scenario, p: DisclosurePolicy, bidder: int,
                  view: Perspective, grid_points: int = GRID_POINTS):
    """Law of bidder's estimated valuation as seen from ``view``.

    Full information contributes the characteristic law itself, no
    information a point mass at its mean, and a discrete partition the law
    of cell means.  Partitions of continuous laws have no closed-form sum
    law here; estimate those through the engine instead.
    """
    seen = perceive(p, view)
    law = PointMass(0)
    for j in sorted(seen.aware(bidder)):
        base = s.law(bidder, j)
        level = seen.level(bidder, j)
        if isinstance(level, NoInfo):
            comp = PointMass(mean(base))
        elif isinstance(level, FullInfo):
            comp = base
        elif isinstance(level, Partition) and isinstance(base, DiscreteFinite):
            pairs = [(conditional_mean(base, level, c), cell_probability(base, c))
                     for c in cells(base, level)]
            if len({v for v, _p in pairs}) == 1:
                comp = PointMass(pairs[0][0])
            else:
                comp = DiscreteFinite.from_atoms(pairs)
        else:
            raise DistributionError(
                f"bidder {bidder} characteristic {j}: no closed-form valuation "
                "law under a continuous partition; use the engine")
        law = convolve(law, comp, grid_points)
    return law


@dataclass(frozen=True)
class OrderStatLaw:
    """CDF of the rank-th highest of independent valuation laws (rank 1 = max)."""

    laws: tuple
    rank: int

    def __post_init__(self):
        n = len(self.laws)
        if n < 1:
            raise DistributionError("need at least one law")
        if not 1 <= self.rank <= n:
            raise DistributionError(f"rank {self.rank} outside 1..{n}")
        if n > _GENERAL_RANK_MAX and self.rank > 2:
            raise DistributionError(
                f"general rank formula limited to {_GENERAL_RANK_MAX} laws")

    def cdf(self, y):
        scalar = np.isscalar(y)
        y = np.atleast_1d(np.asarray(y, dtype=np.float64))
        G = np.vstack([cdf(law, y) for law in self.laws])
        out = _rank_cdf_float(G, self.rank)
        return float(out[0]) if scalar else out

    def cdf_exact(self, y) -> Fraction:
        """Exact rational CDF; components must be atom laws."""
        G = [cdf_exact(law, y) for law in self.laws]
        return _rank_cdf_terms(G, self.rank, one=Fraction(1))


def order_cdf(laws, r: int) -> OrderStatLaw:
    return OrderStatLaw(tuple(laws), r)


def _rank_cdf_float(G: np.ndarray, rank: int) -> np.ndarray:
    n = G.shape[0]
    if rank == 1:
        return np.prod(G, axis=0)
    if rank == 2:
        prod = np.prod(G, axis=0)
        out = prod.copy()
        for i in range(n):
            rest = np.prod(np.delete(G, i, axis=0), axis=0)
            out += (1.0 - G[i]) * rest
        return out
    cols = [G[i] for i in range(n)]
    return _rank_cdf_terms(cols, rank, one=1.0)


def _rank_cdf_terms(G, rank: int, one):
    """P(rank-th largest <= y) = P(at least n+1-rank of the values <= y).

    Evaluates the permanent formula by permutation classes: the permanent of
    the matrix with m columns G and n-m columns 1-G equals m!(n-m)! times
    the sum over m-subsets S of prod_{i in S} G_i prod_{i not in S} (1-G_i),
    so the factorial weights cancel and each class contributes one subset
    product.
    """
    n = len(G)
    comp = [one - g for g in G]
    total = G[0] * 0
    for m in range(n + 1 - rank, n + 1):
        for S in combinations(range(n), m):
            inS = set(S)
            term = one
            for i in range(n):
                term = term * (G[i] if i in inS else comp[i])
            total = total + term
    return total


def permanent(matrix):
    """Permanent of a small square matrix by direct permutation enumeration."""
    rows = list(matrix)
    n = len(rows)
    if any(len(r) != n for r in rows):
        raise ValueError("matrix must be square")
    total = 0
    for sigma in permutations(range(n)):
        term = 1
        for i in range(n):
            term = term * rows[i][sigma[i]]
        total = total + term
    return total


# ---------------------------------------------------------------------------
# Expectations
# ---------------------------------------------------------------------------

def _is_atomic(law) -> bool:
    return isinstance(law, (DiscreteFinite, PointMass))


def _atoms_exact(law):
    if isinstance(law, PointMass):
        return [(Fraction(law.value), Fraction(1))]
    return [(Fraction(v), p) for v, p in zip(law.values, law.probs)]


def expected_order_stat(os_law: OrderStatLaw):
    """E of the rank-th highest; exact Fraction when all laws are atomic."""
    if all(_is_atomic(law) for law in os_law.laws):
        return _expected_exact(os_law)
    return _expected_numeric(os_law)


def _expected_exact(os_law: OrderStatLaw) -> Fraction:
    supports = [sorted(v for v, _p in _atoms_exact(law)) for law in os_law.laws]
    grid = sorted({v for sup in supports for v in sup})
    prev = Fraction(0)
    out = Fraction(0)
    for v in grid:
        g = os_law.cdf_exact(v)
        out += v * (g - prev)
        prev = g
    return out


def _expected_numeric(os_law: OrderStatLaw) -> float:
    los, his = zip(*(quantile_range(law) for law in os_law.laws))
    lo, hi = min(los), max(his)
    lo, hi = min(lo, 0.0), max(hi, 0.0)

    def integrand(y):
        g = os_law.cdf(y)
        return (1.0 - g) if y >= 0 else -g

    knots = sorted({lo, hi, 0.0, *(
        k for law in os_law.laws for k in breakpoints(law) if lo < k < hi)})
    if any(isinstance(law, GridLaw) for law in os_law.laws):
        return _integrate_grid(integrand, knots)
    total = 0.0
    for a, b in zip(knots, knots[1:]):
        if b > a:
            total += _adaptive_simpson(integrand, a, b, SIMPSON_TOL)
    return total


def _integrate_grid(fn, knots) -> float:
    xs = np.unique(np.concatenate([
        np.linspace(knots[0], knots[-1], GRID_POINTS), np.asarray(knots)]))
    ys = np.array([fn(float(x)) for x in xs])
    return float(np.trapezoid(ys, xs))


def _adaptive_simpson(fn, a, b, tol, max_depth=48):
    fa, fb = fn(a), fn(b)
    m = 0.5 * (a + b)
    fm = fn(m)
    whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    return _simpson_step(fn, a, b, fa, fb, m, fm, whole, tol, max_depth)


def _simpson_step(fn, a, b, fa, fb, m, fm, whole, tol, depth):
    lm = 0.5 * (a + m)
    rm = 0.5 * (m + b)
    flm, frm = fn(lm), fn(rm)
    left = (m - a) / 6.0 * (fa + 4.0 * flm + fm)
    right = (b - m) / 6.0 * (fm + 4.0 * frm + fb)
    err = left + right - whole
    if depth <= 0 or abs(err) <= 15.0 * tol:
        return left + right + err / 15.0
    return (_simpson_step(fn, a, m, fa, fm, lm, flm, left, tol / 2.0, depth - 1)
            + _simpson_step(fn, m, b, fm, fb, rm, frm, right, tol / 2.0, depth - 1))


# ---------------------------------------------------------------------------
# Normal maxima (Clark)
# ---------------------------------------------------------------------------

def clark_normal_max(mu_a: float, var_a: float, mu_b: float, var_b: float) -> float:
    """E[max{A, B}] for independent normals A, B.

    E = mu_a Phi(theta) + mu_b Phi(-theta) + s phi(theta) with
    s = sqrt(var_a + var_b) and theta = (mu_a - mu_b)/s.  Degenerate
    variances are allowed; with s = 0 the max of the two constants remains.
    """
    if var_a < 0 or var_b < 0:
        raise ValueError("variances must be nonnegative")
    s = math.sqrt(var_a + var_b)
    if s == 0.0:
        return max(mu_a, mu_b)
    theta = (mu_a - mu_b) / s
    Phi = lambda z: 0.5 * (1.0 + math.erf(z / math.sqrt(2.0)))
    phi = lambda z: math.exp(-0.5 * z * z) / math.sqrt(2.0 * math.pi)
    return mu_a * Phi(theta) + mu_b * Phi(-theta) + s * phi(theta)
