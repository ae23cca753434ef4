"""Per-draw second-price outcome kernels.

Given a (draws x bidders) bid matrix the kernel produces, per draw: the
highest bid, the second-highest bid, each bidder's fractional win credit
(1/#ties for the top bidders, 0 otherwise) and each bidder's surplus
(bid - price for a unique winner; ties leave zero surplus because the price
equals the bid).  This is the inner loop of Monte Carlo estimation.

Two interchangeable implementations exist: a numba @njit loop and a pure
numpy path.  Set AWAREBID_KERNEL=numpy (or numba) to force one; the default
is numba when importable.  Both produce bit-identical arrays, so estimates
never depend on the backend.
"""

from __future__ import annotations

import os

import numpy as np

try:
    from numba import njit

    HAS_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba installed
    HAS_NUMBA = False

__all__ = ["second_price_stats", "active_backend", "HAS_NUMBA"]


def _stats_numpy(bids: np.ndarray):
    first = bids.max(axis=1)
    is_top = bids == first[:, None]
    n_top = is_top.sum(axis=1)
    # second-highest including duplicates; equals the price a unique winner pays
    # and equals `first` whenever the top is tied.
    second = np.partition(bids, bids.shape[1] - 2, axis=1)[:, -2]
    credit = is_top / n_top[:, None]
    surplus = np.where(is_top & (n_top == 1)[:, None], (first - second)[:, None], 0.0)
    return first, second, credit, surplus


if HAS_NUMBA:

    @njit(cache=True)
    def _stats_numba(bids):  # pragma: no cover - compiled
        S, n = bids.shape
        first = np.empty(S, dtype=np.float64)
        second = np.empty(S, dtype=np.float64)
        credit = np.zeros((S, n), dtype=np.float64)
        surplus = np.zeros((S, n), dtype=np.float64)
        for s in range(S):
            m1 = bids[s, 0]
            for k in range(1, n):
                if bids[s, k] > m1:
                    m1 = bids[s, k]
            n_top = 0
            m2 = -np.inf
            winner = -1
            for k in range(n):
                b = bids[s, k]
                if b == m1:
                    n_top += 1
                    winner = k
                elif b > m2:
                    m2 = b
            if n_top > 1:
                m2 = m1
            first[s] = m1
            second[s] = m2
            w = 1.0 / n_top
            for k in range(n):
                if bids[s, k] == m1:
                    credit[s, k] = w
            if n_top == 1:
                surplus[s, winner] = m1 - m2
        return first, second, credit, surplus


def active_backend() -> str:
    """Which kernel implementation calls will dispatch to."""
    forced = os.environ.get("AWAREBID_KERNEL", "").strip().lower()
    if forced == "numpy":
        return "numpy"
    if forced == "numba":
        if not HAS_NUMBA:
            raise RuntimeError("AWAREBID_KERNEL=numba but numba is not installed")
        return "numba"
    return "numba" if HAS_NUMBA else "numpy"


def second_price_stats(bids: np.ndarray):
    """Dispatch to the active kernel; see module docstring for outputs."""
    bids = np.ascontiguousarray(bids, dtype=np.float64)
    if bids.ndim != 2 or bids.shape[1] < 2:
        raise ValueError("need a (draws, >=2 bidders) bid matrix")
    if active_backend() == "numba":
        return _stats_numba(bids)
    return _stats_numpy(bids)
