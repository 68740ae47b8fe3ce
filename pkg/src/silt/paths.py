"""Lattice walk paths and their occupation statistics.

A path is the site sequence S_0 = 0, S_1, ..., S_n.  The central quantity is
the self-intersection count

    V_n = #{(i, j) : 0 <= i, j <= n, S_i = S_j} = sum_x N_n(x)^2,

where N_n(x) counts visits to site x among S_0..S_n.  V_n counts ordered
pairs and includes the diagonal, so V_n >= n+1 always, with equality iff all
sites are distinct.  The incremental identity

    V_m = V_{m-1} + 1 + 2 N_{m-1}(S_m)

lets one pass over the path produce V_m for every m <= n.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from .laws import StepLaw

__all__ = [
    "WalkPath",
    "simulate_path",
    "site_keys",
    "occupation",
    "self_intersections",
    "vn_profile",
    "max_local_time",
    "cross_intersections",
]

_COORD_LIMIT = np.int64(2) ** 31 - 1  # d=2 packing range per coordinate
_SUM_LIMIT = float(2**61)  # overflow guard for d=1 cumulative sums


@dataclass(frozen=True)
class WalkPath:
    """Realized path: law name, dimension, and the site array.

    ``sites`` has shape (n+1,) for d=1 and (n+1, 2) for d=2; S_0 is the
    origin.
    """

    law_name: str
    d: int
    sites: NDArray[np.int64]

    @property
    def n(self) -> int:
        return len(self.sites) - 1


def simulate_path(law: StepLaw, n: int, rng) -> WalkPath:
    """Simulate an n-step path from the origin.

    ``rng`` is a numpy Generator or an integer seed.  Coordinates are kept
    in int64; a conservative guard rejects the (astronomically rare) heavy
    tailed draws that could overflow the cumulative sum.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    if not isinstance(rng, np.random.Generator):
        rng = np.random.default_rng(rng)
    steps = law.sample_steps(n, rng)
    if law.d == 1:
        if n and np.abs(steps).sum(dtype=np.float64) > _SUM_LIMIT:
            raise OverflowError("path coordinates would overflow int64")
        sites = np.concatenate([np.zeros(1, dtype=np.int64), np.cumsum(steps)])
    else:
        sites = np.concatenate(
            [np.zeros((1, 2), dtype=np.int64), np.cumsum(steps, axis=0)]
        )
        if n and np.abs(sites).max() >= _COORD_LIMIT:
            raise OverflowError("path coordinates exceed the packing range")
    return WalkPath(law_name=law.name, d=law.d, sites=sites)


def site_keys(path: WalkPath) -> NDArray[np.uint64]:
    """One uint64 key per visited site (injective on the valid range)."""
    if path.d == 1:
        return path.sites.astype(np.uint64)
    x = path.sites[:, 0].astype(np.int64) + _COORD_LIMIT + 1
    y = path.sites[:, 1].astype(np.int64) + _COORD_LIMIT + 1
    return (x.astype(np.uint64) << np.uint64(32)) | y.astype(np.uint64)


def occupation(path: WalkPath):
    """Distinct visited sites and their visit counts N_n(x).

    Returns (sites, counts): for d=1 ``sites`` is a sorted 1-d array of site
    coordinates; for d=2 it is an array of shape (k, 2).  counts sums to n+1.
    """
    keys = site_keys(path)
    uniq, counts = np.unique(keys, return_counts=True)
    if path.d == 1:
        return uniq.astype(np.int64), counts
    x = (uniq >> np.uint64(32)).astype(np.int64) - (_COORD_LIMIT + 1)
    y = (uniq & np.uint64(0xFFFFFFFF)).astype(np.int64) - (_COORD_LIMIT + 1)
    return np.stack([x, y], axis=1), counts


def self_intersections(path: WalkPath) -> int:
    """V_n = sum of squared visit counts (ordered pairs, diagonal included)."""
    _, counts = occupation(path)
    return int(np.sum(counts.astype(np.int64) ** 2))


def _prior_occurrences(keys: NDArray[np.uint64]) -> NDArray[np.int64]:
    # occ[m] = number of i < m with keys[i] == keys[m]
    m = len(keys)
    order = np.argsort(keys, kind="stable")
    sk = keys[order]
    new_group = np.empty(m, dtype=bool)
    new_group[0] = True
    new_group[1:] = sk[1:] != sk[:-1]
    pos = np.arange(m, dtype=np.int64)
    group_start = np.maximum.accumulate(np.where(new_group, pos, 0))
    occ = np.empty(m, dtype=np.int64)
    occ[order] = pos - group_start
    return occ


def vn_profile(path: WalkPath) -> NDArray[np.int64]:
    """V_m for every m = 0..n in one pass.

    Uses V_m = (m+1) + 2 * sum_{i<=m} occ_i with occ_i the number of earlier
    visits to the site S_i.
    """
    occ = _prior_occurrences(site_keys(path))
    m = np.arange(len(occ), dtype=np.int64)
    return (m + 1) + 2 * np.cumsum(occ)


def max_local_time(path: WalkPath) -> int:
    """Largest visit count over sites, max_x N_n(x)."""
    _, counts = occupation(path)
    return int(counts.max())


def cross_intersections(path: WalkPath, a: float, b: float) -> int:
    """Count of pairs (i, j) with j <= [a n] < i <= [b n] and S_i = S_j.

    Equals sum_x N_{[an]}(x) * (N_{[bn]}(x) - N_{[an]}(x)); the quenched
    covariance of scenery sums over disjoint time windows is proportional
    to this count.
    """
    if not (0.0 <= a <= b <= 1.0):
        raise ValueError("need 0 <= a <= b <= 1")
    n = path.n
    ia = int(math.floor(a * n + 1e-9))
    ib = int(math.floor(b * n + 1e-9))
    keys = site_keys(path)
    _, inv = np.unique(keys, return_inverse=True)
    k = inv.max() + 1
    c_a = np.bincount(inv[: ia + 1], minlength=k)
    c_b = np.bincount(inv[: ib + 1], minlength=k)
    return int(np.sum(c_a * (c_b - c_a)))
