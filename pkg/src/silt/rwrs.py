"""Random walk in random scenery and its quenched limit diagnostics.

The scenery attaches an iid value xi(site) to every lattice site.  Values
are never tabulated over a box: each site's value is a pure function of
(site key, scenery seed) through a 64-bit mixing chain, so any query order
yields the same scenery and only visited sites are ever touched.

For a walk path S_0..S_n, a time fraction t, and a d=1 law with scaling
parameter gamma, the normalized scenery sum is

    Y_n(t) = sqrt(pi gamma) * sum_{i=0}^{[nt]} xi(S_i) / (sigma sqrt(2 n log n)),

with natural log.  Conditionally on the path, Y_n(t) has mean 0 and variance
s_n^2(t) = pi gamma V_[nt] / (2 n log n); dividing by the exact s_n isolates
the normality question from the slow convergence of s_n itself.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray
from scipy import stats

from .errors import LawError
from .laws import StepLaw
from .paths import WalkPath, cross_intersections, simulate_path, site_keys, vn_profile

__all__ = [
    "Scenery",
    "make_scenery",
    "RwrsPath",
    "rwrs_path",
    "quenched_variance",
    "quenched_covariance",
    "quenched_clt_test",
    "fdd_covariance_check",
]

_MASK = (1 << 64) - 1
_GOLDEN_INT = 0x9E3779B97F4A7C15
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
SCENERY_KINDS = ("rademacher", "gaussian", "custom_iid")


def _finalize(x: NDArray[np.uint64]) -> NDArray[np.uint64]:
    with np.errstate(over="ignore"):
        x = x ^ (x >> np.uint64(30))
        x = x * _MIX1
        x = x ^ (x >> np.uint64(27))
        x = x * _MIX2
        return x ^ (x >> np.uint64(31))


def _stream(keys: NDArray[np.uint64], salt: np.uint64, draw: int) -> NDArray[np.uint64]:
    """draw-th 64-bit word for each key, independent of query order."""
    shift = np.uint64(((draw + 1) * _GOLDEN_INT) & _MASK)
    with np.errstate(over="ignore"):
        return _finalize((keys ^ salt) + shift)


def _unit(words: NDArray[np.uint64]) -> NDArray[np.float64]:
    # 53-bit mantissa, offset to the open interval (0,1)
    return ((words >> np.uint64(11)).astype(np.float64) + 0.5) * 2.0**-53


@dataclass(frozen=True)
class Scenery:
    """An iid field over lattice sites, materialized lazily by site key."""

    kind: str
    sigma: float
    salt: np.uint64
    values: tuple[float, ...] | None = None
    cdf: tuple[float, ...] | None = None

    def sample(self, keys: NDArray[np.uint64]) -> NDArray[np.float64]:
        keys = np.asarray(keys, dtype=np.uint64)
        if self.kind == "rademacher":
            bit = _stream(keys, self.salt, 0) >> np.uint64(63)
            return np.where(bit == 1, self.sigma, -self.sigma)
        if self.kind == "gaussian":
            u1 = _unit(_stream(keys, self.salt, 0))
            u2 = _unit(_stream(keys, self.salt, 1))
            return self.sigma * np.sqrt(-2.0 * np.log(u1)) * np.cos(2.0 * math.pi * u2)
        u = _unit(_stream(keys, self.salt, 0))
        idx = np.searchsorted(np.asarray(self.cdf), u, side="left")
        return np.asarray(self.values)[idx]


def make_scenery(kind: str, seed, sigma: float = 1.0, values=None, probs=None) -> Scenery:
    """Build a scenery field.  seed may be an int or a tuple of ints.

    Built-in kinds are centered with standard deviation sigma; custom_iid
    takes explicit values/probs, must be centered, and must not be
    degenerate (the standard deviation is derived, not passed).
    """
    salt = np.random.SeedSequence(seed).generate_state(1, np.uint64)[0]
    if kind in ("rademacher", "gaussian"):
        if sigma <= 0:
            raise LawError("scenery standard deviation must be positive")
        return Scenery(kind=kind, sigma=float(sigma), salt=salt)
    if kind == "custom_iid":
        if values is None or probs is None:
            raise LawError("custom_iid scenery needs values and probs")
        v = np.asarray(values, dtype=np.float64)
        p = np.asarray(probs, dtype=np.float64)
        if v.ndim != 1 or v.shape != p.shape:
            raise LawError("values and probs must be 1-d arrays of equal length")
        if np.any(p < 0) or abs(p.sum() - 1.0) > 1e-12:
            raise LawError("probs must be nonnegative and sum to 1")
        scale = float(np.max(np.abs(v))) or 1.0
        if abs(float(np.dot(p, v))) > 1e-12 * scale:
            raise LawError("custom scenery must be centered")
        var = float(np.dot(p, v**2))
        if var <= 0:
            raise LawError("degenerate scenery rejected: variance must be positive")
        return Scenery(
            kind=kind,
            sigma=math.sqrt(var),
            salt=salt,
            values=tuple(float(x) for x in v),
            cdf=tuple(float(c) for c in np.cumsum(p)),
        )
    raise LawError(f"unknown scenery kind {kind!r}; choose from {SCENERY_KINDS}")


@dataclass(frozen=True)
class RwrsPath:
    n: int
    t_grid: tuple[float, ...]
    values: tuple[float, ...]
    scenery_kind: str
    gamma: float


def _grid_indices(n: int, t_grid) -> NDArray[np.int64]:
    t = np.asarray(t_grid, dtype=np.float64)
    if np.any(t < 0) or np.any(t > 1):
        raise ValueError("time grid must lie in [0, 1]")
    return np.floor(t * n + 1e-9).astype(np.int64)


def _norm_scale(n: int) -> float:
    if n < 2:
        raise ValueError("normalization needs n >= 2")
    return math.sqrt(2.0 * n * math.log(n))


def rwrs_path(path: WalkPath, scenery: Scenery, t_grid, gamma: float) -> RwrsPath:
    """Normalized scenery sums Y_n(t) along the given time grid."""
    idx = _grid_indices(path.n, t_grid)
    xi = scenery.sample(site_keys(path))
    prefix = np.cumsum(xi)
    scale = math.sqrt(math.pi * gamma) / (scenery.sigma * _norm_scale(path.n))
    vals = scale * prefix[idx]
    return RwrsPath(
        n=path.n,
        t_grid=tuple(float(t) for t in np.asarray(t_grid, dtype=np.float64)),
        values=tuple(float(v) for v in vals),
        scenery_kind=scenery.kind,
        gamma=gamma,
    )


def quenched_variance(path: WalkPath, gamma: float, t_grid) -> NDArray[np.float64]:
    """Exact conditional variance s_n^2(t) = pi gamma V_[nt]/(2 n log n)."""
    idx = _grid_indices(path.n, t_grid)
    profile = vn_profile(path)
    return math.pi * gamma * profile[idx].astype(np.float64) / (_norm_scale(path.n) ** 2)


def _prefix_counts(path: WalkPath, t_grid):
    keys = site_keys(path)
    uniq, inv = np.unique(keys, return_inverse=True)
    idx = _grid_indices(path.n, t_grid)
    cols = [np.bincount(inv[: i + 1], minlength=len(uniq)) for i in idx]
    return uniq, np.stack(cols, axis=1).astype(np.float64)


def quenched_covariance(path: WalkPath, gamma: float, t_grid) -> NDArray[np.float64]:
    """Exact conditional covariance matrix of (Y_n(t_j))_j given the path:
    the Gram matrix of prefix visit-count vectors, scaled."""
    _, counts = _prefix_counts(path, t_grid)
    return math.pi * gamma * (counts.T @ counts) / (_norm_scale(path.n) ** 2)


def quenched_clt_test(
    law: StepLaw,
    n: int,
    scenery_reps: int,
    walk_seed: int,
    scenery_seed_base: int,
    kind: str = "rademacher",
    sigma: float = 1.0,
    return_samples: bool = False,
) -> dict:
    """Fix one walk path, resample the scenery, and measure normality of the
    studentized endpoint Y_n(1)/s_n against the standard normal."""
    if n < 1000:
        raise ValueError("the normality check is specified for n >= 1000")
    if scenery_reps < 1000:
        raise ValueError("need at least 1000 scenery replicates")
    if law.d != 1 or law.gamma is None:
        raise LawError("the quenched check needs a d=1 law with a scaling parameter")
    path = simulate_path(law, n, walk_seed)
    uniq, counts = np.unique(site_keys(path), return_counts=True)
    counts = counts.astype(np.float64)
    vn = float(np.dot(counts, counts))
    s2 = math.pi * law.gamma * vn / (_norm_scale(n) ** 2)
    samples = np.empty(scenery_reps)
    # studentized form: all normalization cancels except sigma*sqrt(V_n)
    for rep in range(scenery_reps):
        scen = make_scenery(kind, (scenery_seed_base, rep), sigma=sigma)
        xi = scen.sample(uniq)
        samples[rep] = float(np.dot(counts, xi)) / (scen.sigma * math.sqrt(vn))
    ks = float(stats.kstest(samples, "norm").statistic)
    report = {
        "law": law.name,
        "kind": kind,
        "n": n,
        "reps": scenery_reps,
        "walk_seed": walk_seed,
        "scenery_seed_base": scenery_seed_base,
        "ks": ks,
        "s_n2": s2,
        "sample_mean": float(samples.mean()),
        "sample_sd": float(samples.std(ddof=1)),
        "distinct_sites": int(len(uniq)),
        "max_local_time": int(counts.max()),
    }
    if return_samples:
        report["samples"] = samples
    return report


def fdd_covariance_check(
    law: StepLaw,
    n: int,
    t_grid,
    scenery_reps: int,
    walk_seed: int,
    scenery_seed_base: int,
    kind: str = "rademacher",
    sigma: float = 1.0,
) -> dict:
    """Empirical vs exact conditional covariance of (Y_n(t_j))_j at a fixed
    path, with the Brownian min(t_i,t_j) target reported alongside.

    Also checks the disjoint-window identity: the conditional covariance of
    an increment against the preceding level equals the cross-intersection
    count, scaled.
    """
    t = np.asarray(t_grid, dtype=np.float64)
    if len(t) > 5:
        raise ValueError("keep the grid to at most 5 points")
    if np.any(np.diff(t) <= 0):
        raise ValueError("time grid must be strictly increasing")
    if law.d != 1 or law.gamma is None:
        raise LawError("the covariance check needs a d=1 law with a scaling parameter")
    path = simulate_path(law, n, walk_seed)
    uniq, counts = _prefix_counts(path, t)
    norm2 = _norm_scale(n) ** 2
    quenched = math.pi * law.gamma * (counts.T @ counts) / norm2
    m = len(t)
    scale = math.sqrt(math.pi * law.gamma) / _norm_scale(n)

    sums = np.zeros((m, m))
    sumsq = np.zeros((m, m))
    for rep in range(scenery_reps):
        scen = make_scenery(kind, (scenery_seed_base, rep), sigma=sigma)
        xi = scen.sample(uniq) / scen.sigma
        y = scale * (xi @ counts)
        prod = np.outer(y, y)
        sums += prod
        sumsq += prod * prod
    empirical = sums / scenery_reps
    se = np.sqrt(np.maximum(sumsq / scenery_reps - empirical**2, 0.0) / scenery_reps)
    ok = bool(np.all(np.abs(empirical - quenched) <= 4.0 * se + 1e-12))

    increments = []
    for j in range(1, m):
        cross = cross_intersections(path, float(t[j - 1]), float(t[j]))
        gram = float(np.dot(counts[:, j - 1], counts[:, j] - counts[:, j - 1]))
        increments.append(
            {
                "window": (float(t[j - 1]), float(t[j])),
                "cov_increment_vs_level": math.pi * law.gamma * gram / norm2,
                "cross_intersections_scaled": math.pi * law.gamma * cross / norm2,
                "identity_residual": abs(gram - cross),
            }
        )

    return {
        "law": law.name,
        "kind": kind,
        "n": n,
        "reps": scenery_reps,
        "t_grid": [float(x) for x in t],
        "quenched": quenched.tolist(),
        "empirical": empirical.tolist(),
        "se": se.tolist(),
        "brownian_target": np.minimum.outer(t, t).tolist(),
        "entrywise_ok": ok,
        "increments": increments,
    }
