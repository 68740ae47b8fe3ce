"""Step laws for strongly aperiodic lattice random walks.

Three kinds of increment law are supported:

``zipf1d``
    P(X = k) = 3 / (pi^2 k^2) on the nonzero integers.  Symmetric, infinite
    variance, characteristic function 1 - (3/pi)|t| + (3/(2 pi^2)) t^2 on
    [-pi, pi], so the walk sits in the Cauchy domain with linear-decay slope
    gamma = 3/pi.  Sampling is exact over the whole infinite support: a
    cumulative table covers magnitudes up to 1024 and the tail is inverted
    through the trigamma identity P(|X| >= k) = (6/pi^2) psi'(k).

``lazy_srw_2d``
    Lazy simple random walk on Z^2: hold with probability 1/2, step to each
    of the four nearest neighbors with probability 1/8.  Covariance matrix
    diag(1/4, 1/4).

``finite_custom``
    Any user-supplied finite pmf on Z^d (d = 1 or 2), validated for
    normalization and strong aperiodicity.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from numpy.typing import NDArray
from scipy.special import polygamma

from .errors import LawError

__all__ = [
    "LawError",
    "StepLaw",
    "make_law",
    "truncated_zipf_pmf",
    "aperiodicity_witness",
    "gamma_from_charfn",
]

_ZIPF_HEAD = 1024  # magnitudes covered by the cumulative head table
_SIX_OVER_PI2 = 6.0 / math.pi**2


def _trigamma(x):
    return polygamma(1, x)


def _zipf_head_cdf() -> NDArray[np.float64]:
    # C_m = P(|X| <= m) = 1 - (6/pi^2) psi'(m+1); strictly increasing.
    m = np.arange(1, _ZIPF_HEAD + 1)
    return 1.0 - _SIX_OVER_PI2 * _trigamma(m + 1.0)


_HEAD_CDF = _zipf_head_cdf()


def _zipf_tail_magnitudes(u: NDArray[np.float64]) -> NDArray[np.int64]:
    """Invert the magnitude CDF for u beyond the head table.

    Finds the smallest m with (6/pi^2) psi'(m+1) <= 1-u by bisection on the
    monotone tail function.  Exact for every representable u in [0, 1).
    """
    tau = (1.0 - u) / _SIX_OVER_PI2
    lo = np.full(u.shape, _ZIPF_HEAD + 1, dtype=np.int64)
    # psi'(m+1) < 1/m, so any m >= 1/tau satisfies the stopping condition
    hi = np.maximum(lo, np.floor(1.0 / tau).astype(np.int64) + 2)
    while True:
        active = lo < hi
        if not active.any():
            break
        mid = (lo + hi) // 2
        ok = _trigamma(mid + 1.0) <= tau
        hi = np.where(active & ok, mid, hi)
        lo = np.where(active & ~ok, mid + 1, lo)
    return lo


@dataclass(frozen=True)
class StepLaw:
    """A validated step law together with its analytic descriptors.

    Attributes
    ----------
    name : str
        Law identifier ("zipf1d", "lazy_srw_2d", or "finite_custom").
    d : int
        Lattice dimension, 1 or 2.
    gamma : float or None
        Linear-decay slope of 1 - f(t) at 0 for Cauchy-domain laws
        (3/pi for zipf1d); None when the law has finite variance.
    covariance : ndarray or None
        Step covariance matrix for d = 2 laws with finite second moments.
    support : ndarray or None
        Support points for finite laws, shape (k,) or (k, 2); None for
        the infinite-support zipf1d.
    probs : ndarray or None
        Probabilities matching ``support``.
    """

    name: str
    d: int
    gamma: Optional[float] = None
    covariance: Optional[NDArray[np.float64]] = None
    support: Optional[NDArray[np.int64]] = None
    probs: Optional[NDArray[np.float64]] = None
    _cdf: Optional[NDArray[np.float64]] = field(default=None, repr=False)

    # -- characteristic function -------------------------------------------

    def charfn(self, t):
        """Characteristic function f(t) on the torus [-pi, pi]^d.

        Accepts scalars (d = 1) or length-d vectors, or arrays whose last
        axis has length d.  Points outside the closed torus are rejected.
        """
        t = np.asarray(t, dtype=np.float64)
        if self.d == 1:
            if np.any(np.abs(t) > math.pi + 1e-12):
                raise LawError("charfn argument outside [-pi, pi]")
            if self.name == "zipf1d":
                a = np.abs(t)
                return 1.0 - (3.0 / math.pi) * a + (3.0 / (2.0 * math.pi**2)) * a**2
            # finite 1-d law: direct trigonometric sum
            phase = np.multiply.outer(t, self.support.astype(np.float64))
            val = (self.probs * np.exp(1j * phase)).sum(axis=-1)
            return val if np.iscomplexobj(val) and np.abs(val.imag).max() > 1e-15 else val.real
        if t.shape[-1] != 2:
            raise LawError("charfn for a d=2 law needs a length-2 argument")
        if np.any(np.abs(t) > math.pi + 1e-12):
            raise LawError("charfn argument outside [-pi, pi]^2")
        if self.name == "lazy_srw_2d":
            return 0.5 + 0.25 * (np.cos(t[..., 0]) + np.cos(t[..., 1]))
        phase = t[..., 0, None] * self.support[:, 0] + t[..., 1, None] * self.support[:, 1]
        val = (self.probs * np.exp(1j * phase)).sum(axis=-1)
        return val if np.abs(np.asarray(val).imag).max() > 1e-15 else np.asarray(val).real

    # -- sampling -----------------------------------------------------------

    def sample_steps(self, size: int, rng: np.random.Generator) -> NDArray[np.int64]:
        """Draw ``size`` iid steps; shape (size,) for d=1, (size, 2) for d=2."""
        if self.name == "zipf1d":
            u = rng.random(size)
            mag = np.searchsorted(_HEAD_CDF, u, side="right") + 1
            mag = mag.astype(np.int64)
            in_tail = u >= _HEAD_CDF[-1]
            if in_tail.any():
                mag[in_tail] = _zipf_tail_magnitudes(u[in_tail])
            sign = rng.integers(0, 2, size=size).astype(np.int64) * 2 - 1
            return sign * mag
        u = rng.random(size)
        idx = np.searchsorted(self._cdf, u, side="right")
        return self.support[idx]

    def sample_step(self, rng: np.random.Generator):
        """Draw a single step (scalar for d=1, length-2 array for d=2)."""
        out = self.sample_steps(1, rng)
        return out[0] if self.d == 2 else int(out[0])

    # -- descriptors ---------------------------------------------------------

    def tail_probability(self, k: int) -> float:
        """P(|X| >= k) for zipf1d via the trigamma identity."""
        if self.name != "zipf1d":
            raise LawError("tail_probability is defined for zipf1d only")
        if k < 1:
            return 1.0
        return float(_SIX_OVER_PI2 * _trigamma(float(k)))

    def max_step(self) -> Optional[int]:
        """Largest coordinate magnitude in the support; None if unbounded."""
        if self.support is None:
            return None
        return int(np.abs(self.support).max())


def _subgroup_is_full(diffs: NDArray[np.int64], d: int) -> bool:
    """Whether integer combinations of the difference vectors give all of Z^d."""
    diffs = diffs[np.any(diffs != 0, axis=1)] if d == 2 else diffs[diffs != 0]
    if len(diffs) == 0:
        return False
    if d == 1:
        g = 0
        for v in np.abs(diffs):
            g = math.gcd(g, int(v))
        return g == 1
    # d = 2: the generated lattice is Z^2 iff the gcd of all 2x2 minors is 1
    g = 0
    n = len(diffs)
    for i in range(n):
        for j in range(i + 1, n):
            det = int(diffs[i, 0]) * int(diffs[j, 1]) - int(diffs[i, 1]) * int(diffs[j, 0])
            g = math.gcd(g, abs(det))
            if g == 1:
                return True
    return g == 1


def make_law(kind: str, support=None, probs=None, validate: bool = True) -> StepLaw:
    """Build and validate a step law.

    Parameters
    ----------
    kind : str
        "zipf1d", "lazy_srw_2d", or "finite_custom".
    support, probs : array_like, optional
        For "finite_custom": integer support points (shape (k,) for d=1 or
        (k, 2) for d=2) and their probabilities.
    validate : bool
        When False, skip the strong-aperiodicity and covariance-rank checks.
        Degenerate laws (e.g. a point mass) are then constructible; they can
        be simulated and enumerated, but none of the asymptotic results
        apply to them.  Normalization is always enforced.

    Raises
    ------
    LawError
        On non-normalized pmfs, negative masses, and (with validate=True)
        laws that are not strongly aperiodic or have rank-deficient
        covariance in d=2.
    """
    if kind == "zipf1d":
        return StepLaw(name="zipf1d", d=1, gamma=3.0 / math.pi)
    if kind == "lazy_srw_2d":
        sup = np.array([[0, 0], [1, 0], [-1, 0], [0, 1], [0, -1]], dtype=np.int64)
        p = np.array([0.5, 0.125, 0.125, 0.125, 0.125])
        return StepLaw(
            name="lazy_srw_2d",
            d=2,
            covariance=np.diag([0.25, 0.25]),
            support=sup,
            probs=p,
            _cdf=np.cumsum(p),
        )
    if kind != "finite_custom":
        raise LawError(f"unknown law kind {kind!r}")

    if support is None or probs is None:
        raise LawError("finite_custom requires support and probs")
    sup = np.asarray(support, dtype=np.int64)
    p = np.asarray(probs, dtype=np.float64)
    if sup.ndim == 1:
        d = 1
        sup2 = sup[:, None]
    elif sup.ndim == 2 and sup.shape[1] == 2:
        d = 2
        sup2 = sup
    else:
        raise LawError("support must have shape (k,) or (k, 2)")
    if len(p) != len(sup):
        raise LawError("support and probs lengths differ")
    if np.any(p < 0):
        raise LawError("negative probability mass")
    if abs(p.sum() - 1.0) > 1e-12:
        raise LawError(f"pmf sums to {p.sum()!r}, not 1 within 1e-12")
    if len(np.unique(sup2, axis=0)) != len(sup2):
        raise LawError("duplicate support points")

    if validate:
        # strong aperiodicity: the support must not sit inside a coset of a
        # proper subgroup, i.e. pairwise differences must generate all of Z^d
        keep = p > 0
        pts = sup2[keep]
        diffs = (pts[None, :, :] - pts[:, None, :]).reshape(-1, 2 if d == 2 else 1)
        if d == 1:
            diffs = diffs[:, 0]
            full = _subgroup_is_full(diffs, 1)
        else:
            full = _subgroup_is_full(diffs, 2)
        if not full:
            raise LawError(
                "law is not strongly aperiodic (support lies in a proper-subgroup coset)"
            )

    cov = None
    if d == 2:
        mean = (p[:, None] * sup2).sum(axis=0)
        centered = sup2 - mean
        cov = (p[:, None, None] * np.einsum("ki,kj->kij", centered, centered)).sum(axis=0)
        if validate and np.linalg.matrix_rank(cov, tol=1e-12) < 2:
            raise LawError("degenerate (rank-deficient) step covariance")

    order = np.lexsort(sup2.T[::-1])
    sup_sorted = sup2[order] if d == 2 else sup[order]
    p_sorted = p[order]
    return StepLaw(
        name="finite_custom",
        d=d,
        covariance=cov,
        support=sup_sorted,
        probs=p_sorted,
        _cdf=np.cumsum(p_sorted),
    )


def truncated_zipf_pmf(radius: int):
    """Support and probs of the zipf1d law truncated to 0 < |k| <= radius and renormalized.

    Handy as a finite stand-in for zipf1d where exact enumeration is needed.
    """
    ks = np.array([k for k in range(-radius, radius + 1) if k != 0], dtype=np.int64)
    w = 1.0 / ks.astype(np.float64) ** 2
    return ks, w / w.sum()


def aperiodicity_witness(law: StepLaw, grid_size: int = 256) -> float:
    """Max of |f(t)| over a uniform torus grid, excluding a ball of radius
    2 pi / grid_size at the origin.

    Values approaching 1 witness a failure (or near-failure) of strong
    aperiodicity; strongly aperiodic laws stay bounded away from 1.
    """
    delta = 2.0 * math.pi / grid_size
    ax = -math.pi + 2.0 * math.pi * np.arange(grid_size) / grid_size
    if law.d == 1:
        t = ax[np.abs(ax) >= delta]
        return float(np.abs(law.charfn(t)).max())
    tx, ty = np.meshgrid(ax, ax, indexing="ij")
    pts = np.stack([tx, ty], axis=-1)
    mask = np.sqrt(tx**2 + ty**2) >= delta
    vals = law.charfn(pts.reshape(-1, 2)).reshape(grid_size, grid_size)
    return float(np.abs(vals[mask]).max())


def gamma_from_charfn(law: StepLaw, t_sequence, axis: int = 0, rtol: float = 1e-4) -> float:
    """Estimate the linear-decay slope gamma = lim (1 - Re f(t)) / t as t -> 0+.

    Uses two-point linear extrapolation to t = 0 along the given coordinate
    axis and requires the extrapolants to stabilize; for finite-variance laws
    the limit (and the returned value) is 0.

    Raises LawError if the sequence is not strictly decreasing positive or
    the extrapolants fail to settle.
    """
    t = np.asarray(t_sequence, dtype=np.float64)
    if t.ndim != 1 or len(t) < 3:
        raise LawError("need at least three t values")
    if np.any(t <= 0) or np.any(np.diff(t) >= 0):
        raise LawError("t_sequence must be strictly decreasing and positive")
    if law.d == 1:
        f = np.real(law.charfn(t))
    else:
        pts = np.zeros((len(t), 2))
        pts[:, axis] = t
        f = np.real(law.charfn(pts))
    ratio = (1.0 - f) / t
    # linear extrapolation through consecutive pairs, evaluated at t = 0
    ext = (ratio[:-1] * t[1:] - ratio[1:] * t[:-1]) / (t[1:] - t[:-1])
    scale = max(1.0, float(np.abs(ext[-1])))
    if abs(ext[-1] - ext[-2]) > rtol * scale:
        raise LawError("gamma extrapolation did not stabilize; refine t_sequence")
    return float(ext[-1])
