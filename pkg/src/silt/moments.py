"""Exact moments of the self-intersection count V_n.

Expectation.  E V_n = (n+1) + 2 sum_{k=1}^{n} (n+1-k) p_k(0) with p_k the
k-step distribution.  For finite-support laws p_k comes from exact lattice
convolution; for zipf1d, whose support is infinite but whose characteristic
function f is known in closed form, p_k(0) enters through the torus integral
(2 pi)^{-1} int f(t)^k dt, and the weighted sum over k collapses to a single
integral of the stable kernel

    g_n(x) = x (n - (n+1) x + x^{n+1}) / (1-x)^2  =  sum_{k=1}^n (n+1-k) x^k.

Variance.  Var V_n = 4 (a2 + a3 + b2 + b3), where the four sums run over the
ordered pairs of time pairs (i1<j1, i2<j2) classified by relative position:
a2 covers the staggered order i1 <= i2 < j1 < j2, a3 the nested order
i1 <= i2 < j2 <= j1, and b2/b3 their mirror images where the second pair
starts strictly first.  (The two configurations with disjoint time windows
contribute zero by independence.)  Writing m2, m3, m4 for the three inner
gaps and r = m2+m3+m4, each sum reduces to a triple sum weighted by the
(n+1-r) choices of outer offsets:

    nested (a3-type):     p_{m3}(0) [ p_{m2+m4}(0) - p_{m2+m3+m4}(0) ],
                          over m2 >= 0, m3 >= 1, m4 >= 0   (b2: m2 >= 1)
    staggered (a2-type):  sum_x p_{m2}(x) p_{m3}(-x) p_{m4}(x)
                          - p_{m2+m3}(0) p_{m3+m4}(0),
                          over m2 >= 0, m3 >= 1, m4 >= 1   (b3: m2 >= 1)

Both reductions are validated against full weighted path enumeration (see
``variance_enumeration``), which is the module's independent oracle.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray
from scipy.signal import fftconvolve

from .errors import BudgetError
from .laws import StepLaw

__all__ = [
    "LatticePmf",
    "BudgetError",
    "convolution_powers",
    "expected_vn",
    "VarianceDecomposition",
    "variance_components",
    "variance_exact",
    "variance_enumeration",
    "growth_check",
    "weighted_power_kernel",
]

DEFAULT_EPS_MASS = 1e-12
DEFAULT_CAP = 64
_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(64)


@dataclass(frozen=True)
class LatticePmf:
    """k-step distribution restricted to a centered box.

    ``table`` has shape (2B+1,) for d=1 or (2B+1, 2B+1) for d=2 with the
    origin at index B (each axis).  ``deficit`` is the total mass lying
    outside the box, tracked conservatively: table.sum() + deficit = 1 up to
    roundoff.
    """

    d: int
    k: int
    radius: int
    table: NDArray[np.float64]
    deficit: float

    def at_origin(self) -> float:
        b = self.radius
        return float(self.table[b] if self.d == 1 else self.table[b, b])

    def value(self, x) -> float:
        b = self.radius
        if self.d == 1:
            i = int(x) + b
            return float(self.table[i]) if 0 <= i < len(self.table) else 0.0
        i, j = int(x[0]) + b, int(x[1]) + b
        if 0 <= i < self.table.shape[0] and 0 <= j < self.table.shape[1]:
            return float(self.table[i, j])
        return 0.0


def _single_step_table(law: StepLaw, radius: int):
    if law.name == "zipf1d":
        size = 2 * radius + 1
        t = np.zeros(size)
        mags = np.arange(1, radius + 1, dtype=np.float64)
        half = (3.0 / math.pi**2) / mags**2
        t[radius + 1:] = half
        t[:radius] = half[::-1]
        return t, law.tail_probability(radius + 1)
    if law.support is None:
        raise BudgetError(f"no pmf table route for law {law.name!r}")
    ms = law.max_step()
    if ms > radius:
        raise BudgetError("box smaller than the step support; increase box")
    if law.d == 1:
        t = np.zeros(2 * radius + 1)
        for s, pr in zip(law.support, law.probs):
            t[int(s) + radius] += pr
    else:
        t = np.zeros((2 * radius + 1, 2 * radius + 1))
        for (sx, sy), pr in zip(law.support, law.probs):
            t[int(sx) + radius, int(sy) + radius] += pr
    return t, 0.0


def convolution_powers(
    law: StepLaw,
    k_max: int,
    box: int | None = None,
    eps_mass: float = DEFAULT_EPS_MASS,
    max_box: int = 1 << 20,
) -> list[LatticePmf]:
    """Exact k-step pmf tables for k = 0..k_max with tracked deficit.

    For finite-support laws the default box makes every convolution exact
    (zero deficit).  For zipf1d the infinite tail is folded into the deficit;
    the box doubles automatically until the worst-case deficit fits within
    ``eps_mass`` or ``max_box`` is hit, in which case a BudgetError explains
    the required enlargement.
    """
    if box is None:
        ms = law.max_step()
        box = max(1, k_max * ms) if ms is not None else 4096
    while True:
        try:
            tabs = _convolve_to(law, k_max, box, eps_mass)
            return tabs
        except BudgetError:
            if law.max_step() is None and 2 * box <= max_box:
                box *= 2
                continue
            raise


def _convolve_to(law, k_max, box, eps_mass):
    step, step_deficit = _single_step_table(law, box)
    size = 2 * box + 1
    if law.d == 1:
        cur = np.zeros(size)
        cur[box] = 1.0
    else:
        cur = np.zeros((size, size))
        cur[box, box] = 1.0
    out = [LatticePmf(d=law.d, k=0, radius=box, table=cur, deficit=0.0)]
    for k in range(1, k_max + 1):
        full = fftconvolve(out[-1].table, step)
        if law.d == 1:
            nxt = full[box : box + size].copy()
        else:
            nxt = full[box : box + size, box : box + size].copy()
        np.maximum(nxt, 0.0, out=nxt)  # clip fft rounding noise
        deficit = max(0.0, 1.0 - float(nxt.sum()))
        if deficit > eps_mass:
            raise BudgetError(
                f"mass deficit {deficit:.3e} at k={k} exceeds budget {eps_mass:.1e}; "
                f"increase box (current {box}) or relax eps_mass"
            )
        out.append(LatticePmf(d=law.d, k=k, radius=box, table=nxt, deficit=deficit))
    return out


# ---------------------------------------------------------------------------
# expectation
# ---------------------------------------------------------------------------


def weighted_power_kernel(x: NDArray[np.float64], n: int) -> NDArray[np.float64]:
    """sum_{k=1}^{n} (n+1-k) x^k, evaluated stably for x in [-1, 1].

    Closed form x (n - (n+1) x + x^{n+1}) / (1-x)^2; near x = 1 the numerator
    is rebuilt from its binomial series to avoid catastrophic cancellation.
    """
    x = np.asarray(x, dtype=np.float64)
    eps = 1.0 - x
    out = np.empty_like(x)

    small = (n + 1) * np.abs(eps) < 1e-3
    if small.any():
        e = eps[small]
        # numerator = sum_{j>=2} C(n+1, j) (-e)^j, a fast-converging series here
        t = ((n + 1) * n / 2.0) * e**2
        total = t.copy()
        for j in range(3, 8):
            t = t * (-e) * (n + 2 - j) / j
            total += t
        out[small] = (1.0 - e) * total / e**2
    big = ~small
    if big.any():
        xe = x[big]
        e = eps[big]
        with np.errstate(divide="ignore"):
            logax = np.where(xe != 0.0, np.log(np.abs(np.where(xe == 0, 1.0, xe))), -np.inf)
        pw = np.exp((n + 1) * logax)
        odd_neg = (xe < 0) & ((n + 1) % 2 == 1)
        pw = np.where(odd_neg, -pw, pw)
        pw = np.where(xe == 0.0, 0.0, pw)
        numer = (n + 1) * e - 1.0 + pw
        out[big] = xe * numer / e**2
    return out


def _expected_vn_quadrature(law: StepLaw, n: int) -> float:
    """E V_n through the torus integral of the weighted power kernel (d=1,
    real symmetric charfn)."""
    if n == 0:
        return 1.0
    gamma = law.gamma if law.gamma else 1.0
    t1 = min(math.pi, 1.0 / (gamma * (n + 1)))
    edges = [0.0, t1]
    while edges[-1] < math.pi:
        edges.append(min(math.pi, edges[-1] * 2.0))
    total = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        t = 0.5 * (b - a) * _GL_NODES + 0.5 * (b + a)
        f = np.real(law.charfn(t))
        total += 0.5 * (b - a) * float(np.dot(_GL_WEIGHTS, weighted_power_kernel(f, n)))
    return (n + 1) + (2.0 / math.pi) * total


def expected_vn(law: StepLaw, n: int, pmfs: list[LatticePmf] | None = None) -> float:
    """Exact E V_n = (n+1) + 2 sum_{k<=n} (n+1-k) p_k(0).

    zipf1d uses the closed-form charfn quadrature (exact to quadrature
    roundoff, no spatial truncation); finite-support laws use exact
    convolution powers.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    if law.name == "zipf1d":
        return _expected_vn_quadrature(law, n)
    if pmfs is None:
        pmfs = convolution_powers(law, n)
    p0 = np.array([p.at_origin() for p in pmfs[: n + 1]])
    k = np.arange(1, n + 1)
    return float((n + 1) + 2.0 * np.sum((n + 1 - k) * p0[1:]))


# ---------------------------------------------------------------------------
# variance decomposition
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class VarianceDecomposition:
    """The four ordered-pair sums and the variance they assemble."""

    n: int
    a2: float
    a3: float
    b2: float
    b3: float

    @property
    def var(self) -> float:
        return 4.0 * (self.a2 + self.a3 + self.b2 + self.b3)


def variance_components(
    law: StepLaw,
    n: int,
    box: int | None = None,
    eps_mass: float = DEFAULT_EPS_MASS,
    cap: int = DEFAULT_CAP,
    pmfs: list[LatticePmf] | None = None,
) -> VarianceDecomposition:
    """Exact a2, a3, b2, b3 by the gap-reparametrized triple sums.

    Cost is O(n^3) plus one (n x cells x n) contraction per middle gap for
    the staggered sums, so a hard ``cap`` protects against runaway requests.
    For zipf1d pass an explicit ``eps_mass`` consistent with the box: the
    infinite tail makes sub-1e-12 deficits unattainable at feasible boxes.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    if n > cap:
        raise BudgetError(f"n={n} exceeds the exact-variance cap {cap}")
    if n == 0:
        return VarianceDecomposition(n=0, a2=0.0, a3=0.0, b2=0.0, b3=0.0)
    if pmfs is None:
        pmfs = convolution_powers(law, n, box=box, eps_mass=eps_mass)
    k = n + 1
    tabs = np.stack([p.table for p in pmfs[:k]])
    b = pmfs[0].radius
    p0 = tabs[:, b] if law.d == 1 else tabs[:, b, b]

    flat = tabs.reshape(k, -1)
    rev = (tabs[:, ::-1] if law.d == 1 else tabs[:, ::-1, ::-1]).reshape(k, -1)
    # staggered inner sums R[m2, m3, m4] = sum_x p_{m2}(x) p_{m3}(-x) p_{m4}(x)
    R = np.empty((k, k, k))
    for m3 in range(k):
        R[:, m3, :] = (flat * rev[m3]) @ flat.T

    m = np.arange(k)
    r = m[:, None, None] + m[None, :, None] + m[None, None, :]
    weight = np.where(r <= n, n + 1.0 - r, 0.0)
    pair = p0[np.add.outer(m, m).clip(max=n)]  # p0[u+v], valid wherever used
    nested = p0[None, :, None] * (pair[:, None, :] - p0[r.clip(max=n)])
    staggered = R - pair[:, :, None] * pair[None, :, :]
    m2p = m[:, None, None] >= 1
    m3p = m[None, :, None] >= 1
    m4p = m[None, None, :] >= 1
    a3 = float(np.sum(weight * nested * m3p))
    b2 = float(np.sum(weight * nested * (m3p & m2p)))
    a2 = float(np.sum(weight * staggered * (m3p & m4p)))
    b3 = float(np.sum(weight * staggered * (m3p & m4p & m2p)))
    return VarianceDecomposition(n=n, a2=a2, a3=a3, b2=b2, b3=b3)


def variance_exact(law: StepLaw, n: int, **kwargs) -> VarianceDecomposition:
    """Alias for variance_components (the assembled exact decomposition)."""
    return variance_components(law, n, **kwargs)


def variance_enumeration(law: StepLaw, n: int, cap: int = 8) -> dict:
    """Independent oracle: enumerate all |support|^n weighted paths.

    Returns E V_n, Var V_n, and the six ordered-pair sums (A1, A2, A3 for
    pairs where the first pair starts no later; B1, B2, B3 for the mirror
    order; A1/B1 cover disjoint windows and vanish by independence).
    Finite-support laws only; n <= cap.
    """
    if law.support is None:
        raise BudgetError("enumeration requires a finite-support law")
    if n > cap:
        raise BudgetError(f"enumeration cap is {cap}")
    support = law.support if law.d == 2 else law.support[:, None]
    nsup = len(support)
    choices = np.array(
        list(itertools.product(range(nsup), repeat=n)), dtype=np.int64
    )
    stepped = support[choices]  # (paths, n, d)
    sites = np.concatenate(
        [np.zeros((len(choices), 1, law.d if law.d == 2 else 1), dtype=np.int64),
         np.cumsum(stepped, axis=1)],
        axis=1,
    )
    w = np.prod(law.probs[choices], axis=1) if n else np.ones(1)
    pairs = [(i, j) for i in range(n + 1) for j in range(i + 1, n + 1)]
    eq = np.empty((len(choices), len(pairs)))
    for idx, (i, j) in enumerate(pairs):
        eq[:, idx] = np.all(sites[:, i] == sites[:, j], axis=1)
    q = w @ eq                      # pair-equality probabilities
    joint = (eq * w[:, None]).T @ eq
    v = (n + 1) + 2 * eq.sum(axis=1)
    ev = float(w @ v)
    ev2 = float(w @ v**2)
    sums = {"A1": 0.0, "A2": 0.0, "A3": 0.0, "B1": 0.0, "B2": 0.0, "B3": 0.0}
    for x, (i1, j1) in enumerate(pairs):
        for y, (i2, j2) in enumerate(pairs):
            if i1 <= i2:
                key = "A1" if j1 <= i2 else ("A2" if j1 < j2 else "A3")
            else:
                key = "B1" if j2 <= i1 else ("B2" if j1 <= j2 else "B3")
            sums[key] += joint[x, y] - q[x] * q[y]
    return {
        "n": n,
        "ev": ev,
        "ev2": ev2,
        "var": ev2 - ev**2,
        "sums": sums,
    }


def growth_check(law: StepLaw, n_list, **kwargs) -> dict:
    """var/n^2 along n_list with boundedness diagnostics.

    Reports the sequence, its max, and where the max sits; a bounded,
    non-exploding sequence witnesses quadratic variance growth.
    """
    n_list = sorted(int(n) for n in n_list)
    pmfs = convolution_powers(law, max(n_list), **kwargs)
    rows = []
    for n in n_list:
        dec = variance_components(law, n, pmfs=pmfs, cap=max(n_list))
        rows.append({"n": n, "var": dec.var, "var_over_n2": dec.var / n**2})
    ratios = [row["var_over_n2"] for row in rows]
    imax = int(np.argmax(ratios))
    return {
        "rows": rows,
        "max_ratio": ratios[imax],
        "argmax_n": rows[imax]["n"],
        "max_at_largest_n": imax == len(rows) - 1,
    }
