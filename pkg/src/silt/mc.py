"""Monte Carlo estimation of the self-intersection moments.

Replicate r draws its own generator from SeedSequence((seed_base, r)), so
any replicate can be replayed alone and results never depend on scheduling:
workers fill disjoint slots of a preallocated array and the aggregation
reads that array in replicate order.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import LawError
from .laws import StepLaw
from .moments import expected_vn
from .paths import self_intersections, simulate_path

__all__ = [
    "McSummary",
    "replicate_intersections",
    "mc_moments",
    "variance_trend",
    "expectation_trend",
    "vn_concentration",
]

Z95 = 1.959963984540054


def _replicate_range(law: StepLaw, n: int, seed_base: int, out, lo: int, hi: int) -> None:
    for r in range(lo, hi):
        rng = np.random.default_rng(np.random.SeedSequence((seed_base, r)))
        out[r] = self_intersections(simulate_path(law, n, rng))


def replicate_intersections(
    law: StepLaw, n: int, reps: int, seed_base: int, workers: int = 1
) -> np.ndarray:
    """V_n per replicate, in replicate order regardless of worker count."""
    out = np.empty(reps, dtype=np.float64)
    if workers <= 1 or reps < 4:
        _replicate_range(law, n, seed_base, out, 0, reps)
        return out
    edges = np.linspace(0, reps, workers + 1, dtype=int)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = [
            pool.submit(_replicate_range, law, n, seed_base, out, lo, hi)
            for lo, hi in zip(edges[:-1], edges[1:])
            if hi > lo
        ]
        for f in futures:
            f.result()
    return out


@dataclass(frozen=True)
class McSummary:
    law_name: str
    n: int
    reps: int
    seed_base: int
    mean_vn: float
    var_vn: float
    mean_ci: float
    var_ci: float


def summarize_values(values: np.ndarray) -> tuple[float, float, float, float]:
    """Mean, unbiased variance, and 95% CI half-widths for both.

    The variance CI uses the large-sample law of s^2 with the empirical
    fourth central moment.
    """
    reps = len(values)
    mean = float(values.mean())
    centered = values - mean
    s2 = float(np.dot(centered, centered) / (reps - 1))
    mean_ci = Z95 * math.sqrt(s2 / reps)
    m4 = float(np.mean(centered**4))
    var_of_s2 = (m4 - s2 * s2 * (reps - 3.0) / (reps - 1.0)) / reps
    var_ci = Z95 * math.sqrt(max(var_of_s2, 0.0))
    return mean, s2, mean_ci, var_ci


def mc_moments(
    law: StepLaw, n: int, reps: int, seed_base: int, workers: int = 1
) -> McSummary:
    if reps < 2:
        raise ValueError("reps must be >= 2")
    values = replicate_intersections(law, n, reps, seed_base, workers)
    mean, s2, mean_ci, var_ci = summarize_values(values)
    return McSummary(
        law_name=law.name,
        n=n,
        reps=reps,
        seed_base=seed_base,
        mean_vn=mean,
        var_vn=s2,
        mean_ci=mean_ci,
        var_ci=var_ci,
    )


def variance_trend(
    law: StepLaw,
    n_list,
    reps: int,
    seed_base: int,
    workers: int = 1,
    target: float | None = None,
) -> dict:
    """Normalized variance var(V_n)/n^2 along n_list, with CIs and the
    quadratic-growth target when one is supplied."""
    rows = []
    for n in sorted(int(x) for x in n_list):
        s = mc_moments(law, n, reps, seed_base, workers)
        rows.append(
            {
                "n": n,
                "reps": reps,
                "mean": s.mean_vn,
                "var": s.var_vn,
                "var_over_n2": s.var_vn / n**2,
                "mean_ci": s.mean_ci,
                "ci": s.var_ci / n**2,
            }
        )
    return {"law": law.name, "target": target, "rows": rows}


def expectation_trend(law: StepLaw, n_list) -> dict:
    """Exact E V_n/(n log n) along n_list for a d=1 law, against the slow
    growth target 2/(pi*gamma).  No sampling enters: the expectation comes
    from the characteristic-function quadrature."""
    if law.d != 1 or law.gamma is None:
        raise LawError("expectation trend needs a d=1 law with a scaling parameter")
    target = 2.0 / (math.pi * law.gamma)
    rows = []
    for n in sorted(int(x) for x in n_list):
        if n < 2:
            raise ValueError("n log n normalization needs n >= 2")
        ev = expected_vn(law, n)
        rows.append({"n": n, "ev": ev, "ratio": ev / (n * math.log(n)), "target": target})
    return {"law": law.name, "target": target, "rows": rows}


def vn_concentration(
    law: StepLaw,
    n: int,
    reps: int,
    seed_base: int,
    eps_list=(0.1, 0.25),
    workers: int = 1,
) -> dict:
    """Empirical distribution of V_n/E V_n (exact expectation in the
    denominator): quantiles, mass outside [1-eps, 1+eps], and the mean."""
    values = replicate_intersections(law, n, reps, seed_base, workers)
    ev = expected_vn(law, n)
    ratio = values / ev
    qs = (0.01, 0.05, 0.25, 0.5, 0.75, 0.95, 0.99)
    mean, s2, mean_ci, _ = summarize_values(ratio)
    return {
        "law": law.name,
        "n": n,
        "reps": reps,
        "expected_vn": ev,
        "quantiles": {str(q): float(np.quantile(ratio, q)) for q in qs},
        "outside_fraction": {
            str(e): float(np.mean(np.abs(ratio - 1.0) > e)) for e in eps_list
        },
        "mean_ratio": mean,
        "mean_ratio_ci": mean_ci,
    }
