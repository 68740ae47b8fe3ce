"""Power-series coefficient extraction and growth-to-coefficient bounds.

Extraction.  For g analytic on the unit disk, the n-th Taylor coefficient is
recovered from circle samples by the trapezoid rule,

    a_n ~= (1/(M R^n)) sum_{k<M} g(R e^{2 pi i k/M}) e^{-2 pi i k n/M},

on the radius R = 1 - 1/n (R = 1/2 when n = 1).  The discretization error is
pure aliasing: the rule returns sum_j a_{n+jM} R^{jM} exactly, so the error
shrinks geometrically in M and is bounded rigorously through a Cauchy
estimate on the midway circle of radius (1+R)/2.

Coefficient bound.  If |g| <= K on the part of the disk with Re z <= alpha
and |g(z)| <= sum_m A_m |1-z|^{-gamma_m} l_m(1/|1-z|) on the rest, with each
gamma_m > 1 and l_m nonnegative increasing, then

    |a_n| <= 4 K + sum_m A_m C(gamma_m) n^{gamma_m - 1} l_m(n),
    C(gamma) = 4 pi^{-1/2} Gamma((gamma-1)/2) / Gamma(gamma/2).

The 4 absorbs R^{-n} = (1-1/n)^{-n} <= 4 on the extraction circle.

Renewal verification.  For an arrival time T with P(T=k) = pmf[k] and
f(lambda) = E lambda^T, the counts N_n of arrivals by time n satisfy

    sum_n E N_n lambda^n        = f / ((1-lambda)(1-f))
    sum_n E N_n^2 lambda^n      = a + 2 a f/(1-f),   a = the first series,

so contour extraction of these generating functions can be cross-checked
against a direct dynamic program over the renewal equation.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from numpy.typing import NDArray

from .errors import BudgetError, LawError

__all__ = [
    "SeriesSpec",
    "CoefficientEstimate",
    "extraction_radius",
    "cauchy_coefficient",
    "extract_to_tolerance",
    "darboux_constant",
    "LogFactor",
    "BoundTerm",
    "DarbouxHypothesis",
    "coefficient_bound",
    "verify_darboux",
    "fit_hypothesis",
    "builtin_series",
    "BUILTIN_SERIES_NAMES",
    "RenewalLaw",
    "renewal_gf",
    "renewal_series",
    "renewal_moments_exact",
    "renewal_moment_profile",
    "renewal_coeff_check",
    "renewal_lln_check",
    "deviation_bound_check",
]


@dataclass(frozen=True)
class SeriesSpec:
    """A power series known through a disk evaluator.

    The evaluator must accept a complex ndarray and return the values
    elementwise; it is only ever queried strictly inside the unit disk.
    """

    name: str
    evaluator: Callable[[NDArray[np.complex128]], NDArray[np.complex128]]


@dataclass(frozen=True)
class CoefficientEstimate:
    n: int
    value: float
    radius: float
    m_points: int
    aliasing_bound: float
    imag_residual: float


def extraction_radius(n: int) -> float:
    if n < 1:
        raise ValueError("coefficient index must be >= 1")
    return 0.5 if n == 1 else 1.0 - 1.0 / n


def cauchy_coefficient(
    series: SeriesSpec, n: int, m_points: int | None = None
) -> CoefficientEstimate:
    """Trapezoid-rule contour extraction of the n-th coefficient.

    The attached aliasing bound is |sum_{j>=1} a_{n+jM} R^{jM}| estimated
    via |a_k| <= M2 / R2^k with M2 the sampled max of |g| on the circle of
    radius R2 = (1+R)/2.
    """
    r = extraction_radius(n)
    m = int(m_points) if m_points is not None else max(8 * n, 64)
    if m < 2 * n:
        raise ValueError(f"m_points={m} < 2n aliases catastrophically")
    k = np.arange(m)
    z = r * np.exp(2j * np.pi * k / m)
    vals = np.asarray(series.evaluator(z), dtype=np.complex128)
    coeff = complex(np.dot(vals, np.exp(-2j * np.pi * k * n / m))) / (m * r**n)

    r2 = 0.5 * (1.0 + r)
    vals2 = np.asarray(series.evaluator(r2 * np.exp(2j * np.pi * k / m)))
    m2 = float(np.max(np.abs(vals2)))
    q = r / r2
    alias = m2 * r2 ** (-n) * q**m / (1.0 - q**m)
    return CoefficientEstimate(
        n=n,
        value=float(coeff.real),
        radius=r,
        m_points=m,
        aliasing_bound=float(alias),
        imag_residual=float(abs(coeff.imag)),
    )


def extract_to_tolerance(
    series: SeriesSpec,
    n: int,
    tol: float,
    m_start: int | None = None,
    m_cap: int = 1 << 20,
) -> CoefficientEstimate:
    """Double the sample count until the rigorous aliasing bound fits tol."""
    m = m_start if m_start is not None else max(8 * n, 64)
    while True:
        est = cauchy_coefficient(series, n, m)
        if est.aliasing_bound <= tol:
            return est
        if 2 * m > m_cap:
            raise BudgetError(
                f"aliasing bound {est.aliasing_bound:.3e} > {tol:.1e} at the "
                f"sample cap for coefficient {n}"
            )
        m *= 2


# ---------------------------------------------------------------------------
# growth-to-coefficient bound
# ---------------------------------------------------------------------------


def darboux_constant(gamma: float) -> float:
    """C(gamma) = 4 pi^{-1/2} Gamma((gamma-1)/2)/Gamma(gamma/2), gamma > 1."""
    if gamma <= 1.0:
        raise ValueError("the constant is defined only for exponents > 1")
    return 4.0 / math.sqrt(math.pi) * math.gamma((gamma - 1.0) / 2.0) / math.gamma(gamma / 2.0)


@dataclass(frozen=True)
class LogFactor:
    """The slowly varying factor family log(1+x)^power (power 0 means 1)."""

    power: float = 0.0

    def __post_init__(self):
        if self.power < 0:
            raise ValueError("log power must be >= 0 (monotone increasing)")

    def __call__(self, x):
        if self.power == 0.0:
            return np.ones_like(np.asarray(x, dtype=np.float64))
        return np.log1p(np.asarray(x, dtype=np.float64)) ** self.power

    @property
    def label(self) -> str:
        if self.power == 0.0:
            return "1"
        if self.power == 1.0:
            return "log(1+x)"
        return f"log(1+x)^{self.power:g}"


@dataclass(frozen=True)
class BoundTerm:
    amplitude: float
    exponent: float
    log_factor: LogFactor = field(default_factory=LogFactor)

    def __post_init__(self):
        if self.amplitude < 0:
            raise ValueError("amplitude must be >= 0")
        if self.exponent <= 1.0:
            raise ValueError("exponent must exceed 1")


@dataclass(frozen=True)
class DarbouxHypothesis:
    """Disk growth hypothesis: |g| <= bounded_part where Re z <= split_abscissa,
    and |g(z)| <= sum of amplitude*|1-z|^{-exponent}*log_factor(1/|1-z|) on the
    remainder of the disk."""

    bounded_part: float
    split_abscissa: float
    terms: tuple[BoundTerm, ...]

    def __post_init__(self):
        if self.bounded_part < 0:
            raise ValueError("bounded part must be >= 0")
        if not 0.0 < self.split_abscissa < 1.0:
            raise ValueError("split abscissa must lie in (0,1)")


def coefficient_bound(hyp: DarbouxHypothesis, n: int) -> float:
    """4K + sum_m A_m C(gamma_m) n^{gamma_m-1} l_m(n)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    total = 4.0 * hyp.bounded_part
    for term in hyp.terms:
        total += (
            term.amplitude
            * darboux_constant(term.exponent)
            * n ** (term.exponent - 1.0)
            * float(term.log_factor(n))
        )
    return total


def verify_darboux(
    series: SeriesSpec,
    hyp: DarbouxHypothesis,
    n_values,
    m_points: int | None = None,
) -> dict:
    """Check |a_n| <= bound(n) for each n, aliasing tolerance attached.

    Extraction error is excluded from counterexamples by widening the right
    side with the rigorous aliasing bound (plus a roundoff allowance).
    """
    rows = []
    violations = []
    for n in sorted(int(n) for n in n_values):
        est = cauchy_coefficient(series, n, m_points)
        bound = coefficient_bound(hyp, n)
        slack = est.aliasing_bound + 1e-9 * (1.0 + bound)
        ok = abs(est.value) <= bound + slack
        row = {
            "n": n,
            "coeff": est.value,
            "bound": bound,
            "aliasing": est.aliasing_bound,
            "margin": bound + slack - abs(est.value),
            "ok": ok,
        }
        rows.append(row)
        if not ok:
            violations.append(row)
    return {"series": series.name, "ok": not violations, "rows": rows, "violations": violations}


def _fit_grid(r_levels: int, angles: int) -> NDArray[np.complex128]:
    radii = np.concatenate([[0.25, 0.5], 1.0 - 2.0 ** -np.arange(1, r_levels + 1)])
    theta = 2.0 * np.pi * np.arange(angles) / angles
    return (radii[:, None] * np.exp(1j * theta)[None, :]).ravel()


def fit_hypothesis(
    series: SeriesSpec,
    exponent: float,
    log_factor: LogFactor = LogFactor(),
    split_abscissa: float = 0.5,
    r_levels: int = 12,
    angles: int = 720,
    safety: float = 1.25,
) -> DarbouxHypothesis:
    """Estimate admissible (K, A) for a single-term hypothesis by grid
    maximization over the split disk.

    The grid reaches radius 1 - 2^-r_levels; the safety factor hedges the
    gap between grid maxima and true suprema.  This certifies nothing beyond
    the sampled region; it manufactures constants to test the bound with.
    """
    z = _fit_grid(r_levels, angles)
    vals = np.abs(np.asarray(series.evaluator(z), dtype=np.complex128))
    near = np.abs(1.0 - z)
    inner = z.real <= split_abscissa
    k_est = float(vals[inner].max()) if inner.any() else 0.0
    outer = ~inner
    ratio = vals[outer] * near[outer] ** exponent / log_factor(1.0 / near[outer])
    a_est = float(ratio.max()) if outer.any() else 0.0
    return DarbouxHypothesis(
        bounded_part=safety * k_est,
        split_abscissa=split_abscissa,
        terms=(BoundTerm(safety * a_est, exponent, log_factor),),
    )


# ---------------------------------------------------------------------------
# builtin test family
# ---------------------------------------------------------------------------


def _harmonic(n: int) -> float:
    return float(np.sum(1.0 / np.arange(1, n + 1))) if n else 0.0


BUILTIN_SERIES_NAMES = (
    "cubic_pole",
    "log_times_double_pole",
    "entire_exponential",
    "geometric_renewal_remainder",
)


def builtin_series(name: str):
    """Return (series, hypothesis, true_coefficient) for a named test case.

    true_coefficient is a function of n, or None when no closed form is
    carried (fitted-hypothesis cases still verify the bound).
    """
    if name == "cubic_pole":
        series = SeriesSpec("cubic_pole", lambda z: (1.0 - z) ** -3.0)
        # |1-z| >= 1/2 on Re z <= 1/2, so the analytic part is <= 8 there
        hyp = DarbouxHypothesis(8.0, 0.5, (BoundTerm(1.0, 3.0),))
        return series, hyp, lambda n: (n + 1) * (n + 2) / 2.0
    if name == "log_times_double_pole":
        series = SeriesSpec(
            "log_times_double_pole", lambda z: np.log(1.0 / (1.0 - z)) * (1.0 - z) ** -2.0
        )
        hyp = fit_hypothesis(series, exponent=2.0, log_factor=LogFactor(1.0))
        return series, hyp, lambda n: (n + 1) * _harmonic(n) - n
    if name == "entire_exponential":
        series = SeriesSpec("entire_exponential", np.exp)
        hyp = DarbouxHypothesis(math.e, 0.5, ())
        return series, hyp, lambda n: 1.0 / math.factorial(n) if n < 171 else 0.0
    if name == "geometric_renewal_remainder":
        # counts generating function minus its double-pole principal part,
        # for the memoryless arrival law with mean 2: the remainder is
        # -1/(2(1-z)), constant coefficients -1/2.  On the disk
        # |1-z| <= 2 gives |1-z|^{-1} <= 2^{1/4} |1-z|^{-5/4}.
        series = SeriesSpec(
            "geometric_renewal_remainder", lambda z: -0.5 / (1.0 - z)
        )
        hyp = DarbouxHypothesis(1.0, 0.5, (BoundTerm(0.5 * 2.0**0.25, 1.25),))
        return series, hyp, lambda n: -0.5
    raise LawError(f"unknown builtin series {name!r}; choose from {BUILTIN_SERIES_NAMES}")


# ---------------------------------------------------------------------------
# renewal sequences
# ---------------------------------------------------------------------------

_MOMENT_CAP = 100_000


@dataclass(frozen=True)
class RenewalLaw:
    """Arrival-time law for a renewal sequence Y_j = T_1 + ... + T_j.

    kind "finite" stores the pmf directly; kind "geometric" is the memoryless
    law P(T=k) = p(1-p)^{k-1} on k >= 1, kept parametric so exact tails are
    available at any horizon.  period is the gcd of the support; laws with
    period > 1 still admit exact moments but are rejected by asymptotic
    checks that require aperiodicity.
    """

    name: str
    kind: str
    probs: tuple[float, ...] | None = None
    success: float | None = None

    @classmethod
    def fixed(cls, k: int) -> "RenewalLaw":
        if k < 1:
            raise LawError("fixed arrival time must be >= 1")
        probs = [0.0] * (k + 1)
        probs[k] = 1.0
        return cls(name=f"fixed:{k}", kind="finite", probs=tuple(probs))

    @classmethod
    def geometric(cls, p: float) -> "RenewalLaw":
        if not 0.0 < p < 1.0:
            raise LawError("geometric parameter must lie in (0,1)")
        return cls(name=f"geometric:{p:g}", kind="geometric", success=p)

    @classmethod
    def from_probs(cls, probs, name: str = "custom") -> "RenewalLaw":
        arr = np.asarray(probs, dtype=np.float64)
        if arr.ndim != 1 or len(arr) < 2:
            raise LawError("pmf must be a 1-d array over 0..k_max with k_max >= 1")
        if np.any(arr < 0) or abs(arr.sum() - 1.0) > 1e-12:
            raise LawError("pmf must be nonnegative and sum to 1")
        if arr[0] >= 1.0:
            raise LawError("all mass at 0 means infinitely many arrivals at once")
        return cls(name=name, kind="finite", probs=tuple(float(p) for p in arr))

    @property
    def mean(self) -> float:
        if self.kind == "geometric":
            return 1.0 / self.success
        return float(np.dot(np.arange(len(self.probs)), self.probs))

    @property
    def period(self) -> int:
        if self.kind == "geometric":
            return 1
        g = 0
        for k, p in enumerate(self.probs):
            if k >= 1 and p > 0:
                g = math.gcd(g, k)
        return g

    def pmf_array(self, length: int) -> NDArray[np.float64]:
        """pmf over 0..length (geometric tails underflow to 0 harmlessly)."""
        if self.kind == "geometric":
            out = np.zeros(length + 1)
            k = np.arange(1, length + 1, dtype=np.float64)
            with np.errstate(under="ignore"):
                out[1:] = self.success * np.exp((k - 1.0) * math.log1p(-self.success))
            return out
        out = np.zeros(length + 1)
        m = min(length + 1, len(self.probs))
        out[:m] = self.probs[:m]
        return out

    def step_gf(self, lam):
        """f(lambda) = E lambda^T, vectorized over complex lambda."""
        lam = np.asarray(lam, dtype=np.complex128)
        if self.kind == "geometric":
            p = self.success
            return p * lam / (1.0 - (1.0 - p) * lam)
        coeffs = np.asarray(self.probs, dtype=np.float64)
        return np.polynomial.polynomial.polyval(lam, coeffs)

    def sample_totals(self, horizon: int, rng: np.random.Generator) -> int:
        """Number of arrival times landing in [1, horizon] along one draw."""
        count = 0
        total = 0
        block = max(64, int(1.5 * horizon / max(self.mean, 1e-9)) + 16)
        if self.kind == "geometric":
            draw = lambda size: rng.geometric(self.success, size=size)
        else:
            support = np.arange(len(self.probs))
            probs = np.asarray(self.probs)
            draw = lambda size: rng.choice(support, size=size, p=probs)
        while total <= horizon:
            steps = draw(block)
            sums = total + np.cumsum(steps)
            count += int(np.searchsorted(sums, horizon, side="right"))
            total = int(sums[-1])
            block = 64
        return count


def renewal_gf(law: RenewalLaw, lam) -> tuple[complex, complex]:
    """(first-moment, second-moment) generating function values at lam."""
    lam_arr = np.asarray(lam, dtype=np.complex128)
    if np.any(np.abs(lam_arr) >= 1.0):
        raise ValueError("the generating functions live strictly inside the unit disk")
    f = law.step_gf(lam_arr)
    a = f / ((1.0 - lam_arr) * (1.0 - f))
    b = a + 2.0 * a * f / (1.0 - f)
    if np.isscalar(lam) or np.asarray(lam).ndim == 0:
        return complex(a), complex(b)
    return a, b


def renewal_series(law: RenewalLaw, which: str = "mean") -> SeriesSpec:
    """SeriesSpec whose coefficients are E N_n (mean) or E N_n^2 (second)."""
    if which not in ("mean", "second"):
        raise ValueError("which must be 'mean' or 'second'")
    idx = 0 if which == "mean" else 1

    def evaluator(z):
        return renewal_gf(law, np.asarray(z, dtype=np.complex128))[idx]

    return SeriesSpec(f"{law.name}:{which}", evaluator)


def renewal_moment_profile(law: RenewalLaw, n: int):
    """Exact (E N_m, E N_m^2) for every m <= n by the renewal equation.

    u(m) = sum_j P(Y_j = m) over j >= 0 satisfies
    (1-pmf[0]) u(m) = [m=0] + sum_{k>=1} pmf[k] u(m-k); the second-moment
    helper v(m) = sum_j j P(Y_j = m) satisfies the same recursion driven by
    v+u.  Then E N_n = sum_{m<=n} u - 1 and E N_n^2 = 2 sum_{m<=n} v - E N_n.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    if n > _MOMENT_CAP:
        raise BudgetError(f"renewal moment horizon capped at {_MOMENT_CAP}")
    pmf = law.pmf_array(n)
    p0 = pmf[0]
    if p0 >= 1.0:
        raise LawError("all mass at 0 means infinitely many arrivals at once")
    nz = np.nonzero(pmf[1:])[0]
    reach = int(nz[-1]) + 1 if len(nz) else 0
    scale = 1.0 / (1.0 - p0)
    u = np.zeros(n + 1)
    w = np.zeros(n + 1)  # w = u + v
    u[0] = scale
    w[0] = u[0] + scale * p0 * u[0]  # v(0) = scale*p0*u(0)
    for m in range(1, n + 1):
        kk = min(m, reach)
        if kk:
            tail = pmf[1 : kk + 1]
            su = float(np.dot(tail, u[m - kk : m][::-1]))
            sw = float(np.dot(tail, w[m - kk : m][::-1]))
        else:
            su = sw = 0.0
        u[m] = scale * su
        v_m = scale * (p0 * u[m] + sw)
        w[m] = u[m] + v_m
    cum_u = np.cumsum(u)
    cum_v = np.cumsum(w - u)
    en = cum_u - 1.0
    en2 = 2.0 * cum_v - en
    return en, en2


def renewal_moments_exact(law: RenewalLaw, n: int) -> tuple[float, float]:
    """(E N_n, E N_n^2), exact."""
    en, en2 = renewal_moment_profile(law, n)
    return float(en[n]), float(en2[n])


def renewal_coeff_check(law: RenewalLaw, n_values, tol: float = 1e-6) -> dict:
    """Contour-extracted coefficients of both generating functions vs the
    recursion, each extraction refined until its aliasing bound <= tol/4."""
    n_values = sorted(int(n) for n in n_values)
    en, en2 = renewal_moment_profile(law, max(n_values))
    series_a = renewal_series(law, "mean")
    series_b = renewal_series(law, "second")
    rows = []
    ok = True
    for n in n_values:
        ea = extract_to_tolerance(series_a, n, tol / 4.0)
        eb = extract_to_tolerance(series_b, n, tol / 4.0)
        da = abs(ea.value - en[n])
        db = abs(eb.value - en2[n])
        good = da <= tol and db <= tol
        ok = ok and good
        rows.append(
            {
                "n": n,
                "en_recursion": float(en[n]),
                "en_contour": ea.value,
                "en2_recursion": float(en2[n]),
                "en2_contour": eb.value,
                "err_en": da,
                "err_en2": db,
                "ok": good,
            }
        )
    return {"law": law.name, "tol": tol, "ok": ok, "rows": rows}


def renewal_lln_check(law: RenewalLaw, n_list, reps: int, seed: int) -> dict:
    """Simulated max_j |N_n/n - 1/mean| across reps, per horizon."""
    if reps < 1:
        raise ValueError("reps must be >= 1")
    inv_mu = 1.0 / law.mean
    rows = []
    for n in sorted(int(x) for x in n_list):
        devs = np.empty(reps)
        for rep in range(reps):
            rng = np.random.default_rng(np.random.SeedSequence((seed, n, rep)))
            devs[rep] = abs(law.sample_totals(n, rng) / n - inv_mu)
        rows.append({"n": n, "max_dev": float(devs.max()), "mean_dev": float(devs.mean())})
    return {"law": law.name, "reps": reps, "rows": rows}


def deviation_bound_check(
    law: RenewalLaw,
    n_max: int,
    decay: float = 1.0,
    log_factor: LogFactor = LogFactor(),
    fit_fraction: float = 0.1,
) -> dict:
    """|E N_n - n/mean| <= C n^{1-decay} l(n): fit C on an initial window,
    then check the bound over the whole range."""
    if not 0 < fit_fraction <= 1:
        raise ValueError("fit fraction must lie in (0,1]")
    en, _ = renewal_moment_profile(law, n_max)
    n = np.arange(1, n_max + 1, dtype=np.float64)
    dev = np.abs(en[1:] - n / law.mean)
    envelope = n ** (1.0 - decay) * log_factor(n)
    n_fit = max(1, int(n_max * fit_fraction))
    c_fit = float(np.max(dev[:n_fit] / envelope[:n_fit]))
    slack = c_fit * envelope + 1e-9 * (1.0 + np.abs(en[1:]))
    ok = bool(np.all(dev <= slack))
    worst = int(np.argmax(dev - slack)) + 1
    return {
        "law": law.name,
        "decay": decay,
        "log_factor": log_factor.label,
        "fitted_c": c_fit,
        "fit_horizon": n_fit,
        "n_max": n_max,
        "ok": ok,
        "worst_n": worst,
        "max_deviation": float(dev.max()),
    }
