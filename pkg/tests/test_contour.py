import math

import numpy as np
import pytest

from silt import (
    BUILTIN_SERIES_NAMES,
    BoundTerm,
    DarbouxHypothesis,
    LogFactor,
    RenewalLaw,
    SeriesSpec,
    builtin_series,
    cauchy_coefficient,
    coefficient_bound,
    darboux_constant,
    deviation_bound_check,
    extract_to_tolerance,
    extraction_radius,
    fit_hypothesis,
    renewal_coeff_check,
    renewal_gf,
    renewal_lln_check,
    renewal_moment_profile,
    renewal_moments_exact,
    renewal_series,
    verify_darboux,
)


def test_extraction_radius():
    assert extraction_radius(1) == pytest.approx(0.5)
    assert extraction_radius(100) == pytest.approx(0.99)
    with pytest.raises(ValueError):
        extraction_radius(0)


def test_polynomial_extraction_exact():
    # z^7: coefficient 1 at n=7, 0 at n=3, to near machine precision
    spec = SeriesSpec("monomial7", lambda z: z**7)
    assert cauchy_coefficient(spec, 7, 128).value == pytest.approx(1.0, abs=1e-12)
    assert abs(cauchy_coefficient(spec, 3, 128).value) < 1e-12


def test_cubic_pole_coefficient():
    # (1-z)^{-3} has coefficients binom(n+2, 2); a_5 = 21
    series, _, coeff = builtin_series("cubic_pole")
    est = cauchy_coefficient(series, 5, 512)
    assert est.value == pytest.approx(coeff(5), abs=1e-6)
    assert coeff(5) == 21.0
    assert est.imag_residual < 1e-10


def test_m_points_validation():
    spec = SeriesSpec("monomial2", lambda z: z**2)
    with pytest.raises(ValueError):
        cauchy_coefficient(spec, 10, 16)  # fewer than 2n points


def test_aliasing_bound_is_rigorous():
    # on (1-z)^{-2} (coefficients n+1) the true extraction error must sit
    # below the reported certificate, and doubling M shrinks it sharply
    series = SeriesSpec("double_pole", lambda z: (1.0 - z) ** -2.0)
    n = 12
    errs, bounds = [], []
    for m in (32, 64, 128):
        est = cauchy_coefficient(series, n, m)
        errs.append(abs(est.value - (n + 1)))
        bounds.append(est.aliasing_bound)
    for e, b in zip(errs, bounds):
        assert e <= b + 1e-13
    # aliasing law: error drops by at least R^M per doubling, up to the
    # polynomial coefficient growth (slack factor 4)
    r = extraction_radius(n)
    for k in range(len(errs) - 1):
        m = (32, 64)[k]
        if errs[k] > 1e-14:
            assert errs[k + 1] <= 4.0 * errs[k] * r**m


def test_extract_to_tolerance():
    series = SeriesSpec("double_pole", lambda z: (1.0 - z) ** -2.0)
    est = extract_to_tolerance(series, 60, 1e-8)
    assert est.aliasing_bound <= 1e-8
    assert est.value == pytest.approx(61.0, abs=1e-7)


def test_darboux_constant_values():
    assert darboux_constant(2.0) == pytest.approx(4.0, abs=1e-12)
    assert darboux_constant(3.0) == pytest.approx(8.0 / math.pi, abs=1e-12)
    with pytest.raises(ValueError):
        darboux_constant(1.0)


def test_coefficient_bound_plugin():
    # K=1, single term A=1, gamma=2, l = 1: bound = 4 + 4 n
    hyp = DarbouxHypothesis(
        bounded_part=1.0,
        split_abscissa=0.5,
        terms=(BoundTerm(amplitude=1.0, exponent=2.0, log_factor=LogFactor(0.0)),),
    )
    assert coefficient_bound(hyp, 100) == pytest.approx(404.0, abs=1e-9)


def test_log_factor():
    f = LogFactor(1.0)
    assert f(math.e - 1.0) == pytest.approx(1.0)
    assert LogFactor(0.0)(123.0) == 1.0
    assert "log" in f.label
    with pytest.raises(ValueError):
        LogFactor(-1.0)


def test_builtin_family_bounds_hold():
    ns = sorted(set(list(range(1, 33)) + [64, 128, 256, 512, 1024, 2000]))
    for name in BUILTIN_SERIES_NAMES:
        series, hyp, coeff = builtin_series(name)
        report = verify_darboux(series, hyp, ns)
        assert report["ok"], (name, report["violations"][:3])
        # extracted values also agree with the true coefficients where
        # the aliasing certificate is small
        for row in report["rows"]:
            if row["aliasing"] < 1e-9 and coeff is not None:
                assert row["coeff"] == pytest.approx(
                    coeff(row["n"]), rel=1e-6, abs=1e-9
                )


def test_fit_hypothesis_covers_series():
    series, _, _ = builtin_series("log_times_double_pole")
    hyp = fit_hypothesis(series, exponent=2.0, log_factor=LogFactor(1.0))
    report = verify_darboux(series, hyp, [1, 2, 4, 8, 16, 64, 256, 1024])
    assert report["ok"]


# -- renewal ---------------------------------------------------------------


def test_renewal_law_constructors():
    g = RenewalLaw.geometric(0.5)
    assert g.mean == pytest.approx(2.0)
    assert g.period == 1
    f = RenewalLaw.fixed(2)
    assert f.mean == pytest.approx(2.0)
    assert f.period == 2
    c = RenewalLaw.from_probs([0.5, 0.5])
    assert c.mean == pytest.approx(0.5)
    with pytest.raises(ValueError):
        RenewalLaw.geometric(0.0)
    with pytest.raises(ValueError):
        RenewalLaw.from_probs([0.5, 0.4])


def test_renewal_gf_values():
    g = RenewalLaw.geometric(0.5)
    # f(lam) = 0.5 lam/(1 - 0.5 lam); a(1/2) = f/((1-lam)(1-f)) = ... = 1
    a, b = renewal_gf(g, 0.5)
    assert a == pytest.approx(1.0, abs=1e-12)
    # b = a + 2 a f/(1-f)
    f = g.step_gf(0.5)
    assert b == pytest.approx(a + 2 * a * f / (1 - f), abs=1e-12)
    with pytest.raises(ValueError):
        renewal_gf(g, 1.0)


def test_renewal_moment_profile_unit_steps():
    # T = 1 surely: N_n = n, N_n^2 = n^2
    law = RenewalLaw.fixed(1)
    en, en2 = renewal_moment_profile(law, 10)
    np.testing.assert_allclose(en, np.arange(11), atol=1e-12)
    np.testing.assert_allclose(en2, np.arange(11) ** 2.0, atol=1e-10)


def test_renewal_moment_profile_fixed_two():
    # T = 2 surely: N_n = floor(n/2)
    law = RenewalLaw.fixed(2)
    en, en2 = renewal_moment_profile(law, 10)
    assert en[10] == pytest.approx(5.0)
    assert en2[10] == pytest.approx(25.0)
    assert en[9] == pytest.approx(4.0)


def test_renewal_moment_profile_geometric_closed_forms():
    # geometric(p): E N_n = p n; p = 1/2 gives E N_n^2 = n(n+1)/4
    law = RenewalLaw.geometric(0.5)
    en, en2 = renewal_moment_profile(law, 200)
    n = np.arange(201)
    np.testing.assert_allclose(en, 0.5 * n, atol=1e-10)
    np.testing.assert_allclose(en2, n * (n + 1) / 4.0, atol=1e-8)
    en_exact, en2_exact = renewal_moments_exact(law, 200)
    assert en_exact == pytest.approx(100.0, abs=1e-8)
    assert en2_exact == pytest.approx(200 * 201 / 4.0, abs=1e-7)


def test_renewal_series_match_recursion():
    for law in (RenewalLaw.geometric(0.3), RenewalLaw.from_probs([0.2, 0.5, 0.3])):
        chk = renewal_coeff_check(law, [1, 3, 10, 50, 200], tol=1e-6)
        assert chk["ok"], chk["rows"]


def test_renewal_sampling_lln():
    law = RenewalLaw.geometric(0.5)
    out = renewal_lln_check(law, [100000], 50, seed=3)
    assert out["rows"][0]["max_dev"] < 0.02


def test_renewal_sample_totals_deterministic_case():
    law = RenewalLaw.fixed(3)
    rng = np.random.default_rng(0)
    assert law.sample_totals(10, rng) == 3
    assert law.sample_totals(0, rng) == 0


def test_deviation_bound_check():
    # fixed 2: |E N_n - n/2| = 1/2 on odd n, 0 on even; constant envelope fits
    law = RenewalLaw.fixed(2)
    out = deviation_bound_check(law, 5000, decay=1.0)
    assert out["ok"]
    assert out["fitted_c"] == pytest.approx(0.5, abs=1e-9)
    # geometric: zero deviation everywhere
    out2 = deviation_bound_check(RenewalLaw.geometric(0.5), 5000, decay=1.0)
    assert out2["ok"]
    assert out2["max_deviation"] < 1e-8
