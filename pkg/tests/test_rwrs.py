import math

import numpy as np
import pytest
from scipy import stats

from silt import (
    LawError,
    WalkPath,
    fdd_covariance_check,
    make_law,
    make_scenery,
    quenched_clt_test,
    quenched_covariance,
    quenched_variance,
    rwrs_path,
    simulate_path,
    site_keys,
    vn_profile,
)

ZIPF = make_law("zipf1d")
GAMMA = 3.0 / math.pi


def test_scenery_values_depend_only_on_site():
    scen = make_scenery("rademacher", 5)
    keys = np.array([3, 7, 3, 11, 7], dtype=np.uint64)
    vals = scen.sample(keys)
    assert vals[0] == vals[2]
    assert vals[1] == vals[4]
    assert set(np.unique(vals)) <= {-1.0, 1.0}
    # order independence: permuting the query leaves per-site values fixed
    perm = np.array([11, 3, 7], dtype=np.uint64)
    vals2 = scen.sample(perm)
    assert vals2[1] == vals[0]
    assert vals2[2] == vals[1]


def test_scenery_seed_sensitivity():
    keys = np.arange(1000, dtype=np.uint64)
    a = make_scenery("rademacher", 1).sample(keys)
    b = make_scenery("rademacher", 1).sample(keys)
    c = make_scenery("rademacher", 2).sample(keys)
    np.testing.assert_array_equal(a, b)
    assert np.mean(a != c) > 0.3


def test_rademacher_scenery_is_balanced():
    keys = np.arange(200000, dtype=np.uint64)
    vals = make_scenery("rademacher", 9).sample(keys)
    assert abs(vals.mean()) < 0.01
    assert vals.std() == pytest.approx(1.0, abs=0.01)


def test_gaussian_scenery_is_standard_normal():
    keys = np.arange(100000, dtype=np.uint64)
    vals = make_scenery("gaussian", 3, sigma=2.0).sample(keys)
    assert vals.mean() == pytest.approx(0.0, abs=0.03)
    assert vals.std() == pytest.approx(2.0, abs=0.03)
    ks = stats.kstest(vals / 2.0, "norm").statistic
    assert ks < 0.01


def test_custom_scenery_validation():
    scen = make_scenery("custom_iid", 4, values=[-1.0, 2.0], probs=[2 / 3, 1 / 3])
    assert scen.sigma == pytest.approx(math.sqrt(2.0))
    keys = np.arange(100000, dtype=np.uint64)
    vals = scen.sample(keys)
    assert set(np.unique(vals)) == {-1.0, 2.0}
    assert abs(vals.mean()) < 0.02
    with pytest.raises(LawError):
        make_scenery("custom_iid", 4, values=[0.0, 1.0], probs=[0.5, 0.5])
    with pytest.raises(LawError):
        make_scenery("custom_iid", 4, values=[0.0], probs=[1.0])
    with pytest.raises(LawError):
        make_scenery("unknown", 4)


def test_rwrs_path_single_site_walk():
    # a walk frozen at the origin: Y_n(1) = +/- sqrt(pi gamma) (n+1)/(sigma-normalized scale)
    n = 100
    path = WalkPath(law_name="pm", d=1, sites=np.zeros(n + 1, dtype=np.int64))
    scen = make_scenery("rademacher", 8)
    out = rwrs_path(path, scen, [1.0], gamma=GAMMA)
    xi0 = scen.sample(np.zeros(1, dtype=np.uint64))[0]
    expected = math.sqrt(math.pi * GAMMA) * xi0 * (n + 1) / math.sqrt(2 * n * math.log(n))
    assert out.values[0] == pytest.approx(expected, rel=1e-12)


def test_quenched_variance_profile():
    path = simulate_path(ZIPF, 5000, 21)
    s2 = quenched_variance(path, GAMMA, [0.5, 1.0])
    prof = vn_profile(path)
    norm = 2.0 * 5000 * math.log(5000)
    assert s2[1] == pytest.approx(math.pi * GAMMA * prof[-1] / norm, rel=1e-12)
    assert s2[0] == pytest.approx(math.pi * GAMMA * prof[2500] / norm, rel=1e-12)
    assert s2[0] < s2[1]


def test_quenched_covariance_diagonal_matches_variance():
    path = simulate_path(ZIPF, 2000, 13)
    grid = [0.25, 0.5, 1.0]
    cov = quenched_covariance(path, GAMMA, grid)
    var = quenched_variance(path, GAMMA, grid)
    np.testing.assert_allclose(np.diag(cov), var, rtol=1e-12)
    # covariance of nested sums equals the variance at the earlier time
    # plus the cross term; monotone in the second index
    assert cov[0, 1] >= cov[0, 0] - 1e-12


def test_conditional_moments_under_scenery_resampling():
    # fixed path; empirical conditional mean ~ 0 and variance ~ s_n^2
    path = simulate_path(ZIPF, 2000, 17)
    keys = site_keys(path)
    uniq, counts = np.unique(keys, return_counts=True)
    reps = 3000
    sums = np.empty(reps)
    for rep in range(reps):
        scen = make_scenery("rademacher", (99, rep))
        sums[rep] = np.dot(counts, scen.sample(uniq))
    norm = math.sqrt(math.pi * GAMMA) / math.sqrt(2 * 2000 * math.log(2000))
    y = sums * norm
    s2 = quenched_variance(path, GAMMA, [1.0])[0]
    assert y.mean() == pytest.approx(0.0, abs=4 * y.std() / math.sqrt(reps))
    rel_ci = 4.0 * math.sqrt(2.0 / reps)
    assert y.var(ddof=1) == pytest.approx(s2, rel=rel_ci)


def test_quenched_clt_gaussian_is_exactly_normal():
    rep = quenched_clt_test(
        ZIPF, 1000, 2000, walk_seed=5, scenery_seed_base=31, kind="gaussian"
    )
    # studentized gaussian-scenery sums are exactly N(0,1); KS obeys the
    # finite-sample band
    assert rep["ks"] < 1.36 / math.sqrt(2000)
    assert rep["sample_sd"] == pytest.approx(1.0, abs=0.05)


def test_quenched_clt_rademacher():
    rep = quenched_clt_test(ZIPF, 2000, 1500, walk_seed=5, scenery_seed_base=32)
    assert rep["ks"] < 0.05
    assert rep["distinct_sites"] > 100
    assert rep["s_n2"] > 0.5


def test_quenched_clt_preconditions():
    with pytest.raises(ValueError):
        quenched_clt_test(ZIPF, 100, 2000, 1, 2)
    with pytest.raises(ValueError):
        quenched_clt_test(ZIPF, 2000, 10, 1, 2)
    with pytest.raises(LawError):
        quenched_clt_test(make_law("lazy_srw_2d"), 2000, 2000, 1, 2)


def test_fdd_covariance_check():
    out = fdd_covariance_check(ZIPF, 1000, [0.25, 0.5, 1.0], 2500, 3, 4)
    assert out["entrywise_ok"]
    emp = np.asarray(out["empirical"])
    quen = np.asarray(out["quenched"])
    se = np.asarray(out["se"])
    assert np.all(np.abs(emp - quen) <= 4.0 * se + 1e-12)
    # increment-vs-level covariance identity is exact, not statistical
    for inc in out["increments"]:
        assert inc["identity_residual"] == pytest.approx(0.0, abs=1e-13)


def test_fdd_grid_validation():
    with pytest.raises(ValueError):
        fdd_covariance_check(ZIPF, 1000, [0.5, 0.25], 1000, 1, 2)
    with pytest.raises(ValueError):
        fdd_covariance_check(ZIPF, 1000, [0.1, 0.2, 0.3, 0.4, 0.5, 0.6], 1000, 1, 2)
