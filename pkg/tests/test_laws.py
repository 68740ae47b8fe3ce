import math

import numpy as np
import pytest

from silt import (
    LawError,
    aperiodicity_witness,
    gamma_from_charfn,
    make_law,
    truncated_zipf_pmf,
)

PI = math.pi


def test_zipf_charfn_closed_form():
    law = make_law("zipf1d")
    t = np.linspace(-PI, PI, 41)
    expected = 1.0 - (3.0 / PI) * np.abs(t) + (3.0 / (2.0 * PI**2)) * t**2
    np.testing.assert_allclose(law.charfn(t), expected, rtol=1e-14)
    assert law.gamma == pytest.approx(3.0 / PI)


def test_zipf_charfn_at_pi_matches_series():
    # f(pi) = sum 2 cos(pi k) 3/(pi^2 k^2) = -(6/pi^2) * (pi^2/12) * ... check numerically
    law = make_law("zipf1d")
    k = np.arange(1, 200001)
    series = float(np.sum(2.0 * np.cos(PI * k) * 3.0 / (PI**2 * k**2)))
    assert law.charfn(PI) == pytest.approx(series, abs=1e-8)


def test_lazy_charfn_and_covariance():
    law = make_law("lazy_srw_2d")
    assert law.charfn([0.0, 0.0]) == pytest.approx(1.0)
    assert law.charfn([PI, PI]) == pytest.approx(0.0)
    np.testing.assert_allclose(law.covariance, np.diag([0.25, 0.25]))
    assert law.probs.sum() == pytest.approx(1.0)


def test_zipf_sampling_matches_pmf():
    law = make_law("zipf1d")
    rng = np.random.default_rng(7)
    steps = law.sample_steps(200000, rng)
    assert steps.min() < 0 < steps.max()
    p1 = np.mean(np.abs(steps) == 1)
    assert p1 == pytest.approx(6.0 / PI**2, abs=0.005)
    # symmetric signs
    assert np.mean(steps > 0) == pytest.approx(0.5, abs=0.005)


def test_zipf_tail_sampling_exercised():
    law = make_law("zipf1d")
    rng = np.random.default_rng(11)
    steps = law.sample_steps(2_000_000, rng)
    big = np.abs(steps) > 1024
    # P(|X| > 1024) ~ 6/(pi^2 * 1024) ~ 5.9e-4
    assert big.sum() > 500
    tail_prob = law.tail_probability(1025)
    assert np.mean(big) == pytest.approx(tail_prob, rel=0.2)


def test_tail_probability_trigamma_identity():
    law = make_law("zipf1d")
    # direct sum vs trigamma closed form
    k = 50
    m = 200000
    direct = sum(2 * 3.0 / (PI**2 * j**2) for j in range(k, m))
    direct += 6.0 / (PI**2 * m)  # integral remainder of the truncated tail
    assert law.tail_probability(k) == pytest.approx(direct, rel=1e-6)
    assert law.tail_probability(0) == 1.0
    assert law.tail_probability(1) == pytest.approx(1.0)


def test_finite_custom_validation():
    with pytest.raises(LawError):
        make_law("finite_custom", support=[1, -1], probs=[0.6, 0.6])
    with pytest.raises(LawError):
        make_law("finite_custom", support=[1, -1], probs=[1.2, -0.2])
    with pytest.raises(LawError):
        make_law("finite_custom", support=[1, 1], probs=[0.5, 0.5])
    # period-2 law rejected (simple walk without laziness)
    with pytest.raises(LawError):
        make_law("finite_custom", support=[1, -1], probs=[0.5, 0.5])
    # lazy version accepted
    law = make_law("finite_custom", support=[0, 1, -1], probs=[0.5, 0.25, 0.25])
    assert law.d == 1


def test_validate_false_permits_degenerate_laws():
    with pytest.raises(LawError):
        make_law("finite_custom", support=[0], probs=[1.0])
    pm = make_law("finite_custom", support=[0], probs=[1.0], validate=False)
    rng = np.random.default_rng(0)
    assert np.all(pm.sample_steps(10, rng) == 0)


def test_truncated_zipf_pmf():
    sup, probs = truncated_zipf_pmf(3)
    assert list(sup) == [-3, -2, -1, 1, 2, 3]
    assert probs.sum() == pytest.approx(1.0)
    assert probs[2] == pytest.approx(probs[3])
    assert probs[2] / probs[1] == pytest.approx(4.0)


def test_aperiodicity_witness_separates():
    # finite-variance laws decay quadratically near 0, so the gap at the
    # excluded-ball boundary is ~ |t|^2/8; linear-decay zipf has a much
    # larger gap.  A periodic law touches 1 on the grid.
    good = make_law("lazy_srw_2d")
    assert aperiodicity_witness(good) < 1.0 - 5e-5
    z = make_law("zipf1d")
    assert aperiodicity_witness(z) < 0.98
    # period-2 law: |f(pi)| = 1
    bad = make_law("finite_custom", support=[1, -1], probs=[0.5, 0.5], validate=False)
    assert aperiodicity_witness(bad) > 1.0 - 1e-12


def test_gamma_from_charfn():
    z = make_law("zipf1d")
    t = np.array([0.1 / 2**j for j in range(8)])
    assert gamma_from_charfn(z, t) == pytest.approx(3.0 / PI, rel=1e-6)
    lazy = make_law("lazy_srw_2d")
    assert gamma_from_charfn(lazy, t) == pytest.approx(0.0, abs=1e-3)
    with pytest.raises(LawError):
        gamma_from_charfn(z, [0.1, 0.2, 0.3])  # increasing sequence rejected
