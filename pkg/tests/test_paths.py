import numpy as np
import pytest

from silt import (
    WalkPath,
    cross_intersections,
    make_law,
    max_local_time,
    occupation,
    self_intersections,
    simulate_path,
    site_keys,
    vn_profile,
)


def _path_1d(sites):
    return WalkPath(law_name="test", d=1, sites=np.asarray(sites, dtype=np.int64))


def test_simulate_path_shapes_and_origin():
    z = make_law("zipf1d")
    p = simulate_path(z, 100, 3)
    assert p.sites.shape == (101,)
    assert p.sites[0] == 0
    lazy = make_law("lazy_srw_2d")
    q = simulate_path(lazy, 50, 3)
    assert q.sites.shape == (51, 2)
    assert tuple(q.sites[0]) == (0, 0)
    # steps are nearest-neighbor or holds
    steps = np.abs(np.diff(q.sites, axis=0)).sum(axis=1)
    assert set(steps.tolist()) <= {0, 1}


def test_seed_reproducibility():
    z = make_law("zipf1d")
    a = simulate_path(z, 500, 42)
    b = simulate_path(z, 500, 42)
    c = simulate_path(z, 500, 43)
    assert np.array_equal(a.sites, b.sites)
    assert not np.array_equal(a.sites, c.sites)


def test_occupation_counts_sum():
    p = _path_1d([0, 1, 0, 2, 0])
    sites, counts = occupation(p)
    assert counts.sum() == 5
    lookup = dict(zip(sites.tolist(), counts.tolist()))
    assert lookup == {0: 3, 1: 1, 2: 1}


def test_self_intersections_known_paths():
    # all distinct sites: V_n = n+1
    p = _path_1d([0, 1, 2, 3])
    assert self_intersections(p) == 4
    # constant path: V_n = (n+1)^2
    q = _path_1d([0, 0, 0, 0])
    assert self_intersections(q) == 16
    # mixed: counts {0:3, 1:1, 2:1} -> 9+1+1
    r = _path_1d([0, 1, 0, 2, 0])
    assert self_intersections(r) == 11


def test_vn_profile_incremental_identity():
    z = make_law("zipf1d")
    p = simulate_path(z, 200, 9)
    prof = vn_profile(p)
    assert prof[0] == 1
    # every increment is 1 + 2 * (prior visits), odd and >= 1
    inc = np.diff(prof)
    assert np.all(inc >= 1)
    assert np.all(inc % 2 == 1)
    # terminal value matches the direct count
    assert prof[-1] == self_intersections(p)
    # prefix values match direct counts too
    for m in (0, 17, 100):
        sub = WalkPath(law_name=p.law_name, d=1, sites=p.sites[: m + 1])
        assert prof[m] == self_intersections(sub)


def test_vn_profile_2d():
    lazy = make_law("lazy_srw_2d")
    p = simulate_path(lazy, 300, 4)
    prof = vn_profile(p)
    assert prof[-1] == self_intersections(p)
    assert max_local_time(p) == occupation(p)[1].max()


def test_site_keys_injective_2d():
    pts = np.array([[0, 0], [1, -1], [-1, 1], [2**20, -(2**20)]], dtype=np.int64)
    p = WalkPath(law_name="test", d=2, sites=pts)
    keys = site_keys(p)
    assert len(np.unique(keys)) == len(pts)


def test_cross_intersections_prefix_windows():
    # path 0,1,0,1,0: prefix [0, 0.5] has counts {0:2, 1:1} on S_0..S_2
    p = _path_1d([0, 1, 0, 1, 0])
    # window (a, b) = (0.5, 1.0): c_a(0)=2, c_a(1)=1; c_b(0)=3, c_b(1)=2
    val = cross_intersections(p, 0.5, 1.0)
    assert val == 2 * (3 - 2) + 1 * (2 - 1)
    # full window pairs: a = b gives zero
    assert cross_intersections(p, 1.0, 1.0) == 0


def test_cross_intersections_no_revisit():
    p = _path_1d([0, 1, 2, 3, 4])
    assert cross_intersections(p, 0.5, 1.0) == 0
