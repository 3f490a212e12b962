import numpy as np
import pytest

from kdisc.coreset import (HalvingConfig, build_eps_sample, eps_target_size, halve_once,
                           random_sample_baseline)
from kdisc.errors import UsageError
from kdisc.geometry import KernelSpec
from kdisc.kde import KdeQuery, linf_distance

G = KernelSpec("gaussian")


@pytest.mark.parametrize("n,want", [(2, 1), (4, 2), (5, 3), (101, 51)])
def test_halve_once_sizes(n, want):
    P = np.random.default_rng(n).random((n, 2))
    kept, rec = halve_once(P, HalvingConfig(G, size=1))
    assert len(kept) == want and rec.size_after == want
    assert np.all(np.diff(kept) > 0)


def test_leftover_is_kept():
    P = np.array([[0, 0], [0.1, 0], [5, 5], [1, 0], [1.1, 0]])
    for seed in range(10):
        kept, _ = halve_once(P, HalvingConfig(G, size=1, seed=seed))
        assert 2 in kept


def test_size_equal_to_input_returns_input():
    P = np.random.default_rng(0).random((10, 2))
    res = build_eps_sample(P, HalvingConfig(G, size=10))
    assert res.levels == [] and np.array_equal(res.indices, np.arange(10))


def test_large_target_returns_input_with_note():
    P = np.random.default_rng(0).random((5, 2))
    res = build_eps_sample(P, HalvingConfig(G, eps=0.1))
    assert len(res.indices) == 5 and res.note


def test_copies_of_one_point_collapse_with_zero_error():
    P = np.tile([[0.3, 0.7]], (64, 1))
    res = build_eps_sample(P, HalvingConfig(G, size=1), verify=True)
    assert len(res.indices) == 1 and len(res.levels) == 6
    assert res.measured_linf.value == pytest.approx(0.0, abs=1e-12)


def test_sample_is_subset_and_deterministic():
    P = np.random.default_rng(1).random((300, 2))
    cfg = HalvingConfig(G, eps=0.1, seed=4)
    a = build_eps_sample(P, cfg)
    b = build_eps_sample(P, cfg)
    assert np.array_equal(a.indices, b.indices)
    assert np.array_equal(a.sample, P[a.indices])
    assert len(np.unique(a.indices)) == len(a.indices)
    assert len(a.indices) <= a.target_size
    c = build_eps_sample(P, HalvingConfig(G, eps=0.1, seed=5))
    assert not np.array_equal(a.indices, c.indices)


def test_levels_telescope_within_error_sum():
    P = np.random.default_rng(2).random((256, 2))
    res = build_eps_sample(P, HalvingConfig(G, size=16), record_disc=True, verify=True)
    sizes = [lv.size_before for lv in res.levels] + [res.levels[-1].size_after]
    assert sizes == [256, 128, 64, 32, 16]
    # each level moves the KDE by disc / size_before; the total is bounded by the sum
    step = sum(lv.disc_upper / lv.size_before for lv in res.levels)
    assert res.measured_linf.value <= step + 1e-9


def test_duplicated_input_halves_to_original_shape():
    P = np.random.default_rng(3).random((32, 2))
    res = build_eps_sample(np.vstack([P, P]), HalvingConfig(G, size=32), verify=True)
    assert len(res.indices) == 32
    # pairs of coincident copies match at zero cost, so one copy of each point is kept
    assert sorted(np.mod(res.indices, 32).tolist()) == list(range(32))
    assert res.measured_linf.value == pytest.approx(0.0, abs=1e-12)


def test_halving_beats_random_at_equal_size():
    P = np.random.default_rng(4).random((1024, 2))
    res = build_eps_sample(P, HalvingConfig(G, size=32))
    q = KdeQuery(P, G)
    h = linf_distance(q, KdeQuery(res.sample, G), max_centers=200_000).value
    r = np.median([linf_distance(q, KdeQuery(P[random_sample_baseline(P, 32, s)], G),
                                 max_centers=200_000).value for s in range(5)])
    assert h < r


def test_eps_target_size_examples():
    assert eps_target_size(0.1, 2) == pytest.approx(10 * np.log(10) ** 0.5)
    assert eps_target_size(0.5, 2) == pytest.approx(2.0)
    assert eps_target_size(0.1, 2, c=2) == pytest.approx(2 * eps_target_size(0.1, 2))


def test_config_validation():
    for kw in [{}, {"eps": 0.1, "size": 3}, {"eps": 1.0}, {"size": 0}, {"eps": 0.1, "matching_algo": "x"},
               {"eps": 0.1, "c": 0}, {"eps": 0.1, "phi": 1.0}]:
        with pytest.raises(UsageError):
            HalvingConfig(G, **kw)
    with pytest.raises(UsageError):
        build_eps_sample(np.zeros((3, 2)), HalvingConfig(G, size=4))


def test_random_baseline():
    P = np.random.default_rng(0).random((20, 2))
    idx = random_sample_baseline(P, 5, 1)
    assert len(set(idx.tolist())) == 5 and np.all(np.diff(idx) > 0)
    assert np.array_equal(idx, random_sample_baseline(P, 5, 1))
    for bad in (0, 21):
        with pytest.raises(UsageError):
            random_sample_baseline(P, bad, 1)
