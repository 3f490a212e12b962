import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from kdisc.discrepancy import (build_net, chernoff_bound, color_from_matching, disc_at, disc_max,
                               jensen_transfer, min_disc_bruteforce, pair_deltas, random_coloring)
from kdisc.errors import UnsupportedKernelError, UsageError
from kdisc.geometry import KernelSpec
from kdisc.matching import Matching, min_cost_matching_exact

G = KernelSpec("gaussian")
T = KernelSpec("triangle")


def direct_disc(P, signs, fam, x):
    # independent re-summation with scalar math
    total = 0.0
    for p, s in zip(P, signs):
        z = math.dist(x, p)
        k = math.exp(-z * z) if fam == "gaussian" else max(0.0, 1.0 - z)
        total += s * k
    return abs(total)


def test_coloring_pairs_are_antisymmetric_and_leftover_positive():
    rng = np.random.default_rng(0)
    P = rng.random((21, 2))
    M = min_cost_matching_exact(P)
    for seed in range(20):
        chi = color_from_matching(M, seed)
        assert np.all(chi.signs[M.pairs[:, 0]] == -chi.signs[M.pairs[:, 1]])
        assert chi.signs[M.leftover] == 1


def test_coloring_deterministic_per_seed_and_fair():
    M = Matching(np.array([[0, 1]]), 1.0, 2)
    assert np.array_equal(color_from_matching(M, 42).signs, color_from_matching(M, 42).signs)
    first = [color_from_matching(M, s).signs[0] for s in range(4000)]
    assert abs(np.mean(np.array(first) == 1) - 0.5) < 0.03


def test_random_coloring_deterministic():
    assert np.array_equal(random_coloring(50, 3).signs, random_coloring(50, 3).signs)
    assert not np.array_equal(random_coloring(50, 3).signs, random_coloring(50, 4).signs)


def test_disc_at_examples():
    assert disc_at([[0, 0], [0, 0]], [1, -1], G, [0.3, 0.1]) == 0.0
    P = [[0, 0], [0.5, 0]]
    assert disc_at(P, [1, -1], T, [0, 0]) == pytest.approx(0.5)
    assert disc_at(P, [-1, 1], T, [0, 0]) == pytest.approx(0.5)


@pytest.mark.parametrize("fam", ["gaussian", "triangle"])
def test_disc_at_matches_direct_summation(fam):
    rng = np.random.default_rng(8)
    P = rng.random((8, 2))
    s = rng.choice([-1, 1], 8)
    k = KernelSpec(fam)
    for x in rng.random((10, 2)) * 2 - 0.5:
        assert disc_at(P, s, k, x) == pytest.approx(direct_disc(P, s, fam, x), abs=1e-12)


def test_build_net_examples():
    net = build_net([[0.0, 0.0]], T)
    assert net.tau == 1.0 and net.radius == 1.0
    rng = np.random.default_rng(0)
    net = build_net(rng.random((100, 2)), G)
    assert net.tau == pytest.approx(0.01)
    assert net.radius == pytest.approx(math.sqrt(math.log(200)))
    with pytest.raises(UnsupportedKernelError):
        build_net([[0.0, 0.0]], KernelSpec("ball"))


def test_net_covers_region():
    rng = np.random.default_rng(1)
    P = rng.random((6, 2))
    net = build_net(P, T, tau=0.05)
    C = net.centers
    # random points of the covered region are within tau of some center
    X = P[rng.integers(0, 6, 2000)] + (rng.random((2000, 2)) * 2 - 1) * net.radius / math.sqrt(2)
    d = np.min(np.linalg.norm(X[:, None, :] - C[None, :, :], axis=2), axis=1)
    assert d.max() <= net.tau


def test_two_far_points_give_two_patches():
    P = np.array([[0.0, 0.0], [10.0, 0.0]])
    net = build_net(P, T, tau=0.1)
    C = net.centers
    assert not np.any((C[:, 0] > 1.3) & (C[:, 0] < 8.7))
    assert np.any(C[:, 0] < 1.3) and np.any(C[:, 0] > 8.7)


def test_center_cap_coarsens_and_reports():
    P = np.random.default_rng(2).random((500, 2))
    net = build_net(P, G, max_centers=20_000)
    assert net.coarsened and net.tau > net.tau_target
    assert net.grid.size <= 20_000


def test_disc_max_examples():
    P = [[0, 0], [0, 0], [1, 1], [1, 1]]
    net = build_net(P, G, tau=0.05)
    assert disc_max(P, [1, -1, -1, 1], G, net).max_disc == pytest.approx(0.0, abs=1e-12)
    P = np.array([[0, 0], [0.5, 0]])
    net = build_net(P, T)
    rep = disc_max(P, [1, -1], T, net)
    assert rep.max_disc == pytest.approx(0.5, abs=1e-9)
    assert rep.grid_max <= 0.5 + 1e-12
    assert 0.5 - rep.grid_max <= rep.additive_error
    with pytest.raises(UsageError):
        disc_max(P, [1, -1, 1], T, net)


def test_disc_max_certificate_brackets_fine_scan():
    rng = np.random.default_rng(4)
    P = rng.random((30, 2))
    chi = color_from_matching(min_cost_matching_exact(P), 1)
    net = build_net(P, G)
    rep = disc_max(P, chi, G, net, polish=False)
    fine = disc_max(P, chi, G, build_net(P, G, tau=net.tau / 4))
    assert rep.max_disc <= fine.max_disc + 1e-12
    assert fine.max_disc <= rep.upper_bound
    # refining by 4x moves the net maximum by at most tau * n * sigma
    assert fine.max_disc - rep.max_disc <= rep.additive_error


def test_matching_beats_random_coloring():
    P = np.random.default_rng(6).random((1024, 2))
    M = min_cost_matching_exact(P)
    net = build_net(P, G, max_centers=100_000)
    a = disc_max(P, color_from_matching(M, 0), G, net).max_disc
    b = disc_max(P, random_coloring(1024, 0), G, net).max_disc
    assert a < b


def test_disc_bounded_by_half_delta_sum():
    rng = np.random.default_rng(9)
    P = rng.random((31, 2))
    M = min_cost_matching_exact(P)
    chi = color_from_matching(M, 5)
    for x in rng.random((50, 2)):
        assert disc_at(P, chi, G, x) <= pair_deltas(P, M, G, x).sum() / 2 + 1 + 1e-12


def test_chernoff_examples():
    # one pair with Delta = 1 at x: K(x,p) - K(x,q) = 1/2
    P = np.array([[0.0, 0.0], [0.5, 0.0]])
    M = Matching(np.array([[0, 1]]), 0.5, 2)
    assert pair_deltas(P, M, T, [0, 0]) == pytest.approx([1.0])
    assert chernoff_bound(P, M, T, [0, 0], 1.0) == pytest.approx(2 * math.exp(-2))
    Pc = np.zeros((2, 2))
    assert chernoff_bound(Pc, M, G, [0.3, 0], 0.1) == 0.0
    with pytest.raises(UsageError):
        chernoff_bound(P, M, T, [0, 0], 0.0)


def test_chernoff_tail_monte_carlo():
    rng = np.random.default_rng(12)
    P = rng.random((64, 2))
    M = min_cost_matching_exact(P)
    x = P[0]
    d = pair_deltas(P, M, G, x) / 2
    signs = rng.choice([-1.0, 1.0], size=(10_000, len(d)))
    vals = np.abs(signs @ d)
    for q in (0.5, 0.9, 0.99):
        a = float(np.quantile(vals, q))
        p = float(np.mean(vals > a))
        se = math.sqrt(p * (1 - p) / len(vals))
        assert p <= chernoff_bound(P, M, G, x, a) + 3 * se


def test_jensen_transfer():
    d = np.array([0.1, 0.5, 0.3])
    assert jensen_transfer(d, 3, 2) == pytest.approx(np.sum(d ** 2))
    eq = np.full(5, 0.2)
    assert jensen_transfer(eq, 5, 3) == pytest.approx(np.sum(eq ** 2))
    with pytest.raises(UsageError):
        jensen_transfer(d, 3, 1)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.floats(0, 2), min_size=1, max_size=20), st.integers(2, 6))
def test_jensen_transfer_bounds_sum_of_squares(deltas, d):
    assert np.sum(np.square(deltas)) <= jensen_transfer(deltas, len(deltas), d) * (1 + 1e-12) + 1e-300


def test_min_disc_bruteforce_examples():
    net = build_net([[0, 0], [0, 0]], G, tau=0.1)
    assert min_disc_bruteforce([[0, 0], [0, 0]], G, net) == pytest.approx(0.0, abs=1e-15)
    P = np.array([[0.0], [1.0], [10.0], [11.0]])
    k = KernelSpec("gaussian", dim=1)
    net = build_net(P, k)
    best = min_disc_bruteforce(P, k, net)
    M = min_cost_matching_exact(P)
    for s in range(10):
        assert disc_max(P, color_from_matching(M, s), k, net).max_disc >= best - 1e-9
    with pytest.raises(UsageError):
        min_disc_bruteforce(np.zeros((17, 1)), k, net)


def test_matching_coloring_near_optimum_for_small_n():
    P = np.random.default_rng(3).random((10, 2))
    net = build_net(P, G, tau=0.05)
    best = min_disc_bruteforce(P, G, net)
    M = min_cost_matching_exact(P)
    vals = [disc_max(P, color_from_matching(M, s), G, net).max_disc for s in range(100)]
    assert np.median(vals) <= 4 * best
