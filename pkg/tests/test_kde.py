import math

import numpy as np
import pytest

from kdisc.errors import UsageError
from kdisc.geometry import KernelSpec
from kdisc.kde import KdeQuery, difference_on_grid, kde_at, kde_values, linf_distance

G = KernelSpec("gaussian")
T = KernelSpec("triangle")


def test_kde_at_examples():
    assert kde_at(KdeQuery([[0, 0]], G), [0, 0]) == 1.0
    assert kde_at(KdeQuery([[0, 0], [0, 0]], T), [0.5, 0]) == pytest.approx(0.5)


def test_kde_by_hand_collinear():
    q = KdeQuery([[0, 0], [1, 0], [2, 0]], G)
    want = (math.exp(-1) + 1 + math.exp(-1)) / 3
    assert kde_at(q, [1, 0]) == pytest.approx(want, abs=1e-15)


def test_kde_values_match_pointwise():
    rng = np.random.default_rng(0)
    for k in (G, T, KernelSpec("epanechnikov", 0.7, 2), KernelSpec("ball", 0.5, 2)):
        q = KdeQuery(rng.random((40, 2)), k)
        X = rng.random((25, 2))
        want = [kde_at(q, x) for x in X]
        assert kde_values(q, X) == pytest.approx(want, abs=1e-12)


def test_linf_identical_sets_is_zero():
    P = np.random.default_rng(1).random((20, 2))
    rep = linf_distance(KdeQuery(P, G), KdeQuery(P.copy(), G))
    assert rep.value == pytest.approx(0.0, abs=1e-12)


def test_linf_far_singletons():
    # two far points: the difference peaks at 1 at either site; the average
    # of two such sets, [a] vs [a, b], differs by 1/2 at a
    a, b = [0.0, 0.0], [100.0, 0.0]
    rep = linf_distance(KdeQuery([a], T), KdeQuery([a, b], T))
    assert rep.value == pytest.approx(0.5, abs=1e-9)
    assert rep.upper_bound >= 0.5
    rep = linf_distance(KdeQuery([a], G), KdeQuery([b], G))
    assert rep.value == pytest.approx(1.0, abs=1e-9)


def test_linf_symmetric():
    rng = np.random.default_rng(2)
    A, B = rng.random((30, 2)), rng.random((15, 2))
    r1 = linf_distance(KdeQuery(A, G), KdeQuery(B, G))
    r2 = linf_distance(KdeQuery(B, G), KdeQuery(A, G))
    assert r1.value == pytest.approx(r2.value, rel=1e-9)


def test_linf_bracket_and_refinement():
    rng = np.random.default_rng(3)
    A, B = rng.random((30, 2)), rng.random((10, 2))
    q1, q2 = KdeQuery(A, T), KdeQuery(B, T)
    coarse = linf_distance(q1, q2, 0.02, polish=False)
    fine = linf_distance(q1, q2, 0.01, polish=False)
    # nested grids: the finer maximum can only grow, and stays under the coarse bound
    assert fine.value >= coarse.value - 1e-12
    assert fine.value <= coarse.value + coarse.slack
    assert fine.value + fine.slack <= coarse.value + coarse.slack + 1e-12
    assert fine.value <= coarse.upper_bound
    polished = linf_distance(q1, q2, 0.02)
    assert coarse.value - 1e-12 <= polished.value <= coarse.upper_bound


def test_triangle_inequality_within_slack():
    rng = np.random.default_rng(6)
    q = [KdeQuery(rng.random((m, 2)), G) for m in (40, 12, 7)]
    r = {(i, j): linf_distance(q[i], q[j], 0.01) for i in range(3) for j in range(3) if i < j}
    slack = max(x.slack for x in r.values())
    assert r[0, 2].value <= r[0, 1].value + r[1, 2].value + 2 * slack


def test_normalisation():
    q = KdeQuery(np.tile([[0.2, 0.4]], (5, 1)), T)
    assert kde_at(q, [0.2, 0.4]) == 1.0
    X = np.random.default_rng(7).random((200, 2))
    assert kde_values(KdeQuery(X, G), X).max() <= 1.0


def test_gaussian_curvature_slack_reported():
    rng = np.random.default_rng(4)
    rep = linf_distance(KdeQuery(rng.random((20, 2)), G), KdeQuery(rng.random((5, 2)), G))
    assert rep.curvature_slack is not None and rep.curvature_slack < rep.slack
    assert rep.upper_bound >= rep.value


def test_ball_kernel_reports_lower_bound_only():
    rng = np.random.default_rng(5)
    k = KernelSpec("ball")
    rep = linf_distance(KdeQuery(rng.random((10, 2)), k), KdeQuery(rng.random((4, 2)), k))
    assert rep.slack is None and rep.upper_bound is None
    assert rep.label == "grid lower bound only"
    assert 0 < rep.value <= 1


def test_kernel_mismatch_rejected():
    with pytest.raises(UsageError):
        linf_distance(KdeQuery([[0, 0]], G), KdeQuery([[0, 0]], T))
    with pytest.raises(UsageError):
        KdeQuery(np.zeros((0, 2)), G)


def test_difference_on_grid_shapes():
    C, V = difference_on_grid(KdeQuery([[0, 0]], T), KdeQuery([[0.5, 0]], T), 0.1)
    assert C.shape == (len(V), 2)
    assert np.max(np.abs(V)) <= 0.5 + 1e-12
