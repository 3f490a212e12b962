import csv
import math

import numpy as np
import pytest

from kdisc.errors import UsageError
from kdisc.experiments import (CSV_HEADER, GENERATORS, ExperimentSpec, delta_kernel_instance, generate,
                               loglog_slope, run_delta_kernel_demo, run_experiment, size_floor_check)


@pytest.mark.parametrize("name", sorted(GENERATORS))
def test_generators_are_deterministic(name):
    n = 31 if name == "isolated-point" else 40
    a = generate(name, n, 2, 5)
    assert a.shape == (n, 2) and np.all(np.isfinite(a))
    assert np.array_equal(a, generate(name, n, 2, 5))


def test_generator_shapes():
    assert np.all((generate("uniform-cube", 500, 3, 0) >= 0) & (generate("uniform-cube", 500, 3, 0) < 1))
    assert np.linalg.norm(generate("uniform-disk", 500, 2, 0), axis=1).max() <= 1
    r = np.linalg.norm(generate("annulus", 500, 2, 0, inner=0.5, outer=1.0), axis=1)
    assert r.min() >= 0.5 and r.max() <= 1
    C = generate("coincident-clusters", 10, 2, t=3)
    assert len(np.unique(C, axis=0)) == 3
    T = generate("two-site", 6, 2)
    assert np.count_nonzero(T[:, 0] == 10) == 3
    I = generate("isolated-point", 5, 2, separation=10, pair_gap=0.1)
    assert I[0].tolist() == [0, 0] and np.min(np.linalg.norm(I[1:], axis=1)) >= 10


def test_generator_errors():
    with pytest.raises(UsageError):
        generate("hexagon", 5)
    with pytest.raises(UsageError):
        generate("uniform-square", 0)
    with pytest.raises(UsageError):
        generate("isolated-point", 4)
    with pytest.raises(UsageError):
        generate("uniform-square", 4, 2, 0, bogus=1)


def test_spec_validation():
    with pytest.raises(UsageError):
        ExperimentSpec("not-a-kind")
    with pytest.raises(UsageError):
        ExperimentSpec("disc_growth", trials=0)
    with pytest.raises(UsageError):
        ExperimentSpec("disc_growth", n_grid=[256, 64])
    with pytest.raises(UsageError):
        ExperimentSpec("eps_frontier", eps_grid=[0.1, 1.5])
    with pytest.raises(UsageError):
        ExperimentSpec.from_dict({"kind": "annulus", "colour": "red"})
    s = ExperimentSpec.from_dict({"kind": "chernoff", "kernel": "triangle"})
    assert s.kernels == ["triangle"]


def test_config_hash_tracks_config():
    a = ExperimentSpec("annulus", seed=1)
    assert a.config_hash() == ExperimentSpec("annulus", seed=1).config_hash()
    assert a.config_hash() != ExperimentSpec("annulus", seed=2).config_hash()


def test_loglog_slope():
    x = [1, 2, 4, 8]
    assert loglog_slope(x, [3 * v ** 1.5 for v in x]) == pytest.approx(1.5)


def test_coincident_clusters_have_zero_matching_discrepancy(tmp_path):
    spec = ExperimentSpec("disc_growth", generator="coincident-clusters", generator_params={"t": 4},
                          n_grid=[16, 64], trials=2, max_centers=20_000)
    res = run_experiment(spec)
    vals = [r.value for r in res.rows if r.metric == "disc_max" and r.method == "matching"]
    assert len(vals) == 4 and max(vals) == pytest.approx(0.0, abs=1e-12)
    path = tmp_path / "t.csv"
    res.write_csv(path)
    with open(path) as fh:
        rows = list(csv.reader(fh))
    assert tuple(rows[0]) == CSV_HEADER
    assert len(rows) == len(res.rows) + 1
    assert all(r[1] == spec.config_hash() for r in rows[1:])


def test_rerun_reproduces_rows():
    spec = ExperimentSpec("rho_growth", generator="uniform-disk", n_grid=[64, 256], trials=3)
    a, b = run_experiment(spec), run_experiment(spec)
    assert [r.value for r in a.rows] == [r.value for r in b.rows]


@pytest.mark.parametrize("eps", [0.1, 0.05, 0.02, 0.01])
def test_size_floor(eps):
    c = size_floor_check(eps)
    assert c["t"] == math.ceil(1 / eps) - 1
    assert c["floor_holds"] and c["halving_keeps_all_sites"]


def test_delta_kernel_instance():
    k, P = delta_kernel_instance(4.0)
    assert k.peak == pytest.approx(4.0)
    assert len(P) == 9
    res = run_delta_kernel_demo([1, 2], max_centers=50_000)
    assert res.summary["min_disc"][0] == pytest.approx(1.0, abs=0.05)
    assert res.summary["min_disc"][1] == pytest.approx(2.0, abs=0.1)
    with pytest.raises(UsageError):
        delta_kernel_instance(0.5)


def test_small_frontier_sweep_runs():
    spec = ExperimentSpec("eps_frontier", eps_grid=[0.2, 0.1], options={
        "probe_trials": 1, "probe_accept": 1, "rel_tol": 0.5, "halving_pool": 256, "random_pool": 1024,
        "floor_check": False}, max_centers=20_000)
    res = run_experiment(spec)
    assert set(res.summary["sizes"]) == {"halving", "random"}
    assert all(v >= 1 for vs in res.summary["sizes"].values() for v in vs)
