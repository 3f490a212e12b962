"""Acceptance criteria 1-9 at their stated tolerances and runtime budgets.

Each test prints one PASS/FAIL line; the lines are repeated in the pytest
terminal summary.  The full module takes roughly 30 minutes on one core.
"""

import json
import math
import time

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES
from kdisc.cli import main
from kdisc.experiments import ExperimentSpec, generate, run_experiment
from kdisc.pointio import write_points

pytestmark = pytest.mark.slow


def report(num, title, ok, detail, elapsed, budget_s):
    in_time = elapsed < budget_s
    line = (f"criterion {num} {'PASS' if ok and in_time else 'FAIL'}: {title}: {detail} "
            f"[{elapsed:.0f}s of {budget_s:.0f}s]")
    print(line)
    ACCEPTANCE_LINES.append(line)
    return in_time


def check(num, title, spec, budget_s, detail):
    t0 = time.time()
    res = run_experiment(spec)
    elapsed = time.time() - t0
    in_time = report(num, title, res.passed, detail(res.summary), elapsed, budget_s)
    failed = [a for a in res.summary["assertions"] if not a["passed"]]
    assert not failed, failed
    assert in_time
    return res


def test_c1_matching_oracle():
    check(1, "exact matching equals brute force", ExperimentSpec("matching_oracle"), 60,
          lambda s: f"200 instances, max cost difference {s['worst']:.2e}")


def test_c2_rho_boundedness():
    spec = ExperimentSpec("rho_growth", generator="uniform-disk", n_grid=[64, 256, 1024, 4096], trials=20)
    check(2, "rho(unit disk, M*) does not grow", spec, 600,
          lambda s: f"medians {[round(m, 3) for m in s['medians']]}, ratio 4096/256 = {s['ratio']:.3f} (<= 1.5)")


def test_c3_chernoff_soundness():
    spec = ExperimentSpec("chernoff", n_grid=[64], trials=20, max_centers=250_000)
    check(3, "Chernoff tail bound holds", spec, 300,
          lambda s: f"20 instances x 1e4 colorings, max tail - bound - 3SE = {s['worst_excess']:.3g} (<= 0)")


def test_c4_discrepancy_growth():
    spec = ExperimentSpec("disc_growth", n_grid=[64, 256, 1024, 4096], kernels=["gaussian", "triangle"],
                          trials=20, matching="exact")
    check(4, "matching vs random discrepancy growth", spec, 1800,
          lambda s: "exact matching; slopes " + ", ".join(f"{k} {v:.3f}" for k, v in s["slopes"].items()))


def test_c5_eps_sample_certification(tmp_path, capsys):
    t0 = time.time()
    lines, ok = [], True
    for eps in (0.1, 0.05, 0.02):
        cap = 4 / eps * math.sqrt(max(1.0, math.log(1 / eps)))
        hits, sizes, errs = 0, [], []
        for seed in range(5):
            pts = tmp_path / f"p{seed}.csv"
            write_points(pts, generate("uniform-square", 4096, 2, seed))
            code = main(["sample", str(pts), "--eps", str(eps), "--verify", "--seed", str(seed), "--quiet"])
            out = json.loads(capsys.readouterr().out)
            hits += code == 0 and out["measured_linf"]["value"] <= eps
            sizes.append(out["size"])
            errs.append(out["measured_linf"]["value"])
        ok &= hits >= 4 and max(sizes) <= cap
        lines.append(f"eps={eps}: {hits}/5 within eps, sizes {sorted(set(sizes))} (cap {cap:.0f}), "
                     f"worst L-inf {max(errs):.4f}")
    in_time = report(5, "sample --verify meets eps", ok, "; ".join(lines), time.time() - t0, 1200)
    assert ok, lines
    assert in_time


def test_c6_baseline_separation():
    spec = ExperimentSpec("eps_frontier", eps_grid=[0.1, 0.05, 0.02, 0.01])
    check(6, "random vs halving size frontier", spec, 2700,
          lambda s: f"sizes {s['sizes']}, slopes halving {s['slopes']['halving']:.3f} (<= 1.25), "
                    f"random {s['slopes']['random']:.3f} (>= 1.6)")


def test_c7_size_floor():
    spec = ExperimentSpec("size_floor", eps_grid=[0.1, 0.05, 0.02, 0.01])
    check(7, "ceil(1/eps) - 1 size floor", spec, 60,
          lambda s: "; ".join(f"eps={c['eps']}: t={c['t']}, min error {c['min_error_missing_site']:.4f}, "
                              f"halving keeps {c['halving_sites']}/{c['t']} sites" for c in s["checks"]))


def test_c8_delta_kernel():
    spec = ExperimentSpec("delta_kernel", eta_grid=[1, 2, 4, 8, 10])
    check(8, "delta-kernel discrepancy grows linearly", spec, 120,
          lambda s: f"min disc {[round(v, 4) for v in s['min_disc']]}, slope {s['slope']:.4f} (1 +- 0.1)")


def test_c9_annulus_superadditivity():
    spec = ExperimentSpec("annulus", options={"configs": 500})
    check(9, "annulus superadditivity", spec, 60,
          lambda s: f"500 configurations, max excess {s['worst_excess']:.2e} (<= 1e-9)")
