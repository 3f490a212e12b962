"""Point generators and scripted experiment sweeps.

Every sweep returns an ``ExperimentResult``: long-format rows (one value per
row, each carrying its seed and the config hash) and a summary with the
fitted slopes and pass/fail per assertion.  The assertion thresholds are
calibration choices, not constants derived from theory.
"""

from __future__ import annotations

import csv
import hashlib
import itertools
import json
import logging
import math
import time
from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np

from kdisc.coreset import HalvingConfig, build_eps_sample, eps_target_size, random_sample_baseline
from kdisc.discrepancy import (build_net, chernoff_from_sum, color_from_matching, disc_max,
                               min_disc_bruteforce, random_coloring)
from kdisc.errors import UsageError
from kdisc.geometry import Ball, KernelSpec, kernel_matrix, parse_kernel
from kdisc.kde import KdeQuery, linf_distance
from kdisc.matching import (Annulus, Matching, min_cost_matching, min_cost_matching_bruteforce,
                            min_cost_matching_exact, rho_annulus, rho_ball)
from kdisc.rng import derive_seed, make_rng

log = logging.getLogger(__name__)

RESULTS_VERSION = 1
CSV_HEADER = ("experiment", "config_hash", "kernel", "method", "n", "eps", "trial", "seed",
              "metric", "value")


# -- generators ----------------------------------------------------------------

GENERATORS: dict[str, Callable] = {}


def _generator(*names):
    def deco(fn):
        for name in names:
            GENERATORS[name] = fn
        return fn
    return deco


@_generator("uniform-square", "uniform-cube")
def _uniform_cube(n, dim, rng):
    return rng.random((n, dim))


@_generator("uniform-disk", "uniform-ball")
def _uniform_ball(n, dim, rng, radius=1.0):
    g = rng.standard_normal((n, dim))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    return g * (radius * rng.random(n) ** (1.0 / dim))[:, None]


@_generator("gaussian-mixture")
def _gaussian_mixture(n, dim, rng, k=3, spread=0.05):
    centers = rng.random((int(k), dim))
    z = rng.integers(0, int(k), size=n)
    return centers[z] + spread * rng.standard_normal((n, dim))


@_generator("annulus")
def _annulus(n, dim, rng, inner=0.5, outer=1.0):
    if not 0 <= inner < outer:
        raise UsageError("annulus generator needs 0 <= inner < outer")
    g = rng.standard_normal((n, dim))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    r = (inner ** dim + rng.random(n) * (outer ** dim - inner ** dim)) ** (1.0 / dim)
    return g * r[:, None]


@_generator("coincident-clusters")
def _coincident_clusters(n, dim, rng, t=2, separation=2.0):
    t = int(t)
    if not 1 <= t <= n:
        raise UsageError(f"coincident-clusters needs 1 <= t <= n, got t={t}, n={n}")
    counts = np.full(t, n // t)
    counts[: n % t] += 1
    sites = np.zeros((t, dim))
    sites[:, 0] = separation * np.arange(t)
    return np.repeat(sites, counts, axis=0)


@_generator("two-site")
def _two_site(n, dim, rng, separation=10.0):
    P = np.zeros((n, dim))
    P[n // 2:, 0] = separation
    return P


@_generator("isolated-point")
def _isolated_point(n, dim, rng, separation=10.0, pair_gap=0.0, pair_spacing=3.0):
    """One point at the origin and (n-1)/2 tight pairs far along the first axis."""
    if n % 2 == 0:
        raise UsageError("isolated-point needs an odd n")
    m = (n - 1) // 2
    P = np.zeros((n, dim))
    for j in range(m):
        base = separation + pair_spacing * j
        P[1 + 2 * j, 0] = base
        P[2 + 2 * j, 0] = base
        if dim > 1:
            P[2 + 2 * j, 1] = pair_gap
        else:
            P[2 + 2 * j, 0] += pair_gap
    return P


def generate(name: str, n: int, dim: int = 2, seed: int | None = 0, **params) -> np.ndarray:
    """Deterministic point set from a named generator."""
    if name not in GENERATORS:
        raise UsageError(f"unknown generator {name!r}; choose from {sorted(GENERATORS)}")
    if n < 1 or dim < 1:
        raise UsageError("n and dim must be >= 1")
    try:
        return GENERATORS[name](int(n), int(dim), make_rng(seed, "generate", name), **params)
    except TypeError as exc:
        raise UsageError(f"bad parameters for generator {name!r}: {exc}") from None


# -- spec and results ------------------------------------------------------------

KINDS = ("disc_growth", "eps_frontier", "delta_kernel", "rho_growth", "chernoff",
         "size_floor", "annulus", "matching_oracle")


@dataclass
class ExperimentSpec:
    kind: str
    generator: str = "uniform-square"
    generator_params: dict = field(default_factory=dict)
    dim: int = 2
    n_grid: list = field(default_factory=lambda: [64, 256, 1024, 4096])
    eps_grid: list = field(default_factory=lambda: [0.1, 0.05, 0.02, 0.01])
    eta_grid: list = field(default_factory=lambda: [1, 2, 4, 8, 10])
    kernels: list = field(default_factory=lambda: ["gaussian"])
    trials: int = 20
    seed: int = 0
    matching: str = "exact"
    max_centers: int = 250_000
    outputs: dict = field(default_factory=dict)
    options: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise UsageError(f"unknown experiment kind {self.kind!r}; choose from {KINDS}")
        if isinstance(self.kernels, str):
            self.kernels = [self.kernels]
        if self.trials < 1:
            raise UsageError("trials must be >= 1")
        if list(self.n_grid) != sorted(self.n_grid):
            raise UsageError("n_grid must be ascending")
        if any(not 0 < e < 1 for e in self.eps_grid):
            raise UsageError("eps_grid values must lie in (0, 1)")
        for k in self.kernels:
            parse_kernel(k, self.dim)

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentSpec":
        d = dict(d)
        if "kernel" in d:
            d["kernels"] = d.pop("kernel")
        known = set(cls.__dataclass_fields__)
        unknown = set(d) - known
        if unknown:
            raise UsageError(f"unknown experiment spec fields: {sorted(unknown)}")
        return cls(**d)

    def config_hash(self) -> str:
        blob = json.dumps(asdict(self), sort_keys=True, default=str)
        return hashlib.sha256(blob.encode()).hexdigest()[:12]

    def kernel_specs(self):
        return [parse_kernel(k, self.dim) for k in self.kernels]


@dataclass(frozen=True)
class ResultRow:
    experiment: str
    config_hash: str
    kernel: str
    method: str
    n: int | None
    eps: float | None
    trial: int | None
    seed: int | None
    metric: str
    value: float


@dataclass
class ExperimentResult:
    rows: list
    summary: dict

    @property
    def passed(self) -> bool:
        return all(a["passed"] for a in self.summary.get("assertions", []))

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(CSV_HEADER)
            for r in self.rows:
                w.writerow([_fmt(getattr(r, h)) for h in CSV_HEADER])


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v) if math.isfinite(v) else str(v)
    return v


def loglog_slope(x, y) -> float:
    """Least-squares slope of log y against log x."""
    x = np.log(np.asarray(x, dtype=np.float64))
    y = np.log(np.asarray(y, dtype=np.float64))
    return float(np.polyfit(x, y, 1)[0])


def _assertion(name, value, op, threshold):
    ok = {"<=": value <= threshold, ">=": value >= threshold}[op]
    return {"name": name, "value": float(value), "op": op, "threshold": float(threshold),
            "passed": bool(ok)}


class _Run:
    """Row collector bound to one spec."""

    def __init__(self, spec: ExperimentSpec):
        self.spec = spec
        self.hash = spec.config_hash()
        self.rows = []
        self.t0 = time.time()

    def add(self, metric, value, *, kernel="", method="", n=None, eps=None, trial=None, seed=None):
        self.rows.append(ResultRow(self.spec.kind, self.hash, kernel, method, n, eps, trial, seed,
                                   metric, float(value)))

    def result(self, assertions, **extra) -> ExperimentResult:
        summary = {
            "experiment": self.spec.kind,
            "config_hash": self.hash,
            "results_version": RESULTS_VERSION,
            "seed": self.spec.seed,
            "elapsed_s": time.time() - self.t0,
            "assertions": assertions,
            "passed": all(a["passed"] for a in assertions),
            "note": "assertion thresholds are calibration choices for desk-scale runs",
        }
        summary.update(extra)
        return ExperimentResult(self.rows, summary)

    def points(self, n, *tags):
        s = derive_seed(self.spec.seed, "points", n, *tags)
        return generate(self.spec.generator, n, self.spec.dim, s, **self.spec.generator_params), s


# -- sweeps ------------------------------------------------------------------------

def run_disc_growth(spec: ExperimentSpec) -> ExperimentResult:
    """Max discrepancy of matching and random colorings as n grows."""
    run = _Run(spec)
    kernels = spec.kernel_specs()
    med = {(str(k), m): [] for k in kernels for m in ("matching", "random")}
    for n in spec.n_grid:
        vals = {key: [] for key in med}
        for t in range(spec.trials):
            P, ps = run.points(n, t)
            M = min_cost_matching(P, spec.matching)
            cs = derive_seed(spec.seed, "coloring", n, t)
            colorings = {"matching": color_from_matching(M, cs), "random": random_coloring(n, cs)}
            for k in kernels:
                net = build_net(P, k, max_centers=spec.max_centers)
                for method, chi in colorings.items():
                    rep = disc_max(P, chi, k, net)
                    vals[(str(k), method)].append(rep.max_disc)
                    run.add("disc_max", rep.max_disc, kernel=str(k), method=method, n=n, trial=t, seed=cs)
                    run.add("net_tau", rep.tau, kernel=str(k), method=method, n=n, trial=t, seed=cs)
        for key, v in vals.items():
            med[key].append(float(np.median(v)))
        log.info("disc_growth n=%d done (%.0fs)", n, time.time() - run.t0)
    opts = spec.options
    assertions, slopes = [], {}
    for (ks, method), m in med.items():
        s = loglog_slope(spec.n_grid, m)
        slopes[f"{ks}/{method}"] = s
        run.add("median_slope", s, kernel=ks, method=method)
        if method == "matching":
            assertions.append(_assertion(f"{ks} matching slope", s, "<=", opts.get("matching_slope_max", 0.15)))
        else:
            assertions.append(_assertion(f"{ks} random slope", s, ">=", opts.get("random_slope_min", 0.35)))
    return run.result(assertions, slopes=slopes, medians={f"{k}/{m}": v for (k, m), v in med.items()},
                      matching=spec.matching)


def size_floor_check(eps: float, *, copies: int | None = None, dim: int = 2, seed: int = 0,
                     enumerate_max_t: int = 9, separation: float = 2.0) -> dict:
    """Check the ceil(1/eps) - 1 size floor on a t-cluster instance.

    Sites are ``separation`` apart with triangle kernels, so at a site the
    only contribution is its own.  A sample missing site i has error at
    ``x_i`` at least the distance from ``kde_P(x_i)`` to the range of values
    the other sites can produce there; the minimum of that over i bounds the
    error of every sample smaller than t.  For small t all multisets of size
    below t are also enumerated.
    """
    t = math.ceil(1.0 / eps) - 1
    if t < 1:
        raise UsageError("eps too large for a size floor")
    k = KernelSpec("triangle", dim=dim)
    sites = generate("coincident-clusters", t, dim, t=t, separation=separation)
    Ks = kernel_matrix(k, sites, sites)
    kde_site = Ks.mean(axis=1)
    bound = np.inf
    for i in range(t):
        others = np.delete(Ks[i], i)
        lo, hi = (others.min(), others.max()) if len(others) else (0.0, 0.0)
        gap = max(lo - kde_site[i], kde_site[i] - hi, 0.0)
        bound = min(bound, gap)
    out = {"eps": eps, "t": t, "min_error_missing_site": float(bound),
           "floor_holds": bool(bound > eps), "enumerated": False}
    if t <= enumerate_max_t:
        worst = np.inf
        for m in range(1, t):
            for combo in itertools.combinations_with_replacement(range(t), m):
                cnt = np.bincount(combo, minlength=t)
                err = np.abs(kde_site - Ks @ cnt / m).max()
                worst = min(worst, err)
        out.update(enumerated=True, min_error_enumerated=float(worst),
                   floor_holds=bool(out["floor_holds"] and worst > eps))
    if copies is None:
        # enough copies that halving runs at least one level
        copies = 2
        while t * copies < 2 * eps_target_size(eps, dim):
            copies *= 2
    P = np.repeat(sites, copies, axis=0)
    res = build_eps_sample(P, HalvingConfig(k, eps=eps, seed=seed))
    kept_sites = {tuple(np.round(p, 9)) for p in res.sample}
    out.update(copies=int(copies), halving_size=int(len(res.indices)),
               halving_sites=len(kept_sites), halving_keeps_all_sites=bool(len(kept_sites) == t))
    return out


def run_size_floor(spec: ExperimentSpec) -> ExperimentResult:
    run = _Run(spec)
    checks, assertions = [], []
    for eps in spec.eps_grid:
        c = size_floor_check(eps, dim=spec.dim, seed=spec.seed)
        checks.append(c)
        run.add("min_error_missing_site", c["min_error_missing_site"], kernel="triangle", eps=eps)
        run.add("halving_sites", c["halving_sites"], kernel="triangle", method="halving", eps=eps)
        assertions.append(_assertion(f"eps={eps} floor error margin", c["min_error_missing_site"] - eps, ">=", 1e-12))
        if c["enumerated"]:
            assertions.append(_assertion(f"eps={eps} enumerated margin", c["min_error_enumerated"] - eps, ">=", 1e-12))
        assertions.append(_assertion(f"eps={eps} halving sites missing", c["t"] - c["halving_sites"], "<=", 0))
    return run.result(assertions, checks=checks)


def _frontier_probe(run, method, k, eps, m, trial, opts):
    spec = run.spec
    s = derive_seed(spec.seed, "probe", method, eps, m, trial)
    cap = spec.max_centers
    if method == "halving":
        lo = int(opts.get("halving_pool", 2048))
        L = 0
        while m * 2 ** L < lo:
            L += 1
        P = generate(spec.generator, m * 2 ** L, spec.dim, s, **spec.generator_params)
        S = build_eps_sample(P, HalvingConfig(k, size=m, seed=s, matching_algo=spec.matching)).sample
    else:
        N = int(opts.get("random_pool", 16384))
        P = generate(spec.generator, max(N, m), spec.dim, s, **spec.generator_params)
        S = P[random_sample_baseline(P, m, s)]
    err = linf_distance(KdeQuery(P, k), KdeQuery(S, k), max_centers=cap).value
    run.add("linf", err, kernel=str(k), method=method, n=m, eps=eps, trial=trial, seed=s)
    return err


def required_size(run, method, k, eps, opts) -> int:
    """Smallest size whose probe meets eps in at least ``accept`` of ``trials``.

    Doubling brackets the size, then bisection narrows the bracket to a
    relative width of ``rel_tol``.  Every probe draws fresh point sets.
    """
    trials = int(opts.get("probe_trials", 5))
    accept = int(opts.get("probe_accept", 4))
    rel_tol = float(opts.get("rel_tol", 0.05))
    max_size = int(opts.get("max_size", 8192))
    cache = {}

    def ok(m):
        if m not in cache:
            hits = 0
            for t in range(trials):
                hits += _frontier_probe(run, method, k, eps, m, t, opts) <= eps
                if hits >= accept or hits + (trials - t - 1) < accept:
                    break
            cache[m] = hits >= accept
        return cache[m]

    lo, hi = 0, 1
    while not ok(hi):
        lo, hi = hi, hi * 2
        if hi > max_size:
            raise RuntimeError(f"{method} needs more than {max_size} points at eps={eps}")
    while hi - lo > max(1, rel_tol * lo):
        mid = (lo + hi) // 2
        if ok(mid):
            hi = mid
        else:
            lo = mid
    return hi


def run_eps_frontier(spec: ExperimentSpec) -> ExperimentResult:
    """Required sample size against 1/eps for halving and random sampling."""
    run = _Run(spec)
    opts = spec.options
    k = spec.kernel_specs()[0]
    methods = opts.get("methods", ["halving", "random"])
    sizes = {m: [] for m in methods}
    for eps in spec.eps_grid:
        for method in methods:
            m = required_size(run, method, k, eps, opts)
            sizes[method].append(m)
            run.add("required_size", m, kernel=str(k), method=method, eps=eps)
            log.info("frontier eps=%g %s -> %d (%.0fs)", eps, method, m, time.time() - run.t0)
    inv = [1.0 / e for e in spec.eps_grid]
    slopes = {m: loglog_slope(inv, v) for m, v in sizes.items()}
    assertions = []
    if "halving" in slopes:
        assertions.append(_assertion("halving size slope", slopes["halving"], "<=", opts.get("halving_slope_max", 1.25)))
    if "random" in slopes:
        assertions.append(_assertion("random size slope", slopes["random"], ">=", opts.get("random_slope_min", 1.6)))
    floors = []
    if opts.get("floor_check", True):
        for eps in spec.eps_grid:
            c = size_floor_check(eps, dim=spec.dim, seed=spec.seed)
            floors.append(c)
            assertions.append(_assertion(f"eps={eps} size floor", c["min_error_missing_site"] - eps, ">=", 1e-12))
    return run.result(assertions, sizes=sizes, slopes=slopes, floor_checks=floors)


def delta_kernel_instance(eta: float, dim: int = 2, n: int = 9, separation: float = 10.0,
                          gap_in_bandwidths: float = 0.25):
    """Kernel with peak eta and the isolated-point instance scaled to its bandwidth."""
    if eta < 1:
        raise UsageError("eta must be >= 1")
    w = eta ** (-1.0 / dim)
    k = KernelSpec("gaussian", w, dim)
    P = generate("isolated-point", n, dim, separation=separation, pair_gap=gap_in_bandwidths * w)
    return k, P


def run_delta_kernel(spec: ExperimentSpec) -> ExperimentResult:
    """Brute-force minimum discrepancy as the kernel peak eta grows."""
    run = _Run(spec)
    n = int(spec.options.get("n", 9))
    vals = []
    for eta in spec.eta_grid:
        k, P = delta_kernel_instance(eta, spec.dim, n)
        net = build_net(P, k, max_centers=spec.max_centers)
        v = min_disc_bruteforce(P, k, net)
        vals.append(v)
        run.add("min_disc", v, kernel=str(k), method="bruteforce", n=n, eps=None)
        run.add("eta", eta, kernel=str(k), n=n)
    slope, intercept = np.polyfit(np.asarray(spec.eta_grid, dtype=float), vals, 1)
    tol = spec.options.get("slope_tol", 0.1)
    assertions = [_assertion("linear slope deviation from 1", abs(slope - 1.0), "<=", tol)]
    return run.result(assertions, eta=list(spec.eta_grid), min_disc=vals, slope=float(slope),
                      intercept=float(intercept))


def run_rho_growth(spec: ExperimentSpec) -> ExperimentResult:
    """rho(unit ball, M*) for points uniform in the unit ball."""
    run = _Run(spec)
    B = Ball(np.zeros(spec.dim), 1.0)
    med = []
    for n in spec.n_grid:
        v = []
        for t in range(spec.trials):
            P, s = run.points(n, t)
            M = min_cost_matching(P, spec.matching)
            r = rho_ball(B, M, P)
            v.append(r)
            run.add("rho_ball", r, method=spec.matching, n=n, trial=t, seed=s)
        med.append(float(np.median(v)))
    ref = int(spec.options.get("reference_n", 256))
    if ref not in spec.n_grid:
        raise UsageError(f"reference_n {ref} is not in n_grid")
    ratio = med[-1] / med[spec.n_grid.index(ref)]
    assertions = [_assertion(f"median ratio n={spec.n_grid[-1]} / n={ref}", ratio, "<=",
                             spec.options.get("max_ratio", 1.5))]
    return run.result(assertions, medians=med, ratio=ratio)


def run_chernoff(spec: ExperimentSpec) -> ExperimentResult:
    """Empirical tail of the discrepancy at the highest-variance center."""
    run = _Run(spec)
    k = spec.kernel_specs()[0]
    n = int(spec.n_grid[0])
    colorings = int(spec.options.get("colorings", 10_000))
    alphas = spec.options.get("alphas", [0.5, 1.0, 2.0])
    worst_excess = -np.inf
    for t in range(spec.trials):
        P, s = run.points(n, t)
        M = min_cost_matching_exact(P)
        net = build_net(P, k, max_centers=spec.max_centers)
        Kc = kernel_matrix(k, net.centers, P)
        D = Kc[:, M.pairs[:, 0]] - Kc[:, M.pairs[:, 1]]
        s2_all = 4.0 * np.sum(D * D, axis=1)
        c = int(np.argmax(s2_all))
        x = net.centers[c]
        kx = Kc[c]
        vals = np.empty(colorings)
        for r in range(colorings):
            chi = color_from_matching(M, derive_seed(s, "tail", r))
            vals[r] = abs(chi.signs @ kx)
        for a in alphas:
            p = float(np.mean(vals > a))
            se = math.sqrt(p * (1 - p) / colorings)
            b = chernoff_from_sum(float(s2_all[c]), a)
            worst_excess = max(worst_excess, p - b - 3 * se)
            run.add(f"tail@{a:g}", p, kernel=str(k), method="matching", n=n, trial=t, seed=s)
            run.add(f"bound@{a:g}", b, kernel=str(k), method="matching", n=n, trial=t, seed=s)
            run.add(f"se@{a:g}", se, kernel=str(k), method="matching", n=n, trial=t, seed=s)
        run.add("center_x0", x[0], n=n, trial=t, seed=s)
    assertions = [_assertion("max of tail - bound - 3 SE", worst_excess, "<=", 0.0)]
    return run.result(assertions, worst_excess=float(worst_excess))


def random_annulus_config(rng, dim):
    """A random matching of a few points and a concentric ball pair."""
    m = int(rng.integers(1, 7))
    P = rng.uniform(-2.0, 2.0, size=(2 * m, dim))
    M = Matching(np.arange(2 * m).reshape(m, 2), 0.0, 2 * m, None, "given")
    c = rng.uniform(-1.0, 1.0, size=dim)
    r_out = float(rng.uniform(0.2, 2.5))
    r_in = float(rng.uniform(0.0, r_out * 0.95))
    return P, M, c, r_in, r_out


def run_annulus(spec: ExperimentSpec) -> ExperimentResult:
    """Superadditivity of rho over an annulus, on random configurations."""
    run = _Run(spec)
    configs = int(spec.options.get("configs", 500))
    rng = make_rng(spec.seed, "annulus-configs")
    worst = -np.inf
    literal_violations = 0
    for i in range(configs):
        d = 2 + (i % 2) if spec.options.get("mixed_dims", True) else spec.dim
        P, M, c, r_in, r_out = random_annulus_config(rng, d)
        ann = rho_annulus(Annulus(c, r_in, r_out), M, P)
        inner = rho_ball(Ball(c, r_in), M, P) if r_in > 0 else 0.0
        outer = rho_ball(Ball(c, r_out), M, P)
        worst = max(worst, ann - (outer - inner))
        lit_in = rho_ball(Ball(c, r_in), M, P, count_chords=False) if r_in > 0 else 0.0
        lit_out = rho_ball(Ball(c, r_out), M, P, count_chords=False)
        literal_violations += ann - (lit_out - lit_in) > 1e-9
        run.add("excess", ann - (outer - inner), n=len(P), trial=i)
    assertions = [_assertion("max rho_annulus - (rho_outer - rho_inner)", worst, "<=", 1e-9)]
    return run.result(assertions, worst_excess=float(worst),
                      violations_if_chords_ignored=int(literal_violations))


def run_matching_oracle(spec: ExperimentSpec) -> ExperimentResult:
    """Exact matching cost against exhaustive enumeration."""
    run = _Run(spec)
    instances = int(spec.options.get("instances", 200))
    rng = make_rng(spec.seed, "oracle-instances")
    worst = 0.0
    for i in range(instances):
        n = int(rng.choice([4, 6, 8, 10]))
        d = int(rng.choice([2, 3]))
        P = rng.random((n, d))
        diff = abs(min_cost_matching_exact(P).cost - min_cost_matching_bruteforce(P).cost)
        worst = max(worst, diff)
        run.add("cost_diff", diff, n=n, trial=i)
    return run.result([_assertion("max |exact - brute| cost", worst, "<=", 1e-9)], worst=worst)


RUNNERS = {
    "disc_growth": run_disc_growth,
    "eps_frontier": run_eps_frontier,
    "delta_kernel": run_delta_kernel,
    "rho_growth": run_rho_growth,
    "chernoff": run_chernoff,
    "size_floor": run_size_floor,
    "annulus": run_annulus,
    "matching_oracle": run_matching_oracle,
}


def run_experiment(spec: ExperimentSpec) -> ExperimentResult:
    return RUNNERS[spec.kind](spec)


def run_delta_kernel_demo(eta_grid, **kw) -> ExperimentResult:
    return run_delta_kernel(ExperimentSpec("delta_kernel", eta_grid=list(eta_grid), **kw))
