"""Pair colorings, kernel discrepancy, evaluation nets and tail diagnostics.

The discrepancy of a coloring ``chi`` at a center ``x`` is
``|sum_p chi(p) K(x, p)|``; its maximum over all centers is bounded by
maximising over a grid net and adding the net's resolution error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from kdisc._field import FieldMax, Grid, SignedField, maximize, region_mask
from kdisc.errors import UsageError
from kdisc.geometry import (KernelSpec, as_point, as_points, kernel_curvature_bound,
                            kernel_matrix, kernel_slope_bound, support_radius)
from kdisc.matching import Matching
from kdisc.rng import make_rng

DEFAULT_MAX_CENTERS = 10**7
BRUTEFORCE_MAX_N = 16


@dataclass(frozen=True)
class Coloring:
    signs: np.ndarray
    source: str = ""
    seed: int | None = None

    @property
    def n(self) -> int:
        return len(self.signs)


def color_from_matching(M: Matching, seed: int | None) -> Coloring:
    """Independent fair sign per matched pair; the leftover point gets +1."""
    flips = make_rng(seed, "pair-coloring").integers(0, 2, size=len(M.pairs))
    s = np.where(flips == 1, 1, -1).astype(np.int8)
    signs = np.ones(M.n, dtype=np.int8)
    signs[M.pairs[:, 0]] = s
    signs[M.pairs[:, 1]] = -s
    return Coloring(signs, f"matching:{M.algo}", seed)


def random_coloring(n: int, seed: int | None) -> Coloring:
    """Independent fair sign per point (the unstructured baseline)."""
    flips = make_rng(seed, "random-coloring").integers(0, 2, size=n)
    return Coloring(np.where(flips == 1, 1, -1).astype(np.int8), "random", seed)


def _signs(chi, n):
    s = np.asarray(chi.signs if isinstance(chi, Coloring) else chi, dtype=np.float64)
    if s.shape != (n,):
        raise UsageError(f"coloring has {s.size} signs for {n} points")
    return s


def disc_at(P, chi, k: KernelSpec, x) -> float:
    P = as_points(P, k.dim)
    s = _signs(chi, len(P))
    x = as_point(x, k.dim)
    return float(abs(kernel_matrix(k, x[None, :], P)[0] @ s))


@dataclass(frozen=True)
class EvaluationNet:
    """Grid centers covering the union of support balls around the points.

    ``tau`` is the covering radius guaranteed for the region; ``tau_target``
    is what the resolution rule asked for.  When the center cap forces a
    coarser grid, ``coarsened`` is set and ``tau > tau_target``.
    """

    grid: Grid
    mask: np.ndarray
    tau: float
    tau_target: float
    radius: float
    threshold: float
    n_points: int
    coarsened: bool = False

    @property
    def n_centers(self) -> int:
        return int(self.mask.sum())

    @property
    def centers(self) -> np.ndarray:
        return self.grid.nodes(self.mask)

    def coverage_region(self) -> dict:
        return {"kind": "union_of_balls", "radius": self.radius, "balls": self.n_points,
                "threshold": self.threshold}


def default_tau(k: KernelSpec, n: int) -> float:
    """The resolution ``1 / (n max(sigma, 1))``."""
    return 1.0 / (n * max(kernel_slope_bound(k), 1.0))


def net_threshold(k: KernelSpec, n: int) -> float:
    """Kernel value at the region boundary: 0 for compact kernels, peak/(2n) for the gaussian."""
    return k.peak / (2.0 * n) if k.family == "gaussian" else 0.0


def build_net(P, k: KernelSpec, *, tau: float | None = None,
              max_centers: int = DEFAULT_MAX_CENTERS, n: int | None = None) -> EvaluationNet:
    """Grid of spacing tau/sqrt(d) over the union of support balls of P.

    ``n`` sets the count used by the resolution rule and threshold; it
    defaults to ``len(P)``.
    """
    P = as_points(P, k.dim)
    n = len(P) if n is None else int(n)
    if n < 1:
        raise UsageError("cannot build a net for an empty point set")
    kernel_slope_bound(k)  # raises for kernels without a slope bound
    target = default_tau(k, n) if tau is None else float(tau)
    return grid_net(P, k, target, max_centers, n)


def grid_net(P: np.ndarray, k: KernelSpec, target: float, max_centers: int, n: int) -> EvaluationNet:
    """Net construction without the slope requirement (used for ball kernels too)."""
    if not target > 0:
        raise UsageError(f"net tau must be positive, got {target}")
    thr = net_threshold(k, n)
    r = support_radius(k, thr)
    d = k.dim
    spacing = target / math.sqrt(d)
    coarsened = False
    while True:
        tau_eff = spacing * math.sqrt(d)
        pad = r + max(target, tau_eff)
        grid = Grid.covering(P.min(0) - pad, P.max(0) + pad, spacing)
        if grid.size <= max_centers:
            break
        spacing *= max(1.01, (grid.size / max_centers) ** (1.0 / d))
        coarsened = True
    mask = region_mask(grid, P, r + tau_eff)
    return EvaluationNet(grid, mask, max(tau_eff, target) if coarsened else target,
                         target, r, thr, n, coarsened)


@dataclass
class DiscrepancyReport:
    max_disc: float
    argmax_center: np.ndarray
    grid_max: float
    tau: float
    n_centers: int
    additive_error: float           # weight * sigma * tau, Lipschitz resolution bound
    outside_bound: float            # bound on |disc| outside the covered region
    upper_bound: float | None       # certified bound on the supremum
    chernoff_alpha: float | None = None
    sum_delta_sq: float | None = None
    chernoff_bound: float | None = None
    per_center: np.ndarray | None = field(default=None, repr=False)

    def to_dict(self) -> dict:
        out = {
            "max_disc": self.max_disc,
            "argmax_center": [float(v) for v in self.argmax_center],
            "grid_max": self.grid_max,
            "tau": self.tau,
            "n_centers": self.n_centers,
            "additive_error": self.additive_error,
            "outside_bound": self.outside_bound,
            "upper_bound": self.upper_bound,
            "chernoff_alpha": self.chernoff_alpha,
            "sum_delta_sq": self.sum_delta_sq,
            "chernoff_bound": self.chernoff_bound,
        }
        return out


def resolution_bounds(k: KernelSpec, abs_weight: float, net: EvaluationNet, grid_max: float):
    """(Lipschitz additive error, outside-region bound, certified upper bound).

    For the gaussian the curvature bound is also tried: at an interior
    maximum the gradient vanishes, so a node within ``tau/2`` of it loses at
    most ``H (tau/2)^2 / 2``.
    """
    sigma = kernel_slope_bound(k)
    lip = abs_weight * sigma * net.tau
    outside = abs_weight * net.threshold
    slack = lip
    if k.smooth:
        half = 0.5 * net.grid.spacing * math.sqrt(k.dim)
        slack = min(slack, abs_weight * kernel_curvature_bound(k) * half * half / 2.0)
    return lip, outside, max(grid_max + slack, outside)


def pair_deltas(P, M: Matching, k: KernelSpec, x) -> np.ndarray:
    """``Delta_j = 2 |K(x, p_j) - K(x, q_j)|`` for every matched pair."""
    P = as_points(P, k.dim)
    x = as_point(x, k.dim)
    kv = kernel_matrix(k, x[None, :], P)[0]
    return 2.0 * np.abs(kv[M.pairs[:, 0]] - kv[M.pairs[:, 1]])


def chernoff_bound(P, M: Matching, k: KernelSpec, x, alpha: float) -> float:
    """``2 exp(-2 alpha^2 / sum_j Delta_j^2)``; 0 when every pair cancels."""
    if not alpha > 0:
        raise UsageError(f"alpha must be positive, got {alpha}")
    s2 = float(np.sum(pair_deltas(P, M, k, x) ** 2))
    return chernoff_from_sum(s2, alpha)


def chernoff_from_sum(sum_delta_sq: float, alpha: float) -> float:
    if sum_delta_sq <= 0:
        return 0.0
    return 2.0 * math.exp(-2.0 * alpha * alpha / sum_delta_sq)


def jensen_transfer(deltas_d, n: int, d: int) -> float:
    """Upper bound ``n^(1-2/d) (sum Delta^d)^(2/d)`` on ``sum Delta^2``."""
    deltas = np.asarray(deltas_d, dtype=np.float64)
    if d < 2:
        raise UsageError("jensen_transfer needs d >= 2")
    if np.any(deltas < 0):
        raise UsageError("deltas must be non-negative")
    return float(n ** (1.0 - 2.0 / d) * np.sum(deltas ** d) ** (2.0 / d))


def disc_max(P, chi, k: KernelSpec, net: EvaluationNet, *, matching: Matching | None = None,
             polish: bool = True, per_center: bool = False) -> DiscrepancyReport:
    """Maximum discrepancy over the net, with its resolution guarantee.

    ``max_disc`` is at least the largest value over the net centers; with
    ``polish`` the data points and a local search around the best centers
    are also scored, which can only move it closer to the true supremum.
    """
    P = as_points(P, k.dim)
    s = _signs(chi, len(P))
    if net.n_centers == 0:
        raise UsageError("evaluation net is empty")
    fld = SignedField(k, P, s)
    fm: FieldMax = maximize(fld, net.grid, net.mask, extra=P if polish else None, polish=polish)
    lip, outside, upper = resolution_bounds(k, fld.abs_weight, net, fm.grid_value)
    rep = DiscrepancyReport(fm.value, fm.argmax, fm.grid_value, net.tau, net.n_centers,
                            lip, outside, max(upper, fm.value))
    if matching is not None:
        s2 = float(np.sum(pair_deltas(P, matching, k, fm.argmax) ** 2))
        rep.sum_delta_sq = s2
        rep.chernoff_alpha = fm.value
        rep.chernoff_bound = chernoff_from_sum(s2, fm.value) if fm.value > 0 else None
    if per_center:
        rep.per_center = np.abs(fld.on_grid(net.grid, net.mask)[net.mask])
    return rep


def min_disc_bruteforce(P, k: KernelSpec, net: EvaluationNet, *, include_points: bool = True,
                        return_coloring: bool = False):
    """Exact minimum over all 2^n sign vectors of the max over the net.

    With ``include_points`` the data points are added to the centers, which
    only tightens the net.  Colorings and their negations give the same
    value, so the first sign is fixed to +1.
    """
    P = as_points(P, k.dim)
    n = len(P)
    if n > BRUTEFORCE_MAX_N:
        raise UsageError(f"brute-force discrepancy needs n <= {BRUTEFORCE_MAX_N}, got {n}")
    X = net.centers
    if include_points:
        X = np.vstack([X, P])
    K = kernel_matrix(k, X, P)
    m = 1 << (n - 1)
    best, best_code = np.inf, 0
    chunk = max(1, min(m, (1 << 24) // max(len(X), 1)))
    bits = np.arange(n - 1)
    for start in range(0, m, chunk):
        codes = np.arange(start, min(m, start + chunk))
        S = np.ones((n, len(codes)))
        S[1:] = np.where((codes[None, :] >> bits[:, None]) & 1, -1.0, 1.0)
        vals = np.abs(K @ S).max(axis=0)
        j = int(np.argmin(vals))
        if vals[j] < best:
            best, best_code = float(vals[j]), int(codes[j])
    if not return_coloring:
        return best
    signs = np.ones(n, dtype=np.int8)
    signs[1:] = np.where((best_code >> bits) & 1, -1, 1)
    return best, Coloring(signs, "bruteforce")
