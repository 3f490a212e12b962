"""Epsilon-samples by repeated halving, and the random-sampling baseline.

Each level matches the current set with a min-cost perfect matching, colors
every pair with one random sign each way, and keeps the +1 half (plus the
leftover point for odd sizes).  Retained points are implicitly reweighted to
``|P| / |S|``.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from kdisc.discrepancy import color_from_matching, disc_max, build_net
from kdisc.errors import UsageError
from kdisc.geometry import KernelSpec, as_points
from kdisc.kde import KdeQuery, LinfReport, linf_distance
from kdisc.matching import min_cost_matching
from kdisc.rng import derive_seed, make_rng

log = logging.getLogger(__name__)

LEVEL_DISC_MAX_CENTERS = 250_000


@dataclass(frozen=True)
class HalvingConfig:
    kernel: KernelSpec
    eps: float | None = None
    size: int | None = None
    matching_algo: str = "exact"
    seed: int | None = 0
    c: float = 1.0
    phi: float = 0.1

    def __post_init__(self):
        if (self.eps is None) == (self.size is None):
            raise UsageError("give exactly one of eps or size")
        if self.eps is not None and not (0 < self.eps < 1):
            raise UsageError(f"eps must lie in (0, 1), got {self.eps}")
        if self.size is not None and self.size < 1:
            raise UsageError(f"size must be >= 1, got {self.size}")
        if self.matching_algo not in ("exact", "greedy"):
            raise UsageError(f"matching must be exact or greedy, got {self.matching_algo!r}")
        if not self.c > 0:
            raise UsageError("size constant c must be positive")
        if not 0 < self.phi < 1:
            raise UsageError("phi must lie in (0, 1)")


def eps_target_size(eps: float, d: int, c: float = 1.0) -> float:
    """``c (1/eps)^(2d/(d+2)) max(1, ln(1/eps))^(d/(d+2))``."""
    inv = 1.0 / eps
    return c * inv ** (2.0 * d / (d + 2)) * max(1.0, math.log(inv)) ** (d / (d + 2.0))


@dataclass(frozen=True)
class LevelRecord:
    level: int
    size_before: int
    size_after: int
    matching_cost: float
    seed: int
    delta: float
    disc: float | None = None
    disc_upper: float | None = None

    def to_dict(self) -> dict:
        return dict(self.__dict__)


@dataclass
class EpsSampleResult:
    indices: np.ndarray
    sample: np.ndarray
    target_eps: float | None
    target_size: float
    levels: list = field(default_factory=list)
    measured_linf: LinfReport | None = None
    note: str = ""

    def to_dict(self) -> dict:
        return {
            "indices": self.indices.tolist(),
            "size": int(len(self.indices)),
            "target_eps": self.target_eps,
            "target_size": self.target_size,
            "levels": [lv.to_dict() for lv in self.levels],
            "measured_linf": None if self.measured_linf is None else self.measured_linf.to_dict(),
            "note": self.note,
        }


def halve_once(P, cfg: HalvingConfig, *, seed: int | None = None, level: int = 0,
               record_disc: bool = False):
    """Keep the +1 half of a matching coloring.

    Returns ``(kept_indices, LevelRecord)``; indices refer to rows of P and
    are sorted.  ``|kept| = ceil(|P| / 2)``.
    """
    P = as_points(P, cfg.kernel.dim)
    n = len(P)
    if n < 2:
        raise UsageError(f"halving needs at least 2 points, got {n}")
    s = derive_seed(cfg.seed if seed is None else seed, "halving-level", level)
    M = min_cost_matching(P, cfg.matching_algo)
    chi = color_from_matching(M, s)
    kept = np.nonzero(chi.signs > 0)[0]
    rec = LevelRecord(level, n, len(kept), M.cost, s, cfg.phi / max(1.0, math.log2(n)))
    if record_disc:
        net = build_net(P, cfg.kernel, max_centers=LEVEL_DISC_MAX_CENTERS)
        rep = disc_max(P, chi, cfg.kernel, net)
        rec = LevelRecord(rec.level, n, len(kept), M.cost, s, rec.delta, rep.max_disc, rep.upper_bound)
    return kept, rec


def build_eps_sample(P, cfg: HalvingConfig, *, verify: bool = False, record_disc: bool = False,
                     verify_max_centers: int | None = None) -> EpsSampleResult:
    """Halve until the sample is no larger than the target size.

    With an eps target the size target is ``eps_target_size(eps, d, c)``.
    With ``verify`` the L-infinity distance between the input and sample KDEs
    is measured and attached.
    """
    P = as_points(P, cfg.kernel.dim)
    n = len(P)
    if n < 1:
        raise UsageError("input point set is empty")
    d = cfg.kernel.dim
    if cfg.eps is not None:
        target = eps_target_size(cfg.eps, d, cfg.c)
    else:
        target = float(cfg.size)
        if cfg.size > n:
            raise UsageError(f"requested size {cfg.size} exceeds input size {n}")
    idx = np.arange(n)
    levels = []
    note = ""
    if target >= n:
        note = "target size is not below the input size; the input is returned unchanged"
    while len(idx) > target and len(idx) >= 2:
        kept, rec = halve_once(P[idx], cfg, level=len(levels), record_disc=record_disc)
        log.debug("level %d: %d -> %d points", rec.level, rec.size_before, rec.size_after)
        idx = idx[kept]
        levels.append(rec)
    res = EpsSampleResult(idx, P[idx], cfg.eps, target, levels, note=note)
    if verify:
        kw = {} if verify_max_centers is None else {"max_centers": verify_max_centers}
        res.measured_linf = linf_distance(KdeQuery(P, cfg.kernel), KdeQuery(P[idx], cfg.kernel), **kw)
    return res


def random_sample_baseline(P, size: int, seed: int | None) -> np.ndarray:
    """Indices of a uniform sample without replacement, sorted."""
    P = as_points(P)
    if not 1 <= size <= len(P):
        raise UsageError(f"sample size must lie in [1, {len(P)}], got {size}")
    return np.sort(make_rng(seed, "random-sample").choice(len(P), size=size, replace=False))
