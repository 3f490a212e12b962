"""Signed kernel sums ``f(x) = sum_i w_i K(x, p_i)`` and their maximum |f|.

Both the coloring discrepancy (weights are the signs) and the KDE difference
(weights +1/|P| and -1/|S|) are fields of this form, so one engine serves both.

Grid values are computed two ways.  The gaussian factorises over axes,
``exp(-|x - p|^2) = prod_c exp(-(x_c - p_c)^2)``, so on a tensor grid the sum
is a matrix product ``A diag(w) B^T``.  The compactly supported kernels bin
the points into cells of the support radius and only visit neighbouring cells.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np
from numba import njit, prange
from scipy import ndimage, optimize

from kdisc.errors import UsageError
from kdisc.geometry import KernelSpec

_CODE = {"gaussian": 0, "triangle": 1, "epanechnikov": 2, "ball": 3}


@njit(cache=True, inline="always")
def _unit_profile(code, u2):
    if code == 0:
        return math.exp(-u2)
    if code == 1:
        return max(0.0, 1.0 - math.sqrt(u2))
    if code == 2:
        return max(0.0, 1.0 - u2)
    return 1.0 if u2 <= 1.0 else 0.0


@njit(cache=True, parallel=True)
def _dense_sum(X, P, w, code, inv_bw2):
    m, d = X.shape
    n = P.shape[0]
    out = np.empty(m)
    for a in prange(m):
        acc = 0.0
        for i in range(n):
            s = 0.0
            for c in range(d):
                diff = X[a, c] - P[i, c]
                s += diff * diff
            acc += w[i] * _unit_profile(code, s * inv_bw2)
        out[a] = acc
    return out


@njit(cache=True, parallel=True)
def _binned_sum(X, P, w, code, inv_bw2, lo, cell, dims, keys, starts, offsets):
    m, d = X.shape
    out = np.empty(m)
    cc = np.empty((m, d), dtype=np.int64)
    for a in range(m):
        for c in range(d):
            cc[a, c] = np.int64(math.floor((X[a, c] - lo[c]) / cell))
    for a in prange(m):
        acc = 0.0
        for o in range(offsets.shape[0]):
            key = 0
            inside = True
            for c in range(d):
                g = cc[a, c] + offsets[o, c]
                if g < 0 or g >= dims[c]:
                    inside = False
                    break
                key = key * dims[c] + g
            if not inside:
                continue
            pos = np.searchsorted(keys, key)
            if pos >= keys.shape[0] or keys[pos] != key:
                continue
            for i in range(starts[pos], starts[pos + 1]):
                s = 0.0
                for c in range(d):
                    diff = X[a, c] - P[i, c]
                    s += diff * diff
                acc += w[i] * _unit_profile(code, s * inv_bw2)
        out[a] = acc
    return out


class SignedField:
    """Evaluator for one fixed ``(k, P, w)``."""

    def __init__(self, k: KernelSpec, P: np.ndarray, w: np.ndarray):
        self.k = k
        self.code = _CODE[k.family]
        self.inv_bw2 = 1.0 / (k.bandwidth * k.bandwidth)
        self.P = np.ascontiguousarray(P, dtype=np.float64)
        self.w = np.ascontiguousarray(w, dtype=np.float64)
        self.abs_weight = float(np.abs(self.w).sum())
        self._bins = None
        if self.code != 0:
            self._build_bins()

    def _build_bins(self):
        P = self.P
        d = P.shape[1]
        cell = self.k.bandwidth * (1.0 + 1e-9)
        lo = P.min(0) - cell
        dims = (np.floor((P.max(0) + cell - lo) / cell).astype(np.int64) + 1)
        cc = np.floor((P - lo) / cell).astype(np.int64)
        key = np.zeros(len(P), dtype=np.int64)
        for c in range(d):
            key = key * dims[c] + cc[:, c]
        order = np.argsort(key, kind="stable")
        self.P = np.ascontiguousarray(P[order])
        self.w = np.ascontiguousarray(self.w[order])
        keys, starts = np.unique(key[order], return_index=True)
        starts = np.append(starts, len(P)).astype(np.int64)
        offsets = np.array(list(itertools.product((-1, 0, 1), repeat=d)), dtype=np.int64).reshape(-1, d)
        self._bins = (lo, cell, dims, keys.astype(np.int64), starts, offsets)

    def __call__(self, X) -> np.ndarray:
        """Field values at the rows of X."""
        X = np.ascontiguousarray(np.atleast_2d(X), dtype=np.float64)
        if self._bins is None:
            v = _dense_sum(X, self.P, self.w, self.code, self.inv_bw2)
        else:
            v = _binned_sum(X, self.P, self.w, self.code, self.inv_bw2, *self._bins)
        return self.k.peak * v

    def on_grid(self, grid: "Grid", mask: np.ndarray | None = None) -> np.ndarray:
        """Field values at every grid node, shape ``grid.shape``.

        Nodes outside ``mask`` are set to 0.
        """
        if self.code == 0:
            V = self._gaussian_grid(grid)
            if mask is not None:
                V[~mask] = 0.0
            return V
        V = np.zeros(grid.shape)
        axes = grid.axes()
        rest = np.stack(np.meshgrid(*axes[1:], indexing="ij"), axis=-1).reshape(-1, grid.dim - 1) \
            if grid.dim > 1 else np.zeros((1, 0))
        for a, x0 in enumerate(axes[0]):
            sel = None if mask is None else mask[a].reshape(-1)
            if sel is not None and not sel.any():
                continue
            X = np.column_stack([np.full(len(rest), x0), rest])
            if sel is not None:
                vals = np.zeros(len(rest))
                vals[sel] = self(X[sel])
            else:
                vals = self(X)
            V[a] = vals.reshape(grid.shape[1:])
        return V

    def _gaussian_grid(self, grid):
        axes = grid.axes()
        d = grid.dim
        # E[c][a, i] = exp(-(axis_c[a] - p_ic)^2 / w^2)
        E = [np.exp(-np.subtract.outer(axes[c], self.P[:, c]) ** 2 * self.inv_bw2) for c in range(d)]
        if d == 1:
            return self.k.peak * (E[0] @ self.w)
        V = np.empty(grid.shape)
        A, B = E[0], E[1]
        for idx in np.ndindex(*grid.shape[2:]):
            ww = self.w.copy()
            for c, j in enumerate(idx, start=2):
                ww *= E[c][j]
            V[(slice(None), slice(None)) + idx] = (A * ww) @ B.T
        return self.k.peak * V


@dataclass(frozen=True)
class Grid:
    """Axis-aligned tensor grid ``origin + spacing * index``."""

    origin: np.ndarray
    spacing: float
    shape: tuple

    @property
    def dim(self) -> int:
        return len(self.shape)

    @property
    def size(self) -> int:
        return int(np.prod(self.shape))

    def axes(self):
        return [self.origin[c] + self.spacing * np.arange(self.shape[c]) for c in range(self.dim)]

    def node(self, flat_index: int) -> np.ndarray:
        idx = np.unravel_index(flat_index, self.shape)
        return self.origin + self.spacing * np.asarray(idx, dtype=np.float64)

    def nodes(self, mask=None) -> np.ndarray:
        mesh = np.stack(np.meshgrid(*self.axes(), indexing="ij"), axis=-1).reshape(-1, self.dim)
        return mesh if mask is None else mesh[mask.reshape(-1)]

    @classmethod
    def covering(cls, lo, hi, spacing) -> "Grid":
        # anchor to the lattice spacing * Z^d so that halving the spacing nests grids
        lo = np.floor(np.asarray(lo, dtype=np.float64) / spacing) * spacing
        hi = np.asarray(hi, dtype=np.float64)
        shape = tuple(int(s) for s in np.floor((hi - lo) / spacing + 1e-9).astype(np.int64) + 2)
        return cls(lo, float(spacing), shape)


def region_mask(grid: Grid, P: np.ndarray, radius: float) -> np.ndarray:
    """Nodes within ``radius`` of some point, plus a half-cell of slack.

    Each point is snapped to its nearest node and a Euclidean distance
    transform measures node-to-occupied-node distance, so the mask is a
    superset of the exact one and never drops a node that should be kept.
    """
    idx = np.rint((P - grid.origin) / grid.spacing).astype(np.int64)
    idx = np.clip(idx, 0, np.asarray(grid.shape) - 1)
    occupied = np.zeros(grid.shape, dtype=bool)
    occupied[tuple(idx.T)] = True
    dist = ndimage.distance_transform_edt(~occupied, sampling=grid.spacing)
    return dist <= radius + 0.5 * grid.spacing * math.sqrt(grid.dim) + 1e-12


@dataclass(frozen=True)
class FieldMax:
    value: float          # best |f| found, after polishing
    signed: float         # f at argmax
    argmax: np.ndarray
    grid_value: float     # max |f| over grid nodes only


def maximize(field: SignedField, grid: Grid, mask=None, *, extra=None,
             polish: bool = True, top: int = 8) -> FieldMax:
    """Max of |f| over grid nodes, optionally refined.

    Refinement also scores the ``extra`` points (usually the data) and runs a
    Nelder-Mead search from the best few candidates.  It can only raise the
    reported value, which stays a lower bound on the true supremum.
    """
    if grid.size == 0 or (mask is not None and not mask.any()):
        raise UsageError("evaluation net is empty")
    V = field.on_grid(grid, mask)
    flat = np.abs(V).reshape(-1)
    g = int(np.argmax(flat))
    grid_value = float(flat[g])
    best_x = grid.node(g)
    best = float(V.reshape(-1)[g])
    if not polish:
        return FieldMax(abs(best), best, best_x, grid_value)

    cands = []
    kk = min(top, flat.size)
    for j in np.argpartition(-flat, kk - 1)[:kk]:
        cands.append((float(V.reshape(-1)[j]), grid.node(int(j))))
    if extra is not None and len(extra):
        ev = field(extra)
        kk = min(top, len(ev))
        for j in np.argpartition(-np.abs(ev), kk - 1)[:kk]:
            cands.append((float(ev[j]), np.asarray(extra[j], dtype=np.float64)))
    for val, x in cands:
        if abs(val) > abs(best):
            best, best_x = val, x
    step = grid.spacing
    for val, x0 in cands:
        s = 1.0 if val >= 0 else -1.0
        simplex = np.vstack([x0, x0 + step * np.eye(len(x0))])
        res = optimize.minimize(lambda x: -s * float(field(x)[0]), x0, method="Nelder-Mead",
                                options={"initial_simplex": simplex, "xatol": 1e-9 * max(step, 1e-12),
                                         "fatol": 1e-13, "maxiter": 400})
        v = float(field(res.x)[0])
        if abs(v) > abs(best):
            best, best_x = v, np.asarray(res.x)
    return FieldMax(abs(best), best, best_x, grid_value)
