"""Min-cost perfect matchings of point sets and the clipped-length functionals.

``min_cost_matching_exact`` runs the blossom algorithm on a k-nearest-neighbour
candidate graph, then prices every remaining pair of points against the final
dual solution.  Pairs that violate dual feasibility are added and the solve is
repeated; when no pair violates, the duals certify that the matching is optimal
over the complete Euclidean graph.
"""

from __future__ import annotations

import heapq
import logging
from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from kdisc import _blossom
from kdisc.errors import UsageError
from kdisc.geometry import Ball, as_point, as_points

log = logging.getLogger(__name__)

BRUTEFORCE_MAX_N = 12
# Below this size the complete graph is handed to the solver directly.
COMPLETE_GRAPH_MAX_N = 96
_COST_BITS = 40


@dataclass(frozen=True)
class Matching:
    """Perfect matching of ``n`` points, as sorted index pairs ``i < j``."""

    pairs: np.ndarray
    cost: float
    n: int
    leftover: int | None = None
    algo: str = "exact"
    certified: bool = False

    def partner(self) -> np.ndarray:
        out = np.full(self.n, -1, dtype=np.int64)
        out[self.pairs[:, 0]] = self.pairs[:, 1]
        out[self.pairs[:, 1]] = self.pairs[:, 0]
        return out

    def to_dict(self) -> dict:
        return {
            "pairs": self.pairs.tolist(),
            "cost": float(self.cost),
            "leftover": None if self.leftover is None else int(self.leftover),
            "algo": self.algo,
            "certified": bool(self.certified),
        }


@dataclass(frozen=True)
class Annulus:
    center: np.ndarray
    inner_radius: float
    outer_radius: float

    def __post_init__(self):
        if not (0 <= self.inner_radius < self.outer_radius) or not np.isfinite(self.outer_radius):
            raise UsageError(
                f"annulus radii must satisfy 0 <= inner < outer < inf, got "
                f"{self.inner_radius}, {self.outer_radius}")


def _pair_cost(P, pairs) -> float:
    if len(pairs) == 0:
        return 0.0
    return float(np.linalg.norm(P[pairs[:, 0]] - P[pairs[:, 1]], axis=1).sum())


def _normalize_pairs(pairs) -> np.ndarray:
    pairs = np.sort(np.asarray(pairs, dtype=np.int64).reshape(-1, 2), axis=1)
    order = np.lexsort((pairs[:, 1], pairs[:, 0]))
    return pairs[order]


def choose_leftover(P: np.ndarray) -> int | None:
    """For odd n: the point with the largest nearest-neighbour distance."""
    n = len(P)
    if n % 2 == 0:
        return None
    d, _ = cKDTree(P).query(P, k=2)
    nn = d[:, 1]
    # argmax returns the smallest index among ties
    return int(np.argmax(nn))


def _prepare(P):
    P = as_points(P)
    n = len(P)
    if n < 2:
        raise UsageError(f"matching needs at least 2 points, got {n}")
    leftover = choose_leftover(P)
    active = np.arange(n) if leftover is None else np.delete(np.arange(n), leftover)
    return P, n, leftover, active


def check_matching(M: Matching) -> None:
    """Raise if some index is uncovered or covered twice."""
    seen = np.zeros(M.n, dtype=np.int64)
    np.add.at(seen, M.pairs.ravel(), 1)
    if M.leftover is not None:
        seen[M.leftover] += 1
    if not np.all(seen == 1):
        bad = np.nonzero(seen != 1)[0][:10]
        raise AssertionError(f"matching is not perfect; bad indices {bad.tolist()}")


def _knn_edges(Q, k):
    m = len(Q)
    k = min(k, m - 1)
    _, idx = cKDTree(Q).query(Q, k=k + 1)
    idx = idx[:, 1:]
    E = np.stack([np.repeat(np.arange(m), k), idx.ravel()], axis=1)
    E = E[E[:, 0] != E[:, 1]]
    return np.unique(np.sort(E, axis=1), axis=0)


def _complete_edges(m):
    iu = np.triu_indices(m, 1)
    return np.stack(iu, axis=1).astype(np.int64)


def min_cost_matching_exact(P, *, neighbors: int = 10, max_rounds: int = 50) -> Matching:
    """Minimum total-length perfect matching (one leftover point when n is odd).

    The returned matching is certified optimal over all pairs of points: the
    solver's dual solution is checked against every pair, not just the
    candidate edges it was given.
    """
    P, n, leftover, active = _prepare(P)
    Q = P[active]
    m = len(Q)
    diam = float(np.linalg.norm(Q.max(0) - Q.min(0)))
    scale = (2.0 ** _COST_BITS) / diam if diam > 0 else 1.0

    if m <= COMPLETE_GRAPH_MAX_N:
        E = _complete_edges(m)
    else:
        E = _knn_edges(Q, neighbors)
    k = neighbors
    ok = np.ones(m, dtype=np.bool_)
    for rnd in range(max_rounds):
        c = np.rint(np.linalg.norm(Q[E[:, 0]] - Q[E[:, 1]], axis=1) * scale).astype(np.int64)
        shift = int(c.max()) + 1 if len(c) else 1
        w = 2 * (shift - c)
        partner, dual, parent, _base = _blossom.max_weight_matching(m, E[:, 0], E[:, 1], w)
        if np.any(partner < 0):
            # candidate graph has no perfect matching; widen it
            k *= 2
            log.debug("candidate graph not perfect at k=%d, widening", k // 2)
            E = np.unique(np.concatenate([E, _knn_edges(Q, k)]), axis=0)
            continue
        viol, count = _blossom.price_pairs(Q, scale, shift, ok, dual, parent, 200_000)
        if count == 0:
            break
        log.debug("round %d: %d pairs violate the duals, adding them", rnd, count)
        E = np.unique(np.concatenate([E, np.sort(viol, axis=1)]), axis=0)
    else:
        raise RuntimeError("exact matching did not certify within max_rounds")

    v = np.arange(m)
    sel = partner > v
    pairs = np.stack([active[v[sel]], active[partner[sel]]], axis=1)
    pairs = _normalize_pairs(pairs)
    return Matching(pairs, _pair_cost(P, pairs), n, leftover, "exact", True)


def min_cost_matching_greedy(P) -> Matching:
    """Repeatedly match the closest pair of still-unmatched points."""
    P, n, leftover, active_idx = _prepare(P)
    avail = np.zeros(n, dtype=bool)
    avail[active_idx] = True
    tree = cKDTree(P)

    def nearest_available(i):
        k = 8
        while True:
            kk = min(k, n)
            d, j = tree.query(P[i], k=kk)
            d = np.atleast_1d(d)
            j = np.atleast_1d(j)
            for dist, jj in sorted(zip(d.tolist(), j.tolist())):
                if jj != i and avail[jj]:
                    return dist, jj
            if kk == n:
                return None
            k *= 4

    heap = []
    for i in active_idx:
        got = nearest_available(i)
        if got is not None:
            heapq.heappush(heap, (got[0], min(i, got[1]), max(i, got[1]), int(i)))
    pairs = []
    while heap:
        dist, a, b, i = heapq.heappop(heap)
        if not avail[i]:
            continue
        j = b if a == i else a
        if avail[j]:
            avail[i] = avail[j] = False
            pairs.append((a, b))
            continue
        got = nearest_available(i)
        if got is not None:
            heapq.heappush(heap, (got[0], min(i, got[1]), max(i, got[1]), i))
    pairs = _normalize_pairs(pairs)
    return Matching(pairs, _pair_cost(P, pairs), n, leftover, "greedy", False)


def min_cost_matching_bruteforce(P) -> Matching:
    """Exhaustive minimum over all (n-1)!! perfect matchings, n even and <= 12.

    Matchings are enumerated in lexicographic order of their sorted pair list
    and only a strictly smaller cost replaces the incumbent, so ties resolve to
    the lexicographically first optimum.
    """
    P = as_points(P)
    n = len(P)
    if n % 2 or n < 2 or n > BRUTEFORCE_MAX_N:
        raise UsageError(f"brute force needs an even n in [2, {BRUTEFORCE_MAX_N}], got {n}")
    D = np.linalg.norm(P[:, None, :] - P[None, :, :], axis=2)
    best_cost = np.inf
    best = None
    used = [False] * n
    cur = []

    def rec(acc):
        nonlocal best_cost, best
        try:
            i = used.index(False)
        except ValueError:
            if acc < best_cost - 1e-12:
                best_cost = acc
                best = list(cur)
            return
        used[i] = True
        for j in range(i + 1, n):
            if not used[j]:
                used[j] = True
                cur.append((i, j))
                rec(acc + D[i, j])
                cur.pop()
                used[j] = False
        used[i] = False

    rec(0.0)
    pairs = _normalize_pairs(best)
    return Matching(pairs, _pair_cost(P, pairs), n, None, "brute", True)


ALGORITHMS = {
    "exact": min_cost_matching_exact,
    "greedy": min_cost_matching_greedy,
    "brute": min_cost_matching_bruteforce,
}


def min_cost_matching(P, algo: str = "exact") -> Matching:
    try:
        fn = ALGORITHMS[algo]
    except KeyError:
        raise UsageError(f"unknown matching algorithm {algo!r}; choose from {sorted(ALGORITHMS)}") from None
    return fn(P)


# -- clipped lengths -----------------------------------------------------------

_TANGENT_TOL = 1e-12


def _segment_sphere_roots(a, u, c, r):
    """Parameters t0 <= t1 where |a + t u - c| = r, and a hit mask.

    Near-tangent segments (normalised discriminant within 1e-12 of zero) count
    as misses.
    """
    uu = np.einsum("ij,ij->i", u, u)
    f = a - c
    safe = np.where(uu > 0, uu, 1.0)
    bq = np.einsum("ij,ij->i", f, u) / safe
    cq = (np.einsum("ij,ij->i", f, f) - r * r) / safe
    disc = bq * bq - cq
    hit = (uu > 0) & (disc > _TANGENT_TOL)
    sq = np.sqrt(np.where(hit, disc, 0.0))
    return -bq - sq, -bq + sq, hit


def _pair_segments(M: Matching, P):
    P = as_points(P)
    a = P[M.pairs[:, 0]]
    b = P[M.pairs[:, 1]]
    return P, a, b


def rho_ball(B: Ball, M: Matching, P, *, count_chords: bool = True) -> float:
    """Sum over matched pairs of (length of the pair's segment inside B)^d.

    With ``count_chords=False`` a pair with both endpoints outside B contributes
    zero even if its segment passes through B.
    """
    P, a, b = _pair_segments(M, P)
    d = P.shape[1]
    c = as_point(B.center, d)
    r = float(B.radius)
    u = b - a
    length = np.linalg.norm(u, axis=1)
    t0, t1, hit = _segment_sphere_roots(a, u, c, r)
    lo = np.clip(t0, 0.0, 1.0)
    hi = np.clip(t1, 0.0, 1.0)
    clipped = np.where(hit, np.maximum(hi - lo, 0.0), 0.0) * length
    a_in = np.linalg.norm(a - c, axis=1) <= r
    b_in = np.linalg.norm(b - c, axis=1) <= r
    clipped = np.where(a_in & b_in, length, clipped)
    if not count_chords:
        clipped = np.where(a_in | b_in, clipped, 0.0)
    return float(np.sum(clipped ** d))


def rho_annulus(A: Annulus, M: Matching, P) -> float:
    """Sum over pairs of |nearest - farthest|^d, the extreme points (by
    distance to the centre) of the pair's segment within the annulus.

    The annulus is ``inner < |y - center| <= outer``; extreme points are taken
    on its closure.  Nearest-point ties go to the candidate closer to the
    farthest point.
    """
    P, a, b = _pair_segments(M, P)
    d = P.shape[1]
    c = as_point(A.center, d)
    u = b - a
    uu = np.einsum("ij,ij->i", u, u)
    o0, o1, ohit = _segment_sphere_roots(a, u, c, A.outer_radius)
    o0 = np.clip(o0, 0.0, 1.0)
    o1 = np.clip(o1, 0.0, 1.0)
    if A.inner_radius > 0:
        i0, i1, ihit = _segment_sphere_roots(a, u, c, A.inner_radius)
    else:
        i0 = i1 = np.zeros(len(a))
        ihit = np.zeros(len(a), dtype=bool)
    f = a - c
    tstar = np.where(uu > 0, -np.einsum("ij,ij->i", f, u) / np.where(uu > 0, uu, 1.0), 0.0)

    T = np.stack([o0, o1, i0, i1, tstar], axis=1)
    valid = ohit[:, None] & (T >= o0[:, None]) & (T <= o1[:, None]) & (o1 > o0)[:, None]
    in_hole = ihit[:, None] & (T > i0[:, None]) & (T < i1[:, None])
    valid &= ~in_hole
    valid[:, 2] &= ihit
    valid[:, 3] &= ihit

    X = a[:, None, :] + T[:, :, None] * u[:, None, :]
    dist = np.linalg.norm(X - c, axis=2)
    total = 0.0
    for row in range(len(a)):
        vm = valid[row]
        if not vm.any():
            continue
        dr = np.where(vm, dist[row], -np.inf)
        far = int(np.argmax(dr))
        dn = np.where(vm, dist[row], np.inf)
        near_val = dn.min()
        ties = np.nonzero(vm & (np.abs(dist[row] - near_val) <= 1e-12))[0]
        if len(ties) > 1:
            gaps = np.linalg.norm(X[row, ties] - X[row, far], axis=1)
            near = int(ties[np.argmin(gaps)])
        else:
            near = int(ties[0])
        total += float(np.linalg.norm(X[row, near] - X[row, far])) ** d
    return total
