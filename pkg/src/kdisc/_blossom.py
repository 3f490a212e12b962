"""Primal-dual blossom algorithm for maximum-weight matching, compiled with numba.

This follows the classic O(n^3) Edmonds/Galil formulation (the same stage
structure as the widely used ``mwmatching`` code), restricted to integer
weights and maximum-cardinality mode, and rewritten with flat arrays so it can
run under ``numba.njit``.  Unlike the library versions it hands back the final
dual solution, which lets callers certify optimality against edges that were
never given to the solver.

Dual representation: ``dual[v]`` for a vertex is twice its LP dual and
``dual[b]`` for a non-trivial blossom ``b >= n`` is its LP dual, so that an
edge ``(i, j)`` is feasible when

    dual[i] + dual[j] + 2 * sum(dual[b] for blossoms b containing i and j) >= 2 * w(i, j)
"""

import numpy as np
from numba import njit, types
from numba.typed import List

_INT_ARRAY = types.int64[:]


@njit(cache=True)
def _leaves(b, n, childs, lbuf, lstack):
    if b < n:
        lbuf[0] = b
        return 1
    cnt = 0
    lstack[0] = b
    sp = 1
    while sp > 0:
        sp -= 1
        t = lstack[sp]
        if t < n:
            lbuf[cnt] = t
            cnt += 1
        else:
            ch = childs[t]
            for q in range(len(ch) - 1, -1, -1):
                lstack[sp] = ch[q]
                sp += 1
    return cnt


@njit(cache=True)
def _slack(k, ei, ej, w, dual):
    return dual[ei[k]] + dual[ej[k]] - 2 * w[k]


@njit(cache=True)
def _assign_label(v, t, p, n, endpoint, mate, label, labelend, inblossom,
                  bbase, bestedge, childs, queue, lbuf, lstack):
    while True:
        b = inblossom[v]
        label[v] = t
        label[b] = t
        labelend[v] = p
        labelend[b] = p
        bestedge[v] = -1
        bestedge[b] = -1
        if t == 1:
            cnt = _leaves(b, n, childs, lbuf, lstack)
            for i in range(cnt):
                queue.append(lbuf[i])
            return
        base = bbase[b]
        mb = mate[base]
        v = endpoint[mb]
        t = 1
        p = mb ^ 1


@njit(cache=True)
def _scan_blossom(v, w, endpoint, label, labelend, inblossom, bbase, pathbuf):
    plen = 0
    base = -1
    while v != -1 or w != -1:
        b = inblossom[v]
        if label[b] & 4:
            base = bbase[b]
            break
        pathbuf[plen] = b
        plen += 1
        label[b] = 5
        if labelend[b] == -1:
            v = -1
        else:
            v = endpoint[labelend[b]]
            b = inblossom[v]
            v = endpoint[labelend[b]]
        if w != -1:
            tmp = v
            v = w
            w = tmp
    for i in range(plen):
        label[pathbuf[i]] = 1
    return base


@njit(cache=True)
def _add_blossom(base, k, n, ei, ej, w, endpoint, nb_ptr, nb_p, mate, label,
                 labelend, inblossom, bparent, bbase, childs, endps, bbe,
                 has_bbe, bestedge, unused, ints, dual, queue, lbuf, lstack,
                 pathbuf, endbuf):
    v = ei[k]
    x = ej[k]
    bb = inblossom[base]
    bv = inblossom[v]
    bw = inblossom[x]
    ints[0] -= 1
    b = unused[ints[0]]
    bbase[b] = base
    bparent[b] = -1
    bparent[bb] = b

    # Walk back from v to the base; this half is stored reversed.
    c1 = 0
    while bv != bb:
        bparent[bv] = b
        pathbuf[c1] = bv
        endbuf[c1] = labelend[bv]
        c1 += 1
        v = endpoint[labelend[bv]]
        bv = inblossom[v]
    # Walk back from x to the base.
    c2 = 0
    tail = np.empty(2 * n, dtype=np.int64)
    tail_e = np.empty(2 * n, dtype=np.int64)
    while bw != bb:
        bparent[bw] = b
        tail[c2] = bw
        tail_e[c2] = labelend[bw] ^ 1
        c2 += 1
        x = endpoint[labelend[bw]]
        bw = inblossom[x]

    L = c1 + 1 + c2
    path = np.empty(L, dtype=np.int64)
    eps = np.empty(L, dtype=np.int64)
    path[0] = bb
    for i in range(c1):
        path[1 + i] = pathbuf[c1 - 1 - i]
        eps[i] = endbuf[c1 - 1 - i]
    eps[c1] = 2 * k
    for i in range(c2):
        path[c1 + 1 + i] = tail[i]
        eps[c1 + 1 + i] = tail_e[i]
    childs[b] = path
    endps[b] = eps

    label[b] = 1
    labelend[b] = labelend[bb]
    dual[b] = 0
    cnt = _leaves(b, n, childs, lbuf, lstack)
    for i in range(cnt):
        u = lbuf[i]
        if label[inblossom[u]] == 2:
            queue.append(u)
        inblossom[u] = b

    bestedgeto = np.full(2 * n, -1, dtype=np.int64)
    for q in range(L):
        sub = path[q]
        if not has_bbe[sub]:
            cnt = _leaves(sub, n, childs, lbuf, lstack)
            for li in range(cnt):
                u = lbuf[li]
                for idx in range(nb_ptr[u], nb_ptr[u + 1]):
                    k2 = nb_p[idx] // 2
                    i = ei[k2]
                    j = ej[k2]
                    if inblossom[j] == b:
                        i, j = j, i
                    bj = inblossom[j]
                    if bj != b and label[bj] == 1:
                        if bestedgeto[bj] == -1 or (_slack(k2, ei, ej, w, dual)
                                                    < _slack(bestedgeto[bj], ei, ej, w, dual)):
                            bestedgeto[bj] = k2
        else:
            lst = bbe[sub]
            for li in range(len(lst)):
                k2 = lst[li]
                i = ei[k2]
                j = ej[k2]
                if inblossom[j] == b:
                    i, j = j, i
                bj = inblossom[j]
                if bj != b and label[bj] == 1:
                    if bestedgeto[bj] == -1 or (_slack(k2, ei, ej, w, dual)
                                                < _slack(bestedgeto[bj], ei, ej, w, dual)):
                        bestedgeto[bj] = k2
        has_bbe[sub] = False
        bbe[sub] = np.empty(0, dtype=np.int64)
        bestedge[sub] = -1

    nb = 0
    for q in range(2 * n):
        if bestedgeto[q] != -1:
            nb += 1
    arr = np.empty(nb, dtype=np.int64)
    nb = 0
    best = -1
    for q in range(2 * n):
        k2 = bestedgeto[q]
        if k2 != -1:
            arr[nb] = k2
            nb += 1
            if best == -1 or _slack(k2, ei, ej, w, dual) < _slack(best, ei, ej, w, dual):
                best = k2
    bbe[b] = arr
    has_bbe[b] = True
    bestedge[b] = best


@njit(cache=True)
def _expand_blossom(b0, endstage, n, endpoint, mate, label, labelend,
                    inblossom, bparent, bbase, childs, endps, bbe, has_bbe,
                    bestedge, unused, ints, dual, allow, queue, lbuf, lstack):
    work = [b0]
    while len(work) > 0:
        b = work.pop()
        ch = childs[b]
        for q in range(len(ch)):
            s = ch[q]
            bparent[s] = -1
            if s < n:
                inblossom[s] = s
            elif endstage and dual[s] == 0:
                work.append(s)
            else:
                cnt = _leaves(s, n, childs, lbuf, lstack)
                for i in range(cnt):
                    inblossom[lbuf[i]] = s

        if (not endstage) and label[b] == 2:
            ep = endps[b]
            L = len(ch)
            entrychild = inblossom[endpoint[labelend[b] ^ 1]]
            j = 0
            for q in range(L):
                if ch[q] == entrychild:
                    j = q
                    break
            if j & 1:
                j -= L
                jstep = 1
                endptrick = 0
            else:
                jstep = -1
                endptrick = 1
            p = labelend[b]
            while j != 0:
                label[endpoint[p ^ 1]] = 0
                label[endpoint[ep[j - endptrick] ^ endptrick ^ 1]] = 0
                _assign_label(endpoint[p ^ 1], 2, p, n, endpoint, mate, label,
                              labelend, inblossom, bbase, bestedge, childs,
                              queue, lbuf, lstack)
                allow[ep[j - endptrick] // 2] = True
                j += jstep
                p = ep[j - endptrick] ^ endptrick
                allow[p // 2] = True
                j += jstep
            bv = ch[j]
            label[endpoint[p ^ 1]] = 2
            label[bv] = 2
            labelend[endpoint[p ^ 1]] = p
            labelend[bv] = p
            bestedge[bv] = -1
            j += jstep
            while ch[j] != entrychild:
                bv = ch[j]
                if label[bv] == 1:
                    j += jstep
                    continue
                cnt = _leaves(bv, n, childs, lbuf, lstack)
                found = -1
                for i in range(cnt):
                    if label[lbuf[i]] != 0:
                        found = lbuf[i]
                        break
                if found != -1:
                    v = found
                    label[v] = 0
                    label[endpoint[mate[bbase[bv]]]] = 0
                    _assign_label(v, 2, labelend[v], n, endpoint, mate, label,
                                  labelend, inblossom, bbase, bestedge, childs,
                                  queue, lbuf, lstack)
                j += jstep

        label[b] = -1
        labelend[b] = -1
        childs[b] = np.empty(0, dtype=np.int64)
        endps[b] = np.empty(0, dtype=np.int64)
        bbase[b] = -1
        has_bbe[b] = False
        bbe[b] = np.empty(0, dtype=np.int64)
        bestedge[b] = -1
        unused[ints[0]] = b
        ints[0] += 1


@njit(cache=True)
def _augment_blossom(b0, v0, n, endpoint, mate, bparent, bbase, childs, endps):
    work_b = [b0]
    work_v = [v0]
    while len(work_b) > 0:
        b = work_b.pop()
        v = work_v.pop()
        t = v
        while bparent[t] != b:
            t = bparent[t]
        if t >= n:
            work_b.append(t)
            work_v.append(v)
        ch = childs[b]
        ep = endps[b]
        L = len(ch)
        i = 0
        for q in range(L):
            if ch[q] == t:
                i = q
                break
        j = i
        if i & 1:
            j -= L
            jstep = 1
            endptrick = 0
        else:
            jstep = -1
            endptrick = 1
        while j != 0:
            j += jstep
            t = ch[j]
            p = ep[j - endptrick] ^ endptrick
            if t >= n:
                work_b.append(t)
                work_v.append(endpoint[p])
            j += jstep
            t = ch[j]
            if t >= n:
                work_b.append(t)
                work_v.append(endpoint[p ^ 1])
            mate[endpoint[p]] = p ^ 1
            mate[endpoint[p ^ 1]] = p
        childs[b] = np.concatenate((ch[i:], ch[:i]))
        endps[b] = np.concatenate((ep[i:], ep[:i]))
        # The child rotated to the front becomes based at v once its own
        # (deferred) augmentation runs.
        bbase[b] = v


@njit(cache=True)
def _augment_matching(k, n, ei, ej, endpoint, mate, label, labelend, inblossom,
                      bparent, bbase, childs, endps):
    for side in range(2):
        if side == 0:
            s = ei[k]
            p = 2 * k + 1
        else:
            s = ej[k]
            p = 2 * k
        while True:
            bs = inblossom[s]
            if bs >= n:
                _augment_blossom(bs, s, n, endpoint, mate, bparent, bbase, childs, endps)
            mate[s] = p
            if labelend[bs] == -1:
                break
            t = endpoint[labelend[bs]]
            bt = inblossom[t]
            s = endpoint[labelend[bt]]
            j = endpoint[labelend[bt] ^ 1]
            if bt >= n:
                _augment_blossom(bt, j, n, endpoint, mate, bparent, bbase, childs, endps)
            mate[j] = labelend[bt]
            p = labelend[bt] ^ 1


@njit(cache=True)
def _solve(n, ei, ej, w):
    m = len(ei)
    endpoint = np.empty(2 * m, dtype=np.int64)
    deg = np.zeros(n + 1, dtype=np.int64)
    for k in range(m):
        endpoint[2 * k] = ei[k]
        endpoint[2 * k + 1] = ej[k]
        deg[ei[k] + 1] += 1
        deg[ej[k] + 1] += 1
    nb_ptr = np.cumsum(deg)
    fill = nb_ptr[:-1].copy()
    nb_p = np.empty(2 * m, dtype=np.int64)
    for k in range(m):
        nb_p[fill[ei[k]]] = 2 * k + 1
        fill[ei[k]] += 1
        nb_p[fill[ej[k]]] = 2 * k
        fill[ej[k]] += 1

    maxweight = 0
    for k in range(m):
        if w[k] > maxweight:
            maxweight = w[k]

    mate = np.full(n, -1, dtype=np.int64)
    label = np.zeros(2 * n, dtype=np.int64)
    labelend = np.full(2 * n, -1, dtype=np.int64)
    inblossom = np.arange(n)
    bparent = np.full(2 * n, -1, dtype=np.int64)
    bbase = np.full(2 * n, -1, dtype=np.int64)
    bbase[:n] = np.arange(n)
    childs = List.empty_list(_INT_ARRAY)
    endps = List.empty_list(_INT_ARRAY)
    bbe = List.empty_list(_INT_ARRAY)
    for _ in range(2 * n):
        childs.append(np.empty(0, dtype=np.int64))
        endps.append(np.empty(0, dtype=np.int64))
        bbe.append(np.empty(0, dtype=np.int64))
    has_bbe = np.zeros(2 * n, dtype=np.bool_)
    bestedge = np.full(2 * n, -1, dtype=np.int64)
    unused = np.arange(n, 2 * n)
    ints = np.array([n], dtype=np.int64)
    dual = np.zeros(2 * n, dtype=np.int64)
    dual[:n] = maxweight
    allow = np.zeros(m, dtype=np.bool_)
    queue = List.empty_list(types.int64)
    lbuf = np.empty(n, dtype=np.int64)
    lstack = np.empty(2 * n + 1, dtype=np.int64)
    pathbuf = np.empty(2 * n, dtype=np.int64)
    endbuf = np.empty(2 * n, dtype=np.int64)

    for _stage in range(n):
        label[:] = 0
        bestedge[:] = -1
        for b in range(n, 2 * n):
            if has_bbe[b]:
                has_bbe[b] = False
                bbe[b] = np.empty(0, dtype=np.int64)
        allow[:] = False
        queue.clear()
        for v in range(n):
            if mate[v] == -1 and label[inblossom[v]] == 0:
                _assign_label(v, 1, -1, n, endpoint, mate, label, labelend,
                              inblossom, bbase, bestedge, childs, queue, lbuf, lstack)
        augmented = False
        while True:
            while len(queue) > 0 and not augmented:
                v = queue.pop()
                for idx in range(nb_ptr[v], nb_ptr[v + 1]):
                    p = nb_p[idx]
                    k = p // 2
                    x = endpoint[p]
                    if inblossom[v] == inblossom[x]:
                        continue
                    kslack = 0
                    if not allow[k]:
                        kslack = _slack(k, ei, ej, w, dual)
                        if kslack <= 0:
                            allow[k] = True
                    if allow[k]:
                        if label[inblossom[x]] == 0:
                            _assign_label(x, 2, p ^ 1, n, endpoint, mate, label, labelend,
                                          inblossom, bbase, bestedge, childs, queue,
                                          lbuf, lstack)
                        elif label[inblossom[x]] == 1:
                            base = _scan_blossom(v, x, endpoint, label, labelend,
                                                 inblossom, bbase, pathbuf)
                            if base >= 0:
                                _add_blossom(base, k, n, ei, ej, w, endpoint, nb_ptr,
                                             nb_p, mate, label, labelend, inblossom,
                                             bparent, bbase, childs, endps, bbe,
                                             has_bbe, bestedge, unused, ints, dual,
                                             queue, lbuf, lstack, pathbuf, endbuf)
                            else:
                                _augment_matching(k, n, ei, ej, endpoint, mate, label,
                                                  labelend, inblossom, bparent, bbase,
                                                  childs, endps)
                                augmented = True
                                break
                        elif label[x] == 0:
                            label[x] = 2
                            labelend[x] = p ^ 1
                    elif label[inblossom[x]] == 1:
                        b = inblossom[v]
                        if bestedge[b] == -1 or kslack < _slack(bestedge[b], ei, ej, w, dual):
                            bestedge[b] = k
                    elif label[x] == 0:
                        if bestedge[x] == -1 or kslack < _slack(bestedge[x], ei, ej, w, dual):
                            bestedge[x] = k
            if augmented:
                break

            deltatype = -1
            delta = 0
            deltaedge = -1
            deltablossom = -1
            for v in range(n):
                if label[inblossom[v]] == 0 and bestedge[v] != -1:
                    d = _slack(bestedge[v], ei, ej, w, dual)
                    if deltatype == -1 or d < delta:
                        delta = d
                        deltatype = 2
                        deltaedge = bestedge[v]
            for b in range(2 * n):
                if bparent[b] == -1 and label[b] == 1 and bestedge[b] != -1:
                    d = _slack(bestedge[b], ei, ej, w, dual) // 2
                    if deltatype == -1 or d < delta:
                        delta = d
                        deltatype = 3
                        deltaedge = bestedge[b]
            for b in range(n, 2 * n):
                if (bbase[b] >= 0 and bparent[b] == -1 and label[b] == 2
                        and (deltatype == -1 or dual[b] < delta)):
                    delta = dual[b]
                    deltatype = 4
                    deltablossom = b
            if deltatype == -1:
                deltatype = 1
                delta = dual[0]
                for v in range(n):
                    if dual[v] < delta:
                        delta = dual[v]
                if delta < 0:
                    delta = 0

            for v in range(n):
                lb = label[inblossom[v]]
                if lb == 1:
                    dual[v] -= delta
                elif lb == 2:
                    dual[v] += delta
            for b in range(n, 2 * n):
                if bbase[b] >= 0 and bparent[b] == -1:
                    if label[b] == 1:
                        dual[b] += delta
                    elif label[b] == 2:
                        dual[b] -= delta

            if deltatype == 1:
                break
            elif deltatype == 2:
                allow[deltaedge] = True
                i = ei[deltaedge]
                if label[inblossom[i]] == 0:
                    i = ej[deltaedge]
                queue.append(i)
            elif deltatype == 3:
                allow[deltaedge] = True
                queue.append(ei[deltaedge])
            else:
                _expand_blossom(deltablossom, False, n, endpoint, mate, label,
                                labelend, inblossom, bparent, bbase, childs, endps,
                                bbe, has_bbe, bestedge, unused, ints, dual, allow,
                                queue, lbuf, lstack)
        if not augmented:
            break
        for b in range(n, 2 * n):
            if bparent[b] == -1 and bbase[b] >= 0 and label[b] == 1 and dual[b] == 0:
                _expand_blossom(b, True, n, endpoint, mate, label, labelend,
                                inblossom, bparent, bbase, childs, endps, bbe,
                                has_bbe, bestedge, unused, ints, dual, allow,
                                queue, lbuf, lstack)

    partner = np.full(n, -1, dtype=np.int64)
    for v in range(n):
        if mate[v] >= 0:
            partner[v] = endpoint[mate[v]]
    return partner, dual, bparent, bbase


def max_weight_matching(n, ei, ej, w):
    """Maximum-cardinality, maximum-weight matching on an integer-weighted graph.

    Parameters
    ----------
    n : int
        Number of vertices.
    ei, ej : int64 arrays
        Edge endpoints; no self loops, no parallel edges.
    w : int64 array
        Edge weights.  Keep ``|w| * n`` well inside int64.

    Returns
    -------
    partner : int64 array
        ``partner[v]`` is the mate of ``v`` or -1.
    dual : int64 array of length 2n
        Final dual solution (see module docstring for the scaling).
    parent : int64 array of length 2n
        Blossom parent of every vertex/blossom, -1 for top level.
    base : int64 array of length 2n
        ``base[b] >= 0`` marks blossom slots that are in use.
    """
    ei = np.ascontiguousarray(ei, dtype=np.int64)
    ej = np.ascontiguousarray(ej, dtype=np.int64)
    w = np.ascontiguousarray(w, dtype=np.int64)
    if n == 0:
        e = np.empty(0, dtype=np.int64)
        return e, e, e, e
    return _solve(int(n), ei, ej, w)


@njit(cache=True)
def _blossom_sum_matrix_free(i, j, parent, dual, depth_buf):
    # Sum of duals of blossoms that contain both i and j.
    cnt = 0
    b = parent[i]
    while b != -1:
        depth_buf[cnt] = b
        cnt += 1
        b = parent[b]
    total = 0
    b = parent[j]
    while b != -1:
        for q in range(cnt):
            if depth_buf[q] == b:
                total += dual[b]
                break
        b = parent[b]
    return total


@njit(cache=True)
def price_pairs(points, cost_scale, shift, partner_ok, dual, parent, max_report):
    """Find vertex pairs whose complete-graph edge violates dual feasibility.

    Edge weights are ``2 * (shift - round(dist * cost_scale))``; the check is
    run over every unordered pair.  Returns at most ``max_report`` violating
    pairs as an (r, 2) array.
    """
    n = points.shape[0]
    d = points.shape[1]
    out = np.empty((max_report, 2), dtype=np.int64)
    cnt = 0
    depth_buf = np.empty(2 * n + 1, dtype=np.int64)
    for i in range(n):
        if not partner_ok[i]:
            continue
        for j in range(i + 1, n):
            if not partner_ok[j]:
                continue
            s = 0.0
            for c in range(d):
                diff = points[i, c] - points[j, c]
                s += diff * diff
            ci = np.int64(np.rint(np.sqrt(s) * cost_scale))
            rhs = 4 * (shift - ci)
            lhs = dual[i] + dual[j]
            if lhs >= rhs:
                continue
            lhs += 2 * _blossom_sum_matrix_free(i, j, parent, dual, depth_buf)
            if lhs < rhs:
                if cnt < max_report:
                    out[cnt, 0] = i
                    out[cnt, 1] = j
                cnt += 1
    return out[:min(cnt, max_report)], cnt
