"""Jit-compiled enumeration and matmul kernels.

Slot convention shared with the pure-numpy twin: for the undirected CSR slot
``p`` inside row ``r`` with ``indices[p] = w``, slot arrays store the ordered
matrix entry ``(w, r)``.  ``mirror[p]`` is the position of ``r`` inside row
``indices[p]``, so the mirrored slot holds the transposed entry.  Converting a
slot array to a CSR-of-rows data vector is the gather ``values[mirror]``.

All kernels take explicit ``lo..hi`` outer-loop ranges so callers can shard
work across threads with private accumulators; every accumulator is an exact
integer, which makes any merge order reproduce the single-threaded result.
"""

import numpy as np
from numba import njit

__all__ = [
    "build_mirror",
    "three_node_pass",
    "rhs_pass",
    "chord_clique_pass",
    "adj_square_rows",
    "dense_matmul_rows",
]


@njit(cache=True, nogil=True, inline="always")
def _bit(bits, u, v):
    return (bits[u, v >> 6] >> np.uint64(v & 63)) & np.uint64(1)


@njit(cache=True, nogil=True, inline="always")
def _find_slot(indptr, indices, row, target):
    """Position of ``target`` inside the sorted row; -1 when absent."""
    lo = indptr[row]
    hi = indptr[row + 1]
    while lo < hi:
        mid = (lo + hi) // 2
        x = indices[mid]
        if x == target:
            return mid
        if x < target:
            lo = mid + 1
        else:
            hi = mid
    return np.int64(-1)


@njit(cache=True, nogil=True)
def build_mirror(n, indptr, indices):
    mirror = np.empty(indices.size, dtype=np.int64)
    for r in range(n):
        for p in range(indptr[r], indptr[r + 1]):
            mirror[p] = _find_slot(indptr, indices, indices[p], r)
    return mirror


@njit(cache=True, nogil=True)
def three_node_pass(n, indptr, indices, mirror, bits, c_lo, c_hi, a12, a33, a11_2):
    """Wedge sweep over centres in [c_lo, c_hi).

    Every unordered neighbor pair (u, v) of a centre c is either a triangle
    edge (tallied once, at the minimum-id corner) or the two ends of an
    induced 3-path whose unique centre is c.  Fills the one-hop slot arrays
    for path and triangle adjacency and the dense two-hop end-to-end counts.
    Returns (induced path count, triangle count).
    """
    paths = np.int64(0)
    triangles = np.int64(0)
    for c in range(c_lo, c_hi):
        start = indptr[c]
        stop = indptr[c + 1]
        for pi in range(start, stop):
            u = indices[pi]
            for pj in range(pi + 1, stop):
                v = indices[pj]
                if _bit(bits, u, v):
                    if c < u:  # count each triangle at its smallest corner
                        triangles += 1
                        t = _find_slot(indptr, indices, u, v)  # entry (v, u)
                        a33[pi] += 1
                        a33[mirror[pi]] += 1
                        a33[pj] += 1
                        a33[mirror[pj]] += 1
                        a33[t] += 1
                        a33[mirror[t]] += 1
                else:
                    # induced path u - c - v: ends on the path-end orbit
                    paths += 1
                    a12[pi] += 1
                    a12[pj] += 1
                    a11_2[u, v] += 1
                    a11_2[v, u] += 1
    return paths, triangles


@njit(cache=True, nogil=True)
def rhs_pass(
    n,
    indptr,
    indices,
    mirror,
    bits,
    c_lo,
    c_hi,
    a12,
    a33,
    a11_2,
    acc_a,
    acc_b,
    acc_c,
    acc_d,
    acc_e,
    acc_f,
    acc_g,
    acc_h,
    acc_i,
    acc_j,
    acc4a,
    acc4b,
    acc4c,
    acc4d,
    eq4_mask,
):
    """Second wedge sweep: accumulate every redundancy-equation right side.

    Triangle-sourced sums land on the ordered slot pairs (u,v)/(v,u) with the
    sweep centre as the third corner; since each triangle is swept once per
    corner, all six ordered pairs are covered exactly once without gating.
    Path-sourced sums land on the ordered end-to-centre slots (u,c)/(v,c) and,
    for the two-hop system, on the dense end pairs (u,v)/(v,u).  ``eq4_mask``
    bits 0..3 enable acc4a..acc4d individually, so the memory-heavy dense
    accumulators can be produced in separate sweeps.
    """
    for c in range(c_lo, c_hi):
        start = indptr[c]
        stop = indptr[c + 1]
        for pi in range(start, stop):
            u = indices[pi]
            for pj in range(pi + 1, stop):
                v = indices[pj]
                if _bit(bits, u, v):
                    t = _find_slot(indptr, indices, u, v)  # entry (v, u)
                    tm = mirror[t]  # entry (u, v)
                    # ordered pair (u, v), third corner c
                    acc_a[tm] += a33[pj] - 1
                    acc_b[tm] += a33[tm] - 1
                    acc_c[tm] += a12[pi]
                    acc_d[tm] += a12[mirror[pj]]
                    # ordered pair (v, u), third corner c
                    acc_a[t] += a33[pi] - 1
                    acc_b[t] += a33[t] - 1
                    acc_c[t] += a12[pj]
                    acc_d[t] += a12[mirror[pi]]
                else:
                    shared = a11_2[u, v] - 1
                    # end u with centre c (other end v)
                    acc_e[pi] += a12[pj] - 1
                    acc_f[pi] += a12[mirror[pi]]
                    acc_g[pi] += a12[pi] - 1
                    acc_h[pi] += a33[pj]
                    acc_i[pi] += a12[mirror[pj]]
                    acc_j[pi] += shared
                    # end v with centre c (other end u)
                    acc_e[pj] += a12[pi] - 1
                    acc_f[pj] += a12[mirror[pj]]
                    acc_g[pj] += a12[pj] - 1
                    acc_h[pj] += a33[pi]
                    acc_i[pj] += a12[mirror[pi]]
                    acc_j[pj] += shared
                    if eq4_mask & 1:
                        acc4a[u, v] += a12[pi] - 1
                        acc4a[v, u] += a12[pj] - 1
                    if eq4_mask & 2:
                        acc4b[u, v] += a33[pj]
                        acc4b[v, u] += a33[pi]
                    if eq4_mask & 4:
                        acc4c[u, v] += a12[mirror[pj]]
                        acc4c[v, u] += a12[mirror[pi]]
                    if eq4_mask & 8:
                        acc4d[u, v] += shared
                        acc4d[v, u] += shared


@njit(cache=True, nogil=True)
def chord_clique_pass(
    n, indptr, indices, mirror, bits, u_lo, u_hi, a1414, a1212, scratch
):
    """Common-neighborhood sweep over edges whose smaller endpoint is in range.

    For each edge (u, w) and each pair {x, y} of their common neighbors: if
    x-y is an edge, {u,w,x,y} is a 4-clique, tallied on the ordered pair
    (x, y) — each clique is reached exactly once per complementary edge, so
    all 12 ordered pairs accumulate once.  If x-y is no edge, {x,u,y,w} is a
    chordal 4-cycle with chord u-w, tallied densely on its unique degree-2
    pair (x, y) — reached exactly once since the chord is unique.
    """
    for u in range(u_lo, u_hi):
        for p in range(indptr[u], indptr[u + 1]):
            w = indices[p]
            if w <= u:
                continue
            # merge the two sorted rows into the common neighborhood
            a = indptr[u]
            a_end = indptr[u + 1]
            b = indptr[w]
            b_end = indptr[w + 1]
            k = 0
            while a < a_end and b < b_end:
                x = indices[a]
                y = indices[b]
                if x == y:
                    scratch[k] = x
                    k += 1
                    a += 1
                    b += 1
                elif x < y:
                    a += 1
                else:
                    b += 1
            for i in range(k):
                x = scratch[i]
                for j in range(i + 1, k):
                    y = scratch[j]
                    if _bit(bits, x, y):
                        s = _find_slot(indptr, indices, y, x)  # entry (x, y)
                        a1414[s] += 1
                        a1414[mirror[s]] += 1
                    else:
                        a1212[x, y] += 1
                        a1212[y, x] += 1


@njit(cache=True, nogil=True)
def adj_square_rows(n, indptr, indices, r_lo, r_hi, out):
    """Dense rows [r_lo, r_hi) of the squared adjacency matrix (diagonal kept)."""
    for r in range(r_lo, r_hi):
        row = out[r - r_lo]
        row[:] = 0
        for p in range(indptr[r], indptr[r + 1]):
            x = indices[p]
            for q in range(indptr[x], indptr[x + 1]):
                row[indices[q]] += 1


@njit(cache=True, nogil=True)
def dense_matmul_rows(n, indptr, indices, dense, r_lo, r_hi, out):
    """Rows [r_lo, r_hi) of adjacency @ dense (exact integer row adds)."""
    for r in range(r_lo, r_hi):
        row = out[r - r_lo]
        row[:] = 0
        for p in range(indptr[r], indptr[r + 1]):
            x = indices[p]
            src = dense[x]
            for j in range(n):
                row[j] += src[j]
