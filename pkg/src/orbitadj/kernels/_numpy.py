"""Pure-numpy fallback kernels.

Signature-compatible with the jit twin and guaranteed to produce identical
integers; selected via the ``ORBITADJ_KERNELS`` environment flag or when
numba is unavailable.  Inner loops are vectorized per sweep centre using a
packed-bitset pairwise adjacency probe, which keeps the fallback usable for
test-sized graphs without attempting to match jit throughput.
"""

import numpy as np

__all__ = [
    "build_mirror",
    "three_node_pass",
    "rhs_pass",
    "chord_clique_pass",
    "adj_square_rows",
    "dense_matmul_rows",
]

_WORD = np.uint64(63)


def _pair_adjacency(bits, nodes):
    """Boolean matrix of adjacency between every ordered pair of ``nodes``."""
    words = bits[nodes][:, nodes >> 6]
    shifts = (nodes & 63).astype(np.uint64)
    return ((words >> shifts[np.newaxis, :]) & np.uint64(1)).astype(bool)


def _row_slots(indptr, indices, rows, targets):
    """Slot of each ``targets[k]`` inside the sorted row ``rows[k]``."""
    out = np.empty(rows.size, dtype=np.int64)
    for k in range(rows.size):
        r = rows[k]
        lo = indptr[r]
        out[k] = lo + np.searchsorted(indices[lo : indptr[r + 1]], targets[k])
    return out


def build_mirror(n, indptr, indices):
    rows = np.repeat(np.arange(n, dtype=np.int64), np.diff(indptr))
    return _row_slots(indptr, indices, indices.astype(np.int64), rows)


def _centre_pairs(indptr, indices, bits, c):
    """Neighbor pairs of centre c split into triangle and path halves.

    Returns (nb, tri_i, tri_j, path_i, path_j) as positions into the row,
    or None when the centre has fewer than two neighbors.
    """
    start, stop = indptr[c], indptr[c + 1]
    if stop - start < 2:
        return None
    nb = indices[start:stop].astype(np.int64)
    adj = _pair_adjacency(bits, nb)
    iu, ju = np.triu_indices(nb.size, 1)
    closed = adj[iu, ju]
    return nb, iu[closed], ju[closed], iu[~closed], ju[~closed]


def three_node_pass(n, indptr, indices, mirror, bits, c_lo, c_hi, a12, a33, a11_2):
    paths = 0
    triangles = 0
    one = np.int64(1)
    for c in range(c_lo, c_hi):
        hit = _centre_pairs(indptr, indices, bits, c)
        if hit is None:
            continue
        nb, ti, tj, pi, pj = hit
        start = indptr[c]
        if pi.size:
            paths += pi.size
            np.add.at(a12, start + pi, one)
            np.add.at(a12, start + pj, one)
            np.add.at(a11_2, (nb[pi], nb[pj]), one)
            np.add.at(a11_2, (nb[pj], nb[pi]), one)
        if ti.size:
            gate = nb[ti] > c  # count each triangle at its smallest corner
            ti, tj = ti[gate], tj[gate]
            if ti.size:
                triangles += ti.size
                si = start + ti
                sj = start + tj
                t = _row_slots(indptr, indices, nb[ti], nb[tj])
                slots = np.concatenate([si, mirror[si], sj, mirror[sj], t, mirror[t]])
                np.add.at(a33, slots, one)
    return paths, triangles


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
    one = np.int64(1)
    for c in range(c_lo, c_hi):
        hit = _centre_pairs(indptr, indices, bits, c)
        if hit is None:
            continue
        nb, ti, tj, pi, pj = hit
        start = indptr[c]
        if ti.size:
            si = start + ti  # entry (u, c)
            sj = start + tj  # entry (v, c)
            t = _row_slots(indptr, indices, nb[ti], nb[tj])  # entry (v, u)
            tm = mirror[t]  # entry (u, v)
            np.add.at(acc_a, tm, a33[sj] - one)
            np.add.at(acc_a, t, a33[si] - one)
            np.add.at(acc_b, tm, a33[tm] - one)
            np.add.at(acc_b, t, a33[t] - one)
            np.add.at(acc_c, tm, a12[si])
            np.add.at(acc_c, t, a12[sj])
            np.add.at(acc_d, tm, a12[mirror[sj]])
            np.add.at(acc_d, t, a12[mirror[si]])
        if pi.size:
            si = start + pi  # entry (u, c)
            sj = start + pj  # entry (v, c)
            u = nb[pi]
            v = nb[pj]
            shared = a11_2[u, v].astype(np.int64) - one
            np.add.at(acc_e, si, a12[sj] - one)
            np.add.at(acc_e, sj, a12[si] - one)
            np.add.at(acc_f, si, a12[mirror[si]])
            np.add.at(acc_f, sj, a12[mirror[sj]])
            np.add.at(acc_g, si, a12[si] - one)
            np.add.at(acc_g, sj, a12[sj] - one)
            np.add.at(acc_h, si, a33[sj])
            np.add.at(acc_h, sj, a33[si])
            np.add.at(acc_i, si, a12[mirror[sj]])
            np.add.at(acc_i, sj, a12[mirror[si]])
            np.add.at(acc_j, si, shared)
            np.add.at(acc_j, sj, shared)
            if eq4_mask & 1:
                np.add.at(acc4a, (u, v), a12[si] - one)
                np.add.at(acc4a, (v, u), a12[sj] - one)
            if eq4_mask & 2:
                np.add.at(acc4b, (u, v), a33[sj])
                np.add.at(acc4b, (v, u), a33[si])
            if eq4_mask & 4:
                np.add.at(acc4c, (u, v), a12[mirror[sj]])
                np.add.at(acc4c, (v, u), a12[mirror[si]])
            if eq4_mask & 8:
                np.add.at(acc4d, (u, v), shared)
                np.add.at(acc4d, (v, u), shared)


def chord_clique_pass(n, indptr, indices, mirror, bits, u_lo, u_hi, a1414, a1212, scratch):
    one = np.int64(1)
    for u in range(u_lo, u_hi):
        row_u = indices[indptr[u] : indptr[u + 1]]
        for w in row_u:
            if w <= u:
                continue
            common = np.intersect1d(
                row_u, indices[indptr[w] : indptr[w + 1]], assume_unique=True
            ).astype(np.int64)
            if common.size < 2:
                continue
            adj = _pair_adjacency(bits, common)
            iu, ju = np.triu_indices(common.size, 1)
            closed = adj[iu, ju]
            x, y = common[iu[closed]], common[ju[closed]]
            if x.size:
                s = _row_slots(indptr, indices, y, x)  # entry (x, y)
                np.add.at(a1414, s, one)
                np.add.at(a1414, mirror[s], one)
            x, y = common[iu[~closed]], common[ju[~closed]]
            if x.size:
                np.add.at(a1212, (x, y), one)
                np.add.at(a1212, (y, x), one)


def adj_square_rows(n, indptr, indices, r_lo, r_hi, out):
    out[: r_hi - r_lo] = 0
    for r in range(r_lo, r_hi):
        row = out[r - r_lo]
        for x in indices[indptr[r] : indptr[r + 1]]:
            row[indices[indptr[x] : indptr[x + 1]]] += 1


def dense_matmul_rows(n, indptr, indices, dense, r_lo, r_hi, out):
    for r in range(r_lo, r_hi):
        nbrs = indices[indptr[r] : indptr[r + 1]]
        if nbrs.size:
            np.sum(dense[nbrs], axis=0, dtype=out.dtype, out=out[r - r_lo])
        else:
            out[r - r_lo] = 0
