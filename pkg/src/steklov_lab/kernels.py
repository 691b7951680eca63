"""Hot numeric kernels, numba-accelerated when available.

Set the environment variable ``STEKLOV_LAB_DISABLE_NUMBA=1`` before import to
force the pure numpy/python fallback path (useful for debugging and for the
benchmark in ``benchmarks/bench_kernels.py``).
"""

import os

import numpy as np


def _no_jit(*args, **kwargs):
    if args and callable(args[0]):
        return args[0]

    def wrap(func):
        return func

    return wrap


NUMBA_DISABLED = os.environ.get("STEKLOV_LAB_DISABLE_NUMBA", "") == "1"

try:
    if NUMBA_DISABLED:
        raise ImportError("numba disabled by STEKLOV_LAB_DISABLE_NUMBA")
    from numba import njit

    USING_NUMBA = True
except ImportError:
    njit = _no_jit
    USING_NUMBA = False


# ---------------------------------------------------------------------------
# P1 stiffness assembly
# ---------------------------------------------------------------------------

def stiffness_local_numpy(coords, weights):
    """Local 3x3 Dirichlet-energy matrices for P1 triangles, vectorized.

    coords: (nt, 3, 2) triangle vertex coordinates (CCW), weights: (nt,).
    Returns (nt, 3, 3) local matrices and the signed doubled areas (nt,).
    """
    x = coords[:, :, 0]
    y = coords[:, :, 1]
    b = np.stack([y[:, 1] - y[:, 2], y[:, 2] - y[:, 0], y[:, 0] - y[:, 1]], axis=1)
    c = np.stack([x[:, 2] - x[:, 1], x[:, 0] - x[:, 2], x[:, 1] - x[:, 0]], axis=1)
    area2 = x[:, 0] * b[:, 0] + x[:, 1] * b[:, 1] + x[:, 2] * b[:, 2]
    # degenerate triangles are reported by the caller from area2
    with np.errstate(divide="ignore", invalid="ignore"):
        scale = weights / (2.0 * area2)
    local = (b[:, :, None] * b[:, None, :] + c[:, :, None] * c[:, None, :])
    local *= scale[:, None, None]
    return local, area2


def _stiffness_local_loop(coords, weights, out, area2):
    for t in range(coords.shape[0]):
        x0 = coords[t, 0, 0]
        y0 = coords[t, 0, 1]
        x1 = coords[t, 1, 0]
        y1 = coords[t, 1, 1]
        x2 = coords[t, 2, 0]
        y2 = coords[t, 2, 1]
        b0 = y1 - y2
        b1 = y2 - y0
        b2 = y0 - y1
        c0 = x2 - x1
        c1 = x0 - x2
        c2 = x1 - x0
        a2 = x0 * b0 + x1 * b1 + x2 * b2
        area2[t] = a2
        # leave the degeneracy report to the caller (numba would raise here)
        s = weights[t] / (2.0 * a2) if a2 != 0.0 else 0.0
        out[t, 0, 0] = s * (b0 * b0 + c0 * c0)
        out[t, 0, 1] = s * (b0 * b1 + c0 * c1)
        out[t, 0, 2] = s * (b0 * b2 + c0 * c2)
        out[t, 1, 0] = out[t, 0, 1]
        out[t, 1, 1] = s * (b1 * b1 + c1 * c1)
        out[t, 1, 2] = s * (b1 * b2 + c1 * c2)
        out[t, 2, 0] = out[t, 0, 2]
        out[t, 2, 1] = out[t, 1, 2]
        out[t, 2, 2] = s * (b2 * b2 + c2 * c2)


_stiffness_local_jit = njit(cache=True)(_stiffness_local_loop)


def stiffness_local(coords, weights):
    """Local stiffness matrices via the selected backend."""
    if USING_NUMBA:
        nt = coords.shape[0]
        out = np.empty((nt, 3, 3))
        area2 = np.empty(nt)
        _stiffness_local_jit(np.ascontiguousarray(coords), np.ascontiguousarray(weights), out, area2)
        return out, area2
    return stiffness_local_numpy(coords, weights)


# ---------------------------------------------------------------------------
# Union-find over signed sub-triangle pieces (nodal decomposition)
# ---------------------------------------------------------------------------

def _uf_find(parent, i):
    while parent[i] != i:
        parent[i] = parent[parent[i]]
        i = parent[i]
    return i


def _union_sign_pieces(parent, piece_pos, piece_neg, tri_a, tri_b, sign_a, sign_b):
    """Union pieces of the same sign across shared interior edges.

    tri_a/tri_b: triangles on either side of each interior edge.
    sign_a/sign_b: signs (-1, 0, +1) of the field at the edge endpoints.
    A sign is present on an edge iff one of its endpoints carries it.
    """
    for k in range(tri_a.shape[0]):
        ta = tri_a[k]
        tb = tri_b[k]
        sa = sign_a[k]
        sb = sign_b[k]
        if sa == 1 or sb == 1:
            pa = piece_pos[ta]
            pb = piece_pos[tb]
            if pa >= 0 and pb >= 0:
                ra = _uf_find(parent, pa)
                rb = _uf_find(parent, pb)
                if ra != rb:
                    parent[rb] = ra
        if sa == -1 or sb == -1:
            pa = piece_neg[ta]
            pb = piece_neg[tb]
            if pa >= 0 and pb >= 0:
                ra = _uf_find(parent, pa)
                rb = _uf_find(parent, pb)
                if ra != rb:
                    parent[rb] = ra


_union_sign_pieces_py = _union_sign_pieces

if USING_NUMBA:
    _uf_find = njit(cache=True)(_uf_find)
    union_sign_pieces = njit(cache=True)(_union_sign_pieces)
else:
    union_sign_pieces = _union_sign_pieces


def resolve_roots(parent):
    """Flatten a union-find parent array to root labels."""
    parent = np.asarray(parent)
    out = np.empty_like(parent)
    for i in range(parent.shape[0]):
        j = i
        while parent[j] != j:
            j = parent[j]
        out[i] = j
    return out
