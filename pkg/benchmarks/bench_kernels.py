"""Benchmark the numba kernels against the pure numpy/python fallbacks.

Run with the default environment to compare both backends in-process; run with
STEKLOV_LAB_DISABLE_NUMBA=1 to confirm the fallback path end to end.
"""

import time

import numpy as np

from steklov_lab import fem, geometry, kernels, nodal


def timeit(fn, repeat=5):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_stiffness(mesh):
    coords = geometry.triangle_coords(mesh)
    weights = np.asarray(mesh.tri_weight, float)
    results = {}
    results["numpy"] = timeit(lambda: kernels.stiffness_local_numpy(coords, weights))
    if kernels.USING_NUMBA:
        nt = coords.shape[0]
        out = np.empty((nt, 3, 3))
        area2 = np.empty(nt)
        cc = np.ascontiguousarray(coords)
        ww = np.ascontiguousarray(weights)
        kernels._stiffness_local_jit(cc, ww, out, area2)  # compile
        results["numba"] = timeit(lambda: kernels._stiffness_local_jit(cc, ww, out, area2))
    return results


def bench_union(mesh, field):
    signs = nodal.vertex_signs(field)
    tri_signs = signs[mesh.triangles]
    piece_pos = np.full(mesh.n_triangles, -1, np.int64)
    piece_neg = np.full(mesh.n_triangles, -1, np.int64)
    has_pos = np.any(tri_signs == 1, axis=1)
    has_neg = np.any(tri_signs == -1, axis=1)
    n_pos = int(has_pos.sum())
    piece_pos[has_pos] = np.arange(n_pos)
    piece_neg[has_neg] = n_pos + np.arange(int(has_neg.sum()))
    n_pieces = n_pos + int(has_neg.sum())
    edges, ta, tb = geometry.interior_edges_with_triangles(mesh)
    ta = ta.astype(np.int64)
    tb = tb.astype(np.int64)
    sa = signs[edges[:, 0]].astype(np.int64)
    sb = signs[edges[:, 1]].astype(np.int64)

    def run(fn):
        parent = np.arange(n_pieces, dtype=np.int64)
        fn(parent, piece_pos, piece_neg, ta, tb, sa, sb)

    results = {"python": timeit(lambda: run(kernels._union_sign_pieces_py))}
    if kernels.USING_NUMBA:
        run(kernels.union_sign_pieces)  # compile
        results["numba"] = timeit(lambda: run(kernels.union_sign_pieces))
    return results


def main():
    print(f"backend: {'numba' if kernels.USING_NUMBA else 'numpy/python fallback'}")
    mesh = geometry.make_disk_mesh(1.0, 0.01)
    print(f"disk mesh: {mesh.n_vertices} vertices, {mesh.n_triangles} triangles")

    res = bench_stiffness(mesh)
    print("\nstiffness_local (local P1 matrices):")
    for name, t in res.items():
        print(f"  {name:8s} {t * 1e3:9.3f} ms")
    if "numba" in res:
        print(f"  speedup numba vs numpy: {res['numpy'] / res['numba']:.2f}x")

    spec = fem.steklov_spectrum(mesh, 8)
    res = bench_union(mesh, spec.extensions[7])
    print("\nunion_sign_pieces (nodal union-find):")
    for name, t in res.items():
        print(f"  {name:8s} {t * 1e3:9.3f} ms")
    if "numba" in res:
        print(f"  speedup numba vs python: {res['python'] / res['numba']:.2f}x")


if __name__ == "__main__":
    main()
