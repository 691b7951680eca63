import math

import numpy as np
import pytest

from steklov_lab import fem, geometry
from steklov_lab.geometry import DIRICHLET, NEUMANN, STEKLOV


def test_stiffness_reference_triangle():
    verts = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
    mesh = geometry.build_mesh(verts, np.array([[0, 1, 2]], np.int32))
    K = fem.assemble_stiffness(mesh).toarray()
    expected = np.array([[1.0, -0.5, -0.5],
                         [-0.5, 0.5, 0.0],
                         [-0.5, 0.0, 0.5]])
    assert np.allclose(K, expected)


def test_stiffness_annihilates_constants_and_matches_linears():
    mesh = geometry.make_disk_mesh(1.0, 0.1)
    K = fem.assemble_stiffness(mesh)
    ones = np.ones(mesh.n_vertices)
    assert np.max(np.abs(K @ ones)) < 1e-12
    # energy of f = x over the unit disk is pi
    fx = mesh.vertices[:, 0]
    assert fx @ (K @ fx) == pytest.approx(geometry.mesh_area(mesh), rel=1e-12)


def test_boundary_mass_total():
    mesh = geometry.make_disk_mesh(1.0, 0.1)
    B = fem.assemble_boundary_mass(mesh)
    ones = np.ones(B.vertices.size)
    total = ones @ (B.matrix @ ones)
    assert total == pytest.approx(geometry.boundary_length(mesh, STEKLOV))


def test_disk_spectrum_oracle():
    mesh = geometry.make_disk_mesh(1.0, 0.05)
    res = fem.steklov_spectrum(mesh, 7)
    assert abs(res.eigenvalues[0]) < 1e-10
    ref = np.array([1, 1, 2, 2, 3, 3])
    rel = np.abs(res.eigenvalues[1:] - ref) / ref
    assert np.max(rel) < 0.01
    assert res.clusters[0] == (0, 1)
    assert res.clusters[1] == (1, 3)
    assert res.clusters[2] == (3, 5)


def test_eigenpairs_satisfy_pencil():
    mesh = geometry.make_disk_mesh(1.0, 0.1)
    res = fem.steklov_spectrum(mesh, 5)
    lam = res.dtn
    B = res.boundary_mass
    V = res.boundary_vectors
    # B-orthonormal columns and small pencil residual
    assert np.allclose(V.T @ B @ V, np.eye(5), atol=1e-10)
    resid = lam @ V - B @ V @ np.diag(res.eigenvalues)
    assert np.max(np.abs(resid)) < 1e-10
    # DtN is symmetric PSD up to roundoff
    assert np.max(np.abs(lam - lam.T)) < 1e-10


def test_extension_consistency_and_rayleigh():
    mesh = geometry.make_disk_mesh(1.0, 0.1)
    res = fem.steklov_spectrum(mesh, 4)
    f = res.extensions[2]
    q = fem.rayleigh_quotient(mesh, f)
    assert q == pytest.approx(res.eigenvalues[2], rel=1e-10)
    # extension restricted to the boundary reproduces the boundary vector
    assert np.allclose(f[res.steklov_vertices], res.boundary_vectors[:, 2])


def test_harmonic_extension_of_linear_is_linear():
    mesh = geometry.make_disk_mesh(1.0, 0.1)
    g = mesh.vertices[:, 0] + 2.0 * mesh.vertices[:, 1]
    sk = fem.assemble_boundary_mass(mesh).vertices
    ext = fem.harmonic_extension(mesh, g[sk])
    assert np.max(np.abs(ext - g)) < 1e-10


def test_mixed_boundary_dirichlet_positive():
    mesh = geometry.make_disk_mesh(1.0, 0.1)
    arcs = [((0.0, math.pi), STEKLOV), ((math.pi, 2 * math.pi), DIRICHLET)]
    mesh = geometry.tag_boundary(mesh, arcs, by="angle", center=(0.0, 0.0))
    res = fem.steklov_spectrum(mesh, 3)
    # Steklov-Dirichlet spectrum is strictly positive
    assert res.eigenvalues[0] > 0.05


def test_neumann_part_shrinks_spectrum():
    mesh = geometry.make_disk_mesh(1.0, 0.1)
    arcs = [((0.0, math.pi), STEKLOV), ((math.pi, 2 * math.pi), NEUMANN)]
    mixed = geometry.tag_boundary(mesh, arcs, by="angle", center=(0.0, 0.0))
    full = fem.steklov_spectrum(mesh, 3).eigenvalues
    part = fem.steklov_spectrum(mixed, 3).eigenvalues
    assert abs(part[0]) < 1e-10
    assert part[1] > 0


def test_zero_trace_error():
    mesh = geometry.make_disk_mesh(1.0, 0.2)
    f = np.zeros(mesh.n_vertices)
    interior = np.setdiff1d(np.arange(mesh.n_vertices),
                            np.unique(mesh.boundary_edges))
    f[interior] = 1.0
    with pytest.raises(fem.ZeroBoundaryTraceError):
        fem.rayleigh_quotient(mesh, f)


def test_disconnected_component_raises():
    # two disjoint triangles; only one touches the steklov boundary
    verts = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0],
                      [3.0, 0.0], [4.0, 0.0], [3.0, 1.0]])
    tris = np.array([[0, 1, 2], [3, 4, 5]], np.int32)
    K = fem.assemble_stiffness(geometry.build_mesh(verts, tris))
    with pytest.raises(fem.FactorizationError):
        fem.dtn_matrix(K, np.array([0, 1, 2]))


def test_degenerate_triangle_raises():
    verts = np.array([[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]])
    mesh = geometry.build_mesh(verts, np.array([[0, 1, 2]], np.int32),
                               validate=False)
    with pytest.raises(fem.AssemblyError):
        fem.assemble_stiffness(mesh)


def test_multiplicity_clusters():
    vals = np.array([0.0, 1.0, 1.0005, 2.0, 3.0, 3.0001])
    assert fem.multiplicity_clusters(vals, 1e-2) == [(0, 1), (1, 3), (3, 4), (4, 6)]
    with pytest.raises(ValueError):
        fem.multiplicity_clusters(vals, 0.0)


def test_default_cluster_tol_floor():
    mesh = geometry.make_disk_mesh(1.0, 0.01)
    assert fem.default_cluster_rel_tol(mesh) == pytest.approx(1e-3)


def test_spectral_result_serialization(tmp_path):
    import json
    mesh = geometry.make_disk_mesh(1.0, 0.2)
    res = fem.steklov_spectrum(mesh, 3)
    path = tmp_path / "spec.json"
    fem.save_spectral_result(res, str(path))
    data = json.loads(path.read_text())
    assert data["format"] == "steklov-spectrum v1"
    back = np.array([float(s) for s in data["eigenvalues"]])
    assert np.array_equal(back, res.eigenvalues)  # 17 significant digits
    assert len(data["descriptor_hash"]) == 64
