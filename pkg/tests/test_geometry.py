import math

import numpy as np
import pytest

from steklov_lab import geometry
from steklov_lab.geometry import DIRICHLET, NEUMANN, STEKLOV


def test_disk_mesh_basic():
    mesh = geometry.make_disk_mesh(1.0, 0.1)
    geometry.validate_mesh(mesh)
    assert np.all(geometry.triangle_areas(mesh) > 0)
    assert abs(geometry.mesh_area(mesh) - math.pi) < 0.02
    assert abs(geometry.boundary_length(mesh) - 2 * math.pi) < 0.02
    assert geometry.max_edge_length(mesh) <= 1.5 * 0.1
    assert set(mesh.boundary_tags) == {STEKLOV}


def test_disk_mesh_scaling_determinism():
    small = geometry.make_disk_mesh(1.0, 0.05)
    big = geometry.make_disk_mesh(2.0, 0.1)
    assert np.array_equal(small.triangles, big.triangles)
    assert np.allclose(2.0 * small.vertices, big.vertices)


def test_disk_mesh_rejects_bad_params():
    with pytest.raises(geometry.ParameterError):
        geometry.make_disk_mesh(1.0, 2.0)
    with pytest.raises(geometry.ParameterError):
        geometry.make_disk_mesh(-1.0, 0.1)


def test_annulus_mesh():
    mesh = geometry.make_annulus_mesh(0.5, 1.0, 0.07)
    geometry.validate_mesh(mesh)
    assert len(geometry.boundary_loops(mesh)) == 2
    expected = math.pi * (1.0 - 0.25)
    assert abs(geometry.mesh_area(mesh) - expected) < 0.03


def test_strip_mesh_periodic_is_flat():
    mesh = geometry.make_strip_mesh(2 * math.pi, 0.5, 0.1, periodic=True)
    geometry.validate_mesh(mesh)
    assert mesh.period_x == pytest.approx(2 * math.pi)
    # exactly flat: total area is L*w to rounding
    assert geometry.mesh_area(mesh) == pytest.approx(2 * math.pi * 0.5)
    assert len(geometry.boundary_loops(mesh)) == 2
    tags = set(mesh.boundary_tags)
    assert tags == {STEKLOV, NEUMANN}


def test_strip_mesh_nonperiodic_sides():
    mesh = geometry.make_strip_mesh(2.0, 0.5, 0.1, periodic=False,
                                    side_tag=DIRICHLET)
    mids = geometry.boundary_edge_midpoints(mesh)
    sides = mesh.boundary_tags == DIRICHLET
    assert np.all(np.isclose(mids[sides, 0], 0.0) | np.isclose(mids[sides, 0], 2.0))


def test_tag_boundary_by_angle():
    mesh = geometry.make_disk_mesh(1.0, 0.1)
    arcs = [((0.0, math.pi), STEKLOV), ((math.pi, 2 * math.pi), NEUMANN)]
    tagged = geometry.tag_boundary(mesh, arcs, by="angle", center=(0.0, 0.0))
    mids = geometry.boundary_edge_midpoints(tagged)
    clear = np.abs(mids[:, 1]) > 0.05  # skip edges straddling the cut angles
    upper = mids[:, 1] > 0
    assert np.all(tagged.boundary_tags[clear & upper] == STEKLOV)
    assert np.all(tagged.boundary_tags[clear & ~upper] == NEUMANN)


def test_tag_boundary_requires_steklov():
    mesh = geometry.make_disk_mesh(1.0, 0.1)
    with pytest.raises(geometry.TaggingError):
        geometry.tag_boundary(mesh, [((0.0, 2 * math.pi), NEUMANN)],
                              by="angle", center=(0.0, 0.0))


def test_refine_quadruples_triangles():
    mesh = geometry.make_disk_mesh(1.0, 0.2)
    fine = geometry.refine(mesh)
    geometry.validate_mesh(fine)
    assert fine.n_triangles == 4 * mesh.n_triangles
    assert geometry.mesh_area(fine) == pytest.approx(geometry.mesh_area(mesh))
    assert geometry.max_edge_length(fine) == pytest.approx(
        0.5 * geometry.max_edge_length(mesh))


def test_extract_submesh_interface_tag():
    mesh = geometry.make_disk_mesh(1.0, 0.1)
    cen = geometry.triangle_coords(mesh).mean(axis=1)
    sub = geometry.extract_submesh(mesh, cen[:, 1] > 0, interface_tag=NEUMANN)
    geometry.validate_mesh(sub)
    tags = set(sub.boundary_tags)
    assert tags == {STEKLOV, NEUMANN}
    mids = geometry.boundary_edge_midpoints(sub)
    interface = sub.boundary_tags == NEUMANN
    assert np.all(np.abs(mids[interface, 1]) < 0.1)


def test_mesh_text_roundtrip(tmp_path):
    mesh = geometry.make_strip_mesh(1.0, 0.3, 0.1, periodic=True)
    path = tmp_path / "strip.msh"
    geometry.save_mesh(mesh, str(path))
    back = geometry.load_mesh(str(path))
    assert np.array_equal(mesh.vertices, back.vertices)
    assert np.array_equal(mesh.triangles, back.triangles)
    assert np.array_equal(mesh.boundary_edges, back.boundary_edges)
    assert list(mesh.boundary_tags) == list(back.boundary_tags)
    assert np.array_equal(mesh.edge_density, back.edge_density)
    assert back.period_x == mesh.period_x
    assert geometry.mesh_to_text(mesh) == geometry.mesh_to_text(back)


def test_validate_rejects_inverted_triangle():
    verts = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
    tris = np.array([[0, 2, 1]], np.int32)  # clockwise
    mesh = geometry.build_mesh(verts, np.array([[0, 1, 2]], np.int32))
    from dataclasses import replace
    bad = replace(mesh, triangles=tris)
    with pytest.raises(geometry.MeshError):
        geometry.validate_mesh(bad)


def test_topology_invariants():
    assert geometry.DISK_TOPOLOGY.orientable
    assert geometry.ANNULUS_TOPOLOGY.boundary_components == 2
    with pytest.raises(geometry.ParameterError):
        geometry.SurfaceTopology(orientable=True, genus=-1)
