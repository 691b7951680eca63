"""Planar triangle meshes with tagged boundary segments.

A mesh carries the discrete problem data: vertex coordinates, CCW triangles,
boundary edges tagged steklov/neumann/dirichlet, a positive density per
boundary edge and a positive weight per triangle.  Meshes may be periodic in
x (flat cylinders): geometric quantities then use minimum-image coordinate
differences, so the strip [0, L) x [0, w] is an exactly flat cylinder.
"""

from dataclasses import dataclass, replace
import math

import numpy as np
from scipy.spatial import Delaunay

STEKLOV = "steklov"
NEUMANN = "neumann"
DIRICHLET = "dirichlet"
TAGS = (STEKLOV, NEUMANN, DIRICHLET)


class MeshError(ValueError):
    pass


class ParameterError(MeshError):
    pass


class TaggingError(MeshError):
    pass


@dataclass(frozen=True)
class Mesh2D:
    """Immutable planar triangulation with tagged boundary."""

    vertices: np.ndarray       # (nv, 2) float
    triangles: np.ndarray      # (nt, 3) int, CCW
    boundary_edges: np.ndarray  # (nb, 2) int
    boundary_tags: np.ndarray   # (nb,) object/str, entries in TAGS
    edge_density: np.ndarray    # (nb,) float, used on steklov edges
    tri_weight: np.ndarray      # (nt,) float
    period_x: float = 0.0       # > 0: x identified modulo period_x

    def __post_init__(self):
        for name in ("vertices", "triangles", "boundary_edges",
                     "boundary_tags", "edge_density", "tri_weight"):
            arr = np.asarray(getattr(self, name))
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)

    @property
    def n_vertices(self):
        return self.vertices.shape[0]

    @property
    def n_triangles(self):
        return self.triangles.shape[0]


@dataclass(frozen=True)
class SurfaceTopology:
    """Topological metadata used by the multiplicity bound formulas."""

    orientable: bool
    genus: int = 0
    boundary_components: int = 1
    p_invariant: int = 0

    def __post_init__(self):
        if self.genus < 0 or self.boundary_components < 1:
            raise ParameterError("genus must be >= 0 and boundary components >= 1")
        if self.orientable:
            # chi = 2 - 2*genus - l, so p = 1 - chi - l = 2*genus + 2*l - l - 1
            expected = 2 * self.genus + self.boundary_components - 1
            if self.p_invariant not in (0, expected):
                raise ParameterError("p_invariant inconsistent with orientable genus/boundary data")


DISK_TOPOLOGY = SurfaceTopology(orientable=True, genus=0, boundary_components=1)
ANNULUS_TOPOLOGY = SurfaceTopology(orientable=True, genus=0, boundary_components=2)


# ---------------------------------------------------------------------------
# geometric helpers (periodicity-aware)
# ---------------------------------------------------------------------------

def _wrap_delta(dx, period):
    if period > 0:
        return dx - period * np.round(dx / period)
    return dx


def triangle_coords(mesh):
    """Per-triangle local vertex coordinates (nt, 3, 2), unwrapped.

    The first vertex anchors the frame; the others are shifted by the
    minimum-image rule so seam triangles of periodic meshes are geometrically
    correct.
    """
    coords = mesh.vertices[mesh.triangles].astype(float)
    if mesh.period_x > 0:
        anchor = coords[:, :1, 0]
        coords[:, :, 0] = anchor[:, 0][:, None] + _wrap_delta(coords[:, :, 0] - anchor, mesh.period_x)
    return coords


def triangle_areas(mesh):
    c = triangle_coords(mesh)
    return 0.5 * ((c[:, 1, 0] - c[:, 0, 0]) * (c[:, 2, 1] - c[:, 0, 1])
                  - (c[:, 2, 0] - c[:, 0, 0]) * (c[:, 1, 1] - c[:, 0, 1]))


def mesh_area(mesh):
    return float(np.sum(triangle_areas(mesh)))


def edge_vector(mesh, v0, v1):
    d = mesh.vertices[v1] - mesh.vertices[v0]
    d = d.astype(float)
    if mesh.period_x > 0:
        d[..., 0] = _wrap_delta(d[..., 0], mesh.period_x)
    return d


def boundary_edge_lengths(mesh):
    d = edge_vector(mesh, mesh.boundary_edges[:, 0], mesh.boundary_edges[:, 1])
    return np.hypot(d[:, 0], d[:, 1])


def boundary_length(mesh, tag=None):
    lens = boundary_edge_lengths(mesh)
    if tag is None:
        return float(lens.sum())
    return float(lens[mesh.boundary_tags == tag].sum())


def boundary_edge_midpoints(mesh):
    p0 = mesh.vertices[mesh.boundary_edges[:, 0]].astype(float)
    d = edge_vector(mesh, mesh.boundary_edges[:, 0], mesh.boundary_edges[:, 1])
    mid = p0 + 0.5 * d
    if mesh.period_x > 0:
        mid[:, 0] = np.mod(mid[:, 0], mesh.period_x)
    return mid


def tagged_vertices(mesh, tag):
    """Sorted vertex indices incident to boundary edges carrying the tag."""
    sel = mesh.boundary_edges[mesh.boundary_tags == tag]
    return np.unique(sel)


def max_edge_length(mesh):
    c = triangle_coords(mesh)
    lens = []
    for i, j in ((0, 1), (1, 2), (2, 0)):
        d = c[:, j] - c[:, i]
        lens.append(np.hypot(d[:, 0], d[:, 1]))
    return float(np.max(lens))


def _all_edges(triangles):
    e = np.concatenate([triangles[:, [0, 1]], triangles[:, [1, 2]], triangles[:, [2, 0]]])
    return np.sort(e, axis=1)


def interior_edges_with_triangles(mesh):
    """Interior edges (sorted pairs) with the two incident triangle indices."""
    nt = mesh.n_triangles
    e = _all_edges(mesh.triangles)
    owner = np.tile(np.arange(nt), 3)
    order = np.lexsort((e[:, 1], e[:, 0]))
    e = e[order]
    owner = owner[order]
    same = np.all(e[1:] == e[:-1], axis=1)
    idx = np.nonzero(same)[0]
    return e[idx], owner[idx], owner[idx + 1]


def boundary_loops(mesh):
    """Boundary edges grouped into closed loops; each loop a list of edge ids."""
    nb = mesh.boundary_edges.shape[0]
    nxt = {}
    for i, (a, b) in enumerate(mesh.boundary_edges):
        nxt.setdefault(int(a), []).append((int(b), i))
        nxt.setdefault(int(b), []).append((int(a), i))
    used = np.zeros(nb, bool)
    loops = []
    for start in range(nb):
        if used[start]:
            continue
        loop = [start]
        used[start] = True
        a, b = (int(v) for v in mesh.boundary_edges[start])
        head = b
        while head != a:
            options = [(v, i) for (v, i) in nxt[head] if not used[i]]
            if not options:
                raise MeshError("boundary edges do not form closed loops")
            v, i = options[0]
            loop.append(i)
            used[i] = True
            head = v
        loops.append(loop)
    return loops


def validate_mesh(mesh):
    """Check the structural invariants; raises MeshError on violation."""
    areas = triangle_areas(mesh)
    if np.any(areas <= 0):
        bad = int(np.argmin(areas))
        raise MeshError(f"triangle {bad} has non-positive signed area {areas[bad]:.3e}")
    if np.any(mesh.tri_weight <= 0):
        raise MeshError("all triangle weights must be positive")
    steklov = mesh.boundary_tags == STEKLOV
    if np.any(mesh.edge_density[steklov] <= 0):
        raise MeshError("all steklov edge densities must be positive")
    # edge incidence counts
    e = _all_edges(mesh.triangles)
    uniq, counts = np.unique(e, axis=0, return_counts=True)
    if np.any(counts > 2):
        raise MeshError("an edge belongs to more than two triangles")
    once = uniq[counts == 1]
    declared = np.sort(np.asarray(mesh.boundary_edges), axis=1)
    set_once = {tuple(r) for r in once}
    set_decl = {tuple(r) for r in declared}
    if set_once != set_decl:
        raise MeshError("declared boundary edges do not match edges with a single incident triangle")
    # boundary vertices have degree exactly 2 in the boundary graph
    deg = np.zeros(mesh.n_vertices, int)
    np.add.at(deg, mesh.boundary_edges.ravel(), 1)
    bverts = np.unique(mesh.boundary_edges)
    if np.any(deg[bverts] != 2):
        raise MeshError("boundary does not form closed polygonal curves")
    boundary_loops(mesh)
    return mesh


def _orient_ccw(vertices, triangles, period_x=0.0):
    c = vertices[triangles].astype(float)
    if period_x > 0:
        anchor = c[:, :1, 0]
        c[:, :, 0] = anchor[:, 0][:, None] + _wrap_delta(c[:, :, 0] - anchor, period_x)
    area2 = ((c[:, 1, 0] - c[:, 0, 0]) * (c[:, 2, 1] - c[:, 0, 1])
             - (c[:, 2, 0] - c[:, 0, 0]) * (c[:, 1, 1] - c[:, 0, 1]))
    flip = area2 < 0
    triangles = triangles.copy()
    triangles[flip] = triangles[flip][:, [0, 2, 1]]
    return triangles


def _boundary_edges_of(triangles):
    e = _all_edges(triangles)
    uniq, counts = np.unique(e, axis=0, return_counts=True)
    return uniq[counts == 1]


def build_mesh(vertices, triangles, boundary_tag=STEKLOV, density=1.0,
               weight=1.0, period_x=0.0, validate=True):
    """Assemble a Mesh2D from raw arrays, deriving and tagging the boundary."""
    vertices = np.asarray(vertices, float)
    triangles = _orient_ccw(vertices, np.asarray(triangles, np.int32), period_x)
    bedges = _boundary_edges_of(triangles).astype(np.int32)
    nb = bedges.shape[0]
    mesh = Mesh2D(
        vertices=vertices,
        triangles=triangles,
        boundary_edges=bedges,
        boundary_tags=np.array([boundary_tag] * nb, object),
        edge_density=np.full(nb, float(density)),
        tri_weight=np.full(triangles.shape[0], float(weight)),
        period_x=float(period_x),
    )
    if validate:
        validate_mesh(mesh)
    return mesh


# ---------------------------------------------------------------------------
# generators
# ---------------------------------------------------------------------------

def make_disk_mesh(radius, target_h):
    """Deterministic ring-based triangulation of a disk, all-steklov boundary."""
    if radius <= 0 or target_h <= 0 or target_h >= radius:
        raise ParameterError("need radius > 0 and 0 < target_h < radius")
    n_r = max(2, math.ceil(radius / target_h))
    dr = radius / n_r
    pts = [(0.0, 0.0)]
    for j in range(1, n_r + 1):
        r = j * dr
        m = max(6, math.ceil(2 * math.pi * r / target_h))
        offset = 0.5 * (j % 2) * (2 * math.pi / m)
        theta = offset + 2 * math.pi * np.arange(m) / m
        ring = np.column_stack([r * np.cos(theta), r * np.sin(theta)])
        pts.append(ring)
    pts = np.vstack([np.asarray(pts[0])[None, :]] + pts[1:])
    tri = Delaunay(pts)
    mesh = build_mesh(pts, tri.simplices, boundary_tag=STEKLOV)
    if max_edge_length(mesh) > 1.5 * target_h:
        raise MeshError("disk mesh exceeds the 1.5*target_h edge-length budget")
    return mesh


def make_annulus_mesh(r_inner, r_outer, target_h):
    """Structured triangulation of an annulus, both circles steklov-tagged."""
    if not 0 < r_inner < r_outer:
        raise ParameterError("need 0 < r_inner < r_outer")
    if target_h <= 0 or target_h >= r_outer - r_inner:
        raise ParameterError("target_h must be in (0, r_outer - r_inner)")
    n_t = max(6, math.ceil(2 * math.pi * r_outer / target_h))
    n_r = max(1, math.ceil((r_outer - r_inner) / target_h))
    radii = np.linspace(r_inner, r_outer, n_r + 1)
    theta = 2 * math.pi * np.arange(n_t) / n_t
    verts = np.concatenate([
        np.column_stack([r * np.cos(theta), r * np.sin(theta)]) for r in radii])

    def vid(j, i):
        return j * n_t + (i % n_t)

    tris = []
    for j in range(n_r):
        for i in range(n_t):
            a, b = vid(j, i), vid(j, i + 1)
            c, d = vid(j + 1, i + 1), vid(j + 1, i)
            tris.append((a, b, c))
            tris.append((a, c, d))
    mesh = build_mesh(verts, np.asarray(tris, np.int32), boundary_tag=STEKLOV)
    if max_edge_length(mesh) > 1.5 * target_h:
        raise MeshError("annulus mesh exceeds the 1.5*target_h edge-length budget")
    return mesh


def make_strip_mesh(length_l, width_w, target_h, periodic,
                    bottom_tag=STEKLOV, top_tag=NEUMANN, side_tag=NEUMANN):
    """Structured mesh of [0,L]x[0,w]; periodic=True identifies x=0 and x=L.

    Long sides get bottom_tag (y=0) and top_tag (y=w); for the non-periodic
    rectangle the short sides get side_tag.
    """
    if length_l <= 0 or width_w <= 0 or target_h <= 0:
        raise ParameterError("lengths must be positive")
    if target_h >= min(length_l, width_w):
        raise ParameterError("target_h must be smaller than min(L, w)")
    nx = max(3, math.ceil(length_l / target_h))
    ny = max(1, math.ceil(width_w / target_h))
    n_cols = nx if periodic else nx + 1
    xs = length_l * np.arange(n_cols) / nx
    ys = width_w * np.arange(ny + 1) / ny
    xx, yy = np.meshgrid(xs, ys, indexing="ij")
    verts = np.column_stack([xx.ravel(), yy.ravel()])

    def vid(i, j):
        return (i % nx if periodic else i) * (ny + 1) + j

    tris = []
    for i in range(nx):
        for j in range(ny):
            a, b, c, d = vid(i, j), vid(i + 1, j), vid(i + 1, j + 1), vid(i, j + 1)
            tris.append((a, b, c))
            tris.append((a, c, d))
    period = length_l if periodic else 0.0
    mesh = build_mesh(verts, np.asarray(tris, np.int32), period_x=period, validate=False)
    # retag sides
    tags = np.array(mesh.boundary_tags, object)
    mids = boundary_edge_midpoints(mesh)
    bottom = np.isclose(mids[:, 1], 0.0)
    top = np.isclose(mids[:, 1], width_w)
    tags[bottom] = bottom_tag
    tags[top] = top_tag
    tags[~(bottom | top)] = side_tag
    mesh = replace(mesh, boundary_tags=tags)
    return validate_mesh(mesh)


def tag_boundary(mesh, arcs, by="angle", center=None):
    """Retag boundary edges whose midpoint falls in one of the given intervals.

    arcs: list of ((a, b), tag).  by="angle": intervals are angles (radians,
    taken mod 2*pi) around `center` (default: vertex centroid).  by="arclength":
    intervals are arclength positions along the single boundary loop, measured
    from the start of the loop.  Edges outside every interval keep their tag.
    """
    intervals = []
    for (a, b), tag in arcs:
        if tag not in TAGS:
            raise TaggingError(f"unknown tag {tag!r}")
        if not b > a:
            raise TaggingError("interval must satisfy b > a")
        intervals.append((float(a), float(b), tag))
    for i in range(len(intervals)):
        for j in range(i + 1, len(intervals)):
            a0, b0, _ = intervals[i]
            a1, b1, _ = intervals[j]
            if a0 < b1 and a1 < b0:
                raise TaggingError("tagging intervals overlap")

    if by == "angle":
        center = np.mean(mesh.vertices, axis=0) if center is None else np.asarray(center, float)
        mids = boundary_edge_midpoints(mesh)
        theta = np.mod(np.arctan2(mids[:, 1] - center[1], mids[:, 0] - center[0]), 2 * np.pi)
        position = theta
        modulus = 2 * np.pi
    elif by == "arclength":
        loops = boundary_loops(mesh)
        if len(loops) != 1:
            raise TaggingError("arclength tagging requires a single boundary loop")
        lens = boundary_edge_lengths(mesh)
        position = np.zeros(len(lens))
        s = 0.0
        for eid in loops[0]:
            position[eid] = s + 0.5 * lens[eid]
            s += lens[eid]
        modulus = s
    else:
        raise TaggingError("by must be 'angle' or 'arclength'")

    tags = np.array(mesh.boundary_tags, object)
    for a, b, tag in intervals:
        inside = np.mod(position - a, modulus) < (b - a)
        tags[inside] = tag
    if not np.any(tags == STEKLOV):
        raise TaggingError("tagging removed the whole steklov boundary")
    return validate_mesh(replace(mesh, boundary_tags=tags))


def refine(mesh):
    """Uniform midpoint refinement: 4x triangles, tags and weights inherited."""
    nv = mesh.n_vertices
    edges = np.unique(_all_edges(mesh.triangles), axis=0)
    edge_ids = {tuple(e): nv + i for i, e in enumerate(edges)}
    p0 = mesh.vertices[edges[:, 0]].astype(float)
    d = edge_vector(mesh, edges[:, 0], edges[:, 1])
    mids = p0 + 0.5 * d
    if mesh.period_x > 0:
        mids[:, 0] = np.mod(mids[:, 0], mesh.period_x)
    new_vertices = np.vstack([mesh.vertices, mids])

    tris = mesh.triangles
    m01 = np.array([edge_ids[tuple(sorted((int(a), int(b))))] for a, b in zip(tris[:, 0], tris[:, 1])])
    m12 = np.array([edge_ids[tuple(sorted((int(a), int(b))))] for a, b in zip(tris[:, 1], tris[:, 2])])
    m20 = np.array([edge_ids[tuple(sorted((int(a), int(b))))] for a, b in zip(tris[:, 2], tris[:, 0])])
    new_tris = np.concatenate([
        np.column_stack([tris[:, 0], m01, m20]),
        np.column_stack([tris[:, 1], m12, m01]),
        np.column_stack([tris[:, 2], m20, m12]),
        np.column_stack([m01, m12, m20]),
    ]).astype(np.int32)
    new_weight = np.tile(mesh.tri_weight, 4)

    new_bedges = []
    new_tags = []
    new_dens = []
    for (a, b), tag, dens in zip(mesh.boundary_edges, mesh.boundary_tags, mesh.edge_density):
        m = edge_ids[tuple(sorted((int(a), int(b))))]
        new_bedges.extend([(int(a), m), (m, int(b))])
        new_tags.extend([tag, tag])
        new_dens.extend([dens, dens])
    out = Mesh2D(
        vertices=new_vertices,
        triangles=new_tris,
        boundary_edges=np.asarray(new_bedges, np.int32),
        boundary_tags=np.asarray(new_tags, object),
        edge_density=np.asarray(new_dens, float),
        tri_weight=new_weight,
        period_x=mesh.period_x,
    )
    return validate_mesh(out)


def extract_submesh(mesh, tri_mask, interface_tag=NEUMANN):
    """Mesh of a triangle subset; new boundary edges get interface_tag."""
    tri_mask = np.asarray(tri_mask, bool)
    if not np.any(tri_mask):
        raise ParameterError("empty triangle subset")
    tris = mesh.triangles[tri_mask]
    keep = np.unique(tris)
    remap = -np.ones(mesh.n_vertices, np.int64)
    remap[keep] = np.arange(keep.size)
    new_tris = remap[tris].astype(np.int32)
    new_verts = mesh.vertices[keep]

    old_tags = {}
    for (a, b), tag, dens in zip(mesh.boundary_edges, mesh.boundary_tags, mesh.edge_density):
        old_tags[tuple(sorted((int(a), int(b))))] = (tag, float(dens))
    bedges = _boundary_edges_of(new_tris)
    tags = []
    dens = []
    inv_map = keep  # new index -> old index
    for a, b in bedges:
        key = tuple(sorted((int(inv_map[a]), int(inv_map[b]))))
        tag, d = old_tags.get(key, (interface_tag, 1.0))
        tags.append(tag)
        dens.append(d)
    out = Mesh2D(
        vertices=new_verts,
        triangles=new_tris,
        boundary_edges=bedges.astype(np.int32),
        boundary_tags=np.asarray(tags, object),
        edge_density=np.asarray(dens, float),
        tri_weight=mesh.tri_weight[tri_mask].copy(),
        period_x=mesh.period_x,
    )
    return validate_mesh(out)


def scale_mesh(mesh, factor):
    return replace(mesh, vertices=mesh.vertices * factor,
                   period_x=mesh.period_x * factor)


def with_edge_density(mesh, density):
    density = np.broadcast_to(np.asarray(density, float), mesh.boundary_tags.shape).copy()
    return replace(mesh, edge_density=density)


def with_tri_weight(mesh, weight):
    weight = np.broadcast_to(np.asarray(weight, float), mesh.tri_weight.shape).copy()
    return replace(mesh, tri_weight=weight)


# ---------------------------------------------------------------------------
# serialization: "steklov-mesh v1" plain text format
# ---------------------------------------------------------------------------

def _fmt(x):
    return format(float(x), ".17g")


def mesh_to_text(mesh):
    lines = ["steklov-mesh v1"]
    if mesh.period_x > 0:
        lines.append(f"period-x {_fmt(mesh.period_x)}")
    lines.append(str(mesh.n_vertices))
    for x, y in mesh.vertices:
        lines.append(f"{_fmt(x)} {_fmt(y)}")
    lines.append(str(mesh.n_triangles))
    for a, b, c in mesh.triangles:
        lines.append(f"{a} {b} {c}")
    lines.append(str(mesh.boundary_edges.shape[0]))
    for (a, b), tag, d in zip(mesh.boundary_edges, mesh.boundary_tags, mesh.edge_density):
        lines.append(f"{a} {b} {tag} {_fmt(d)}")
    for w in mesh.tri_weight:
        lines.append(_fmt(w))
    return "\n".join(lines) + "\n"


def save_mesh(mesh, path):
    with open(path, "w", encoding="ascii") as fh:
        fh.write(mesh_to_text(mesh))


def load_mesh(path):
    with open(path, encoding="ascii") as fh:
        tokens = fh.read().split("\n")
    it = iter([t for t in tokens if t.strip()])
    header = next(it)
    if header.strip() != "steklov-mesh v1":
        raise MeshError(f"unexpected header {header!r}")
    line = next(it)
    period = 0.0
    if line.startswith("period-x"):
        period = float(line.split()[1])
        line = next(it)
    nv = int(line)
    verts = np.array([[float(t) for t in next(it).split()] for _ in range(nv)])
    nt = int(next(it))
    tris = np.array([[int(t) for t in next(it).split()] for _ in range(nt)], np.int32)
    nb = int(next(it))
    bedges = np.empty((nb, 2), np.int32)
    tags = np.empty(nb, object)
    dens = np.empty(nb)
    for i in range(nb):
        a, b, tag, d = next(it).split()
        bedges[i] = (int(a), int(b))
        tags[i] = tag
        dens[i] = float(d)
    weights = np.array([float(next(it)) for _ in range(nt)])
    mesh = Mesh2D(vertices=verts, triangles=tris, boundary_edges=bedges,
                  boundary_tags=tags, edge_density=dens, tri_weight=weights,
                  period_x=period)
    return validate_mesh(mesh)
