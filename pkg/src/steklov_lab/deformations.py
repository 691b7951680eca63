"""Weighted problem families driving the spectral convergence experiments.

Three mechanisms are modeled through per-triangle weights and boundary
densities, with an explicit "virtual dimension" n >= 3 supplying the
exponents n-2 (energy weight) and n-1 (boundary norm weight):

* density deformation: a boundary conformal factor converts the base density
  into a target density while the interior weight relaxes to 1;
* singular subdomain weights: energy weight eta^(n-2) off a subdomain U and
  boundary weight eta^(n-1) off the steklov part of U's boundary, collapsing
  the spectrum onto the mixed problem on U;
* collar homothety: the flat cylinder whose exact Steklov spectrum is
  sqrt(lambda)*tanh(eta*sqrt(lambda)) over the boundary Laplacian spectrum.
"""

from dataclasses import dataclass, replace
import math

import numpy as np

from . import fem, geometry
from .geometry import NEUMANN, STEKLOV


class FamilyError(ValueError):
    pass


class ResolutionError(ValueError):
    pass


def _steklov_edge_mask(mesh):
    return mesh.boundary_tags == STEKLOV


def _point_segment_distance(points, seg_a, seg_b):
    """Distances from (n,2) points to each of (m,2)x(m,2) segments -> (n,m)."""
    d = seg_b - seg_a                      # (m,2)
    rel = points[:, None, :] - seg_a[None, :, :]
    denom = np.einsum("md,md->m", d, d)
    t = np.clip(np.einsum("nmd,md->nm", rel, d) / denom, 0.0, 1.0)
    proj = seg_a[None] + t[..., None] * d[None]
    return np.hypot(points[:, None, 0] - proj[..., 0], points[:, None, 1] - proj[..., 1])


@dataclass(frozen=True)
class DensityFamily:
    mesh: geometry.Mesh2D
    rho_bar: np.ndarray       # target density per steklov boundary edge
    virtual_dim: int = 3

    def __post_init__(self):
        sel = _steklov_edge_mask(self.mesh)
        rho_bar = np.broadcast_to(np.asarray(self.rho_bar, float), (int(sel.sum()),)).copy()
        object.__setattr__(self, "rho_bar", rho_bar)
        if self.virtual_dim < 3:
            raise FamilyError("virtual dimension must be >= 3")
        rho = self.mesh.edge_density[sel]
        if np.any(rho_bar < rho - 1e-14 * np.abs(rho)):
            raise FamilyError("target density must dominate the base density edge-wise")


def density_family_at(family, eps):
    """Deformed mesh: energy weight h^(n-2), boundary density = target density.

    h interpolates piecewise-linearly in distance-to-steklov-boundary from
    (rho_bar/rho)^(1/(n-1)) on the boundary down to 1 at distance >= eps, so
    the boundary norm of the deformed problem is exactly the target-density
    norm and h decreases pointwise as eps shrinks.
    """
    if not 0 < eps <= 1:
        raise FamilyError("eps must lie in (0, 1]")
    mesh = family.mesh
    n = family.virtual_dim
    sel = _steklov_edge_mask(mesh)
    edges = mesh.boundary_edges[sel]
    rho = mesh.edge_density[sel]
    factor_edge = (family.rho_bar / rho) ** (1.0 / (n - 1))

    pa = mesh.vertices[edges[:, 0]].astype(float)
    d = geometry.edge_vector(mesh, edges[:, 0], edges[:, 1])
    pb = pa + d
    # triangle centroids against the (locally unwrapped) steklov segments
    cen = geometry.triangle_coords(mesh).mean(axis=1)
    dist = _point_segment_distance(cen, pa, pb)
    if mesh.period_x > 0:
        for shift in (-mesh.period_x, mesh.period_x):
            shifted = cen.copy()
            shifted[:, 0] += shift
            dist = np.minimum(dist, _point_segment_distance(shifted, pa, pb))
    nearest = np.argmin(dist, axis=1)
    dmin = dist[np.arange(cen.shape[0]), nearest]
    h = 1.0 + (factor_edge[nearest] - 1.0) * np.clip(1.0 - dmin / eps, 0.0, 1.0)

    new_weight = mesh.tri_weight * h ** (n - 2)
    new_density = np.array(mesh.edge_density, float)
    new_density[sel] = family.rho_bar
    return replace(mesh, tri_weight=new_weight, edge_density=new_density)


@dataclass(frozen=True)
class SingularWeightFamily:
    mesh: geometry.Mesh2D
    in_subdomain: np.ndarray   # bool per triangle
    virtual_dim: int = 3

    def __post_init__(self):
        mask = np.asarray(self.in_subdomain, bool)
        object.__setattr__(self, "in_subdomain", mask)
        if mask.shape != (self.mesh.n_triangles,):
            raise FamilyError("subdomain mask must have one flag per triangle")
        if self.virtual_dim < 3:
            raise FamilyError("virtual dimension must be >= 3")
        if not np.any(self.steklov_edges_in_subdomain()):
            raise FamilyError("subdomain closure must meet the steklov boundary")

    def steklov_edges_in_subdomain(self):
        """Mask (over steklov edges) of edges owned by a subdomain triangle."""
        mesh = self.mesh
        sel = _steklov_edge_mask(mesh)
        edges = np.sort(mesh.boundary_edges[sel], axis=1)
        owner = {}
        tris = np.sort(np.stack([mesh.triangles[:, [0, 1]], mesh.triangles[:, [1, 2]],
                                 mesh.triangles[:, [2, 0]]], axis=1), axis=2)
        for t in range(mesh.n_triangles):
            for e in range(3):
                owner[tuple(tris[t, e])] = t
        return np.array([self.in_subdomain[owner[tuple(e)]] for e in edges], bool)


def singular_family_at(family, eta):
    """Weighted mesh: energy weight eta^(n-2) off U, boundary weight eta^(n-1)
    off the steklov part of U's boundary."""
    if not 0 < eta <= 1:
        raise FamilyError("eta must lie in (0, 1]")
    mesh = family.mesh
    n = family.virtual_dim
    weight = np.where(family.in_subdomain, mesh.tri_weight,
                      mesh.tri_weight * eta ** (n - 2))
    sel = _steklov_edge_mask(mesh)
    on_u = family.steklov_edges_in_subdomain()
    density = np.array(mesh.edge_density, float)
    density[sel] = np.where(on_u, density[sel], density[sel] * eta ** (n - 1))
    return replace(mesh, tri_weight=weight, edge_density=density)


def subdomain_limit_mesh(family):
    """The limiting mixed problem: submesh of U, steklov on the inherited
    boundary, neumann on the interface."""
    return geometry.extract_submesh(family.mesh, family.in_subdomain,
                                    interface_tag=NEUMANN)


def cylinder_formula(lam, eta):
    """Steklov-Neumann eigenvalue of the flat collar of half-width eta over a
    boundary Laplacian eigenvalue: sqrt(lam) * tanh(eta * sqrt(lam))."""
    if lam < 0 or eta <= 0:
        raise ValueError("need lam >= 0 and eta > 0")
    if lam == 0:
        return 0.0
    r = math.sqrt(lam)
    return r * math.tanh(eta * r)


def circle_laplacian_eigenvalues(circle_length, count):
    """Sorted Laplacian spectrum of a circle: 0 then (2*pi*k/L)^2 twice each."""
    vals = [0.0]
    k = 1
    while len(vals) < count:
        lam = (2.0 * math.pi * k / circle_length) ** 2
        vals.extend([lam, lam])
        k += 1
    return np.array(vals[:count])


def collar_convergence_run(circle_length, widths, n_eigs, elements_across=8,
                           cluster_rel_tol=None):
    """Steklov-Neumann spectra of shrinking flat collars, rescaled by 1/eta
    and compared against the circle Laplacian spectrum.

    Returns a list of per-width records with the max relative error over the
    nonzero modes.
    """
    widths = list(widths)
    if any(w <= 0 for w in widths):
        raise FamilyError("widths must be positive")
    if len(widths) > 1 and any(b >= a for a, b in zip(widths, widths[1:])):
        raise FamilyError("widths must be strictly decreasing")
    if elements_across < 8:
        raise ResolutionError("need at least 8 elements across the collar width")
    reference = circle_laplacian_eigenvalues(circle_length, n_eigs)
    rows = []
    for eta in widths:
        target_h = eta / elements_across
        mesh = geometry.make_strip_mesh(circle_length, eta, target_h, periodic=True,
                                        bottom_tag=STEKLOV, top_tag=NEUMANN)
        result = fem.steklov_spectrum(mesh, n_eigs, cluster_rel_tol)
        rescaled = result.eigenvalues / eta
        err = np.zeros(n_eigs)
        nz = reference > 0
        err[nz] = np.abs(rescaled[nz] - reference[nz]) / reference[nz]
        rows.append({
            "eta": float(eta),
            "sigma": result.eigenvalues.tolist(),
            "rescaled": rescaled.tolist(),
            "reference": reference.tolist(),
            "rel_err": err.tolist(),
            "max_rel_err": float(err[nz].max()),
        })
    return rows
