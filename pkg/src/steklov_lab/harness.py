"""Experiment orchestration: configs, runners, reports, and table emission.

Each experiment is a JSON config (kind + parameters + seed); ``run`` dispatches
to the module operations, collects per-point results (capturing per-point
errors instead of aborting the sweep), evaluates the configured checks, and
returns a report whose hash is deterministic given config + seed (the
environment stamp and wall-clock are excluded from the hash).
"""

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, asdict
import csv
import hashlib
import json
import math
import os
import platform
import time

import numpy as np

from . import deformations, fem, geometry, graphs, nodal, thickening
from .geometry import NEUMANN, STEKLOV

KINDS = (
    "spectrum",
    "density-sweep",
    "subdomain-sweep",
    "collar-sweep",
    "graph-limit",
    "prescription-pipeline",
    "nodal-audit",
    "multiplicity-audit",
)


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    kind: str
    name: str
    seed: int
    params: dict
    tolerances: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigError(f"unknown experiment kind {self.kind!r}")
        if not isinstance(self.seed, int) or self.seed < 0:
            raise ConfigError("seed must be a non-negative integer")

    def content_hash(self):
        blob = json.dumps(asdict(self), sort_keys=True)
        return hashlib.sha256(blob.encode()).hexdigest()


def load_config(path, overrides=None):
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    if overrides:
        for key, val in overrides.items():
            if val is None:
                continue
            if key in ("kind", "name", "seed"):
                data[key] = val
            else:
                data.setdefault("params", {})[key] = val
    return ExperimentConfig(
        kind=data["kind"],
        name=data.get("name", os.path.splitext(os.path.basename(path))[0]),
        seed=int(data.get("seed", 0)),
        params=data.get("params", {}),
        tolerances=data.get("tolerances", {}),
    )


@dataclass(frozen=True)
class ExperimentReport:
    config: dict
    config_hash: str
    points: list
    checks: list
    environment: dict
    wallclock_s: float

    @property
    def passed(self):
        return all(c["passed"] for c in self.checks)

    def report_hash(self):
        blob = json.dumps({"config": self.config, "points": self.points,
                           "checks": self.checks}, sort_keys=True)
        return hashlib.sha256(blob.encode()).hexdigest()

    def to_dict(self):
        return {
            "format": "steklov-report v1",
            "config": self.config,
            "config_hash": self.config_hash,
            "points": self.points,
            "checks": self.checks,
            "passed": self.passed,
            "report_hash": self.report_hash(),
            "environment": self.environment,
            "wallclock_s": self.wallclock_s,
        }


def _environment_stamp():
    return {
        "python": platform.python_version(),
        "numpy": np.__version__,
        "platform": platform.platform(),
    }


# ---------------------------------------------------------------------------
# shared generators
# ---------------------------------------------------------------------------

def random_boundary_density(angles, rng):
    """Positive smooth density exp(sum of low-order Fourier modes) at angles."""
    a = rng.uniform(-0.5, 0.5, 4)
    b = rng.uniform(-0.5, 0.5, 4)
    t = np.zeros_like(angles)
    for m in range(1, 5):
        t += a[m - 1] * np.cos(m * angles) + b[m - 1] * np.sin(m * angles)
    return np.exp(t), {"a": a.tolist(), "b": b.tolist()}


def _steklov_midpoint_angles(mesh):
    mids = geometry.boundary_edge_midpoints(mesh)
    sel = mesh.boundary_tags == STEKLOV
    return np.arctan2(mids[sel, 1], mids[sel, 0]), sel


def _apply_random_density(mesh, rng):
    angles, sel = _steklov_midpoint_angles(mesh)
    rho, coeffs = random_boundary_density(angles, rng)
    dens = np.array(mesh.edge_density, float)
    dens[sel] = rho
    from dataclasses import replace
    return replace(mesh, edge_density=dens), coeffs


def _make_domain(params, rng=None):
    """Build the audit domain named by params["domain"]."""
    domain = params.get("domain", "disk")
    h = float(params.get("target_h", 0.08))
    if domain == "disk":
        return geometry.make_disk_mesh(float(params.get("radius", 1.0)), h)
    if domain == "annulus":
        return geometry.make_annulus_mesh(float(params.get("r_inner", 0.5)),
                                          float(params.get("r_outer", 1.0)), h)
    if domain == "mixed-disk":
        mesh = geometry.make_disk_mesh(float(params.get("radius", 1.0)), h)
        frac = params.get("steklov_fraction")
        if frac is None:
            if rng is None:
                raise ConfigError("mixed-disk needs a steklov_fraction or a seed")
            frac = rng.uniform(0.25, 0.75)
        start = rng.uniform(0.0, 2 * math.pi) if rng is not None else 0.0
        arcs = [((start, start + 2 * math.pi * float(frac)), STEKLOV),
                ((start + 2 * math.pi * float(frac), start + 2 * math.pi), NEUMANN)]
        return geometry.tag_boundary(mesh, arcs, by="angle", center=(0.0, 0.0))
    raise ConfigError(f"unknown domain {domain!r}")


# ---------------------------------------------------------------------------
# experiment runners (each returns points, checks, artifacts)
# ---------------------------------------------------------------------------

def _run_spectrum(config):
    p = config.params
    mesh = geometry.load_mesh(p["mesh_file"]) if "mesh_file" in p else _make_domain(p)
    n_eigs = int(p.get("n_eigs", 6))
    res = fem.steklov_spectrum(mesh, n_eigs, p.get("cluster_rel_tol"))
    points = [{"k": k, "sigma": float(res.eigenvalues[k])} for k in range(n_eigs)]
    checks = []
    if "reference" in p:
        ref = np.asarray(p["reference"], float)
        tol = float(config.tolerances.get("rel_err", 0.01))
        err = float(np.max(np.abs(res.eigenvalues[1:ref.size + 1] - ref) / ref))
        checks.append(_check("spectrum-vs-reference", err <= tol, err, tol))
    if "cluster_sizes" in p:
        sizes = [b - a for a, b in res.clusters[1:len(p["cluster_sizes"]) + 1]]
        ok = sizes == list(p["cluster_sizes"])
        checks.append(_check("cluster-sizes", ok,
                             f"observed {sizes}", f'expected {p["cluster_sizes"]}'))
    return points, checks, {"spectral": res, "mesh": mesh}


def _run_collar_sweep(config):
    p = config.params
    length = float(p.get("circle_length", 2 * math.pi))
    widths = [float(w) for w in p["widths"]]
    n_eigs = int(p.get("n_eigs", 7))
    mode = p.get("mode", "one-sided")
    tol = float(config.tolerances.get("final_rel_err", 0.02))
    points = []
    finals = []
    if mode == "one-sided":
        rows = deformations.collar_convergence_run(length, widths, n_eigs,
                                                   int(p.get("elements_across", 8)))
        for row in rows:
            for k in range(n_eigs):
                points.append({"eta": row["eta"], "k": k,
                               "sigma": row["rescaled"][k],
                               "reference": row["reference"][k],
                               "abs_err": abs(row["rescaled"][k] - row["reference"][k]),
                               "rel_err": row["rel_err"][k]})
            finals.append(row["max_rel_err"])
    elif mode == "two-sided":
        # both circles steklov; the symmetric family obeys sqrt(l)*tanh(eta*sqrt(l))
        k_max = int(p.get("k_max", 4))
        for width in widths:
            eta = 0.5 * width
            h = min(float(p.get("target_h", 0.05)), width / 8.0)
            mesh = geometry.make_strip_mesh(length, width, h, periodic=True,
                                            bottom_tag=STEKLOV, top_tag=STEKLOV)
            res = fem.steklov_spectrum(mesh, 4 * k_max + 2)
            worst = 0.0
            for k in range(1, k_max + 1):
                lam = (2 * math.pi * k / length) ** 2
                ref = deformations.cylinder_formula(lam, eta)
                # the symmetric-family eigenvalue is the closest computed one
                idx = int(np.argmin(np.abs(res.eigenvalues - ref)))
                sig = float(res.eigenvalues[idx])
                rel = abs(sig - ref) / ref
                worst = max(worst, rel)
                points.append({"eta": eta, "k": k, "sigma": sig, "reference": ref,
                               "abs_err": abs(sig - ref), "rel_err": rel})
            finals.append(worst)
    else:
        raise ConfigError(f"unknown collar mode {mode!r}")
    checks = [_check("final-error", finals[-1] <= tol, finals[-1], tol)]
    if mode == "one-sided" and len(finals) > 1:
        dec = all(b < a for a, b in zip(finals, finals[1:]))
        checks.append(_check("error-decreasing", dec, finals, "strictly decreasing"))
    if mode == "two-sided":
        allok = max(finals) <= tol
        checks.append(_check("all-widths", allok, max(finals), tol))
    return points, checks, {}


def _run_density_sweep(config):
    p = config.params
    rng = np.random.default_rng(config.seed)
    mesh = geometry.make_disk_mesh(float(p.get("radius", 1.0)),
                                   float(p.get("target_h", 0.05)))
    angles, sel = _steklov_midpoint_angles(mesh)
    rho, coeffs = random_boundary_density(angles, rng)
    # dominate the base density rho = 1 edge-wise
    rho_bar = rho / rho.min()
    n_eigs = int(p.get("n_eigs", 6))
    n_dim = int(p.get("virtual_dim", 3))
    fam = deformations.DensityFamily(mesh, rho_bar, n_dim)
    dens = np.array(mesh.edge_density, float)
    dens[sel] = rho_bar
    from dataclasses import replace
    limit = fem.steklov_spectrum(replace(mesh, edge_density=dens), n_eigs)
    points = []
    errs = []
    for j in range(1, int(p.get("j_max", 7)) + 1):
        eps = 2.0 ** -j
        res = fem.steklov_spectrum(deformations.density_family_at(fam, eps), n_eigs)
        rel = np.abs(res.eigenvalues[1:] - limit.eigenvalues[1:]) / limit.eigenvalues[1:]
        for k in range(1, n_eigs):
            points.append({"eps": eps, "k": k, "sigma": float(res.eigenvalues[k]),
                           "reference": float(limit.eigenvalues[k]),
                           "abs_err": float(abs(res.eigenvalues[k] - limit.eigenvalues[k])),
                           "rel_err": float(rel[k - 1])})
        errs.append(float(rel.max()))
    tol = float(config.tolerances.get("final_rel_err", 0.02))
    tail = errs[len(errs) // 2:]
    checks = [
        _check("final-error", errs[-1] <= tol, errs[-1], tol),
        _check("eventually-decreasing",
               all(b <= a for a, b in zip(tail, tail[1:])), errs, "tail non-increasing"),
    ]
    return points, checks, {"density_coefficients": coeffs}


def _run_subdomain_sweep(config):
    p = config.params
    mesh = geometry.make_disk_mesh(float(p.get("radius", 1.0)),
                                   float(p.get("target_h", 0.05)))
    cen = geometry.triangle_coords(mesh).mean(axis=1)
    mask = cen[:, 1] > 0.0  # half-disk touching the boundary
    n_dim = int(p.get("virtual_dim", 3))
    fam = deformations.SingularWeightFamily(mesh, mask, n_dim)
    n_eigs = int(p.get("n_eigs", 5))
    oracle = fem.steklov_spectrum(deformations.subdomain_limit_mesh(fam), n_eigs)
    points = []
    errs = []
    for j in range(1, int(p.get("j_max", 8)) + 1):
        eta = 2.0 ** -j
        res = fem.steklov_spectrum(deformations.singular_family_at(fam, eta), n_eigs)
        rel = np.abs(res.eigenvalues[1:] - oracle.eigenvalues[1:]) / oracle.eigenvalues[1:]
        for k in range(1, n_eigs):
            points.append({"eta": eta, "k": k, "sigma": float(res.eigenvalues[k]),
                           "reference": float(oracle.eigenvalues[k]),
                           "abs_err": float(abs(res.eigenvalues[k] - oracle.eigenvalues[k])),
                           "rel_err": float(rel[k - 1])})
        errs.append(float(rel.max()))
    tol = float(config.tolerances.get("final_rel_err", 0.05))
    tail = errs[len(errs) // 2:]
    checks = [
        _check("final-error", errs[-1] <= tol, errs[-1], tol),
        _check("eventually-decreasing",
               all(b <= a for a, b in zip(tail, tail[1:])), errs, "tail non-increasing"),
    ]
    return points, checks, {}


def _load_or_build_graph(p):
    if "graph_file" in p:
        return graphs.load_graph(p["graph_file"])
    if "edges" in p:
        return graphs.MetricGraph(int(p["n_vertices"]),
                                  np.asarray(p["edges"], np.int64),
                                  np.asarray(p["lengths"], float))
    n = int(p.get("complete", 3))
    lengths = np.asarray(p.get("lengths", np.ones(n * (n - 1) // 2)), float)
    return graphs.MetricGraph(n, graphs.complete_graph_edges(n), lengths)


def _graph_limit_points(out, g):
    points = []
    for row in out["rows"]:
        lam = row["lambda_graph"]
        for k in range(1, g.n_vertices):
            points.append({"eps": row["eps"], "k": k, "sigma": row["sigma"][k],
                           "lambda": lam[k],
                           "ratio": row["sigma"][k] / lam[k] if lam[k] > 0 else None})
        points.append({"eps": row["eps"], "k": g.n_vertices,
                       "sigma": row["sigma"][g.n_vertices],
                       "lambda": None, "ratio": None})
    return points


def _graph_limit_checks(out, tolerances):
    rows = out["rows"]
    spread_tol = float(tolerances.get("ratio_spread", 0.05))
    final = rows[-1]
    gaps = [r["gap"] for r in rows]
    return [
        _check("ratio-spread", final["ratio_spread"] <= spread_tol,
               final["ratio_spread"], spread_tol),
        _check("gap-monotone", all(b > a for a, b in zip(gaps, gaps[1:])),
               gaps, "strictly increasing"),
        _check("constant-recorded", True,
               {"final_ratio": out["final_ratio"],
                "candidates": out["candidates"],
                "closest": out["closest_candidate"]}, "informational"),
    ]


def _run_graph_limit(config):
    p = config.params
    g = _load_or_build_graph(p)
    c = float(p.get("c", 2.0))
    emb = thickening.embed_graph(g, p.get("style", "convex-boundary"), c)
    eps_values = [float(e) for e in p["eps_values"]]
    out = thickening.verify_graph_limit(emb, eps_values, c,
                                        float(p.get("target_h_factor", 0.25)))
    artifacts = {"graph_limit": out, "graph": g, "embedding": emb, "c": c,
                 "final_eps": eps_values[-1]}
    return _graph_limit_points(out, g), _graph_limit_checks(out, config.tolerances), artifacts


def _run_prescription_pipeline(config):
    p = config.params
    tol = float(config.tolerances.get("prescriber_rel_err", 1e-8))
    if p.get("mode", "full") == "audit":
        rng = np.random.default_rng(config.seed)
        n_trials = int(p.get("trials", 50))
        lo, hi = p.get("n_range", [2, 6])
        points = []
        worst = 0.0
        hom_worst = 0.0
        for trial in range(n_trials):
            n = int(rng.integers(lo, hi + 1))
            targets = np.sort(rng.uniform(0.5, 5.0, n))
            g = graphs.prescribe_spectrum(targets, seed=int(rng.integers(2 ** 32)))
            got = graphs.graph_laplacian_spectrum(g).eigenvalues[1:]
            rel = float(np.max(np.abs(got - targets) / targets))
            # homogeneity: scaling lengths by 1/s scales the spectrum by s
            s = 2.0
            scaled = graphs.graph_laplacian_spectrum(
                graphs.MetricGraph(g.n_vertices, g.edges, g.lengths / s)).eigenvalues[1:]
            hom = float(np.max(np.abs(scaled - s * got) / (s * got)))
            worst = max(worst, rel)
            hom_worst = max(hom_worst, hom)
            points.append({"trial": trial, "n_targets": n, "rel_err": rel,
                           "homogeneity_err": hom})
        checks = [
            _check("prescriber-accuracy", worst <= tol, worst, tol),
            _check("homogeneity", hom_worst <= 1e-12, hom_worst, 1e-12),
        ]
        return points, checks, {}
    # full pipeline: prescribe -> embed -> thicken sweep -> compare
    targets = np.asarray(p["targets"], float)
    g = graphs.prescribe_spectrum(targets, tol=tol, seed=config.seed)
    c = float(p.get("c", 2.0))
    emb = thickening.embed_graph(g, p.get("style", "convex-boundary"), c)
    eps_values = [float(e) for e in p["eps_values"]]
    out = thickening.verify_graph_limit(emb, eps_values, c,
                                        float(p.get("target_h_factor", 0.25)))
    points = _graph_limit_points(out, g)
    checks = _graph_limit_checks(out, config.tolerances)
    artifacts = {"graph_limit": out, "graph": g, "embedding": emb, "c": c,
                 "final_eps": eps_values[-1]}
    return points, checks, artifacts


def _audit_point(args):
    """One randomized audit run; top-level for process-pool dispatch."""
    kind, params, tolerances, seed, run_id = args
    rng = np.random.default_rng(seed)
    if "domains" in params:
        params = dict(params, domain=params["domains"][run_id % len(params["domains"])])
    mesh = _make_domain(params, rng)
    mesh, coeffs = _apply_random_density(mesh, rng)
    n_eigs = int(params.get("k_max", 6)) + 1
    res = fem.steklov_spectrum(mesh, n_eigs, params.get("cluster_rel_tol"))
    point = {"run": run_id, "seed": seed, "domain": params.get("domain", "disk"),
             "density": coeffs,
             "eigenvalues": res.eigenvalues.tolist(),
             "clusters": [list(c) for c in res.clusters]}
    zero_tol = float(params.get("zero_tol", nodal.DEFAULT_ZERO_TOL))
    if kind == "nodal-audit":
        courant = nodal.courant_check(mesh, res,
                                      int(params.get("n_rotations", 20)),
                                      seed=seed, zero_tol=zero_tol)
        point["courant"] = courant
        point["courant_ok"] = all(r["ok"] for r in courant)
        touches, graphs_ok, evens = [], [], []
        for k in range(1, n_eigs):
            decomp = nodal.decompose_nodal(mesh, res.extensions[k], zero_tol)
            touches.append(nodal.boundary_touch_check(mesh, decomp)["all_touch"])
            stats = nodal.nodal_graph_stats(mesh, res.extensions[k], zero_tol)
            graphs_ok.append(stats["cycle_rank"] == 0)
            evens.append(stats["all_even"])
        point["touch_ok"] = all(touches)
        point["cycle_rank_ok"] = all(graphs_ok)
        point["parity_ok"] = all(evens)
    else:  # multiplicity-audit
        topo = (geometry.ANNULUS_TOPOLOGY if params.get("domain") == "annulus"
                else geometry.DISK_TOPOLOGY)
        mixed = params.get("domain") == "mixed-disk" or bool(params.get("mixed", False))
        recs = nodal.multiplicity_bound_check(res, topo, mixed=mixed)
        point["bounds"] = recs
        point["bounds_ok"] = all(r["ok"] for r in recs)
    return point


def _run_audit(config, jobs=1):
    p = config.params
    n_runs = int(p.get("runs", 50))
    seeds = [config.seed + 1000 * i for i in range(n_runs)]
    args = [(config.kind, p, config.tolerances, s, i) for i, s in enumerate(seeds)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            points = list(pool.map(_audit_point, args))
    else:
        points = [_audit_point(a) for a in args]
    checks = []
    if config.kind == "nodal-audit":
        for name in ("courant_ok", "touch_ok", "cycle_rank_ok", "parity_ok"):
            bad = [pt["run"] for pt in points if not pt[name]]
            checks.append(_check(name.replace("_", "-"), not bad,
                                 f"{len(points) - len(bad)}/{len(points)} runs",
                                 f"failures: {bad}" if bad else "none"))
    else:
        bad = [pt["run"] for pt in points if not pt["bounds_ok"]]
        checks.append(_check("multiplicity-bounds", not bad,
                             f"{len(points) - len(bad)}/{len(points)} runs",
                             f"failures: {bad}" if bad else "none"))
    return points, checks, {}


def _check(name, passed, observed, required):
    return {"name": name, "passed": bool(passed),
            "observed": _jsonable(observed), "required": _jsonable(required)}


def _jsonable(x):
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    if isinstance(x, np.ndarray):
        return x.tolist()
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    return x


_RUNNERS = {
    "spectrum": _run_spectrum,
    "collar-sweep": _run_collar_sweep,
    "density-sweep": _run_density_sweep,
    "subdomain-sweep": _run_subdomain_sweep,
    "graph-limit": _run_graph_limit,
    "prescription-pipeline": _run_prescription_pipeline,
}


def run(config, out_dir=None, jobs=1):
    """Execute an experiment and (optionally) persist its artifact tree."""
    start = time.monotonic()
    if config.kind in ("nodal-audit", "multiplicity-audit"):
        points, checks, artifacts = _run_audit(config, jobs)
    else:
        points, checks, artifacts = _RUNNERS[config.kind](config)
    report = ExperimentReport(
        config=asdict(config),
        config_hash=config.content_hash(),
        points=_jsonable(points),
        checks=checks,
        environment=_environment_stamp(),
        wallclock_s=time.monotonic() - start,
    )
    if out_dir is not None:
        _persist(report, artifacts, config, out_dir)
    return report


def _persist(report, artifacts, config, out_dir):
    os.makedirs(out_dir, exist_ok=True)
    with open(os.path.join(out_dir, "report.json"), "w", encoding="ascii") as fh:
        json.dump(report.to_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")
    emit_tables(report, out_dir)
    meshes = os.path.join(out_dir, "meshes")
    figures = os.path.join(out_dir, "figures")
    if "mesh" in artifacts:
        os.makedirs(meshes, exist_ok=True)
        geometry.save_mesh(artifacts["mesh"], os.path.join(meshes, f"{config.name}.msh"))
    if "spectral" in artifacts:
        fem.save_spectral_result(artifacts["spectral"],
                                 os.path.join(out_dir, "spectrum.json"))
    if "graph" in artifacts:
        graphs.save_graph(artifacts["graph"],
                          os.path.join(out_dir, f"{config.name}.graph"))
    if "embedding" in artifacts:
        mesh, _ = thickening.build_thickened_mesh(
            artifacts["embedding"], artifacts["final_eps"], artifacts["c"])
        os.makedirs(meshes, exist_ok=True)
        geometry.save_mesh(mesh, os.path.join(meshes, f"{config.name}-thickened.msh"))
        res = fem.steklov_spectrum(mesh, 2)
        os.makedirs(figures, exist_ok=True)
        nodal.save_nodal_svg(mesh, res.extensions[1],
                             os.path.join(figures, f"{config.name}-mode1.svg"))


_CSV_COLUMNS = {
    "spectrum": ["k", "sigma"],
    "collar-sweep": ["eta", "k", "sigma", "reference", "abs_err", "rel_err"],
    "density-sweep": ["eps", "k", "sigma", "reference", "abs_err", "rel_err"],
    "subdomain-sweep": ["eta", "k", "sigma", "reference", "abs_err", "rel_err"],
    "graph-limit": ["eps", "k", "sigma", "lambda", "ratio"],
    "prescription-pipeline": ["eps", "k", "sigma", "lambda", "ratio"],
    "nodal-audit": ["run", "seed", "domain", "courant_ok", "touch_ok",
                    "cycle_rank_ok", "parity_ok"],
    "multiplicity-audit": ["run", "seed", "domain", "bounds_ok"],
}


def emit_tables(report, out_dir):
    """CSV per sweep plus a human-readable summary of every check."""
    tables = os.path.join(out_dir, "tables")
    os.makedirs(tables, exist_ok=True)
    kind = report.config["kind"]
    columns = _CSV_COLUMNS[kind]
    if kind == "prescription-pipeline" and report.config["params"].get("mode") == "audit":
        columns = ["trial", "n_targets", "rel_err", "homogeneity_err"]
    path = os.path.join(tables, "sweep.csv")
    with open(path, "w", newline="", encoding="ascii") as fh:
        writer = csv.writer(fh)
        writer.writerow(columns)
        for pt in report.points:
            writer.writerow([pt.get(c, "") for c in columns])
    summary = os.path.join(out_dir, "summary.txt")
    with open(summary, "w", encoding="ascii") as fh:
        fh.write(f"experiment: {report.config['name']} ({kind})\n")
        fh.write(f"config hash: {report.config_hash}\n")
        fh.write(f"report hash: {report.report_hash()}\n\n")
        for c in report.checks:
            status = "PASS" if c["passed"] else "FAIL"
            fh.write(f"[{status}] {c['name']}: observed={c['observed']} "
                     f"required={c['required']}\n")
        fh.write(f"\noverall: {'PASS' if report.passed else 'FAIL'}\n")
    return [path, summary]
