"""Command-line interface: mesh generation, spectra, prescription, thickening,
and full experiment runs."""

import argparse
import json
import sys

import numpy as np

from . import fem, geometry, graphs, harness, thickening


def _add_common(parser):
    parser.add_argument("--out", help="output directory (or file for single artifacts)")
    parser.add_argument("--seed", type=int, help="random seed override")
    parser.add_argument("--tol", type=float, help="tolerance override")
    parser.add_argument("--jobs", type=int, default=1, help="parallel sweep workers")


def _cmd_mesh(args):
    if args.kind == "disk":
        mesh = geometry.make_disk_mesh(args.radius, args.target_h)
    elif args.kind == "annulus":
        mesh = geometry.make_annulus_mesh(args.r_inner, args.radius, args.target_h)
    elif args.kind == "strip":
        mesh = geometry.make_strip_mesh(args.length, args.width, args.target_h,
                                        periodic=args.periodic)
    else:
        raise SystemExit(f"unknown mesh kind {args.kind!r}")
    out = args.out or f"{args.kind}.msh"
    geometry.save_mesh(mesh, out)
    print(f"wrote {out}: {mesh.n_vertices} vertices, {mesh.n_triangles} triangles")
    return 0


def _cmd_spectrum(args):
    mesh = geometry.load_mesh(args.mesh)
    res = fem.steklov_spectrum(mesh, args.n_eigs, args.tol)
    for k, val in enumerate(res.eigenvalues):
        print(f"sigma_{k} = {val:.12g}")
    print(f"clusters: {res.clusters}")
    if args.out:
        fem.save_spectral_result(res, args.out)
        print(f"wrote {args.out}")
    return 0


def _cmd_prescribe(args):
    targets = np.asarray([float(t) for t in args.targets.split(",")])
    g = graphs.prescribe_spectrum(targets, tol=args.tol or 1e-8,
                                  seed=args.seed or 0)
    spec = graphs.graph_laplacian_spectrum(g).eigenvalues
    print(f"K_{g.n_vertices} edge lengths:")
    for (a, b), l in zip(g.edges, g.lengths):
        print(f"  {a} -- {b}: {l:.12g}")
    print(f"spectrum: {np.array2string(spec, precision=12)}")
    if args.out:
        graphs.save_graph(g, args.out)
        print(f"wrote {args.out}")
    return 0


def _cmd_thicken(args):
    g = graphs.load_graph(args.graph)
    emb = thickening.embed_graph(g, args.style, args.c)
    mesh, _ = thickening.build_thickened_mesh(emb, args.eps, args.c,
                                              target_h=args.target_h)
    out = args.out or "thickened.msh"
    geometry.save_mesh(mesh, out)
    print(f"wrote {out}: {mesh.n_vertices} vertices, {mesh.n_triangles} triangles")
    return 0


def _cmd_run(args):
    overrides = {"seed": args.seed}
    config = harness.load_config(args.config, overrides)
    if args.tol is not None:
        config = harness.ExperimentConfig(
            kind=config.kind, name=config.name, seed=config.seed,
            params=config.params,
            tolerances=dict(config.tolerances, cli_tol=args.tol))
    report = harness.run(config, out_dir=args.out, jobs=args.jobs)
    for c in report.checks:
        status = "PASS" if c["passed"] else "FAIL"
        print(f"[{status}] {c['name']}: observed={c['observed']} "
              f"required={c['required']}")
    print(f"overall: {'PASS' if report.passed else 'FAIL'} "
          f"({report.wallclock_s:.1f}s, report hash {report.report_hash()[:16]})")
    if args.out is None and args.print_report:
        json.dump(report.to_dict(), sys.stdout, indent=2, sort_keys=True)
        print()
    return 0 if report.passed else 1


def _cmd_audit(args):
    config = harness.load_config(args.config, {"seed": args.seed})
    if config.kind not in ("nodal-audit", "multiplicity-audit"):
        raise SystemExit("audit requires a nodal-audit or multiplicity-audit config")
    args.print_report = False
    return _cmd_run(args)


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="steklov-lab",
        description="Steklov / Steklov-Neumann spectra of planar domains")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("mesh", help="generate a mesh file")
    p.add_argument("--kind", default="disk", choices=["disk", "annulus", "strip"])
    p.add_argument("--radius", type=float, default=1.0)
    p.add_argument("--r-inner", type=float, default=0.5)
    p.add_argument("--length", type=float, default=2 * np.pi)
    p.add_argument("--width", type=float, default=0.5)
    p.add_argument("--target-h", type=float, default=0.05)
    p.add_argument("--periodic", action="store_true")
    _add_common(p)
    p.set_defaults(func=_cmd_mesh)

    p = sub.add_parser("spectrum", help="solve the Steklov eigenproblem on a mesh")
    p.add_argument("--mesh", required=True)
    p.add_argument("--n-eigs", type=int, default=6)
    _add_common(p)
    p.set_defaults(func=_cmd_spectrum)

    p = sub.add_parser("prescribe", help="fit complete-graph edge lengths to a spectrum")
    p.add_argument("--targets", required=True,
                   help="comma-separated target eigenvalues a_1,...,a_N")
    _add_common(p)
    p.set_defaults(func=_cmd_prescribe)

    p = sub.add_parser("thicken", help="thicken a metric graph into a domain mesh")
    p.add_argument("--graph", required=True)
    p.add_argument("--style", default="convex-boundary",
                   choices=["convex-boundary", "path", "star"])
    p.add_argument("--c", type=float, default=2.0)
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--target-h", type=float)
    _add_common(p)
    p.set_defaults(func=_cmd_thicken)

    p = sub.add_parser("run", help="run an experiment config")
    p.add_argument("--config", required=True)
    p.add_argument("--print-report", action="store_true")
    _add_common(p)
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("audit", help="run a randomized audit config")
    p.add_argument("--config", required=True)
    _add_common(p)
    p.set_defaults(func=_cmd_audit)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
