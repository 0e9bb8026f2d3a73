"""Command-line front end: classify, select, solve, sweep, compare.

Exit status is 0 on success, 2 when a configuration is singular and 1 on
bad input.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from pathlib import Path

import numpy as np

from .bddc import normalize_mode
from .corners import ALGORITHMS, CornerSet, augment_random, select_corners
from .fixtures import generate_structured
from .interface import classify_mesh
from .mesh import MeshFormatError, StructuredSpec, load_mesh
from .partition import PartitionFormatError, load_partition, partition_geometric
from .pipeline import prepare, solve_with
from .sweep import SweepConfig, compare_same_count, run_sweep, write_rows

log = logging.getLogger("bddc_corners")

EXIT_OK, EXIT_INPUT, EXIT_SINGULAR = 0, 1, 2


class InputError(Exception):
    pass


def _ints(text: str) -> list[int]:
    return [int(t) for t in text.replace(" ", "").split(",") if t]


def _parse_cube(text: str):
    """``3x3x3`` or ``3x3x3:4`` (subdomains per axis, cells per subdomain)."""
    shape, _, cps = text.partition(":")
    try:
        subs = tuple(int(v) for v in shape.lower().split("x"))
        cells = int(cps) if cps else 4
    except ValueError:
        raise InputError(f"--cube expects e.g. 3x3x3 or 3x3x3:4, got {text!r}") from None
    if len(subs) not in (2, 3):
        raise InputError("--cube needs two or three subdomain counts")
    return StructuredSpec(cells, subs, dim=len(subs))


def _load(args):
    if bool(args.mesh) == bool(args.cube):
        raise InputError("give exactly one of --mesh or --cube")
    if args.cube:
        clamp = tuple(f for f in args.clamp.split(",") if f) if args.clamp else None
        mesh, part = generate_structured(_parse_cube(args.cube), clamp=clamp)
    else:
        mesh, part = load_mesh(args.mesh), None
    if args.part:
        part = load_partition(args.part, mesh)
    elif args.nparts:
        part = partition_geometric(mesh, args.nparts)
    if part is None:
        raise InputError("a file mesh needs --part PATH or --nparts N")
    return mesh, part


def _corner_set(args, cls):
    if getattr(args, "corners", None):
        with open(args.corners, newline="") as fh:
            nodes = [int(r["node_id"]) for r in csv.DictReader(fh)]
        return CornerSet.manual(nodes)
    cs = select_corners(cls, args.algorithm, args.dim_mode, detect_components=not args.no_components)
    if args.extra_corners:
        cs = augment_random(cs, cls, args.extra_corners, args.seed)
    return cs


def _write_csv(path, header, rows):
    out = open(path, "w", newline="") if path else sys.stdout
    try:
        w = csv.writer(out)
        w.writerow(header)
        w.writerows(rows)
    finally:
        if path:
            out.close()


def _xyz(mesh, n):
    x = list(mesh.nodes[n]) + [0.0] * (3 - mesh.dim)
    return [repr(float(v)) for v in x]


def cmd_classify(args):
    mesh, part = _load(args)
    cls = classify_mesh(mesh, part)
    counts = cls.counts()
    print(json.dumps({k: counts[k] for k in ("face", "edge", "vertex")}))
    if args.out:
        rows, comp_id = [], 0
        for g in cls.globs:
            share = " ".join(map(str, g.sharing_set))
            for comp in g.components:
                rows += [[int(n), g.kind, share, comp_id] for n in comp.tolist()]
                comp_id += 1
        _write_csv(args.out, ["node_id", "kind", "sharing_set", "component_id"], sorted(rows))
    return EXIT_OK


def cmd_select(args):
    mesh, part = _load(args)
    cls = classify_mesh(mesh, part)
    cs = _corner_set(args, cls)
    rows = [[n, *_xyz(mesh, n), cs.provenance[n]] for n in cs.corners]
    _write_csv(args.out, ["node_id", "x", "y", "z", "provenance"], rows)
    if args.out:
        print(f"{len(cs)} corners ({cs.algorithm}) -> {args.out}")
    return EXIT_OK


def cmd_solve(args):
    mesh, part = _load(args)
    problem = prepare(mesh, part, args.pde)
    cs = _corner_set(args, problem.cls)
    res = solve_with(problem, cs, normalize_mode(args.constraints), args.tol, args.maxit)
    row = res.row
    report = {
        "iterations": row["iterations"],
        "kappa_est": None if np.isnan(row["kappa_est"]) else row["kappa_est"],
        "converged": row["converged"],
        "n_corners": row["n_corners"],
        "n_coarse_dofs": row["n_coarse_dofs"],
        "constraints": normalize_mode(args.constraints),
        "algorithm": row["algorithm"],
        "averaging": "multiplicity",
        "timings": {"reduce": problem.t_reduce, "setup": row["t_setup"], "coarse": row["t_coarse"], "pcg": row["t_pcg"]},
        "cause": row["cause"],
    }
    text = json.dumps(report, indent=2)
    if args.report:
        Path(args.report).write_text(text + "\n")
    print(text)
    if args.out and res.solution is not None:
        dpn = problem.system.dofs_per_node
        u = res.solution.reshape(-1, dpn)
        _write_csv(args.out, ["node_id"] + [f"u{c}" for c in range(dpn)], [[i, *map(repr, r.tolist())] for i, r in enumerate(u)])
    return EXIT_SINGULAR if res.singular else EXIT_OK


def _sweep_config(args, **extra):
    algs = tuple(a for a in args.algorithms.split(",") if a)
    kw = dict(algorithms=algs, mode=args.constraints, seed=args.seed, dim_mode=args.dim_mode, tol=args.tol, maxit=args.maxit, **extra)
    if args.range:
        try:
            start, stop, step = _ints(args.range.replace(":", ","))
        except ValueError:
            raise InputError("--range expects START:STOP:STEP") from None
        return SweepConfig.from_range(start, stop, step, **kw)
    if args.counts:
        return SweepConfig(counts=tuple(_ints(args.counts)), **kw)
    factors = tuple(float(f) for f in (args.factors or "1").split(","))
    return SweepConfig(factors=factors, **kw)


def cmd_sweep(args):
    mesh, part = _load(args)
    problem = prepare(mesh, part, args.pde)
    cfg = _sweep_config(args, repetitions=args.repetitions, workers=args.workers)
    rows = run_sweep(problem, cfg)
    write_rows(rows, args.out)
    return EXIT_OK


def cmd_compare(args):
    mesh, part = _load(args)
    problem = prepare(mesh, part, args.pde)
    algs = [a for a in args.algorithms.split(",") if a]
    rows = compare_same_count(
        problem, algs, args.target, args.seed, normalize_mode(args.constraints), args.dim_mode, args.tol, args.maxit
    )
    write_rows(rows, args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    src = common.add_argument_group("input")
    src.add_argument("--mesh", help="mesh JSON file")
    src.add_argument("--cube", help="built-in box, subdomains per axis and cells per subdomain, e.g. 3x3x3:4")
    src.add_argument("--clamp", help="with --cube: clamped faces, e.g. x- or x-,x+ (default: low face along the most divided axis)")
    parts = src.add_mutually_exclusive_group()
    parts.add_argument("--part", help="element partition file, one subdomain id per line")
    parts.add_argument("--nparts", type=int, help="partition by recursive coordinate bisection")
    common.add_argument("--pde", choices=("laplace", "elasticity"), default="elasticity")
    common.add_argument("--out", help="output file (CSV); stdout when omitted")
    common.add_argument("-v", "--verbose", action="store_true")

    sel = argparse.ArgumentParser(add_help=False)
    sel.add_argument("--algorithm", choices=ALGORITHMS, default="full")
    sel.add_argument("--dim-mode", choices=("3d", "2d"), default="3d")
    sel.add_argument("--extra-corners", type=int, default=0, metavar="K")
    sel.add_argument("--seed", type=int, default=0)
    sel.add_argument("--no-components", action="store_true", help="skip splitting shared node sets into components")

    slv = argparse.ArgumentParser(add_help=False)
    slv.add_argument("--constraints", default="c", help="c, ce, cf or cef")
    slv.add_argument("--tol", type=float, default=1e-8)
    slv.add_argument("--maxit", type=int, default=5000)

    p = argparse.ArgumentParser(prog="bddc-corners", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("classify", parents=[common], help="count faces, edges and vertices").set_defaults(func=cmd_classify)
    sub.add_parser("select", parents=[common, sel], help="select corners").set_defaults(func=cmd_select)
    s = sub.add_parser("solve", parents=[common, sel, slv], help="BDDC-preconditioned interface solve")
    s.add_argument("--corners", help="corner CSV (node_id column) instead of running a selection")
    s.add_argument("--report", help="write the report JSON here")
    s.set_defaults(func=cmd_solve)

    sw = sub.add_parser("sweep", parents=[common, slv], help="iterations versus number of corners")
    sw.add_argument("--algorithms", default="full")
    sw.add_argument("--dim-mode", choices=("3d", "2d"), default="3d")
    g = sw.add_mutually_exclusive_group()
    g.add_argument("--counts", help="comma-separated corner counts")
    g.add_argument("--range", help="START:STOP:STEP corner counts")
    g.add_argument("--factors", help="comma-separated multiples of each basic-set size (default 1)")
    sw.add_argument("--seed", type=int, default=0)
    sw.add_argument("--repetitions", type=int, default=1)
    sw.add_argument("--workers", type=int, default=1)
    sw.set_defaults(func=cmd_sweep)

    c = sub.add_parser("compare", parents=[common, slv], help="basic sets completed to the same count")
    c.add_argument("--algorithms", default="full,minimal,edge")
    c.add_argument("--dim-mode", choices=("3d", "2d"), default="3d")
    c.add_argument("--target", type=int, required=True)
    c.add_argument("--seed", type=int, default=0)
    c.set_defaults(func=cmd_compare)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (InputError, MeshFormatError, PartitionFormatError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
