"""End-to-end glue: mesh and partition in, interface solve out."""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .assembly import SparseSystem, assemble
from .bddc import SchurSystem, build_constraints, build_preconditioner, reduce_to_schur, solve_interface
from .bddc.pcg import SolveReport
from .corners import CornerSet
from .errors import SingularConfigurationError
from .interface import InterfaceClassification, classify_mesh
from .mesh import Mesh
from .partition import Partition

# stable column order of every result table
COLUMNS = (
    "algorithm",
    "n_corners",
    "n_coarse_dofs",
    "iterations",
    "kappa_est",
    "t_setup",
    "t_coarse",
    "t_pcg",
    "converged",
    "cause",
)


@dataclass(eq=False)
class Problem:
    mesh: Mesh
    partition: Partition
    system: SparseSystem
    schur: SchurSystem
    cls: InterfaceClassification
    t_reduce: float = 0.0


def prepare(mesh: Mesh, partition: Partition, pde="elasticity") -> Problem:
    t0 = time.perf_counter()
    system = assemble(mesh, pde)
    schur = reduce_to_schur(system, mesh, partition)
    cls = classify_mesh(mesh, partition)
    return Problem(mesh, partition, system, schur, cls, time.perf_counter() - t0)


@dataclass
class Outcome:
    """One solve: a table row plus, on success, the full solution."""

    row: dict
    report: SolveReport | None = None
    solution: np.ndarray | None = field(default=None, repr=False)

    @property
    def singular(self) -> bool:
        return bool(self.row["cause"])


def solve_with(problem: Problem, cs: CornerSet, mode: str, tol: float = 1e-8, maxit: int = 5000) -> Outcome:
    """Build the preconditioner for ``cs`` and run PCG; singular setups become failed rows."""
    cons = build_constraints(problem.cls, cs, mode, problem.system.dofs_per_node, problem.system.free_mask)
    row = {
        "algorithm": cs.algorithm,
        "n_corners": len(cs),
        "n_coarse_dofs": cons.n_coarse_dofs,
        "iterations": -1,
        "kappa_est": float("nan"),
        "t_setup": 0.0,
        "t_coarse": 0.0,
        "t_pcg": 0.0,
        "converged": False,
        "cause": "",
    }
    try:
        op = build_preconditioner(problem.schur, cons)
    except SingularConfigurationError as exc:
        row["cause"] = str(exc)
        return Outcome(row)
    u, rep = solve_interface(problem.schur, op, tol=tol, maxit=maxit)
    row.update(
        iterations=rep.iterations,
        kappa_est=rep.kappa_est,
        t_setup=rep.t_setup,
        t_coarse=rep.t_coarse,
        t_pcg=rep.t_pcg,
        converged=rep.converged,
        cause="" if rep.converged else f"not converged in {maxit} iterations",
    )
    return Outcome(row, rep, problem.schur.back_substitute(u))
