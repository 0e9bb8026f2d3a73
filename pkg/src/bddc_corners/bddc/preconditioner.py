"""BDDC preconditioner: constrained local problems plus a coarse problem.

Corner dofs are removed from the local problems, averages are enforced with
Lagrange multipliers.  The multiplier system is kept symmetric positive
definite by adding the penalty ``rho * C^T C`` to the local matrix, which
does not change the constrained solution but lets singular Neumann matrices
be factored whenever the constraints remove their kernel.
"""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from ..errors import CoarseMechanism, SingularLocalProblem
from .constraints import ConstraintSet
from .factor import SymmetricFactor, factorize
from .schur import SchurSystem, Subdomain


@dataclass(eq=False)
class LocalProblem:
    """Constrained problem of one subdomain, in its local dof order."""

    sub: Subdomain
    corner_pos: np.ndarray
    rest_pos: np.ndarray
    C: np.ndarray
    coarse_index: np.ndarray
    deficiency: int = 0
    factor: SymmetricFactor | None = field(default=None, repr=False)
    mult_factor: SymmetricFactor | None = field(default=None, repr=False)
    Y: np.ndarray | None = field(default=None, repr=False)
    Phi: np.ndarray | None = field(default=None, repr=False)

    @property
    def ok(self) -> bool:
        return self.deficiency == 0

    def solve_rest(self, b: np.ndarray, c: np.ndarray | None = None) -> np.ndarray:
        """Minimize energy on the non-corner dofs subject to ``C x = c``."""
        x = self.factor.solve(b)
        if self.C.shape[0] == 0:
            return x
        rhs = self.C @ x
        if c is not None:
            rhs = rhs - c
        return x - self.Y @ self.mult_factor.solve(rhs)

    def coarse_matrix(self) -> np.ndarray:
        return self.Phi.T @ (self.sub.K @ self.Phi)


def _local_problem(schur: SchurSystem, sub: Subdomain, cons: ConstraintSet, coarse_of_dof, avg_rows) -> LocalProblem:
    n = sub.n_dofs
    local = {int(d): k for k, d in enumerate(sub.dofs.tolist())}
    cpos, cidx = [], []
    for d in sub.interface_dofs.tolist():
        j = coarse_of_dof.get(d)
        if j is not None:
            cpos.append(local[d])
            cidx.append(j)
    cpos = np.array(cpos, dtype=np.int64)
    is_corner = np.zeros(n, dtype=bool)
    is_corner[cpos] = True
    rest = np.flatnonzero(~is_corner)
    rest_of = np.full(n, -1, dtype=np.int64)
    rest_of[rest] = np.arange(rest.size)

    rows, aidx = [], []
    for j, row in avg_rows:
        if sub.index in row.sharing_set:
            c = np.zeros(rest.size)
            c[rest_of[[local[int(d)] for d in row.dofs.tolist()]]] = row.weights
            rows.append(c)
            aidx.append(j)
    C = np.array(rows).reshape(len(rows), rest.size)
    lp = LocalProblem(sub, cpos, rest, C, np.array(cidx + aidx, dtype=np.int64))

    K = sub.K
    Krr = K[rest][:, rest]
    if C.shape[0]:
        kscale = float(np.abs(Krr.diagonal()).max()) if rest.size else 1.0
        cscale = float((C**2).sum(axis=0).max())
        Krr = Krr + sp.csr_matrix((kscale / cscale) * (C.T @ C))
    lp.factor = factorize(Krr)
    if not lp.factor.ok:
        lp.deficiency = lp.factor.deficiency
        return lp
    if C.shape[0]:
        lp.Y = lp.factor.solve(C.T)
        lp.mult_factor = factorize(C @ lp.Y)
        if not lp.mult_factor.ok:
            lp.deficiency = lp.mult_factor.deficiency
            return lp

    # coarse basis: unit corner values / unit averages, energy-minimal elsewhere
    nc, na = cpos.size, C.shape[0]
    Phi = np.zeros((n, nc + na))
    Phi[cpos, np.arange(nc)] = 1.0
    if rest.size:
        Krc = K[rest][:, cpos].toarray() if nc else np.zeros((rest.size, 0))
        B = np.zeros((rest.size, nc + na))
        B[:, :nc] = -Krc
        target = np.zeros((na, nc + na))
        target[:, nc:] = np.eye(na)
        Phi[rest] = lp.solve_rest(B, target)
    lp.Phi = Phi
    return lp


@dataclass(frozen=True)
class Diagnosis:
    local_ok: tuple[bool, ...]
    local_deficiency: tuple[int, ...]
    coarse_ok: bool
    coarse_deficiency: int
    coarse_matrix: np.ndarray = field(repr=False)

    @property
    def ok(self) -> bool:
        return all(self.local_ok) and self.coarse_ok

    @property
    def failed_subdomains(self) -> list[int]:
        return [i for i, ok in enumerate(self.local_ok) if not ok]

    def cause(self) -> str:
        if self.failed_subdomains:
            i = self.failed_subdomains[0]
            return f"singular local problem in subdomain {i} (rank deficiency {self.local_deficiency[i]})"
        if not self.coarse_ok:
            return f"coarse mechanism (rank deficiency {self.coarse_deficiency})"
        return ""


@dataclass(eq=False)
class BddcOperator:
    """``M = E S~^-1 E^T`` with multiplicity weights in ``E``."""

    schur: SchurSystem
    constraints: ConstraintSet
    locals: list[LocalProblem]
    coarse_matrix: np.ndarray
    coarse_factor: SymmetricFactor
    weights: np.ndarray
    t_setup: float = 0.0
    t_coarse: float = 0.0

    @property
    def n_coarse(self) -> int:
        return self.coarse_matrix.shape[0]

    def restrict(self, r: np.ndarray) -> list[np.ndarray]:
        """``E^T``: weighted copies of an interface vector, one per subdomain."""
        return [self.weights[lp.sub.iface_index] * r[lp.sub.iface_index] for lp in self.locals]

    def average(self, parts: list[np.ndarray]) -> np.ndarray:
        """``E``: weighted sum of subdomain interface values."""
        out = np.zeros(self.schur.n_interface)
        for lp, w in zip(self.locals, parts):
            idx = lp.sub.iface_index
            out[idx] += self.weights[idx] * w
        return out

    def apply(self, r: np.ndarray) -> np.ndarray:
        parts = self.restrict(r)
        rc = np.zeros(self.n_coarse)
        corrections = []
        for lp, ri in zip(self.locals, parts):
            b = np.zeros(lp.sub.n_dofs)
            b[lp.sub.n_interior :] = ri
            rc[lp.coarse_index] += lp.Phi.T @ b
            z = np.zeros(lp.sub.n_dofs)
            z[lp.rest_pos] = lp.solve_rest(b[lp.rest_pos])
            corrections.append(z)
        uc = self.coarse_factor.solve(rc) if self.n_coarse else rc
        out = [
            (z + lp.Phi @ uc[lp.coarse_index])[lp.sub.n_interior :] for lp, z in zip(self.locals, corrections)
        ]
        return self.average(out)

    __call__ = apply


def _setup(schur: SchurSystem, cons: ConstraintSet, workers: int):
    pos = np.full(schur.system.n_dofs, -1, dtype=np.int64)
    pos[schur.interface_dofs] = np.arange(schur.n_interface)
    bad = [int(d) for d in cons.corner_dofs.tolist() if pos[d] < 0]
    for row in cons.averages:
        bad += [int(d) for d in row.dofs.tolist() if pos[d] < 0]
    if bad:
        raise ValueError(f"constraints refer to dofs {sorted(set(bad))[:10]} that are not free interface dofs")
    coarse_of_dof = {int(d): k for k, d in enumerate(np.sort(cons.corner_dofs).tolist())}
    n0 = len(coarse_of_dof)
    avg_rows = [(n0 + j, row) for j, row in enumerate(cons.averages)]

    def one(sub):
        return _local_problem(schur, sub, cons, coarse_of_dof, avg_rows)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            locs = list(pool.map(one, schur.subdomains))
    else:
        locs = [one(s) for s in schur.subdomains]
    return locs, n0 + len(avg_rows)


def _coarse(locs, n_coarse):
    KC = np.zeros((n_coarse, n_coarse))
    for lp in locs:
        KC[np.ix_(lp.coarse_index, lp.coarse_index)] += lp.coarse_matrix()
    return 0.5 * (KC + KC.T)


def check_invertibility(schur: SchurSystem, constraints: ConstraintSet) -> Diagnosis:
    """Attempt every local and the coarse factorization and report which ones are singular."""
    locs, nc = _setup(schur, constraints, 1)
    local_ok = tuple(lp.ok for lp in locs)
    defs = tuple(lp.deficiency for lp in locs)
    if not all(local_ok):
        return Diagnosis(local_ok, defs, False, -1, np.zeros((0, 0)))
    KC = _coarse(locs, nc)
    fac = factorize(KC)
    return Diagnosis(local_ok, defs, fac.ok, fac.deficiency, KC)


def build_preconditioner(schur: SchurSystem, constraints: ConstraintSet, workers: int = 1) -> BddcOperator:
    """Factor the constrained local problems and the coarse matrix.

    Raises :class:`SingularLocalProblem` or :class:`CoarseMechanism` when the
    constraints leave a kernel.
    """
    t0 = time.perf_counter()
    locs, nc = _setup(schur, constraints, workers)
    for lp in locs:
        if not lp.ok:
            raise SingularLocalProblem(lp.sub.index, lp.deficiency)
    t1 = time.perf_counter()
    KC = _coarse(locs, nc)
    fac = factorize(KC)
    if not fac.ok:
        raise CoarseMechanism(fac.deficiency)
    t2 = time.perf_counter()
    return BddcOperator(schur, constraints, locs, KC, fac, 1.0 / schur.multiplicity, t1 - t0, t2 - t1)


def apply_preconditioner(op: BddcOperator, r: np.ndarray) -> np.ndarray:
    return op.apply(r)
