"""Implicit interface Schur complement built from subdomain Neumann matrices."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from ..assembly import SparseSystem, assemble_matrix
from ..errors import SingularLocalProblem
from ..mesh import Mesh
from ..partition import Partition
from .factor import SymmetricFactor, factorize


@dataclass(eq=False)
class Subdomain:
    """One substructure with its dofs split into interior and interface parts.

    ``dofs`` are global free dofs, interior ones first; ``iface_index`` maps
    the trailing interface dofs to positions in the global interface vector.
    """

    index: int
    dofs: np.ndarray
    n_interior: int
    iface_index: np.ndarray
    K: sp.csr_matrix
    interior_factor: SymmetricFactor = field(repr=False)

    @property
    def n_dofs(self) -> int:
        return self.dofs.size

    @property
    def interface_dofs(self) -> np.ndarray:
        return self.dofs[self.n_interior :]

    @property
    def K_II(self):
        return self.K[: self.n_interior, : self.n_interior]

    @property
    def K_IG(self):
        return self.K[: self.n_interior, self.n_interior :]

    @property
    def K_GG(self):
        return self.K[self.n_interior :, self.n_interior :]

    def schur_apply(self, x: np.ndarray) -> np.ndarray:
        y = self.K_GG @ x
        if self.n_interior:
            y -= self.K_IG.T @ self.interior_factor.solve(self.K_IG @ x)
        return y

    def dense_schur(self) -> np.ndarray:
        S = self.K_GG.toarray()
        if self.n_interior:
            KIG = self.K_IG.toarray()
            S -= KIG.T @ self.interior_factor.solve(KIG)
        return S


@dataclass(eq=False)
class SchurSystem:
    """Interface problem ``S u = g`` applied through subdomain solves.

    ``interface_dofs[k]`` is the global dof at interface position ``k``;
    ``multiplicity[k]`` counts the subdomains sharing it.
    """

    system: SparseSystem
    mesh: Mesh
    partition: Partition
    subdomains: list[Subdomain]
    interface_dofs: np.ndarray
    multiplicity: np.ndarray
    g: np.ndarray

    @property
    def n_interface(self) -> int:
        return self.interface_dofs.size

    @property
    def dofs_per_node(self) -> int:
        return self.system.dofs_per_node

    def apply(self, u: np.ndarray) -> np.ndarray:
        out = np.zeros(self.n_interface)
        for s in self.subdomains:
            out[s.iface_index] += s.schur_apply(u[s.iface_index])
        return out

    __matmul__ = apply

    def dense(self) -> np.ndarray:
        """Explicit S; only for small problems and tests."""
        S = np.zeros((self.n_interface, self.n_interface))
        for s in self.subdomains:
            S[np.ix_(s.iface_index, s.iface_index)] += s.dense_schur()
        return S

    def back_substitute(self, u_gamma: np.ndarray) -> np.ndarray:
        """Full global solution from interface values, Dirichlet values included."""
        sysm = self.system
        u = np.zeros(sysm.n_dofs)
        u[sysm.dirichlet_dofs] = sysm.rhs[sysm.dirichlet_dofs]
        u[self.interface_dofs] = u_gamma
        for s in self.subdomains:
            if s.n_interior:
                f_I = sysm.rhs[s.dofs[: s.n_interior]]
                rhs = f_I - s.K_IG @ u_gamma[s.iface_index]
                u[s.dofs[: s.n_interior]] = s.interior_factor.solve(rhs)
        return u


def _subdomain_matrix(system: SparseSystem, elems: np.ndarray, dofs: np.ndarray) -> sp.csr_matrix:
    """Neumann matrix of a substructure on ``dofs`` (free dofs only)."""
    n = system.n_dofs
    local = np.full(n, -1, dtype=np.int64)
    local[dofs] = np.arange(dofs.size)
    edofs = local[system.element_dofs[elems]]
    Ke = system.element_matrices[elems].copy()
    # Dirichlet dofs are dropped by sending them to a scratch index
    dropped = edofs < 0
    edofs = np.where(dropped, dofs.size, edofs)
    K = assemble_matrix(Ke, edofs, dofs.size + 1)
    return K[: dofs.size, : dofs.size].tocsr()


def reduce_to_schur(system: SparseSystem, mesh: Mesh, partition: Partition) -> SchurSystem:
    """Split the free dofs into subdomain interiors and the shared interface."""
    if partition.n_subdomains < 2:
        raise ValueError("a single subdomain has no interface; nothing to reduce")
    dpn = system.dofs_per_node
    free = system.free_mask
    member = partition.node_sharing(mesh).tocsr()
    node_mult = np.diff(member.indptr)
    dof_mult = np.repeat(node_mult, dpn)
    iface_mask = free & (dof_mult >= 2)
    interface_dofs = np.flatnonzero(iface_mask)
    if interface_dofs.size == 0:
        raise ValueError("the partition has no free interface dofs")
    iface_pos = np.full(system.n_dofs, -1, dtype=np.int64)
    iface_pos[interface_dofs] = np.arange(interface_dofs.size)

    subdomains = []
    g = system.rhs[interface_dofs].copy()
    for i in range(partition.n_subdomains):
        elems = partition.elements_of(i)
        nodes = np.unique(mesh.elements[elems])
        all_dofs = (nodes[:, None] * dpn + np.arange(dpn)).ravel()
        all_dofs = all_dofs[free[all_dofs]]
        inner = all_dofs[~iface_mask[all_dofs]]
        outer = all_dofs[iface_mask[all_dofs]]
        dofs = np.concatenate([inner, outer])
        K = _subdomain_matrix(system, elems, dofs)
        fac = factorize(K[: inner.size, : inner.size])
        if not fac.ok:
            raise SingularLocalProblem(i, fac.deficiency, "interior block")
        sub = Subdomain(i, dofs, inner.size, iface_pos[outer], K, fac)
        if inner.size:
            g[sub.iface_index] -= sub.K_IG.T @ fac.solve(system.rhs[inner])
        subdomains.append(sub)
    return SchurSystem(system, mesh, partition, subdomains, interface_dofs, dof_mult[interface_dofs].astype(float), g)
