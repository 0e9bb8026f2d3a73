"""Lowest-order FEM stiffness assembly for the Laplace and linear elasticity operators."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .mesh import Mesh


class DegenerateElementError(ValueError):
    pass


@dataclass(frozen=True)
class Laplace:
    dofs_per_node = 1


@dataclass(frozen=True)
class Elasticity:
    E: float = 1.0
    nu: float = 0.3

    def __post_init__(self):
        if not self.E > 0:
            raise ValueError(f"Young's modulus must be positive, got {self.E}")
        if not 0 <= self.nu < 0.5:
            raise ValueError(f"Poisson ratio must lie in [0, 0.5), got {self.nu}")

    def material_matrix(self, dim: int) -> np.ndarray:
        E, nu = self.E, self.nu
        lam = E * nu / ((1 + nu) * (1 - 2 * nu))
        mu = E / (2 * (1 + nu))
        n = 3 if dim == 2 else 6
        D = np.zeros((n, n))
        D[:dim, :dim] = lam
        D[np.arange(dim), np.arange(dim)] += 2 * mu
        D[np.arange(dim, n), np.arange(dim, n)] = mu
        return D


def as_pde(pde) -> Laplace | Elasticity:
    if isinstance(pde, (Laplace, Elasticity)):
        return pde
    if pde == "laplace":
        return Laplace()
    if pde == "elasticity":
        return Elasticity()
    raise ValueError(f"unknown pde {pde!r}; expected 'laplace' or 'elasticity'")


def dofs_per_node(pde, dim: int) -> int:
    return 1 if isinstance(as_pde(pde), Laplace) else dim


@dataclass(frozen=True, eq=False)
class SparseSystem:
    """Assembled system with Dirichlet rows and columns replaced by identity.

    The unassembled element matrices and their global dof maps are kept,
    since substructuring needs the subdomain (Neumann) matrices.
    Global dof numbering is ``node * dofs_per_node + component``.
    """

    matrix: sp.csr_matrix
    rhs: np.ndarray
    dofs_per_node: int
    element_matrices: np.ndarray
    element_dofs: np.ndarray
    dirichlet_dofs: np.ndarray

    @property
    def n_dofs(self) -> int:
        return self.rhs.size

    @property
    def free_mask(self) -> np.ndarray:
        mask = np.ones(self.n_dofs, dtype=bool)
        mask[self.dirichlet_dofs] = False
        return mask


# reference-element shape function gradients --------------------------------

_GP = 1.0 / np.sqrt(3.0)


def _tensor_rule(dim):
    pts = np.array(np.meshgrid(*([[-_GP, _GP]] * dim), indexing="ij")).reshape(dim, -1).T
    return pts, np.ones(pts.shape[0])


def _quad4_grad(xi):
    s, t = xi
    return 0.25 * np.array(
        [[-(1 - t), -(1 - s)], [(1 - t), -(1 + s)], [(1 + t), (1 + s)], [-(1 + t), (1 - s)]]
    )


_HEX_SIGNS = np.array(
    [[-1, -1, -1], [1, -1, -1], [1, 1, -1], [-1, 1, -1], [-1, -1, 1], [1, -1, 1], [1, 1, 1], [-1, 1, 1]], dtype=float
)


def _hex8_grad(xi):
    g = np.empty((8, 3))
    f = 1 + _HEX_SIGNS * xi
    for a in range(3):
        b, c = [i for i in range(3) if i != a]
        g[:, a] = 0.125 * _HEX_SIGNS[:, a] * f[:, b] * f[:, c]
    return g


def _reference(kind):
    """Quadrature points, weights and shape gradients, shape (ngauss, nen, dim)."""
    if kind == "quad4":
        pts, w = _tensor_rule(2)
        return w, np.array([_quad4_grad(p) for p in pts])
    if kind == "hex8":
        pts, w = _tensor_rule(3)
        return w, np.array([_hex8_grad(p) for p in pts])
    if kind == "tri3":
        return np.array([0.5]), np.array([[[-1.0, -1.0], [1.0, 0.0], [0.0, 1.0]]])
    if kind == "tet4":
        grad = np.vstack([-np.ones(3), np.eye(3)])
        return np.array([1.0 / 6.0]), grad[None]
    raise ValueError(kind)


def _physical_gradients(mesh: Mesh):
    """Shape gradients in physical coordinates and quadrature weights times det J."""
    weights, dN = _reference(mesh.elem_kind)
    X = mesh.nodes[mesh.elements]  # (m, nen, dim)
    J = np.einsum("ena,gnb->egab", X, dN)
    det = np.linalg.det(J)
    scale = np.abs(X.max(axis=1) - X.min(axis=1)).max(axis=1) ** mesh.dim
    bad = np.flatnonzero((det <= 1e-12 * scale[:, None]).any(axis=1))
    if bad.size:
        e = int(bad[0])
        raise DegenerateElementError(
            f"element {e} ({mesh.elem_kind}, nodes {mesh.elements[e].tolist()}) has non-positive volume"
        )
    invJ = np.linalg.inv(J)
    grads = np.einsum("gnb,egba->egna", dN, invJ)
    return grads, det * weights


def element_matrices(mesh: Mesh, pde) -> np.ndarray:
    """Element stiffness matrices, exactly symmetric, shape (m, nen*dpn, nen*dpn)."""
    pde = as_pde(pde)
    grads, wdet = _physical_gradients(mesh)
    if isinstance(pde, Laplace):
        Ke = np.einsum("eg,egia,egja->eij", wdet, grads, grads)
    else:
        B = strain_displacement(grads, mesh.dim)
        D = pde.material_matrix(mesh.dim)
        Ke = np.einsum("eg,egsi,st,egtj->eij", wdet, B, D, B)
    return 0.5 * (Ke + Ke.transpose(0, 2, 1))


def strain_displacement(grads: np.ndarray, dim: int) -> np.ndarray:
    """Engineering-strain B matrices, Voigt order xx, yy, (zz), xy, (yz, xz)."""
    m, g, nen, _ = grads.shape
    if dim == 2:
        B = np.zeros((m, g, 3, nen, 2))
        B[..., 0, :, 0] = grads[..., 0]
        B[..., 1, :, 1] = grads[..., 1]
        B[..., 2, :, 0] = grads[..., 1]
        B[..., 2, :, 1] = grads[..., 0]
    else:
        B = np.zeros((m, g, 6, nen, 3))
        for a in range(3):
            B[..., a, :, a] = grads[..., a]
        for row, (a, b) in zip((3, 4, 5), ((0, 1), (1, 2), (0, 2))):
            B[..., row, :, a] = grads[..., b]
            B[..., row, :, b] = grads[..., a]
    return B.reshape(m, g, B.shape[2], nen * dim)


def element_dof_map(mesh: Mesh, dpn: int) -> np.ndarray:
    return (mesh.elements[:, :, None] * dpn + np.arange(dpn)).reshape(mesh.n_elements, -1)


def assemble_matrix(Ke: np.ndarray, edofs: np.ndarray, n: int) -> sp.csr_matrix:
    rows = np.repeat(edofs, edofs.shape[1], axis=1).ravel()
    cols = np.tile(edofs, (1, edofs.shape[1])).ravel()
    A = sp.csr_matrix((Ke.ravel(), (rows, cols)), shape=(n, n))
    return ((A + A.T) * 0.5).tocsr()


def rigid_body_modes(nodes: np.ndarray) -> np.ndarray:
    """Columns spanning the rigid motions of an elastic body, node-major dof order."""
    n, dim = nodes.shape
    if dim == 2:
        R = np.zeros((n, 2, 3))
        R[:, 0, 0] = 1
        R[:, 1, 1] = 1
        R[:, 0, 2] = -nodes[:, 1]
        R[:, 1, 2] = nodes[:, 0]
    else:
        R = np.zeros((n, 3, 6))
        R[:, :, :3] = np.eye(3)
        x, y, z = nodes.T
        R[:, 0, 3], R[:, 1, 3] = -y, x
        R[:, 1, 4], R[:, 2, 4] = -z, y
        R[:, 0, 5], R[:, 2, 5] = z, -x
    return R.reshape(n * dim, -1)


def assemble(mesh: Mesh, pde="elasticity", load: np.ndarray | None = None) -> SparseSystem:
    """Assemble the stiffness system and eliminate Dirichlet dofs symmetrically.

    The default load is a unit nodal force on every free node, along the last
    axis for elasticity.  Eliminated rows and columns become identity rows
    carrying the prescribed value in the right-hand side.
    """
    pde = as_pde(pde)
    dpn = dofs_per_node(pde, mesh.dim)
    n = mesh.n_nodes * dpn
    Ke = element_matrices(mesh, pde)
    edofs = element_dof_map(mesh, dpn)
    A = assemble_matrix(Ke, edofs, n)

    values = {}
    for node, dof, value in mesh.dirichlet:
        if dof < dpn:
            values[node * dpn + dof] = value
    ddofs = np.array(sorted(values), dtype=np.int64)
    dvals = np.array([values[d] for d in ddofs.tolist()], dtype=float)
    free = np.ones(n, dtype=bool)
    free[ddofs] = False

    if load is None:
        f = np.zeros((mesh.n_nodes, dpn))
        f[:, -1] = 1.0
        f = f.ravel()
    else:
        f = np.asarray(load, dtype=float).copy()
        if f.shape != (n,):
            raise ValueError(f"load must have shape ({n},), got {f.shape}")
    if ddofs.size:
        lift = np.zeros(n)
        lift[ddofs] = dvals
        f = f - A @ lift
    f[ddofs] = dvals

    keep = sp.diags(free.astype(float))
    A = (keep @ A @ keep + sp.diags((~free).astype(float))).tocsr()
    A.eliminate_zeros()
    return SparseSystem(
        matrix=A,
        rhs=f,
        dofs_per_node=dpn,
        element_matrices=Ke,
        element_dofs=edofs,
        dirichlet_dofs=ddofs,
    )
