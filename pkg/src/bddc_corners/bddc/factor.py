"""Symmetric factorizations that report rank deficiency instead of failing."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as la
import scipy.sparse as sp
import scipy.sparse.linalg as spla

# pivots below this times the largest diagonal entry count as zero
PIVOT_TOL = 1e-10
# above this size a sparse LU is used instead of dense pivoted Cholesky
DENSE_LIMIT = 3000


@dataclass(eq=False)
class SymmetricFactor:
    """Factor of a symmetric positive semidefinite matrix.

    ``deficiency`` is the number of pivots that fell below the threshold;
    :meth:`solve` is only meaningful when it is zero.
    """

    n: int
    deficiency: int
    _solve: object = None

    @property
    def ok(self) -> bool:
        return self.deficiency == 0

    def solve(self, b: np.ndarray) -> np.ndarray:
        if not self.ok:
            raise np.linalg.LinAlgError(f"matrix is singular (rank deficiency {self.deficiency})")
        if self.n == 0:
            return np.zeros_like(b, dtype=float)
        return self._solve(b)


def _dense(A: np.ndarray, tol: float) -> SymmetricFactor:
    n = A.shape[0]
    dmax = float(np.max(np.abs(np.diag(A)))) if n else 0.0
    if dmax == 0.0:
        return SymmetricFactor(n, n)
    U, piv, rank, info = la.lapack.dpstrf(A, lower=0, tol=tol * dmax)
    if info < 0:
        raise ValueError(f"dpstrf: illegal argument {-info}")
    if rank < n:
        return SymmetricFactor(n, n - int(rank))
    U = np.triu(U)
    perm = piv - 1

    def solve(b):
        bp = b[perm]
        y = la.solve_triangular(U, bp, trans="T", lower=False, check_finite=False)
        x = la.solve_triangular(U, y, lower=False, check_finite=False)
        out = np.empty_like(x)
        out[perm] = x
        return out

    return SymmetricFactor(n, 0, solve)


def _sparse(A: sp.spmatrix, tol: float) -> SymmetricFactor:
    A = sp.csc_matrix(A)
    n = A.shape[0]
    dmax = float(np.abs(A.diagonal()).max())
    try:
        lu = spla.splu(A, permc_spec="MMD_AT_PLUS_A", diag_pivot_thresh=0.0, options={"SymmetricMode": True})
    except RuntimeError:
        return SymmetricFactor(n, max(1, n - int(np.sum(A.diagonal() != 0))))
    small = int(np.sum(np.abs(lu.U.diagonal()) <= tol * dmax))
    if small:
        return SymmetricFactor(n, small)
    return SymmetricFactor(n, 0, lu.solve)


def factorize(A, tol: float = PIVOT_TOL) -> SymmetricFactor:
    """Factor a symmetric positive semidefinite matrix, dense or sparse."""
    n = A.shape[0]
    if A.shape != (n, n):
        raise ValueError(f"matrix must be square, got {A.shape}")
    if n == 0:
        return SymmetricFactor(0, 0, lambda b: np.zeros_like(b, dtype=float))
    if sp.issparse(A):
        if n > DENSE_LIMIT:
            return _sparse(A, tol)
        A = A.toarray()
    A = np.asarray(A, dtype=float)
    if n > DENSE_LIMIT:
        return _sparse(sp.csc_matrix(A), tol)
    return _dense(np.ascontiguousarray(A), tol)
