"""Preconditioned conjugate gradients with a Lanczos condition estimate."""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import eigh_tridiagonal


@dataclass
class SolveReport:
    iterations: int
    converged: bool
    residuals: list[float] = field(default_factory=list)
    energy_errors: list[float] = field(default_factory=list)
    kappa_est: float = 1.0
    eig_min: float = 1.0
    eig_max: float = 1.0
    t_setup: float = 0.0
    t_coarse: float = 0.0
    t_pcg: float = 0.0

    def as_dict(self) -> dict:
        return {
            "iterations": self.iterations,
            "converged": self.converged,
            "kappa_est": self.kappa_est,
            "eig_min": self.eig_min,
            "eig_max": self.eig_max,
            "residuals": list(self.residuals),
            "timings": {"setup": self.t_setup, "coarse": self.t_coarse, "pcg": self.t_pcg},
        }


def lanczos_extremes(alphas, betas) -> tuple[float, float]:
    """Extreme Ritz values of the tridiagonal matrix generated by CG.

    ``alphas[j]`` are the step lengths and ``betas[j]`` the ratios
    ``rho_{j+1} / rho_j``; only the first ``len(alphas)`` of the latter are used.
    """
    a = np.asarray(alphas, dtype=float)
    b = np.asarray(betas, dtype=float)[: a.size - 1]
    if a.size == 0:
        return 1.0, 1.0
    diag = 1.0 / a
    diag[1:] += b / a[:-1]
    off = np.sqrt(b) / a[:-1]
    ev = eigh_tridiagonal(diag, off, eigvals_only=True)
    return float(ev[0]), float(ev[-1])


def pcg(A, b: np.ndarray, M=None, tol: float = 1e-8, maxit: int = 5000, x0=None, callback=None):
    """Solve ``A x = b`` for symmetric positive definite ``A``.

    ``A`` and ``M`` are callables or objects with ``@``.  Iteration stops
    when ``||r_k|| / ||b|| <= tol``.  ``energy_errors[k]`` is the A-norm of
    the error of iterate ``k`` measured against the final iterate, computed
    from the CG coefficients.  ``callback(k, x_k)`` sees every iterate.
    """
    apply_a = A if callable(A) else (lambda v: A @ v)
    apply_m = (lambda v: v.copy()) if M is None else (M if callable(M) else (lambda v: M @ v))
    t0 = time.perf_counter()
    b = np.asarray(b, dtype=float)
    x = np.zeros_like(b) if x0 is None else np.array(x0, dtype=float)
    bnorm = np.linalg.norm(b)
    if bnorm == 0.0:
        return np.zeros_like(b), SolveReport(0, True, [0.0], [0.0], t_pcg=time.perf_counter() - t0)
    r = b - apply_a(x)
    res = [np.linalg.norm(r) / bnorm]
    if callback:
        callback(0, x)
    alphas, betas, rhos = [], [], []
    converged = res[0] <= tol
    z = apply_m(r)
    rho = float(r @ z)
    p = z.copy()
    k = 0
    while not converged and k < maxit:
        q = apply_a(p)
        pq = float(p @ q)
        if pq <= 0 or rho <= 0:
            break
        alpha = rho / pq
        x += alpha * p
        r -= alpha * q
        k += 1
        alphas.append(alpha)
        rhos.append(rho)
        res.append(np.linalg.norm(r) / bnorm)
        if callback:
            callback(k, x)
        if res[-1] <= tol:
            converged = True
            break
        z = apply_m(r)
        rho_new = float(r @ z)
        beta = rho_new / rho
        betas.append(beta)
        rho = rho_new
        p = z + beta * p

    # ||x_k - x_final||_A^2 = sum_{j>=k} alpha_j rho_j
    tail = np.cumsum((np.array(alphas) * np.array(rhos))[::-1])[::-1]
    energy = [float(np.sqrt(t)) for t in tail] + [0.0]
    lo, hi = lanczos_extremes(alphas, betas)
    report = SolveReport(
        iterations=k,
        converged=converged,
        residuals=[float(v) for v in res],
        energy_errors=energy,
        kappa_est=max(hi / lo, 1.0) if lo > 0 else float("inf"),
        eig_min=lo,
        eig_max=hi,
        t_pcg=time.perf_counter() - t0,
    )
    return x, report


def solve_interface(schur, op, tol: float = 1e-8, maxit: int = 5000, callback=None):
    """PCG on ``S u = g`` preconditioned by ``op``; returns the interface solution and report."""
    u, rep = pcg(schur.apply, schur.g, op.apply, tol=tol, maxit=maxit, callback=callback)
    rep.t_setup = op.t_setup
    rep.t_coarse = op.t_coarse
    return u, rep
