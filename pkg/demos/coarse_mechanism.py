"""
A hinged chain of subdomains
============================

Four blocks in a row, clamped at both ends.  One corner per cut, all on the
same horizontal line, fixes every block locally, but the chain can still
fold: the coarse matrix is singular.  The face-based selection avoids it.
"""

import numpy as np

from bddc_corners import build_constraints, check_invertibility, generate_serial_strip, prepare, select_corners
from bddc_corners.fixtures import hinge_corners

mesh, part = generate_serial_strip(n_subdomains=4, dim=2)
problem = prepare(mesh, part, "elasticity")


def diagnose(cs):
    cons = build_constraints(problem.cls, cs, "C", problem.system.dofs_per_node, problem.system.free_mask)
    return check_invertibility(problem.schur, cons)


hinges = hinge_corners(mesh, part)
d = diagnose(hinges)
print("hinge corners at", mesh.nodes[hinges.nodes()].tolist())
print("local problems ok:", d.local_ok)
print("coarse matrix", d.coarse_matrix.shape, "rank deficiency", d.coarse_deficiency)
print("cause:", d.cause())

# singular vector of the coarse matrix: the folding motion
w, v = np.linalg.eigh(d.coarse_matrix)
print("smallest coarse eigenvalues", np.round(w[:3], 12))

full = select_corners(problem.cls, "full", dim_mode="2d")
d = diagnose(full)
print(len(full), "face-based corners ->", "nonsingular" if d.ok else d.cause())
