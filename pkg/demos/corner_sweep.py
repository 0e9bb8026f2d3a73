"""
Iterations against the number of corners
========================================

Start from each basic set on a 3x3x3 elasticity cube and add random
interface nodes as extra corners.  Pass a CSV path to save the table.
"""

import sys

from bddc_corners import generate_structured, prepare
from bddc_corners.mesh import StructuredSpec
from bddc_corners.sweep import SweepConfig, run_sweep, trend_slope, write_rows

mesh, part = generate_structured(StructuredSpec(4, (3, 3, 3)))
problem = prepare(mesh, part, "elasticity")
print(problem.schur.n_interface, "interface dofs", file=sys.stderr)

for mode in ("C", "C+E+F"):
    cfg = SweepConfig(factors=(1, 2, 3, 4), algorithms=("full", "minimal", "edge"), mode=mode, repetitions=3)
    rows = run_sweep(problem, cfg)
    print(f"mode {mode}: slope {trend_slope(rows):.3f} iterations per corner", file=sys.stderr)
    write_rows(rows, sys.argv[1] + f".{mode}.csv" if len(sys.argv) > 1 else None)
