"""
A subdomain in two pieces
=========================

The middle block of a beam is wedged between two element-disconnected
pieces of the other subdomain, so the two subdomains meet across two
separate cuts.  Treating the shared nodes as one set puts all three corners
on the larger cut; splitting them into components gives each cut its own.
"""

from bddc_corners import prepare, select_corners, solve_with
from bddc_corners.fixtures import generate_wedged_beam
from bddc_corners.partition import subdomain_components

mesh, part = generate_wedged_beam()
problem = prepare(mesh, part, "elasticity")
print("pieces per subdomain:", [len(c) for c in subdomain_components(part, mesh)])

for detect in (False, True):
    cs = select_corners(problem.cls, "full", detect_components=detect)
    out = solve_with(problem, cs, "C")
    r = out.row
    status = r["cause"] or f"{r['iterations']} iterations, kappa ~ {r['kappa_est']:.2f}"
    print(f"components {'on ' if detect else 'off'}: {len(cs)} corners, {status}")
