"""Independent reference computations used by the tests."""

from collections import deque

import numpy as np


def svd_rank_deficiency(K, rel=1e-10):
    """Singular values at or below ``rel`` times the largest diagonal entry."""
    K = np.asarray(K, dtype=float)
    if K.size == 0:
        return 0
    s = np.linalg.svd(K, compute_uv=False)
    return int(np.sum(s <= rel * np.abs(np.diag(K)).max()))


def membership(mesh, partition):
    """node -> set of subdomains, by looping over elements."""
    out = [set() for _ in range(mesh.n_nodes)]
    for e, conn in enumerate(mesh.elements.tolist()):
        for n in conn:
            out[n].add(int(partition.elem_to_sub[e]))
    return out


def brute_classification(mesh, partition):
    """(faces, edges, vertices) straight from the definition."""
    groups = {}
    for n, s in enumerate(membership(mesh, partition)):
        if len(s) >= 2:
            groups.setdefault(frozenset(s), []).append(n)
    faces = sum(1 for s in groups if len(s) == 2)
    edges = sum(1 for s, v in groups.items() if len(s) > 2 and len(v) > 1)
    verts = sum(1 for s, v in groups.items() if len(s) > 2 and len(v) == 1)
    return faces, edges, verts


def bfs_components(mesh, nodes):
    """Connected components of ``nodes`` under element co-occurrence, by BFS."""
    nodes = set(int(n) for n in nodes)
    adj = {n: set() for n in nodes}
    for conn in mesh.elements.tolist():
        inside = [n for n in conn if n in nodes]
        for a in inside:
            adj[a].update(b for b in inside if b != a)
    seen, comps = set(), []
    for start in sorted(nodes):
        if start in seen:
            continue
        comp, queue = [], deque([start])
        seen.add(start)
        while queue:
            n = queue.popleft()
            comp.append(n)
            for m in adj[n]:
                if m not in seen:
                    seen.add(m)
                    queue.append(m)
        comps.append(sorted(comp))
    return comps


def dense_schur(system, interface_dofs):
    """S = A_GG - A_GI A_II^-1 A_IG from the assembled global matrix."""
    A = system.matrix.toarray()
    free = system.free_mask
    gamma = np.asarray(interface_dofs)
    inner = np.setdiff1d(np.flatnonzero(free), gamma)
    AII = A[np.ix_(inner, inner)]
    AIG = A[np.ix_(inner, gamma)]
    S = A[np.ix_(gamma, gamma)] - AIG.T @ np.linalg.solve(AII, AIG)
    f = system.rhs
    g = f[gamma] - AIG.T @ np.linalg.solve(AII, f[inner])
    return S, g


def dense_operator(apply, n):
    return np.column_stack([apply(e) for e in np.eye(n)])
