"""Structured test meshes with built-in partitions."""

from __future__ import annotations


import numpy as np

from .corners import CornerSet
from .mesh import Mesh, StructuredSpec
from .partition import Partition

_FACES = {"x-": (0, 0), "x+": (0, 1), "y-": (1, 0), "y+": (1, 1), "z-": (2, 0), "z+": (2, 1)}


def _grid_nodes(cells):
    # x varies fastest
    axes = [np.arange(n + 1, dtype=float) for n in cells]
    mesh_axes = np.meshgrid(*axes, indexing="ij")
    return np.stack([a.ravel(order="F") for a in mesh_axes], axis=1)


def _grid_elements(cells):
    """Connectivity of all cells (x fastest) in quad4/hex8 node order, plus cell indices."""
    npts = [n + 1 for n in cells]
    strides = np.cumprod([1] + npts[:-1])
    ranges = [np.arange(n) for n in cells]
    idx = np.stack([a.ravel(order="F") for a in np.meshgrid(*ranges, indexing="ij")], axis=1)
    if len(cells) == 2:
        offsets = [(0, 0), (1, 0), (1, 1), (0, 1)]
    else:
        offsets = [(0, 0, 0), (1, 0, 0), (1, 1, 0), (0, 1, 0), (0, 0, 1), (1, 0, 1), (1, 1, 1), (0, 1, 1)]
    conn = np.stack([(idx + np.array(o)) @ strides for o in offsets], axis=1)
    return conn, idx


def _clamp(nodes, dim, faces):
    lo, hi = nodes.min(axis=0), nodes.max(axis=0)
    clamped = set()
    for face in faces:
        if face not in _FACES:
            raise ValueError(f"unknown face {face!r}; expected one of {sorted(_FACES)}")
        axis, side = _FACES[face]
        if axis >= dim:
            raise ValueError(f"face {face!r} does not exist in {dim}D")
        target = hi[axis] if side else lo[axis]
        clamped.update(np.flatnonzero(nodes[:, axis] == target).tolist())
    return tuple((n, d, 0.0) for n in sorted(clamped) for d in range(dim))


def default_clamp(spec: StructuredSpec) -> tuple[str, ...]:
    """Low face across the axis with the most subdomains (first such axis on ties)."""
    axis = int(np.argmax(spec.subdomains_per_axis))
    return ("xyz"[axis] + "-",)


def generate_structured(spec: StructuredSpec, clamp=None) -> tuple[Mesh, Partition]:
    """Box mesh of unit quad4/hex8 cells split into equal blocks of cells.

    Nodes and cells are numbered with x varying fastest.  Every node on the
    ``clamp`` faces gets all of its components fixed to zero; by default the
    box is a cantilever clamped at the start of its most divided axis, so
    for ``1x1x2`` the upper subdomain floats.
    """
    if clamp is None:
        clamp = default_clamp(spec)
    cells = spec.cells
    nodes = _grid_nodes(cells)
    conn, idx = _grid_elements(cells)
    block = idx // np.array(spec.cells_per_subdomain)
    sub_strides = np.cumprod([1] + list(spec.subdomains_per_axis[:-1]))
    e2s = block @ sub_strides
    mesh = Mesh(
        dim=spec.dim,
        nodes=nodes,
        elements=conn,
        elem_kind="quad4" if spec.dim == 2 else "hex8",
        dirichlet=_clamp(nodes, spec.dim, clamp),
    )
    return mesh, Partition(e2s, int(np.prod(spec.subdomains_per_axis)))


def generate_wedged_beam(cells_per_block: int = 2, section: int = 4) -> tuple[Mesh, Partition]:
    """Beam whose middle block (subdomain 1) is wedged between two pieces of subdomain 0.

    Along x the beam consists of a narrow stem, the wedged block and a full
    end block, each ``cells_per_block`` cells long.  The stem covers the
    central half of the ``section`` x ``section`` cross-section and is
    clamped at x = 0; the stem and the end block together form subdomain 0,
    which is therefore made of two element-disconnected pieces.  The
    interface between the subdomains consists of two separate cuts: a small
    one at the stem and a full cross-section at the end block.
    """
    if cells_per_block < 2:
        raise ValueError("cells_per_block must be >= 2 so that no element spans both cuts")
    if section < 4 or section % 2:
        raise ValueError("section must be an even number >= 4")
    c = cells_per_block
    cells = (3 * c, section, section)
    all_nodes = _grid_nodes(cells)
    conn, idx = _grid_elements(cells)
    lo, hi = section // 4, section - section // 4
    in_stem = (idx[:, 0] < c) & (idx[:, 1] >= lo) & (idx[:, 1] < hi) & (idx[:, 2] >= lo) & (idx[:, 2] < hi)
    keep = in_stem | (idx[:, 0] >= c)
    conn, idx = conn[keep], idx[keep]
    e2s = np.where((idx[:, 0] >= c) & (idx[:, 0] < 2 * c), 1, 0)

    used = np.unique(conn)
    renum = np.full(all_nodes.shape[0], -1, dtype=np.int64)
    renum[used] = np.arange(used.size)
    nodes = all_nodes[used]
    conn = renum[conn]
    mesh = Mesh(dim=3, nodes=nodes, elements=conn, elem_kind="hex8", dirichlet=_clamp(nodes, 3, ("x-",)))
    return mesh, Partition(e2s, 2)


def generate_serial_strip(n_subdomains: int = 4, cells_per_subdomain: int = 4, dim: int = 2) -> tuple[Mesh, Partition]:
    """Subdomains in a row along x, clamped at both ends."""
    per_axis = (n_subdomains,) + (1,) * (dim - 1)
    return generate_structured(StructuredSpec(cells_per_subdomain, per_axis, dim), clamp=("x-", "x+"))


def hinge_corners(mesh: Mesh, partition: Partition):
    """Corner nodes on the mid-plane ``y = const`` of every cut of a serial strip.

    In 2D this is one node per interface (two per inner subdomain); in 3D
    the two ends of the mid-line of every cut.  All hinges are parallel, so
    the inner subdomains can rotate together although each of them is
    fixed on its own.
    """
    member = partition.node_sharing(mesh).tocsr()
    iface = np.flatnonzero(np.diff(member.indptr) >= 2)
    ymid = 0.5 * (mesh.nodes[:, 1].min() + mesh.nodes[:, 1].max())
    picks = []
    for xc in np.unique(mesh.nodes[iface, 0]):
        line = iface[(mesh.nodes[iface, 0] == xc) & (mesh.nodes[iface, 1] == ymid)]
        if line.size == 0:
            raise ValueError("the strip needs an even number of cells across y")
        if mesh.dim == 2:
            picks.append(int(line[0]))
        else:
            z = mesh.nodes[line, 2]
            picks += [int(line[np.argmin(z)]), int(line[np.argmax(z)])]
    return CornerSet.manual(picks)
