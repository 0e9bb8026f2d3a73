"""Interface extraction and face/edge/vertex classification."""

from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import dataclass, replace
from functools import cached_property
from itertools import combinations

import numpy as np

from .mesh import Mesh
from .partition import Partition, node_graph

FACE, EDGE, VERTEX = "face", "edge", "vertex"


@dataclass(frozen=True, eq=False)
class Glob:
    """Interface nodes sharing exactly the same set of subdomains."""

    kind: str
    sharing_set: tuple[int, ...]
    nodes: np.ndarray
    components: tuple[np.ndarray, ...]

    @staticmethod
    def kind_for(n_sharing: int, n_nodes: int) -> str:
        if n_sharing == 2:
            return FACE
        return EDGE if n_nodes > 1 else VERTEX


@dataclass(frozen=True, eq=False)
class InterfaceClassification:
    """Interface of a partitioned mesh, optionally split into globs and corners.

    ``node_to_sharing[n]`` is the sorted tuple of subdomains containing node
    ``n``.  ``globs`` stays ``None`` until :func:`classify` has run.
    Instances are never mutated; promotion returns a new value.
    """

    mesh: Mesh
    n_subdomains: int
    node_to_sharing: tuple[tuple[int, ...], ...]
    interface_nodes: np.ndarray
    globs: tuple[Glob, ...] | None = None
    corners: tuple[int, ...] = ()

    def __repr__(self):
        state = self.counts() if self.classified else "unclassified"
        return f"InterfaceClassification(interface_nodes={self.interface_nodes.size}, {state})"

    @property
    def classified(self) -> bool:
        return self.globs is not None

    def counts(self) -> dict[str, int]:
        self._require_globs()
        c = Counter(g.kind for g in self.globs)
        return {FACE: c[FACE], EDGE: c[EDGE], VERTEX: c[VERTEX], "corner": len(self.corners)}

    def globs_of_kind(self, kind: str) -> list[Glob]:
        self._require_globs()
        return [g for g in self.globs if g.kind == kind]

    def adjacent_pairs(self) -> list[tuple[int, int]]:
        """Subdomain pairs sharing a face, ascending."""
        self._require_globs()
        return sorted({g.sharing_set for g in self.globs if g.kind == FACE})

    @cached_property
    def _pair_nodes(self) -> dict[tuple[int, int], np.ndarray]:
        acc = defaultdict(list)
        for n in self.interface_nodes.tolist():
            for pair in combinations(self.node_to_sharing[n], 2):
                acc[pair].append(n)
        return {k: np.array(v, dtype=np.int64) for k, v in acc.items()}

    def _require_globs(self):
        if self.globs is None:
            raise ValueError("interface is not classified yet; call classify() first")


def extract_interface(mesh: Mesh, partition: Partition) -> InterfaceClassification:
    """Collect, for every node, the subdomains containing it; nodes with two or more form the interface."""
    if partition.elem_to_sub.size != mesh.n_elements:
        raise ValueError("partition does not match the mesh element count")
    member = partition.node_sharing(mesh).tocsr()
    member.sort_indices()
    sharing = tuple(
        tuple(member.indices[member.indptr[n] : member.indptr[n + 1]].tolist()) for n in range(mesh.n_nodes)
    )
    iface = np.flatnonzero(np.diff(member.indptr) >= 2)
    return InterfaceClassification(mesh, partition.n_subdomains, sharing, iface)


def _make_glob(mesh, sharing, nodes) -> Glob:
    nodes = np.asarray(nodes, dtype=np.int64)
    comps = tuple(node_graph(mesh, nodes).components())
    return Glob(Glob.kind_for(len(sharing), nodes.size), sharing, nodes, comps)


def classify(cls: InterfaceClassification) -> InterfaceClassification:
    """Group interface nodes by identical sharing set into faces, edges and vertices.

    Globs are ordered by sharing set.  Existing corners stay corners.
    """
    corner_set = set(cls.corners)
    groups = defaultdict(list)
    for n in cls.interface_nodes.tolist():
        if n not in corner_set:
            groups[cls.node_to_sharing[n]].append(n)
    globs = tuple(_make_glob(cls.mesh, s, groups[s]) for s in sorted(groups))
    return replace(cls, globs=globs)


def pair_shared_nodes(cls: InterfaceClassification, i: int, j: int) -> np.ndarray:
    """All interface nodes contained in both subdomains, including edge and vertex nodes."""
    if i == j:
        raise ValueError("pair_shared_nodes needs two distinct subdomains")
    key = (min(i, j), max(i, j))
    return cls._pair_nodes.get(key, np.empty(0, dtype=np.int64)).copy()


def promote_to_corners(cls: InterfaceClassification, nodes) -> InterfaceClassification:
    """Turn ``nodes`` into corners, removing them from their globs.

    Emptied globs disappear and surviving globs get their components (and
    edge/vertex kind) recomputed.
    """
    cls._require_globs()
    new = {int(n) for n in nodes} - set(cls.corners)
    if not new:
        return cls
    iface = set(cls.interface_nodes.tolist())
    outside = sorted(new - iface)
    if outside:
        raise ValueError(f"nodes {outside[:10]} are not on the interface")
    globs = []
    for g in cls.globs:
        hit = np.isin(g.nodes, list(new))
        if not hit.any():
            globs.append(g)
        elif not hit.all():
            globs.append(_make_glob(cls.mesh, g.sharing_set, g.nodes[~hit]))
    corners = tuple(sorted(set(cls.corners) | new))
    return replace(cls, globs=tuple(globs), corners=corners)


def classify_mesh(mesh: Mesh, partition: Partition) -> InterfaceClassification:
    return classify(extract_interface(mesh, partition))
