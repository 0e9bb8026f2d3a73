"""Element-to-subdomain maps, their file format and graph utilities."""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components

from .mesh import Mesh


class PartitionFormatError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class Partition:
    elem_to_sub: np.ndarray
    n_subdomains: int

    def __post_init__(self):
        e2s = np.ascontiguousarray(self.elem_to_sub, dtype=np.int64)
        object.__setattr__(self, "elem_to_sub", e2s)
        if e2s.ndim != 1:
            raise ValueError("elem_to_sub must be one-dimensional")
        if self.n_subdomains < 1:
            raise ValueError(f"n_subdomains must be >= 1, got {self.n_subdomains}")
        if e2s.size and (e2s.min() < 0 or e2s.max() >= self.n_subdomains):
            raise ValueError(f"subdomain ids must lie in [0, {self.n_subdomains})")
        sizes = np.bincount(e2s, minlength=self.n_subdomains)
        empty = np.flatnonzero(sizes == 0)
        if empty.size:
            raise ValueError(f"empty subdomains: {empty.tolist()}")

    def __eq__(self, other):
        if not isinstance(other, Partition):
            return NotImplemented
        return self.n_subdomains == other.n_subdomains and np.array_equal(self.elem_to_sub, other.elem_to_sub)

    __hash__ = None

    def elements_of(self, sub: int) -> np.ndarray:
        return np.flatnonzero(self.elem_to_sub == sub)

    def node_sharing(self, mesh: Mesh) -> sp.csr_matrix:
        """Boolean node-by-subdomain membership (subdomains are closed sets)."""
        m, k = mesh.elements.shape
        rows = mesh.elements.ravel()
        cols = np.repeat(self.elem_to_sub, k)
        mat = sp.csr_matrix((np.ones(rows.size, dtype=bool), (rows, cols)), shape=(mesh.n_nodes, self.n_subdomains))
        mat.sum_duplicates()
        return mat


def save_partition(partition: Partition, path) -> None:
    Path(path).write_text("".join(f"{s}\n" for s in partition.elem_to_sub.tolist()))


def load_partition(path, mesh: Mesh, renumber: bool = True) -> Partition:
    """Read a METIS ``epart``-style file: line ``i`` holds the subdomain of element ``i``.

    Gaps in the id range (empty subdomains) are compacted with a warning when
    ``renumber`` is true and rejected otherwise.
    """
    ids = []
    for lineno, line in enumerate(Path(path).read_text().splitlines(), start=1):
        token = line.strip()
        if not token:
            continue
        try:
            ids.append(int(token))
        except ValueError:
            raise PartitionFormatError(f"{path}:{lineno}: expected an integer, got {token!r}") from None
    if len(ids) != mesh.n_elements:
        raise PartitionFormatError(f"{path}: {len(ids)} entries for {mesh.n_elements} elements")
    e2s = np.asarray(ids, dtype=np.int64)
    if e2s.size and e2s.min() < 0:
        raise PartitionFormatError(f"{path}: negative subdomain id {int(e2s.min())}")
    if e2s.size == 0:
        raise PartitionFormatError(f"{path}: no elements")
    used = np.unique(e2s)
    n = int(e2s.max()) + 1
    if used.size != n:
        missing = sorted(set(range(n)) - set(used.tolist()))
        if not renumber:
            raise PartitionFormatError(f"{path}: subdomain ids {missing} are unused")
        warnings.warn(f"{path}: subdomain ids {missing} are unused; renumbering {n} -> {used.size}")
        e2s = np.searchsorted(used, e2s)
        n = used.size
    return Partition(e2s, n)


def partition_geometric(mesh: Mesh, n: int) -> Partition:
    """Recursive coordinate bisection of element centroids into ``n`` parts.

    Each cut goes across the longest centroid extent; equal coordinates are
    ordered by element index so the result is deterministic.
    """
    if not 1 <= n <= mesh.n_elements:
        raise ValueError(f"need 1 <= n <= {mesh.n_elements}, got {n}")
    centroids = mesh.centroids()
    e2s = np.empty(mesh.n_elements, dtype=np.int64)

    def bisect(idx, parts, offset):
        if parts == 1:
            e2s[idx] = offset
            return
        c = centroids[idx]
        axis = int(np.argmax(c.max(axis=0) - c.min(axis=0)))
        order = np.lexsort((idx, c[:, axis]))
        n_left = parts // 2
        k = idx.size * n_left // parts
        bisect(idx[order[:k]], n_left, offset)
        bisect(idx[order[k:]], parts - n_left, offset + n_left)

    bisect(np.arange(mesh.n_elements), n, 0)
    return Partition(e2s, n)


def subdomain_components(partition: Partition, mesh: Mesh) -> list[list[np.ndarray]]:
    """Element groups of each subdomain that are connected through shared nodes."""
    out = []
    for s in range(partition.n_subdomains):
        elems = partition.elements_of(s)
        inc = mesh.incidence[elems]
        ncomp, labels = connected_components(inc @ inc.T, directed=False)
        out.append(_groups(elems, labels, ncomp))
    return out


def _groups(items: np.ndarray, labels: np.ndarray, ncomp: int) -> list[np.ndarray]:
    # items sorted ascending, so ordering groups by first occurrence orders them by smallest member
    _, first = np.unique(labels, return_index=True)
    order = np.argsort(first, kind="stable")
    return [items[labels == lab] for lab in order[:ncomp]]


@dataclass(frozen=True, eq=False)
class NodeGraph:
    """Nodes of a subset, adjacent when they appear together in some element.

    ``adjacency`` is indexed by position in ``nodes`` (sorted global ids).
    """

    nodes: np.ndarray
    adjacency: sp.csr_matrix

    def neighbors(self, node: int) -> set[int]:
        i = int(np.searchsorted(self.nodes, node))
        if i >= self.nodes.size or self.nodes[i] != node:
            raise KeyError(node)
        row = self.adjacency.indices[self.adjacency.indptr[i] : self.adjacency.indptr[i + 1]]
        return set(self.nodes[row].tolist())

    def as_dict(self) -> dict[int, set[int]]:
        return {int(n): self.neighbors(int(n)) for n in self.nodes}

    def components(self) -> list[np.ndarray]:
        if self.nodes.size == 0:
            return []
        ncomp, labels = connected_components(self.adjacency, directed=False)
        return _groups(self.nodes, labels, ncomp)


def node_graph(mesh: Mesh, node_subset) -> NodeGraph:
    if isinstance(node_subset, (set, frozenset)):
        node_subset = list(node_subset)
    nodes = np.unique(np.asarray(node_subset, dtype=np.int64))
    if nodes.size == 0:
        return NodeGraph(nodes, sp.csr_matrix((0, 0), dtype=np.int64))
    if nodes[0] < 0 or nodes[-1] >= mesh.n_nodes:
        raise ValueError("node subset contains invalid node indices")
    sub = mesh.incidence[:, nodes]
    touching = np.flatnonzero(np.diff(sub.tocsr().indptr))
    sub = sub[touching]
    adj = (sub.T @ sub).tocsr()
    adj.setdiag(0)
    adj.eliminate_zeros()
    adj.data[:] = 1
    return NodeGraph(nodes, adj)
