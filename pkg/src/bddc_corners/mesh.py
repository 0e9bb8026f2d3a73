"""Mesh container and its JSON file format."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np
import scipy.sparse as sp

ELEMENT_ARITY = {"tri3": 3, "quad4": 4, "tet4": 4, "hex8": 8}
ELEMENT_DIM = {"tri3": 2, "quad4": 2, "tet4": 3, "hex8": 3}


class MeshFormatError(ValueError):
    """Raised when a mesh (or mesh file) violates the format or invariants."""


@dataclass(frozen=True, eq=False)
class Mesh:
    """Nodes, single-kind element connectivity and Dirichlet data.

    ``dirichlet`` holds ``(node, dof, value)`` triples.  ``dof`` indexes the
    displacement component, so it must be below ``dim``; scalar problems only
    use the entries with ``dof == 0``.
    """

    dim: int
    nodes: np.ndarray
    elements: np.ndarray
    elem_kind: str
    dirichlet: tuple[tuple[int, int, float], ...] = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "nodes", np.ascontiguousarray(self.nodes, dtype=float))
        object.__setattr__(self, "elements", np.ascontiguousarray(self.elements, dtype=np.int64))
        object.__setattr__(
            self,
            "dirichlet",
            tuple((int(n), int(d), float(v)) for n, d, v in self.dirichlet),
        )
        self.validate()

    @property
    def n_nodes(self) -> int:
        return self.nodes.shape[0]

    @property
    def n_elements(self) -> int:
        return self.elements.shape[0]

    @property
    def nodes_per_element(self) -> int:
        return ELEMENT_ARITY[self.elem_kind]

    @cached_property
    def incidence(self) -> sp.csr_matrix:
        """Element-by-node 0/1 incidence matrix."""
        m, k = self.elements.shape
        rows = np.repeat(np.arange(m), k)
        data = np.ones(m * k, dtype=np.int64)
        return sp.csr_matrix((data, (rows, self.elements.ravel())), shape=(m, self.n_nodes))

    def centroids(self) -> np.ndarray:
        return self.nodes[self.elements].mean(axis=1)

    def validate(self):
        if self.dim not in (2, 3):
            raise MeshFormatError(f"dim: expected 2 or 3, got {self.dim}")
        if self.elem_kind not in ELEMENT_ARITY:
            raise MeshFormatError(f"elem_kind: unknown element kind {self.elem_kind!r}")
        if ELEMENT_DIM[self.elem_kind] != self.dim:
            raise MeshFormatError(f"elem_kind: {self.elem_kind} is not a {self.dim}D element")
        if self.nodes.ndim != 2 or self.nodes.shape[1] != self.dim:
            raise MeshFormatError(f"nodes: expected shape (n, {self.dim}), got {self.nodes.shape}")
        arity = ELEMENT_ARITY[self.elem_kind]
        if self.elements.ndim != 2 or self.elements.shape[1] != arity:
            raise MeshFormatError(
                f"elements: {self.elem_kind} needs {arity} nodes per element, "
                f"got array of shape {self.elements.shape}"
            )
        if self.elements.size:
            bad = np.flatnonzero((self.elements < 0).any(axis=1) | (self.elements >= self.n_nodes).any(axis=1))
            if bad.size:
                e = int(bad[0])
                raise MeshFormatError(
                    f"elements[{e}]: node index out of range [0, {self.n_nodes}): {self.elements[e].tolist()}"
                )
            srt = np.sort(self.elements, axis=1)
            rep = np.flatnonzero((srt[:, 1:] == srt[:, :-1]).any(axis=1))
            if rep.size:
                e = int(rep[0])
                raise MeshFormatError(f"elements[{e}]: repeated node {self.elements[e].tolist()}")
        for k, (n, d, _) in enumerate(self.dirichlet):
            if not 0 <= n < self.n_nodes:
                raise MeshFormatError(f"dirichlet[{k}]: node {n} out of range")
            if not 0 <= d < self.dim:
                raise MeshFormatError(f"dirichlet[{k}]: dof {d} out of range [0, {self.dim})")

    def __eq__(self, other):
        if not isinstance(other, Mesh):
            return NotImplemented
        return (
            self.dim == other.dim
            and self.elem_kind == other.elem_kind
            and np.array_equal(self.nodes, other.nodes)
            and np.array_equal(self.elements, other.elements)
            and self.dirichlet == other.dirichlet
        )

    __hash__ = None

    def to_dict(self) -> dict:
        return {
            "dim": self.dim,
            "elem_kind": self.elem_kind,
            "nodes": self.nodes.tolist(),
            "elements": self.elements.tolist(),
            "dirichlet": [list(t) for t in self.dirichlet],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Mesh":
        for key in ("dim", "elem_kind", "nodes", "elements"):
            if key not in data:
                raise MeshFormatError(f"missing field {key!r}")
        dim = data["dim"]
        if not isinstance(dim, int):
            raise MeshFormatError(f"dim: expected integer, got {dim!r}")
        nodes = data["nodes"]
        for i, xyz in enumerate(nodes):
            if not isinstance(xyz, list) or len(xyz) != dim:
                raise MeshFormatError(f"nodes[{i}]: expected {dim} coordinates, got {xyz!r}")
        kind = data["elem_kind"]
        arity = ELEMENT_ARITY.get(kind)
        if arity is None:
            raise MeshFormatError(f"elem_kind: unknown element kind {kind!r}")
        elements = data["elements"]
        for i, conn in enumerate(elements):
            if not isinstance(conn, list) or len(conn) != arity:
                raise MeshFormatError(f"elements[{i}]: {kind} needs {arity} node indices, got {conn!r}")
            if not all(isinstance(n, int) for n in conn):
                raise MeshFormatError(f"elements[{i}]: node indices must be integers, got {conn!r}")
        dirichlet = data.get("dirichlet", [])
        for i, entry in enumerate(dirichlet):
            if not isinstance(entry, list) or len(entry) != 3:
                raise MeshFormatError(f"dirichlet[{i}]: expected [node, dof, value], got {entry!r}")
        return cls(
            dim=dim,
            nodes=np.array(nodes, dtype=float).reshape(-1, dim),
            elements=np.array(elements, dtype=np.int64).reshape(-1, arity),
            elem_kind=kind,
            dirichlet=tuple(tuple(e) for e in dirichlet),
        )


@dataclass(frozen=True)
class StructuredSpec:
    """Box of ``subdomains_per_axis`` blocks, each ``cells_per_subdomain`` cells.

    Integers are broadcast to every axis.  The cell size is 1, so the ratio
    of subdomain size to element size is ``cells_per_subdomain``.
    """

    cells_per_subdomain: int | tuple[int, ...]
    subdomains_per_axis: int | tuple[int, ...]
    dim: int = 3

    def __post_init__(self):
        if self.dim not in (2, 3):
            raise ValueError(f"dim must be 2 or 3, got {self.dim}")
        for name in ("cells_per_subdomain", "subdomains_per_axis"):
            value = getattr(self, name)
            if isinstance(value, int):
                value = (value,) * self.dim
            value = tuple(int(v) for v in value)
            if len(value) != self.dim:
                raise ValueError(f"{name} must have {self.dim} entries, got {value}")
            if min(value) < 1:
                raise ValueError(f"{name} entries must be >= 1, got {value}")
            object.__setattr__(self, name, value)

    @property
    def cells(self) -> tuple[int, ...]:
        return tuple(c * s for c, s in zip(self.cells_per_subdomain, self.subdomains_per_axis))


def save_mesh(mesh: Mesh, path) -> None:
    Path(path).write_text(json.dumps(mesh.to_dict()))


def load_mesh(path) -> Mesh:
    text = Path(path).read_text()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MeshFormatError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    if not isinstance(data, dict):
        raise MeshFormatError(f"{path}: top-level JSON value must be an object")
    try:
        return Mesh.from_dict(data)
    except MeshFormatError as exc:
        raise MeshFormatError(f"{path}: {exc}") from exc
