"""Coarse degrees of freedom: corner values and glob averages."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..corners import CornerSet
from ..interface import EDGE, FACE, VERTEX, InterfaceClassification, promote_to_corners

MODES = ("C", "C+E", "C+F", "C+E+F")
# short CLI spellings
MODE_ALIASES = {"c": "C", "ce": "C+E", "cf": "C+F", "cef": "C+E+F"}


def normalize_mode(mode: str) -> str:
    m = MODE_ALIASES.get(mode.lower(), mode.upper()) if isinstance(mode, str) else mode
    if m not in MODES:
        raise ValueError(f"constraint mode must be one of {MODES} or {sorted(MODE_ALIASES)}, got {mode!r}")
    return m


@dataclass(frozen=True, eq=False)
class AverageRow:
    """Arithmetic mean of one displacement component over a glob."""

    glob: int
    kind: str
    sharing_set: tuple[int, ...]
    component: int
    dofs: np.ndarray
    weights: np.ndarray


@dataclass(frozen=True, eq=False)
class ConstraintSet:
    """Coarse dofs in a fixed order: corner dofs first, then average rows."""

    mode: str
    corner_nodes: np.ndarray
    corner_dofs: np.ndarray
    averages: tuple[AverageRow, ...]

    @property
    def n_coarse_dofs(self) -> int:
        return self.corner_dofs.size + len(self.averages)

    def counts(self) -> dict[str, int]:
        kinds = [a.kind for a in self.averages]
        return {
            "corner_dofs": int(self.corner_dofs.size),
            "edge_averages": kinds.count(EDGE) + kinds.count(VERTEX),
            "face_averages": kinds.count(FACE),
        }


def build_constraints(cls: InterfaceClassification, cs: CornerSet, mode: str, dofs_per_node: int, free_mask=None) -> ConstraintSet:
    """Corner dof fixings plus, for E/F modes, one average row per glob and component.

    Averages run over the glob nodes left after the corners have been taken
    out; Dirichlet dofs (``free_mask`` false) never carry a constraint.
    Single-node vertex globs that are not corners are treated as edges.
    """
    mode = normalize_mode(mode)
    if set(cs.corners) != set(cls.corners):
        if set(cls.corners) - set(cs.corners):
            raise ValueError("classification has corners missing from the corner set")
        cls = promote_to_corners(cls, cs.corners)
    dpn = dofs_per_node
    nodes = cs.nodes()
    cdofs = (nodes[:, None] * dpn + np.arange(dpn)).ravel()
    if free_mask is not None:
        cdofs = cdofs[free_mask[cdofs]]

    kinds = set()
    if "E" in mode:
        kinds |= {EDGE, VERTEX}
    if "F" in mode:
        kinds.add(FACE)
    rows = []
    for gi, g in enumerate(cls.globs):
        if g.kind not in kinds:
            continue
        for comp in range(dpn):
            dofs = g.nodes * dpn + comp
            if free_mask is not None:
                dofs = dofs[free_mask[dofs]]
            if dofs.size == 0:
                continue
            rows.append(AverageRow(gi, g.kind, g.sharing_set, comp, dofs, np.full(dofs.size, 1.0 / dofs.size)))
    return ConstraintSet(mode, nodes, cdofs, tuple(rows))
