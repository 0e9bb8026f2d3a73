"""Selection of the basic set of corners.

Three strategies are provided:

``full``
    every vertex, plus up to three well-spread nodes chosen independently for
    each connected component of the node set shared by every pair of
    face-adjacent subdomains;
``minimal``
    the same face-based search, but pairs are visited in order and corners
    already present in a component are reused as the first ones;
``edge``
    every vertex plus the end points of every edge component, i.e. the two
    mutually most remote nodes of the component together with the vertices
    that bound it (a reconstruction of the older edge-based strategy).

"Arbitrary" starting nodes and all ties are resolved by the lowest node
index, which makes every selection deterministic.
"""

from __future__ import annotations

import logging
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import NamedTuple

import numpy as np

from .interface import VERTEX, InterfaceClassification, pair_shared_nodes, promote_to_corners
from .partition import node_graph

log = logging.getLogger(__name__)

ALGORITHMS = ("full", "minimal", "edge")
DIM_MODES = ("3d", "2d")

# relative tie window for distances and areas
_TIE = 1e-12
# triangle areas at or below this times (diameter estimate)^2 count as collinear
AREA_TOL = 1e-12


def _argmax_lowest(values: np.ndarray, nodes: np.ndarray) -> int:
    """Position of the maximum; near-ties go to the lowest node index."""
    vmax = values.max()
    near = np.flatnonzero(values >= vmax - _TIE * abs(vmax))
    return int(near[np.argmin(nodes[near])])


def farthest_node(seed: int, candidates, coords: np.ndarray) -> int:
    """Candidate at the largest Euclidean distance from ``seed``."""
    cand = np.asarray(candidates, dtype=np.int64)
    if cand.size == 0:
        raise ValueError("no candidates")
    d2 = ((coords[cand] - coords[seed]) ** 2).sum(axis=1)
    return int(cand[_argmax_lowest(d2, cand)])


def triangle_areas(p1: np.ndarray, p2: np.ndarray, pts: np.ndarray) -> np.ndarray:
    u = p2 - p1
    v = pts - p1
    if pts.shape[1] == 2:
        return 0.5 * np.abs(u[0] * v[:, 1] - u[1] * v[:, 0])
    return 0.5 * np.linalg.norm(np.cross(u, v), axis=1)


class ThirdCorner(NamedTuple):
    node: int
    area: float
    degenerate: bool


def max_area_third(c1: int, c2: int, candidates, coords: np.ndarray) -> ThirdCorner:
    """Candidate spanning the largest triangle with ``c1`` and ``c2``.

    ``degenerate`` is set when that area is at most ``AREA_TOL`` times the
    squared distance between ``c1`` and ``c2``.
    """
    cand = np.asarray(candidates, dtype=np.int64)
    if cand.size == 0:
        raise ValueError("no candidates")
    areas = triangle_areas(coords[c1], coords[c2], coords[cand])
    k = _argmax_lowest(areas, cand)
    scale = float(((coords[c1] - coords[c2]) ** 2).sum())
    area = float(areas[k])
    return ThirdCorner(int(cand[k]), area, area <= AREA_TOL * scale)


class FaceSelection(NamedTuple):
    corners: tuple[int, ...]
    degenerate: bool


def _face_search(nodes: np.ndarray, coords: np.ndarray, stop_after_two: bool, preset=()) -> FaceSelection:
    """Steps (a)-(d) of the face-based search, optionally entered with preset corners."""
    nodes = np.unique(np.asarray(nodes, dtype=np.int64))
    if nodes.size == 0:
        raise ValueError("empty component")
    preset = tuple(int(p) for p in preset)
    want = 2 if stop_after_two else 3
    if len(preset) >= want:
        return FaceSelection((), False)
    if nodes.size < want:
        new = tuple(n for n in nodes.tolist() if n not in preset)
        return FaceSelection(new, True)

    chosen = list(preset)
    if not chosen:
        start = int(nodes[0])
        chosen.append(farthest_node(start, nodes, coords))
    if len(chosen) == 1:
        chosen.append(farthest_node(chosen[0], nodes, coords))
        if chosen[1] == chosen[0]:
            return FaceSelection(tuple(chosen[len(preset) : 1]), True)
    if stop_after_two:
        return FaceSelection(tuple(chosen[len(preset) :]), False)
    third = max_area_third(chosen[0], chosen[1], nodes, coords)
    if third.degenerate:
        return FaceSelection(tuple(chosen[len(preset) :]), True)
    chosen.append(third.node)
    return FaceSelection(tuple(chosen[len(preset) :]), False)


def select_face_component_3d(component_nodes, coords: np.ndarray) -> FaceSelection:
    """Up to three corners: remote from the lowest node, remote from that, then the largest triangle."""
    return _face_search(component_nodes, coords, stop_after_two=False)


def select_face_component_2d(component_nodes, coords: np.ndarray) -> FaceSelection:
    """Two mutually remote corners (the search stopped before the triangle step)."""
    return _face_search(component_nodes, coords, stop_after_two=True)


@dataclass(frozen=True)
class SelectionReport:
    """Per-component outcome of a selection.

    ``selected`` maps a component key to every node that component picked;
    ``counts`` only credits the corners whose provenance points at the key,
    so ``sum(counts) == total`` minus vertex, random and manual corners.
    """

    selected: dict = field(default_factory=dict)
    counts: dict = field(default_factory=dict)
    degenerate: tuple = ()
    total: int = 0


@dataclass(frozen=True)
class CornerSet:
    corners: tuple[int, ...]
    provenance: dict[int, str]
    algorithm: str
    report: SelectionReport = field(default_factory=SelectionReport)

    def __post_init__(self):
        corners = tuple(sorted(int(c) for c in self.corners))
        if len(set(corners)) != len(corners):
            raise ValueError("duplicate corners")
        if set(self.provenance) != set(corners):
            raise ValueError("provenance must cover exactly the corners")
        object.__setattr__(self, "corners", corners)

    def __len__(self):
        return len(self.corners)

    def __repr__(self):
        return f"CornerSet({self.algorithm}, {len(self.corners)} corners)"

    def nodes(self) -> np.ndarray:
        return np.array(self.corners, dtype=np.int64)

    @classmethod
    def manual(cls, nodes) -> "CornerSet":
        nodes = sorted({int(n) for n in nodes})
        return cls(tuple(nodes), {n: "manual" for n in nodes}, "manual", SelectionReport(total=len(nodes)))


def _face_key_label(key) -> str:
    i, j, c = key
    return f"face({i},{j},{c})"


def _components(cls, nodes, detect):
    if not detect:
        return [nodes]
    return node_graph(cls.mesh, nodes).components()


def _bounding_vertices(cls, glob, comp, vertices) -> np.ndarray:
    """Vertices sharing an element with ``comp`` and contained in all subdomains of ``glob``."""
    if not vertices:
        return np.empty(0, dtype=np.int64)
    inc = cls.mesh.incidence
    touching = np.flatnonzero(np.asarray(inc[:, comp].sum(axis=1)).ravel())
    near = np.intersect1d(np.unique(cls.mesh.elements[touching]), vertices)
    need = set(glob.sharing_set)
    return np.array([v for v in near.tolist() if need <= set(cls.node_to_sharing[v])], dtype=np.int64)


def _select_pair(cls, pair, coords, dim_mode, detect):
    nodes = pair_shared_nodes(cls, *pair)
    out = {}
    for c, comp in enumerate(_components(cls, nodes, detect)):
        out[(pair[0], pair[1], c)] = _face_search(comp, coords, stop_after_two=dim_mode == "2d")
    return out


def _assemble(picks, vertex_nodes, algorithm, label) -> CornerSet:
    """Union of vertex corners and per-key picks with canonical provenance."""
    provenance = {int(v): "vertex" for v in vertex_nodes}
    counts = {}
    for key in sorted(picks):
        for n in picks[key].corners:
            if n not in provenance:
                provenance[n] = label(key)
                counts[key] = counts.get(key, 0) + 1
    degenerate = tuple(k for k in sorted(picks) if picks[k].degenerate)
    report = SelectionReport(
        selected={k: picks[k].corners for k in sorted(picks)},
        counts=counts,
        degenerate=degenerate,
        total=len(provenance),
    )
    return CornerSet(tuple(provenance), provenance, algorithm, report)


def select_corners(
    cls: InterfaceClassification,
    algorithm: str = "full",
    dim_mode: str = "3d",
    detect_components: bool = True,
    pair_order=None,
    workers: int = 1,
) -> CornerSet:
    """Select the basic set of corners on a classified interface.

    ``pair_order`` optionally overrides the order in which face-adjacent
    pairs are visited; it must list the same pairs.  ``workers > 1`` runs the
    per-pair searches of the full algorithm in a thread pool.  Neither
    changes the result of the full algorithm.  The minimal variant always
    visits pairs in ascending order.
    """
    if algorithm not in ALGORITHMS:
        raise ValueError(f"algorithm must be one of {ALGORITHMS}, got {algorithm!r}")
    if dim_mode not in DIM_MODES:
        raise ValueError(f"dim_mode must be one of {DIM_MODES}, got {dim_mode!r}")
    cls._require_globs()
    if cls.corners:
        raise ValueError("classification already has corners; select on a fresh classification")
    if cls.interface_nodes.size == 0:
        warnings.warn("empty interface: no corners selected")
        return CornerSet((), {}, algorithm)

    coords = cls.mesh.nodes
    vertices = [int(g.nodes[0]) for g in cls.globs if g.kind == VERTEX]
    pairs = cls.adjacent_pairs()

    if algorithm == "edge":
        picks = {}
        for gi, g in enumerate(cls.globs):
            if g.kind != "edge":
                continue
            for c, comp in enumerate(g.components):
                closure = np.union1d(comp, _bounding_vertices(cls, g, comp, vertices))
                sel = select_face_component_2d(closure, coords)
                new = tuple(n for n in sel.corners if n not in vertices)
                picks[(gi, c)] = FaceSelection(new, sel.degenerate)
        return _assemble(picks, vertices, algorithm, lambda k: f"edge({k[0]},{k[1]})")

    if algorithm == "full":
        order = pairs if pair_order is None else [tuple(sorted(p)) for p in pair_order]
        if sorted(order) != pairs:
            raise ValueError("pair_order must be a permutation of the face-adjacent pairs")
        if workers > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                results = list(pool.map(lambda p: _select_pair(cls, p, coords, dim_mode, detect_components), order))
        else:
            results = [_select_pair(cls, p, coords, dim_mode, detect_components) for p in order]
        picks = {k: v for r in results for k, v in r.items()}
        return _assemble(picks, vertices, algorithm, _face_key_label)

    # minimal: reuse corners found so far, pairs strictly in ascending order
    current = set(vertices)
    picks = {}
    for pair in pairs:
        for c, comp in enumerate(_components(cls, pair_shared_nodes(cls, *pair), detect_components)):
            preset = sorted(current.intersection(comp.tolist()))
            sel = _face_search(comp, coords, stop_after_two=dim_mode == "2d", preset=preset[:3])
            picks[(pair[0], pair[1], c)] = sel
            current.update(sel.corners)
    return _assemble(picks, vertices, algorithm, _face_key_label)


def augment_random(cs: CornerSet, cls: InterfaceClassification, k: int, seed: int) -> CornerSet:
    """Add ``k`` distinct random interface nodes (uniform, reproducible per seed)."""
    if k < 0:
        raise ValueError("k must be non-negative")
    pool = np.setdiff1d(cls.interface_nodes, cs.nodes())
    if k > pool.size:
        raise ValueError(f"cannot add {k} corners: only {pool.size} interface nodes are not corners")
    if k == 0:
        return cs
    rng = np.random.default_rng(seed)
    extra = rng.choice(pool, size=k, replace=False)
    provenance = dict(cs.provenance)
    provenance.update({int(n): f"random({seed})" for n in extra})
    report = replace(cs.report, total=len(provenance))
    return CornerSet(tuple(provenance), provenance, cs.algorithm, report)


def promote(cls: InterfaceClassification, cs: CornerSet) -> InterfaceClassification:
    return promote_to_corners(cls, cs.corners)
