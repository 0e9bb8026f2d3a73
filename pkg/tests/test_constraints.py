import numpy as np
import pytest

from bddc_corners.bddc import build_constraints, normalize_mode
from bddc_corners.corners import CornerSet, select_corners
from bddc_corners.fixtures import generate_structured
from bddc_corners.interface import EDGE, FACE, classify_mesh
from bddc_corners.mesh import StructuredSpec


@pytest.fixture(scope="module")
def cls222():
    mesh, part = generate_structured(StructuredSpec(3, (2, 2, 2)))
    return classify_mesh(mesh, part)


def test_mode_aliases():
    assert [normalize_mode(m) for m in ("c", "ce", "cf", "cef", "C+E+F")] == ["C", "C+E", "C+F", "C+E+F", "C+E+F"]
    with pytest.raises(ValueError):
        normalize_mode("e")


def test_corner_only_count(cls222):
    cs = select_corners(cls222, "full")
    cons = build_constraints(cls222, cs, "C", 3)
    assert cons.n_coarse_dofs == 3 * len(cs)
    assert cons.averages == ()


def test_cef_count_matches_glob_counts(cls222):
    cs = select_corners(cls222, "full")
    cons = build_constraints(cls222, cs, "C+E+F", 3)
    assert cons.n_coarse_dofs == 3 * len(cs) + 3 * 6 + 3 * 12
    assert cons.counts() == {"corner_dofs": 3 * len(cs), "edge_averages": 18, "face_averages": 36}
    assert build_constraints(cls222, cs, "C+E", 3).n_coarse_dofs == 3 * len(cs) + 18
    assert build_constraints(cls222, cs, "C+F", 3).n_coarse_dofs == 3 * len(cs) + 36


def test_average_rows_unit_sum_and_exclude_corners(cls222):
    cs = select_corners(cls222, "full")
    cons = build_constraints(cls222, cs, "C+E+F", 3)
    corner_dofs = set(cons.corner_dofs.tolist())
    for row in cons.averages:
        assert row.weights.sum() == pytest.approx(1.0)
        assert np.allclose(row.weights, 1.0 / row.dofs.size)
        assert np.all(row.dofs % 3 == row.component)
        assert not corner_dofs & set(row.dofs.tolist())
        assert row.kind in (EDGE, FACE)


def test_dirichlet_dofs_dropped(cls222):
    mesh = cls222.mesh
    free = np.ones(mesh.n_nodes * 3, dtype=bool)
    for n, d, _ in mesh.dirichlet:
        free[n * 3 + d] = False
    cs = CornerSet.manual(cls222.interface_nodes[:20])
    cons = build_constraints(cls222, cs, "C+E+F", 3, free)
    assert free[cons.corner_dofs].all()
    assert all(free[r.dofs].all() for r in cons.averages)
    assert cons.corner_dofs.size < 60


def test_rejects_foreign_corners(cls222):
    from bddc_corners.interface import promote_to_corners

    cs = select_corners(cls222, "full")
    promoted = promote_to_corners(cls222, cs.corners)
    smaller = CornerSet.manual(cs.corners[:-1])
    with pytest.raises(ValueError, match="missing"):
        build_constraints(promoted, smaller, "C", 3)
