import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from oracles import dense_operator, svd_rank_deficiency

from bddc_corners.bddc import (
    apply_preconditioner,
    build_constraints,
    build_preconditioner,
    check_invertibility,
    solve_interface,
)
from bddc_corners.corners import CornerSet, augment_random, select_corners
from bddc_corners.errors import CoarseMechanism, SingularConfigurationError, SingularLocalProblem
from bddc_corners.fixtures import generate_serial_strip, generate_structured, generate_wedged_beam, hinge_corners
from bddc_corners.mesh import StructuredSpec
from bddc_corners.pipeline import prepare

MODES = ["C", "C+E", "C+F", "C+E+F"]


def constraints(problem, cs, mode="C"):
    return build_constraints(problem.cls, cs, mode, problem.system.dofs_per_node, problem.system.free_mask)


@pytest.fixture(scope="module")
def cube221():
    mesh, part = generate_structured(StructuredSpec(2, (2, 2, 1)))
    return prepare(mesh, part)


@pytest.mark.parametrize("mode", MODES)
def test_symmetric_positive_and_lower_bound(cube221, mode):
    p = cube221
    op = build_preconditioner(p.schur, constraints(p, select_corners(p.cls, "full"), mode))
    M = dense_operator(op.apply, p.schur.n_interface)
    assert np.abs(M - M.T).max() <= 1e-10 * np.abs(M).max()
    rng = np.random.default_rng(0)
    for _ in range(5):
        r1, r2 = rng.standard_normal((2, p.schur.n_interface))
        assert abs(r2 @ op.apply(r1) - r1 @ op.apply(r2)) <= 1e-10 * np.linalg.norm(r1) * np.linalg.norm(r2)
        assert r1 @ apply_preconditioner(op, r1) > 0
    ev = np.sort(np.linalg.eigvals(M @ p.schur.dense()).real)
    assert ev[0] >= 1 - 1e-8


def test_all_corners_gives_exact_inverse(cube221):
    p = cube221
    op = build_preconditioner(p.schur, constraints(p, CornerSet.manual(p.cls.interface_nodes)))
    S = p.schur.dense()
    M = dense_operator(op.apply, p.schur.n_interface)
    r = np.random.default_rng(3).standard_normal(p.schur.n_interface)
    assert np.linalg.norm(M @ r - np.linalg.solve(S, r)) <= 1e-10 * np.linalg.norm(np.linalg.solve(S, r))
    u, rep = solve_interface(p.schur, op)
    assert rep.iterations == 1 and rep.converged


def test_averaging_is_projection(cube221):
    p = cube221
    op = build_preconditioner(p.schur, constraints(p, select_corners(p.cls, "full")))
    u = np.random.default_rng(1).standard_normal(p.schur.n_interface)
    copies = [u[lp.sub.iface_index] for lp in op.locals]
    assert np.allclose(op.average(copies), u)
    once = op.average(op.restrict(u))
    assert np.allclose(op.average([once[lp.sub.iface_index] for lp in op.locals]), once)


def test_coarse_basis_reproduces_constraints(cube221):
    p = cube221
    cons = constraints(p, select_corners(p.cls, "full"), "C+E+F")
    op = build_preconditioner(p.schur, cons)
    for lp in op.locals:
        nc = lp.corner_pos.size
        assert np.allclose(lp.Phi[lp.corner_pos][:, :nc], np.eye(nc))
        assert np.allclose(lp.C @ lp.Phi[lp.rest_pos], np.hstack([np.zeros((lp.C.shape[0], nc)), np.eye(lp.C.shape[0])]))


def test_two_collinear_corners_leave_local_rotation():
    mesh, part = generate_structured(StructuredSpec(2, (1, 1, 2)))
    p = prepare(mesh, part)
    shared = p.cls.interface_nodes
    xy = mesh.nodes[shared, :2]
    two = shared[(xy[:, 1] == 1) & np.isin(xy[:, 0], [0, 2])]
    d = check_invertibility(p.schur, constraints(p, CornerSet.manual(two)))
    assert d.local_ok == (True, False) and d.local_deficiency[1] == 1
    with pytest.raises(SingularLocalProblem, match="subdomain 1"):
        build_preconditioner(p.schur, constraints(p, CornerSet.manual(two)))


def test_three_corners_two_subdomains_pass():
    mesh, part = generate_structured(StructuredSpec(2, (2, 1, 1)))
    p = prepare(mesh, part)
    d = check_invertibility(p.schur, constraints(p, select_corners(p.cls, "full")))
    assert d.ok and svd_rank_deficiency(d.coarse_matrix) == 0


@pytest.mark.parametrize("dim", [2, 3])
def test_serial_strip_hinges(dim):
    mesh, part = generate_serial_strip(dim=dim)
    p = prepare(mesh, part)
    cs = hinge_corners(mesh, part)
    assert len(cs) == (3 if dim == 2 else 6)
    d = check_invertibility(p.schur, constraints(p, cs))
    assert all(d.local_ok) and not d.coarse_ok
    assert d.coarse_deficiency == svd_rank_deficiency(d.coarse_matrix) >= 1
    with pytest.raises(CoarseMechanism, match="coarse mechanism"):
        build_preconditioner(p.schur, constraints(p, cs))
    full = select_corners(p.cls, "full", dim_mode="2d" if dim == 2 else "3d")
    d = check_invertibility(p.schur, constraints(p, full))
    assert d.ok and svd_rank_deficiency(d.coarse_matrix) == 0


def test_wedged_beam_diagnosis_and_solve():
    mesh, part = generate_wedged_beam()
    p = prepare(mesh, part)
    bad = select_corners(p.cls, "full", detect_components=False)
    with pytest.raises(CoarseMechanism):
        build_preconditioner(p.schur, constraints(p, bad))
    op = build_preconditioner(p.schur, constraints(p, select_corners(p.cls, "full")))
    u, rep = solve_interface(p.schur, op)
    assert rep.converged


def test_diagnosis_cause_strings():
    mesh, part = generate_structured(StructuredSpec(2, (1, 1, 2)))
    p = prepare(mesh, part)
    d = check_invertibility(p.schur, constraints(p, CornerSet.manual([])))
    assert "subdomain 1" in d.cause() and not d.ok
    assert issubclass(CoarseMechanism, SingularConfigurationError)


def test_averages_alone_can_fix_floating_subdomain():
    # face averages pin translations; rotations need more, so the local
    # problem stays singular with averages only, and corners fix it
    mesh, part = generate_structured(StructuredSpec(2, (1, 1, 2)))
    p = prepare(mesh, part)
    d = check_invertibility(p.schur, constraints(p, CornerSet.manual([]), "C+F"))
    assert not d.ok and d.local_deficiency[1] == 3
    lap = prepare(mesh, part, "laplace")
    d = check_invertibility(lap.schur, constraints(lap, CornerSet.manual([]), "C+F"))
    assert d.ok


@settings(max_examples=25)
@given(k=st.integers(1, 40), seed=st.integers(0, 2**31))
def test_adding_corners_keeps_nonsingular(cube221, k, seed):
    p = cube221
    base = select_corners(p.cls, "full")
    more = augment_random(base, p.cls, min(k, p.cls.interface_nodes.size - len(base)), seed)
    for mode in ("C", "C+E+F"):
        assert check_invertibility(p.schur, constraints(p, more, mode)).ok


@settings(max_examples=20)
@given(seed=st.integers(0, 2**31), k=st.integers(0, 9))
def test_more_corners_never_singular_on_strip(seed, k):
    mesh, part = generate_serial_strip(dim=2)
    p = prepare(mesh, part)
    base = select_corners(p.cls, "full", dim_mode="2d")
    assert p.cls.interface_nodes.size - len(base) == 9
    assert check_invertibility(p.schur, constraints(p, augment_random(base, p.cls, k, seed))).ok


def test_workers_do_not_change_result(cube221):
    p = cube221
    cons = constraints(p, select_corners(p.cls, "full"), "C+E+F")
    a = build_preconditioner(p.schur, cons)
    b = build_preconditioner(p.schur, cons, workers=4)
    r = np.random.default_rng(0).standard_normal(p.schur.n_interface)
    assert np.array_equal(a.apply(r), b.apply(r))
