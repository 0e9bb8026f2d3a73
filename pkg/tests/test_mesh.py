import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from bddc_corners.fixtures import generate_structured
from bddc_corners.mesh import Mesh, MeshFormatError, StructuredSpec, load_mesh, save_mesh


def unit_square():
    return Mesh(2, [[0, 0], [1, 0], [1, 1], [0, 1]], [[0, 1, 2, 3]], "quad4", [(0, 0, 0.0), (0, 1, 0.0)])


def test_basic_properties():
    m = unit_square()
    assert (m.n_nodes, m.n_elements, m.nodes_per_element) == (4, 1, 4)
    assert m.incidence.toarray().tolist() == [[1, 1, 1, 1]]
    assert np.allclose(m.centroids(), [[0.5, 0.5]])


@pytest.mark.parametrize(
    "kwargs, message",
    [
        (dict(dim=4), "dim"),
        (dict(elem_kind="hex8"), "not a 2D element"),
        (dict(elem_kind="prism6"), "unknown element kind"),
        (dict(elements=[[0, 1, 2, 7]]), "out of range"),
        (dict(elements=[[0, 1, 1, 3]]), "repeated node"),
        (dict(elements=[[0, 1, 2]]), "needs 4 nodes"),
        (dict(dirichlet=[(9, 0, 0.0)]), "dirichlet\\[0\\]: node"),
        (dict(dirichlet=[(0, 2, 0.0)]), "dof 2 out of range"),
        (dict(nodes=[[0, 0, 0]] * 4), "nodes"),
    ],
)
def test_validation(kwargs, message):
    base = dict(dim=2, nodes=[[0, 0], [1, 0], [1, 1], [0, 1]], elements=[[0, 1, 2, 3]], elem_kind="quad4")
    base.update(kwargs)
    with pytest.raises(MeshFormatError, match=message):
        Mesh(**base)


def test_roundtrip_structured(tmp_path):
    mesh, _ = generate_structured(StructuredSpec(2, (2, 1, 1)))
    save_mesh(mesh, tmp_path / "m.json")
    back = load_mesh(tmp_path / "m.json")
    assert back == mesh
    assert back.dirichlet == mesh.dirichlet


def test_roundtrip_preserves_values(tmp_path):
    m = Mesh(2, [[0.1, 0.2], [1.3, 0], [1, 1], [0, 1.7]], [[0, 1, 2, 3]], "quad4", [(3, 1, -2.5)])
    save_mesh(m, tmp_path / "m.json")
    assert load_mesh(tmp_path / "m.json") == m


def _write(tmp_path, obj):
    p = tmp_path / "bad.json"
    p.write_text(obj if isinstance(obj, str) else json.dumps(obj))
    return p


def test_load_reports_out_of_range(tmp_path):
    data = unit_square().to_dict()
    data["elements"] = [[0, 1, 2, 4]]
    with pytest.raises(MeshFormatError, match=r"elements\[0\].*out of range"):
        load_mesh(_write(tmp_path, data))


def test_load_reports_arity(tmp_path):
    data = unit_square().to_dict()
    data["elements"] = [[0, 1, 2]]
    with pytest.raises(MeshFormatError, match=r"elements\[0\]: quad4 needs 4"):
        load_mesh(_write(tmp_path, data))


def test_load_reports_json_position(tmp_path):
    with pytest.raises(MeshFormatError, match="line 2, column"):
        load_mesh(_write(tmp_path, '{"dim": 2,\n "nodes": [1 2]}'))


@pytest.mark.parametrize("drop", ["dim", "nodes", "elements", "elem_kind"])
def test_load_missing_field(tmp_path, drop):
    data = unit_square().to_dict()
    del data[drop]
    with pytest.raises(MeshFormatError, match=drop):
        load_mesh(_write(tmp_path, data))


def test_load_bad_coordinates(tmp_path):
    data = unit_square().to_dict()
    data["nodes"][2] = [1.0]
    with pytest.raises(MeshFormatError, match=r"nodes\[2\]"):
        load_mesh(_write(tmp_path, data))


def test_structured_spec_broadcast_and_checks():
    s = StructuredSpec(3, 2)
    assert s.cells_per_subdomain == (3, 3, 3) and s.cells == (6, 6, 6)
    with pytest.raises(ValueError):
        StructuredSpec(0, 2)
    with pytest.raises(ValueError):
        StructuredSpec((1, 2), 2, dim=3)


@given(
    dim=st.sampled_from([2, 3]),
    cps=st.lists(st.integers(1, 3), min_size=3, max_size=3),
    spa=st.lists(st.integers(1, 3), min_size=3, max_size=3),
)
def test_structured_counts(dim, cps, spa):
    spec = StructuredSpec(tuple(cps[:dim]), tuple(spa[:dim]), dim)
    mesh, part = generate_structured(spec)
    assert mesh.n_nodes == np.prod([c * s + 1 for c, s in zip(spec.cells_per_subdomain, spec.subdomains_per_axis)])
    assert part.n_subdomains == np.prod(spec.subdomains_per_axis)
    assert np.all(np.bincount(part.elem_to_sub) == np.prod(spec.cells_per_subdomain))
    # one face clamped, all components
    assert len(mesh.dirichlet) % dim == 0 and mesh.dirichlet
