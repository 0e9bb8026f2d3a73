import csv
import io
import math

import pytest

from bddc_corners.corners import augment_random, select_corners
from bddc_corners.fixtures import generate_structured
from bddc_corners.mesh import StructuredSpec
from bddc_corners.pipeline import COLUMNS, prepare, solve_with
from bddc_corners.sweep import SweepConfig, compare_same_count, run_sweep, trend_slope, write_rows


@pytest.fixture(scope="module")
def lap():
    mesh, part = generate_structured(StructuredSpec(2, (2, 2, 1)))
    return prepare(mesh, part, "laplace")


@pytest.fixture(scope="module")
def floating():
    mesh, part = generate_structured(StructuredSpec(2, (1, 1, 2)))
    return prepare(mesh, part)


class TestConfig:
    def test_exactly_one_target_kind(self):
        with pytest.raises(ValueError):
            SweepConfig()
        with pytest.raises(ValueError):
            SweepConfig(counts=(3,), factors=(1.0,))

    def test_rejects_bad_values(self):
        for kw in ({"repetitions": 0}, {"algorithms": ("nope",)}, {"algorithms": ()}, {"factors": (0.5,)}):
            kw.setdefault("factors", (1.0,))
            with pytest.raises(ValueError):
                SweepConfig(**kw)

    def test_range_inclusive(self):
        assert SweepConfig.from_range(4, 10, 3).counts == (4, 7, 10)
        with pytest.raises(ValueError):
            SweepConfig.from_range(4, 10, 0)

    def test_mode_alias(self):
        assert SweepConfig(counts=(1,), mode="cef").mode == "C+E+F"

    def test_factor_targets(self):
        assert SweepConfig(factors=(1, 1.5, 2)).targets(10) == [10, 15, 20]


def test_single_point_matches_solve_with(lap):
    basic = select_corners(lap.cls, "full")
    n = len(basic) + 3
    [row] = run_sweep(lap, SweepConfig(counts=(n,), seed=5))
    ref = solve_with(lap, augment_random(basic, lap.cls, 3, 5), "C").row
    for k in ("n_corners", "n_coarse_dofs", "iterations", "converged", "cause"):
        assert row[k] == ref[k]
    assert row["kappa_est"] == pytest.approx(ref["kappa_est"])


def test_all_interface_corners_one_iteration(lap):
    n = lap.cls.interface_nodes.size
    rows = run_sweep(lap, SweepConfig(counts=(n,)))
    assert rows[0]["iterations"] == 1


def test_counts_out_of_range(lap):
    basic = len(select_corners(lap.cls, "full"))
    with pytest.raises(ValueError, match="below"):
        run_sweep(lap, SweepConfig(counts=(basic - 1,)))
    with pytest.raises(ValueError, match="exceeds"):
        run_sweep(lap, SweepConfig(counts=(lap.cls.interface_nodes.size + 1,)))


def test_repeatable_and_worker_independent(lap):
    cfg = dict(factors=(1, 1.5, 2), algorithms=("full", "minimal"), repetitions=3, seed=2)
    a = run_sweep(lap, SweepConfig(**cfg))
    b = run_sweep(lap, SweepConfig(workers=4, **cfg))
    ints = ("algorithm", "n_corners", "n_coarse_dofs", "iterations", "converged", "cause")
    assert [[r[k] for k in ints] for r in a] == [[r[k] for k in ints] for r in b]
    assert [(r["algorithm"], r["n_corners"]) for r in a] == sorted((r["algorithm"], r["n_corners"]) for r in a)


def test_singular_rows_carry_cause(floating):
    rows = run_sweep(floating, SweepConfig(factors=(1,), algorithms=("edge",)))
    assert rows[0]["iterations"] == -1 and math.isnan(rows[0]["kappa_est"])
    assert "coarse" in rows[0]["cause"] or "singular" in rows[0]["cause"]


def test_compare_same_count(lap):
    target = max(len(select_corners(lap.cls, a)) for a in ("full", "minimal", "edge")) + 2
    rows = compare_same_count(lap, ("full", "minimal", "edge"), target)
    assert {r["n_corners"] for r in rows} == {target}
    assert [r["algorithm"] for r in rows] == ["edge", "full", "minimal"]
    with pytest.raises(ValueError, match="larger than target"):
        compare_same_count(lap, ("full",), 1)


def test_trend_slope():
    rows = [{"n_corners": n, "iterations": i} for n, i in ((10, 30), (20, 20), (30, 10), (40, -1))]
    assert trend_slope(rows) == pytest.approx(-1.0)
    assert trend_slope(rows[:1]) == 0.0


def test_sweep_slope_nonpositive(cube333):
    rows = run_sweep(cube333, SweepConfig(factors=(1, 2)))
    assert trend_slope(rows) <= 0


def test_write_rows(tmp_path, capsys, lap):
    rows = run_sweep(lap, SweepConfig(factors=(1,)))
    write_rows(rows)
    out = capsys.readouterr().out
    path = tmp_path / "r.csv"
    write_rows(rows, path)
    assert path.read_text() == out
    parsed = list(csv.DictReader(io.StringIO(out)))
    assert tuple(parsed[0]) == COLUMNS and int(parsed[0]["n_corners"]) == rows[0]["n_corners"]
