"""Iterations and timings as functions of the number of corners."""

from __future__ import annotations

import csv
import statistics
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .bddc import normalize_mode
from .corners import ALGORITHMS, augment_random, select_corners
from .pipeline import COLUMNS, Problem, solve_with


@dataclass(frozen=True)
class SweepConfig:
    """Targets are absolute ``counts`` or ``factors`` of each basic-set size, not both."""

    counts: tuple[int, ...] = ()
    factors: tuple[float, ...] = ()
    algorithms: tuple[str, ...] = ("full",)
    mode: str = "C"
    seed: int = 0
    repetitions: int = 1
    dim_mode: str = "3d"
    tol: float = 1e-8
    maxit: int = 5000
    workers: int = 1

    def __post_init__(self):
        if bool(self.counts) == bool(self.factors):
            raise ValueError("give exactly one of counts or factors")
        if self.repetitions < 1:
            raise ValueError("repetitions must be >= 1")
        bad = [a for a in self.algorithms if a not in ALGORITHMS]
        if bad or not self.algorithms:
            raise ValueError(f"unknown algorithms {bad}; expected some of {ALGORITHMS}")
        if any(f < 1 for f in self.factors):
            raise ValueError("factors must be >= 1")
        object.__setattr__(self, "mode", normalize_mode(self.mode))

    @classmethod
    def from_range(cls, start: int, stop: int, step: int, **kw) -> "SweepConfig":
        """Counts ``start, start+step, ...`` up to and including ``stop``."""
        if step <= 0:
            raise ValueError("step must be positive")
        return cls(counts=tuple(range(start, stop + 1, step)), **kw)

    def targets(self, basic_size: int) -> list[int]:
        if self.counts:
            return sorted(set(self.counts))
        return sorted({int(round(f * basic_size)) for f in self.factors})


def _aggregate(algorithm: str, rows: list[dict]) -> dict:
    ok = [r for r in rows if not r["cause"]]
    out = {"algorithm": algorithm, "n_corners": rows[0]["n_corners"]}
    out["n_coarse_dofs"] = statistics.median_low(r["n_coarse_dofs"] for r in rows)
    if ok:
        out["iterations"] = statistics.median_low(r["iterations"] for r in ok)
        out["kappa_est"] = float(np.median([r["kappa_est"] for r in ok]))
        for t in ("t_setup", "t_coarse", "t_pcg"):
            out[t] = float(np.median([r[t] for r in ok]))
    else:
        out.update(iterations=-1, kappa_est=float("nan"), t_setup=0.0, t_coarse=0.0, t_pcg=0.0)
    out["converged"] = all(r["converged"] for r in rows)
    out["cause"] = next((r["cause"] for r in rows if r["cause"]), "")
    return out


def _point(problem, basic, target, cfg):
    reps = []
    for r in range(cfg.repetitions):
        cs = augment_random(basic, problem.cls, target - len(basic), cfg.seed + r)
        reps.append(solve_with(problem, cs, cfg.mode, cfg.tol, cfg.maxit).row)
    return _aggregate(basic.algorithm, reps)


def run_sweep(problem: Problem, cfg: SweepConfig) -> list[dict]:
    """One aggregated row per algorithm and target count, sorted by (algorithm, n_corners).

    Repetition ``r`` draws its random corners with seed ``cfg.seed + r``;
    iterations are the median over repetitions that did not fail.
    """
    jobs = []
    for alg in cfg.algorithms:
        basic = select_corners(problem.cls, alg, cfg.dim_mode)
        n_iface = problem.cls.interface_nodes.size
        for target in cfg.targets(len(basic)):
            if target < len(basic):
                raise ValueError(f"count {target} is below the {alg} basic-set size {len(basic)}")
            if target > n_iface:
                raise ValueError(f"count {target} exceeds the {n_iface} interface nodes")
            jobs.append((basic, target))
    if cfg.workers > 1:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            rows = list(pool.map(lambda j: _point(problem, j[0], j[1], cfg), jobs))
    else:
        rows = [_point(problem, b, t, cfg) for b, t in jobs]
    return sorted(rows, key=lambda r: (r["algorithm"], r["n_corners"]))


def compare_same_count(problem: Problem, algorithms, target_count: int, seed: int = 0, mode: str = "C+E+F", dim_mode="3d", tol=1e-8, maxit=5000) -> list[dict]:
    """Complete every basic set to ``target_count`` corners with random nodes and solve once each."""
    basics = {a: select_corners(problem.cls, a, dim_mode) for a in algorithms}
    too_big = {a: len(b) for a, b in basics.items() if len(b) > target_count}
    if too_big:
        raise ValueError(f"basic sets larger than target {target_count}: {too_big}")
    rows = []
    for a, basic in basics.items():
        cs = augment_random(basic, problem.cls, target_count - len(basic), seed)
        rows.append(solve_with(problem, cs, mode, tol, maxit).row)
    return sorted(rows, key=lambda r: (r["algorithm"], r["n_corners"]))


def trend_slope(rows: list[dict]) -> float:
    """Least-squares slope of iterations against corner count over successful rows."""
    ok = [r for r in rows if r["iterations"] >= 0]
    if len(ok) < 2:
        return 0.0
    x = np.array([r["n_corners"] for r in ok], dtype=float)
    y = np.array([r["iterations"] for r in ok], dtype=float)
    return float(np.polyfit(x, y, 1)[0])


def write_rows(rows: list[dict], path=None) -> None:
    """CSV with the columns of :data:`COLUMNS`; ``path=None`` writes to stdout."""
    fh = Path(path).open("w", newline="") if path else sys.stdout
    try:
        w = csv.DictWriter(fh, fieldnames=COLUMNS, lineterminator="\n")
        w.writeheader()
        for r in rows:
            w.writerow({k: r[k] for k in COLUMNS})
    finally:
        if path:
            fh.close()
