"""Brute force, diagonal and zigzag traversal of the architecture grid."""

from __future__ import annotations

import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from .oracle import CachingOracle, EvalRecord, Oracle
from .search_space import GridPoint, SearchSpace

log = logging.getLogger(__name__)

ALGORITHMS = ("brute_force", "diagonal", "zigzag")


@dataclass
class SearchResult:
    algorithm: str
    best: EvalRecord
    visit_log: list[GridPoint]
    evaluations: int
    elapsed: float
    records: dict[GridPoint, EvalRecord] = field(default_factory=dict)
    # running best score after each visit
    best_trace: list[float] = field(default_factory=list)
    passes: int = 0
    converged: bool = True
    metric: str = "test"

    @property
    def termination(self) -> str:
        return "converged" if self.converged else "pass_cap"

    def as_dict(self, include_timing: bool = True) -> dict:
        best = self.best
        out = {
            "algorithm": self.algorithm,
            "metric": self.metric,
            "best_point": best.point.as_dict(),
            "best_architecture": list(best.architecture.hidden_sizes),
            "train_accuracy": best.train_accuracy,
            "test_accuracy": best.test_accuracy,
            "k_completeness": round(best.k_completeness, 4),
            "evaluations": self.evaluations,
            "visits": len(self.visit_log),
            "passes": self.passes,
            "termination": self.termination,
            "visit_log": [[p.ihls, p.df] for p in self.visit_log],
        }
        if include_timing:
            out["elapsed_seconds"] = self.elapsed
        return out


def _cached(oracle: Oracle) -> CachingOracle:
    return oracle if isinstance(oracle, CachingOracle) else CachingOracle(oracle)


def _evaluate_all(oracle: CachingOracle, cells: list[GridPoint], workers: int) -> list[EvalRecord]:
    if workers <= 1:
        return [oracle.evaluate(p) for p in cells]
    # map() keeps input order, so the argmax below still breaks ties by traversal order
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(oracle.evaluate, cells))


def _offline_search(algorithm, space, oracle, cells, metric, workers) -> SearchResult:
    if not cells:
        raise ValueError(f"{algorithm}: no cells to evaluate in a {space.n_ihls}x{space.n_df} grid")
    cache = _cached(oracle)
    before = cache.stats.invocations
    t0 = time.perf_counter()
    records = _evaluate_all(cache, cells, workers)
    best = None
    trace = []
    for rec in records:
        if best is None or rec.score(metric) > best.score(metric):
            best = rec
        trace.append(best.score(metric))
    return SearchResult(
        algorithm=algorithm,
        best=best,
        visit_log=list(cells),
        evaluations=cache.stats.invocations - before,
        elapsed=time.perf_counter() - t0,
        records={r.point: r for r in records},
        best_trace=trace,
        passes=1,
        metric=metric,
    )


def brute_force_search(space: SearchSpace, oracle: Oracle, metric: str = "test",
                       workers: int = 1) -> SearchResult:
    """Evaluate every cell, row-major over (df, ihls)."""
    return _offline_search("brute_force", space, oracle, list(space.cells()), metric, workers)


def diagonal_cells(space: SearchSpace) -> list[GridPoint]:
    """Cells whose row index (DF) plus column index (IHLS) is odd, row-major."""
    return [
        space.point(col, row)
        for row in range(space.n_df)
        for col in range(space.n_ihls)
        if (row + col) % 2 == 1
    ]


def diagonal_search(space: SearchSpace, oracle: Oracle, metric: str = "test",
                    workers: int = 1) -> SearchResult:
    return _offline_search("diagonal", space, oracle, diagonal_cells(space), metric, workers)


def _walk(space: SearchSpace, start: GridPoint, di: int, dj: int) -> list[GridPoint]:
    i, j = space.index(start)
    while 0 <= i - di < space.n_ihls and 0 <= j - dj < space.n_df:
        i, j = i - di, j - dj
    cells = []
    while 0 <= i < space.n_ihls and 0 <= j < space.n_df:
        cells.append(space.point(i, j))
        i, j = i + di, j + dj
    return cells


def primary_diagonal(space: SearchSpace, start: GridPoint) -> list[GridPoint]:
    """Full (+ihls, +df) line through ``start``, lower-left end first."""
    return _walk(space, start, 1, 1)


def secondary_diagonal(space: SearchSpace, start: GridPoint) -> list[GridPoint]:
    """Full (+ihls, -df) line through ``start``, upper-left end first."""
    return _walk(space, start, 1, -1)


def zigzag_search(space: SearchSpace, oracle: Oracle, start: GridPoint | None = None,
                  metric: str = "test", max_passes: int | None = None) -> SearchResult:
    """Online search alternating primary and secondary diagonals.

    Each pass sweeps the whole diagonal through the current optimum and
    re-anchors on the best record seen so far. The search stops after the
    first pass that fails to move the optimum to a newly evaluated cell, or
    after ``max_passes`` (default ``n_ihls + n_df``) passes.

    Revisited cells are appended to the visit log but served from the cache,
    so ``evaluations`` can be smaller than ``len(visit_log)``.
    """
    if start is None:
        start = space.point(0, 0)
    elif start not in space:
        raise ValueError(f"start {start} is not in the search space")
    if max_passes is None:
        max_passes = space.n_ihls + space.n_df
    if max_passes < 1:
        raise ValueError("max_passes must be >= 1")

    cache = _cached(oracle)
    before = cache.stats.invocations
    t0 = time.perf_counter()
    visit_log: list[GridPoint] = []
    records: dict[GridPoint, EvalRecord] = {}
    trace: list[float] = []
    best: EvalRecord | None = None
    primary = True
    converged = False
    passes = 0

    while passes < max_passes:
        line = primary_diagonal(space, start) if primary else secondary_diagonal(space, start)
        passes += 1
        moved = False
        for p in line:
            rec = cache.evaluate(p)
            records.setdefault(p, rec)
            visit_log.append(p)
            if best is None or rec.score(metric) > best.score(metric):
                best = rec
                moved = True
            trace.append(best.score(metric))
        # an improvement can only come from a cell first seen in this pass
        if not moved:
            converged = True
            break
        start = best.point
        primary = not primary

    if not converged:
        log.warning("zigzag stopped at the pass cap (%d) before converging", max_passes)
    return SearchResult(
        algorithm="zigzag",
        best=best,
        visit_log=visit_log,
        evaluations=cache.stats.invocations - before,
        elapsed=time.perf_counter() - t0,
        records=records,
        best_trace=trace,
        passes=passes,
        converged=converged,
        metric=metric,
    )


def run_algorithm(name: str, space: SearchSpace, oracle: Oracle, **kwargs) -> SearchResult:
    aliases = {"brute": "brute_force", "brute_force": "brute_force",
               "diagonal": "diagonal", "zigzag": "zigzag"}
    try:
        name = aliases[name]
    except KeyError:
        raise ValueError(f"unknown algorithm {name!r}") from None
    if name == "brute_force":
        return brute_force_search(space, oracle, **kwargs)
    if name == "diagonal":
        return diagonal_search(space, oracle, **kwargs)
    return zigzag_search(space, oracle, **kwargs)
