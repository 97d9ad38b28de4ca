"""Candidate evaluation.

Every traversal talks to an oracle through ``evaluate(point) -> EvalRecord``.
Real runs use the MLP trainer (see :mod:`kcsearch.trainer`); tests and
benchmarks use seeded synthetic accuracy surfaces defined here.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .scoring import ScoreParams, k_completeness
from .search_space import Architecture, GridPoint, SearchSpace

SURFACE_KINDS = ("unimodal", "multimodal", "constant", "checkerboard-adversarial", "noisy")


class OutOfGridError(ValueError):
    pass


@dataclass(frozen=True)
class EvalRecord:
    point: GridPoint
    architecture: Architecture
    train_accuracy: float
    test_accuracy: float
    k_completeness: float
    loss_history: tuple[float, ...] = ()
    accuracy_history: tuple[float, ...] = ()
    # wall-clock, so excluded from equality
    duration: float = field(default=0.0, compare=False)

    def __post_init__(self):
        for name in ("train_accuracy", "test_accuracy"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name}={v} outside [0, 1]")
        if len(self.loss_history) != len(self.accuracy_history):
            raise ValueError("loss and accuracy histories differ in length")

    def score(self, metric: str = "test") -> float:
        if metric == "test":
            return self.test_accuracy
        if metric == "train":
            return self.train_accuracy
        raise ValueError(f"unknown metric {metric!r}")

    def as_dict(self, include_history: bool = False, include_timing: bool = True) -> dict:
        out = {
            "point": self.point.as_dict(),
            "architecture": list(self.architecture.hidden_sizes),
            "train_accuracy": self.train_accuracy,
            "test_accuracy": self.test_accuracy,
            "k_completeness": self.k_completeness,
        }
        if include_history:
            out["loss_history"] = list(self.loss_history)
            out["accuracy_history"] = list(self.accuracy_history)
        if include_timing:
            out["duration"] = self.duration
        return out


@dataclass
class OracleStats:
    invocations: int = 0
    cache_hits: int = 0
    total_duration: float = 0.0

    @property
    def lookups(self) -> int:
        return self.invocations + self.cache_hits


class Oracle:
    """Base class: bounds checking and invocation accounting.

    Subclasses implement ``_evaluate``.
    """

    def __init__(self, space: SearchSpace, alpha: float = 0.5):
        self.space = space
        self.params = ScoreParams(input_dim=space.input_dim, alpha=alpha)
        self.stats = OracleStats()

    def evaluate(self, point: GridPoint) -> EvalRecord:
        if point not in self.space:
            raise OutOfGridError(f"{point} lies outside the search space")
        t0 = time.perf_counter()
        record = self._evaluate(point)
        self.stats.invocations += 1
        self.stats.total_duration += time.perf_counter() - t0
        return record

    def _evaluate(self, point: GridPoint) -> EvalRecord:
        raise NotImplementedError

    def score_of(self, point: GridPoint) -> float:
        return k_completeness(point.ihls, point.df, self.params)


class CachingOracle(Oracle):
    """Memoizes an inner oracle by grid point.

    ``stats.invocations`` counts only calls forwarded to the inner oracle.
    """

    def __init__(self, inner: Oracle):
        super().__init__(inner.space, inner.params.alpha)
        self.inner = inner
        self._cache: dict[GridPoint, EvalRecord] = {}

    def evaluate(self, point: GridPoint) -> EvalRecord:
        hit = self._cache.get(point)
        if hit is not None:
            self.stats.cache_hits += 1
            return hit
        t0 = time.perf_counter()
        record = self.inner.evaluate(point)
        self.stats.invocations += 1
        self.stats.total_duration += time.perf_counter() - t0
        self._cache[point] = record
        return record

    def __contains__(self, point) -> bool:
        return point in self._cache

    def records(self) -> dict[GridPoint, EvalRecord]:
        return dict(self._cache)

    def clear(self):
        self._cache.clear()
        self.stats = OracleStats()


def with_cache(oracle: Oracle) -> CachingOracle:
    return CachingOracle(oracle)


class SurfaceOracle(Oracle):
    """Looks accuracies up in a fixed array indexed ``[df_index][ihls_index]``.

    Train and test accuracy are both the surface value.
    """

    def __init__(self, space: SearchSpace, values, description: str = "", alpha: float = 0.5):
        super().__init__(space, alpha)
        values = np.array(values, dtype=float)
        if values.shape != space.shape:
            raise ValueError(f"surface shape {values.shape} != grid shape {space.shape}")
        if not np.all(np.isfinite(values)):
            raise ValueError("surface values must be finite")
        values.setflags(write=False)
        self.values = values
        self.description = description

    def value(self, point: GridPoint) -> float:
        i, j = self.space.index(point)
        return float(self.values[j, i])

    def _evaluate(self, point: GridPoint) -> EvalRecord:
        v = self.value(point)
        return EvalRecord(
            point=point,
            architecture=self.space.architecture(point),
            train_accuracy=v,
            test_accuracy=v,
            k_completeness=self.score_of(point),
        )

    def argmax(self) -> GridPoint:
        """First maximal cell in row-major (df, ihls) order."""
        j, i = np.unravel_index(int(np.argmax(self.values)), self.values.shape)
        return self.space.point(int(i), int(j))


def _gaussian(shape, center, sigma):
    rows, cols = np.indices(shape, dtype=float)
    cj, ci = center
    sj, si = sigma
    return np.exp(-0.5 * (((rows - cj) / sj) ** 2 + ((cols - ci) / si) ** 2))


def _bump_widths(rng, shape, lo, hi):
    # widths scale with the axis length so the bump stays smooth on any grid
    return tuple(max(1.0, rng.uniform(lo, hi) * n) for n in shape)


def make_surface(kind: str, space: SearchSpace, seed: int = 0, *, peak: GridPoint | None = None,
                 alpha: float = 0.5, noise: float = 0.01, value: float = 0.5) -> SurfaceOracle:
    """Deterministic synthetic accuracy surface over ``space``.

    unimodal
        One Gaussian bump rising from 0.5 to 0.9 at a random cell (or ``peak``).
    multimodal
        Sum of 2-4 bumps, rescaled into [0.5, 0.95].
    constant
        ``value`` everywhere.
    checkerboard-adversarial
        Even-parity cells sit above odd ones and the global maximum is on an
        even cell, which diagonal search never visits.
    noisy
        Unimodal plus uniform noise in ``[-noise, noise]``.
    """
    if kind not in SURFACE_KINDS:
        raise ValueError(f"unknown surface kind {kind!r}; expected one of {SURFACE_KINDS}")
    if len(space) == 0:
        raise ValueError("empty search space")
    rng = np.random.default_rng(seed)
    shape = space.shape
    n_df, n_ihls = shape

    def random_cell():
        return int(rng.integers(n_df)), int(rng.integers(n_ihls))

    if kind == "constant":
        values = np.full(shape, float(value))
        desc = f"constant {value}"
    elif kind in ("unimodal", "noisy"):
        if peak is not None:
            i, j = space.index(peak)
            center = (j, i)
        else:
            center = random_cell()
        sigma = _bump_widths(rng, shape, 0.25, 0.5)
        values = 0.5 + 0.4 * _gaussian(shape, center, sigma)
        desc = f"unimodal peak (row={center[0]}, col={center[1]}) sigma={sigma[0]:.3f},{sigma[1]:.3f}"
        if kind == "noisy":
            values = np.clip(values + rng.uniform(-noise, noise, size=shape), 0.0, 1.0)
            desc = f"noisy({noise}) " + desc
    elif kind == "multimodal":
        total = np.zeros(shape)
        k = int(rng.integers(2, 5))
        for _ in range(k):
            amp = rng.uniform(0.3, 1.0)
            total += amp * _gaussian(shape, random_cell(), _bump_widths(rng, shape, 0.1, 0.3))
        values = 0.5 + 0.45 * total / total.max()
        desc = f"multimodal {k} bumps"
    else:
        parity = np.add.outer(np.arange(n_df), np.arange(n_ihls)) % 2
        values = np.where(parity == 0, 0.6, 0.5) + rng.uniform(0.0, 0.05, size=shape)
        even = np.argwhere(parity == 0)
        r, c = even[int(rng.integers(len(even)))]
        values[r, c] = 0.9
        desc = f"checkerboard-adversarial max at (row={r}, col={c})"
    return SurfaceOracle(space, values, description=desc, alpha=alpha)
