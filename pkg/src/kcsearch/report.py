"""Run orchestration and on-disk artifacts.

Each run writes one directory holding the manifest, a result JSON and CSVs
(visit log, evaluated grid, per-epoch history of the best candidate).
``result.json`` omits wall-clock fields so that identical manifests give
byte-identical files; timings go to ``timing.json``.
"""

from __future__ import annotations

import csv
import json
import logging
from dataclasses import asdict, dataclass, field
from pathlib import Path

from .data import DataError, bundled_schema, infer_schema, load_dataset, load_schema
from .oracle import SURFACE_KINDS, CachingOracle, Oracle, make_surface
from .search_space import SearchSpace, build_space
from .trainer import MlpOracle, TrainConfig, write_history_csv
from .traversal import ALGORITHMS, SearchResult, run_algorithm

log = logging.getLogger(__name__)

ALGORITHM_FLAGS = {"brute": "brute_force", "brute_force": "brute_force",
                   "diagonal": "diagonal", "zigzag": "zigzag"}


class ManifestError(ValueError):
    pass


@dataclass
class RunManifest:
    out: str
    algorithms: list[str] = field(default_factory=lambda: ["zigzag"])
    dataset: str | None = None
    schema: str | None = None
    label: str | None = None
    surface: str | None = None
    input_dim: int = 11
    max_ihls: int = 64
    df_max_exp: int = 6
    include_df_one: bool = False
    alpha: float = 0.5
    seed: int = 42
    epochs: int = 100
    batch_size: int = 32
    learning_rate: float = 1e-3
    split_fraction: float = 0.8
    hidden_activation: str = "relu"
    optimizer: str = "adam"
    metric: str = "test"
    max_passes: int | None = None
    workers: int = 1

    def validate(self):
        """Raise ManifestError for anything that would fail later; runs before any training."""
        if (self.dataset is None) == (self.surface is None):
            raise ManifestError("exactly one of dataset or surface must be given")
        if self.surface is not None and self.surface not in SURFACE_KINDS:
            raise ManifestError(f"unknown surface {self.surface!r}; choose from {SURFACE_KINDS}")
        if self.dataset is not None:
            if not Path(self.dataset).is_file():
                raise ManifestError(f"dataset file not found: {self.dataset}")
            if self.schema is None and self.label is None:
                raise ManifestError("a dataset needs --schema or --label")
        if not self.algorithms:
            raise ManifestError("no algorithms requested")
        for a in self.algorithms:
            if a not in ALGORITHM_FLAGS:
                raise ManifestError(f"unknown algorithm {a!r}")
        if self.max_ihls < 1:
            raise ManifestError("max_ihls must be >= 1")
        if self.df_max_exp < 0 or (self.df_max_exp == 0 and not self.include_df_one):
            raise ManifestError("DF axis is empty")
        if not 0.0 <= self.alpha <= 1.0:
            raise ManifestError("alpha must be in [0, 1]")
        if self.metric not in ("test", "train"):
            raise ManifestError("metric must be 'test' or 'train'")
        if self.input_dim < 1 or self.workers < 1:
            raise ManifestError("input_dim and workers must be >= 1")
        try:
            self.train_config()
        except ValueError as exc:
            raise ManifestError(str(exc)) from None

    def train_config(self) -> TrainConfig:
        return TrainConfig(epochs=self.epochs, batch_size=self.batch_size,
                           learning_rate=self.learning_rate, seed=self.seed,
                           split_fraction=self.split_fraction,
                           hidden_activation=self.hidden_activation, optimizer=self.optimizer)

    def as_dict(self) -> dict:
        d = asdict(self)
        d["algorithms"] = [ALGORITHM_FLAGS[a] for a in self.algorithms]
        return d


def _resolve_schema(manifest: RunManifest):
    if manifest.schema is None:
        return infer_schema(manifest.dataset, manifest.label)
    if Path(manifest.schema).is_file():
        return load_schema(manifest.schema)
    return bundled_schema(manifest.schema)


def build_oracle(manifest: RunManifest) -> tuple[SearchSpace, Oracle]:
    """Search space plus the uncached oracle described by the manifest."""
    if manifest.surface is not None:
        space = build_space(manifest.max_ihls, manifest.df_max_exp, manifest.include_df_one,
                            manifest.input_dim)
        return space, make_surface(manifest.surface, space, manifest.seed, alpha=manifest.alpha)
    dataset = load_dataset(manifest.dataset, _resolve_schema(manifest), manifest.seed,
                           manifest.split_fraction)
    space = build_space(manifest.max_ihls, manifest.df_max_exp, manifest.include_df_one,
                        dataset.n_features)
    return space, MlpOracle(space, dataset, manifest.train_config(), manifest.alpha)


def _dump_json(obj, path: Path):
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def write_visit_log(result: SearchResult, path: Path):
    seen = set()
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["step", "ihls", "df", "train_accuracy", "test_accuracy", "k_completeness", "revisit"])
        for step, p in enumerate(result.visit_log):
            rec = result.records[p]
            w.writerow([step, p.ihls, p.df, repr(rec.train_accuracy), repr(rec.test_accuracy),
                        f"{rec.k_completeness:.4f}", int(p in seen)])
            seen.add(p)


def write_grid(result: SearchResult, path: Path):
    """Every evaluated cell once, row-major over (df, ihls)."""
    cells = sorted(result.records, key=lambda p: (p.df, p.ihls))
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["ihls", "df", "architecture", "train_accuracy", "test_accuracy", "k_completeness"])
        for p in cells:
            rec = result.records[p]
            arch = "-".join(str(s) for s in rec.architecture.hidden_sizes)
            w.writerow([p.ihls, p.df, arch, repr(rec.train_accuracy), repr(rec.test_accuracy),
                        f"{rec.k_completeness:.4f}"])


def write_result(result: SearchResult, out_dir: Path, manifest: RunManifest | None = None) -> Path:
    out_dir.mkdir(parents=True, exist_ok=True)
    files = {"visit_log": "visits.csv", "grid": "grid.csv", "history": "best_history.csv",
             "timing": "timing.json"}
    write_visit_log(result, out_dir / files["visit_log"])
    write_grid(result, out_dir / files["grid"])
    write_history_csv(result.best, out_dir / files["history"])
    _dump_json({"elapsed_seconds": result.elapsed,
                "best_candidate_seconds": result.best.duration}, out_dir / files["timing"])
    if manifest is not None:
        files["manifest"] = "manifest.json"
        _dump_json(manifest.as_dict(), out_dir / files["manifest"])
    doc = result.as_dict(include_timing=False)
    doc["files"] = files
    path = out_dir / "result.json"
    _dump_json(doc, path)
    return path


def run_search(manifest: RunManifest) -> dict[str, SearchResult]:
    """Run each requested algorithm with its own cache and write its artifacts.

    With one algorithm the files land directly in ``manifest.out``; with
    several, each gets a subdirectory named after it.
    """
    manifest.validate()
    space, oracle = build_oracle(manifest)
    out = Path(manifest.out)
    names = [ALGORITHM_FLAGS[a] for a in manifest.algorithms]
    results = {}
    for name in names:
        cache = CachingOracle(oracle)
        kwargs = {"metric": manifest.metric}
        if name == "zigzag":
            kwargs["max_passes"] = manifest.max_passes
        else:
            kwargs["workers"] = manifest.workers
        log.info("running %s on a %dx%d grid", name, space.n_ihls, space.n_df)
        result = run_algorithm(name, space, cache, **kwargs)
        target = out if len(names) == 1 else out / name
        write_result(result, target, manifest)
        results[name] = result
    return results


@dataclass
class ComparisonRow:
    algorithm: str
    completion_seconds: float
    evaluations: int
    visits: int
    train_accuracy: float
    test_accuracy: float
    k_completeness: float
    best_architecture: list[int]


@dataclass
class ComparisonReport:
    rows: list[ComparisonRow]
    # keyed like "brute_force/zigzag"
    time_ratios: dict[str, float]
    evaluation_ratios: dict[str, float]

    @classmethod
    def from_results(cls, results: dict[str, SearchResult]) -> "ComparisonReport":
        rows = [
            ComparisonRow(
                algorithm=name,
                completion_seconds=r.elapsed,
                evaluations=r.evaluations,
                visits=len(r.visit_log),
                train_accuracy=r.best.train_accuracy,
                test_accuracy=r.best.test_accuracy,
                k_completeness=round(r.best.k_completeness, 4),
                best_architecture=list(r.best.architecture.hidden_sizes),
            )
            for name, r in results.items()
        ]
        time_ratios, eval_ratios = {}, {}
        for a in rows:
            for b in rows:
                if a is b:
                    continue
                key = f"{a.algorithm}/{b.algorithm}"
                if b.completion_seconds > 0:
                    time_ratios[key] = a.completion_seconds / b.completion_seconds
                if b.evaluations > 0:
                    eval_ratios[key] = a.evaluations / b.evaluations
        return cls(rows, time_ratios, eval_ratios)

    def row(self, algorithm: str) -> ComparisonRow:
        for r in self.rows:
            if r.algorithm == algorithm:
                return r
        raise KeyError(algorithm)

    def as_dict(self) -> dict:
        return {"rows": [asdict(r) for r in self.rows],
                "time_ratios": self.time_ratios,
                "evaluation_ratios": self.evaluation_ratios}

    def write_csv(self, path: Path):
        with Path(path).open("w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(["algorithm", "completion_seconds", "evaluations", "visits",
                        "train_accuracy", "test_accuracy", "k_completeness", "best_architecture"])
            for r in self.rows:
                w.writerow([r.algorithm, f"{r.completion_seconds:.6f}", r.evaluations, r.visits,
                            f"{r.train_accuracy:.4f}", f"{r.test_accuracy:.4f}",
                            f"{r.k_completeness:.4f}", "-".join(map(str, r.best_architecture))])

    def format_table(self) -> str:
        """Plain-text table, one column per algorithm."""
        header = ["metric"] + [r.algorithm for r in self.rows]
        lines = [
            ["completion time (s)"] + [f"{r.completion_seconds:.3f}" for r in self.rows],
            ["evaluations"] + [str(r.evaluations) for r in self.rows],
            ["train acc."] + [f"{100 * r.train_accuracy:.2f}%" for r in self.rows],
            ["test acc."] + [f"{100 * r.test_accuracy:.2f}%" for r in self.rows],
            ["k-completeness"] + [f"{r.k_completeness:.4f}" for r in self.rows],
            ["best architecture"] + [str(r.best_architecture) for r in self.rows],
        ]
        table = [header] + lines
        widths = [max(len(row[c]) for row in table) for c in range(len(header))]
        return "\n".join("  ".join(cell.ljust(w) for cell, w in zip(row, widths)) for row in table)


def compare_algorithms(manifest: RunManifest) -> ComparisonReport:
    """All three algorithms on one space and oracle, each with a fresh cache."""
    manifest.algorithms = list(ALGORITHMS)
    results = run_search(manifest)
    report = ComparisonReport.from_results(results)
    out = Path(manifest.out)
    _dump_json(report.as_dict(), out / "comparison.json")
    report.write_csv(out / "comparison.csv")
    return report


__all__ = ["RunManifest", "ManifestError", "run_search", "compare_algorithms",
           "ComparisonReport", "ComparisonRow", "build_oracle", "write_result", "DataError"]
