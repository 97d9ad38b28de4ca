"""One test per acceptance criterion; each prints a single PASS/FAIL line."""

import json

import numpy as np
import pytest

from conftest import data_dir
from kcsearch.cli import main
from kcsearch.data import bundled_schema, load_dataset, load_schema
from kcsearch.oracle import SURFACE_KINDS, CachingOracle, make_surface
from kcsearch.report import RunManifest, compare_algorithms
from kcsearch.scoring import ScoreParams, k_completeness
from kcsearch.search_space import Architecture, GridPoint, SearchSpace, build_space, derive_architecture
from kcsearch.trainer import MlpOracle, TrainConfig, init_model, loss_and_gradients
from kcsearch.traversal import brute_force_search, diagonal_search, zigzag_search


@pytest.fixture
def verdict(capsys):
    def emit(number, ok, detail):
        with capsys.disabled():
            print(f"\n[criterion {number}] {'PASS' if ok else 'FAIL'}: {detail}")
        assert ok, detail
    return emit


def churn_files():
    csv_path, schema_path = data_dir() / "churn.csv", data_dir() / "churn.json"
    if not (csv_path.is_file() and schema_path.is_file()):
        return None
    return csv_path, load_schema(schema_path)


def test_criterion_1_k_completeness(verdict):
    table = {(64, 2): 3.1591, (56, 2): 2.7955, (64, 16): 2.9403, (40, 8): 1.8807}
    params = ScoreParams(input_dim=11, alpha=0.5)
    errors = {p: abs(k_completeness(*p, params) - v) for p, v in table.items()}
    worst = max(errors.values())
    verdict(1, worst <= 1e-4, f"max |k - reported| = {worst:.2e} (tol 1e-4)")


def test_criterion_2_architectures(verdict):
    cases = {(24, 3): [24, 8, 2], (10, 2): [10, 5, 2, 1], (9, 2): [9, 4, 2, 1], (10, 4): [10, 2]}
    got = {p: list(derive_architecture(GridPoint(*p), 11).hidden_sizes) for p in cases}
    verdict(2, got == cases, f"derived {got}")


def test_criterion_3_oracle_equivalence(verdict):
    rng = np.random.default_rng(2024)
    mismatches, runs = [], 0
    for seed in range(120):
        n_i, n_j = int(rng.integers(2, 17)), int(rng.integers(2, 17))
        space = SearchSpace(list(range(1, n_i + 1)), [2 ** k for k in range(1, n_j + 1)], input_dim=11)
        kind = SURFACE_KINDS[seed % len(SURFACE_KINDS)]
        oracle = make_surface(kind, space, seed)
        values = oracle.values
        jj, ii = np.indices(values.shape)
        brute = brute_force_search(space, oracle).best.test_accuracy
        diag = diagonal_search(space, oracle).best.test_accuracy
        if brute != values.max() or diag != values[(ii + jj) % 2 == 1].max():
            mismatches.append((kind, seed, n_i, n_j))
        runs += 1
    verdict(3, not mismatches and runs >= 100, f"{runs} surfaces, mismatches: {mismatches}")


def test_criterion_4_counts(verdict):
    space = build_space(64, 6)
    counts, agree = {}, True
    for name, fn in (("brute", brute_force_search), ("diagonal", diagonal_search), ("zigzag", zigzag_search)):
        # genuine calls are read off the raw surface, beneath the cache
        surface = make_surface("unimodal", space, 0)
        result = fn(space, CachingOracle(surface))
        counts[name] = surface.stats.invocations
        agree &= result.evaluations == counts[name]
    zig = [zigzag_search(space, make_surface("unimodal", space, s)).evaluations for s in range(100)]
    mean = float(np.mean(zig))
    ok = (agree and counts["brute"] == 384 and counts["diagonal"] == 192 and counts["zigzag"] < 192
          and mean <= 4 * (64 + 6))
    verdict(4, ok, f"invocations {counts}; zigzag mean over 100 unimodal = {mean:.1f} (bound 280)")


def test_criterion_5_zigzag_quality(verdict):
    space = SearchSpace(list(range(1, 17)), [2 ** k for k in range(1, 17)], input_dim=11)
    near = 0
    for seed in range(100):
        oracle = make_surface("unimodal", space, seed)
        if oracle.values.max() - zigzag_search(space, oracle).best.test_accuracy <= 0.02:
            near += 1
    unsound = []
    for seed in range(50):
        oracle = make_surface("checkerboard-adversarial", space, seed)
        res = zigzag_search(space, oracle)
        seen = max(oracle.value(p) for p in res.visit_log)
        if res.best.test_accuracy != seen:
            unsound.append(seed)
    verdict(5, near >= 95 and not unsound,
            f"unimodal 16x16 within 0.02: {near}/100; checkerboard unsound runs: {unsound}")


def test_criterion_6_gradient_check(verdict):
    rng = np.random.default_rng(6)
    arch = derive_architecture(GridPoint(8, 2), 11)
    arch = Architecture(input_dim=11, hidden_sizes=(8, 4), origin=arch.origin)
    model = init_model(arch, seed=6)
    X = rng.normal(size=(16, 11))
    y = rng.integers(0, 2, size=16).astype(float)
    _, gw, gb = loss_and_gradients(model, X, y)
    h, worst = 1e-5, 0.0
    for p, analytic in zip(model.parameters(), [*gw, *gb]):
        numeric = np.zeros_like(p)
        for ix in np.ndindex(p.shape):
            old = p[ix]
            p[ix] = old + h
            up = loss_and_gradients(model, X, y)[0]
            p[ix] = old - h
            down = loss_and_gradients(model, X, y)[0]
            p[ix] = old
            numeric[ix] = (up - down) / (2 * h)
        denom = np.linalg.norm(analytic) + np.linalg.norm(numeric)
        worst = max(worst, np.linalg.norm(analytic - numeric) / denom if denom else 0.0)
    verdict(6, worst <= 1e-4, f"11-8-4-1 net, 16 samples: max relative error {worst:.2e} (tol 1e-4)")


def _zigzag_accuracy(csv_path, schema):
    ds = load_dataset(csv_path, schema)
    space = build_space(64, 6, input_dim=ds.n_features)
    result = zigzag_search(space, MlpOracle(space, ds, TrainConfig()))
    return result.best


@pytest.mark.slow
def test_criterion_7_titanic(verdict, titanic_csv):
    full = _zigzag_accuracy(titanic_csv, bundled_schema("titanic"))
    noleak = _zigzag_accuracy(titanic_csv, bundled_schema("titanic-noleak"))
    ok = full.test_accuracy >= 0.72 and noleak.test_accuracy >= 0.72
    verdict("7a", ok, f"Titanic zigzag test accuracy {full.test_accuracy:.4f} at "
                      f"{list(full.architecture.hidden_sizes)}; without boat/body "
                      f"{noleak.test_accuracy:.4f} at {list(noleak.architecture.hidden_sizes)} (need >= 0.72)")


@pytest.mark.slow
def test_criterion_7_churn(verdict):
    found = churn_files()
    if found is None:
        verdict("7b", False, f"Churn data not found in {data_dir()} (churn.csv + churn.json)")
    best = _zigzag_accuracy(*found)
    verdict("7b", best.test_accuracy >= 0.76,
            f"Churn zigzag test accuracy {best.test_accuracy:.4f} (need >= 0.76)")


def _ordered(report):
    rows = {r.algorithm: r for r in report.rows}
    z, d, b = rows["zigzag"], rows["diagonal"], rows["brute_force"]
    ok = (z.completion_seconds < d.completion_seconds < b.completion_seconds
          and z.evaluations < d.evaluations < b.evaluations)
    detail = ", ".join(f"{r.algorithm} {r.evaluations} evals {r.completion_seconds:.1f}s" for r in (z, d, b))
    return ok, detail


@pytest.mark.slow
def test_criterion_8_churn_compare(verdict, tmp_path):
    found = churn_files()
    if found is None:
        verdict(8, False, f"Churn data not found in {data_dir()} (churn.csv + churn.json)")
    csv_path, _ = found
    ds = load_dataset(*found)
    report = compare_algorithms(RunManifest(out=str(tmp_path), dataset=str(csv_path),
                                            schema=str(data_dir() / "churn.json"), input_dim=ds.n_features))
    ok, detail = _ordered(report)
    verdict(8, ok, f"Churn compare: {detail}")


@pytest.mark.slow
def test_criterion_8_titanic_supplement(verdict, titanic_csv, tmp_path):
    # informational companion to the Churn run; not a substitute for it
    report = compare_algorithms(RunManifest(out=str(tmp_path), dataset=str(titanic_csv),
                                            schema="titanic", epochs=20))
    ok, detail = _ordered(report)
    verdict("8-titanic (supplementary)", ok, f"Titanic compare, 20 epochs: {detail}")


def test_criterion_9_determinism(verdict, tmp_path, titanic_csv, capsys):
    runs = {
        "surface": ["--surface", "noisy", "--seed", "11"],
        "titanic": ["--dataset", str(titanic_csv), "--schema", "titanic", "--epochs", "5",
                    "--max-ihls", "16", "--df-max-exp", "4"],
    }
    same = {}
    for label, args in runs.items():
        blobs = []
        for attempt in ("first", "second"):
            out = tmp_path / label / attempt
            assert main(["search", "--algorithm", "zigzag", *args, "--out", str(out)]) == 0
            blobs.append((out / "result.json").read_bytes())
        json.loads(blobs[0])
        same[label] = blobs[0] == blobs[1]
    capsys.readouterr()
    verdict(9, all(same.values()), f"byte-identical result.json on repeat: {same}")
