import numpy as np
import pytest

from kcsearch.data import (
    ColumnSchema,
    DataError,
    bundled_schema,
    infer_schema,
    load_csv,
    load_dataset,
    load_schema,
    preprocess,
    save_schema,
    split_indices,
)

TINY = [
    ColumnSchema("id", "drop"),
    ColumnSchema("height", "numeric"),
    ColumnSchema("colour", "categorical"),
    ColumnSchema("y", "label"),
]


def test_median_imputation(tiny_csv):
    raw = load_csv(tiny_csv, TINY)
    assert raw.columns["height"][1] == 2.0
    assert raw.n_rows == 3
    assert "id" not in raw.columns


def test_mode_imputation(tmp_path):
    p = tmp_path / "m.csv"
    p.write_text("c,y\nx,0\nz,1\nz,0\n?,1\n", encoding="utf-8")
    raw = load_csv(p, [ColumnSchema("c", "categorical"), ColumnSchema("y", "label")])
    assert list(raw.columns["c"]) == ["x", "z", "z", "z"]


def test_unknown_column(tiny_csv):
    with pytest.raises(DataError, match="not in schema"):
        load_csv(tiny_csv, TINY[1:])


def test_missing_schema_column(tiny_csv):
    with pytest.raises(DataError, match="missing from file"):
        load_csv(tiny_csv, TINY + [ColumnSchema("weight", "numeric")])


def test_unparseable_numeric_names_line(tmp_path):
    p = tmp_path / "bad.csv"
    p.write_text("h,y\n1,0\n2,1\nabc,0\n", encoding="utf-8")
    with pytest.raises(DataError, match=r"line 4, column 'h'"):
        load_csv(p, [ColumnSchema("h", "numeric"), ColumnSchema("y", "label")])


def test_missing_label(tmp_path):
    p = tmp_path / "nolabel.csv"
    p.write_text("h,y\n1,0\n2,\n", encoding="utf-8")
    with pytest.raises(DataError, match="missing label at line 3"):
        load_csv(p, [ColumnSchema("h", "numeric"), ColumnSchema("y", "label")])


def test_schema_needs_one_label():
    with pytest.raises(DataError):
        load_csv("unused.csv", [ColumnSchema("h", "numeric")])
    with pytest.raises(DataError):
        ColumnSchema("h", "ordinal")


def test_label_outside_binary(tmp_path):
    p = tmp_path / "three.csv"
    p.write_text("h,y\n1,0\n2,2\n3,1\n", encoding="utf-8")
    raw = load_csv(p, [ColumnSchema("h", "numeric"), ColumnSchema("y", "label")])
    with pytest.raises(DataError, match="0 or 1"):
        preprocess(raw)


def _ten_rows(tmp_path):
    p = tmp_path / "ten.csv"
    rows = ["a,b,c,y"] + [f"{i},{i * i % 7},{'uvw'[i % 3]},{i % 2}" for i in range(10)]
    p.write_text("\n".join(rows) + "\n", encoding="utf-8")
    schema = [ColumnSchema("a", "numeric"), ColumnSchema("b", "numeric"),
              ColumnSchema("c", "categorical"), ColumnSchema("y", "label")]
    return p, schema


def test_split_is_deterministic(tmp_path):
    p, schema = _ten_rows(tmp_path)
    d1 = load_dataset(p, schema, seed=3, split_fraction=0.8)
    d2 = load_dataset(p, schema, seed=3, split_fraction=0.8)
    assert len(d1.train_indices) == 8 and len(d1.test_indices) == 2
    assert np.array_equal(d1.train_indices, d2.train_indices)
    assert np.array_equal(d1.features, d2.features)
    assert sorted(np.concatenate([d1.train_indices, d1.test_indices])) == list(range(10))


def test_standardized_on_training_rows_only(tmp_path):
    p, schema = _ten_rows(tmp_path)
    d = load_dataset(p, schema, seed=1)
    train = d.features[d.train_indices]
    np.testing.assert_allclose(train.mean(axis=0), 0.0, atol=1e-9)
    np.testing.assert_allclose(train.var(axis=0), 1.0, atol=1e-6)
    # recompute the statistics from the raw training rows
    raw = load_csv(p, schema)
    a = raw.columns["a"][d.train_indices]
    assert d.means[0] == pytest.approx(a.mean())
    assert d.scales[0] == pytest.approx(a.std())


def test_categorical_label_encoded(tmp_path):
    p, schema = _ten_rows(tmp_path)
    d = load_dataset(p, schema, seed=1)
    assert d.feature_names == ["a", "b", "c"]
    assert len(np.unique(d.features[:, 2])) == 3


def test_zero_variance_warns(tmp_path):
    p = tmp_path / "flat.csv"
    p.write_text("k,h,y\n5,1,0\n5,2,1\n5,3,0\n5,4,1\n", encoding="utf-8")
    schema = [ColumnSchema("k", "numeric"), ColumnSchema("h", "numeric"), ColumnSchema("y", "label")]
    with pytest.warns(UserWarning, match="zero-variance"):
        d = load_dataset(p, schema, split_fraction=0.5)
    assert np.all(d.features[:, 0] == 0.0)


def test_schema_round_trip(tmp_path):
    schema = TINY + [ColumnSchema("shade", "categorical", ("dark", "light"))]
    save_schema(schema, tmp_path / "s.json")
    assert load_schema(tmp_path / "s.json") == schema


def test_declared_categories_enforced(tiny_csv):
    schema = [TINY[0], TINY[1], ColumnSchema("colour", "categorical", ("red",)), TINY[3]]
    with pytest.raises(DataError, match="line 3"):
        load_csv(tiny_csv, schema)


def test_infer_schema(tiny_csv):
    schema = infer_schema(tiny_csv, "y", drop=("id",))
    assert [(c.name, c.kind) for c in schema] == [
        ("id", "drop"), ("height", "numeric"), ("colour", "categorical"), ("y", "label")]


def test_split_edges():
    with pytest.raises(DataError):
        split_indices(1, 0, 0.5)
    tr, te = split_indices(3, 0, 0.99)
    assert len(tr) == 2 and len(te) == 1


def test_to_csv(tmp_path):
    p, schema = _ten_rows(tmp_path)
    d = load_dataset(p, schema)
    d.to_csv(tmp_path / "out.csv")
    lines = (tmp_path / "out.csv").read_text().splitlines()
    assert lines[0] == "a,b,c,label,split"
    assert len(lines) == 11


def test_titanic_width(titanic_csv):
    d = load_dataset(titanic_csv, bundled_schema("titanic"))
    assert d.n_features == 11
    assert 1000 <= len(d.labels) <= 1400
    assert set(np.unique(d.labels)) == {0, 1}
    assert np.all(np.isfinite(d.features))
    assert load_dataset(titanic_csv, bundled_schema("titanic-noleak")).n_features == 9


def test_titanic_round_trip_determinism(titanic_csv):
    a = load_dataset(titanic_csv, bundled_schema("titanic"), seed=9)
    b = load_dataset(titanic_csv, bundled_schema("titanic"), seed=9)
    assert a.features.tobytes() == b.features.tobytes()
    assert np.array_equal(a.test_indices, b.test_indices)


def test_width_independent_of_row_order(titanic_csv, tmp_path):
    lines = titanic_csv.read_text(encoding="utf-8").splitlines()
    shuffled = tmp_path / "shuffled.csv"
    body = lines[1:]
    np.random.default_rng(0).shuffle(body)
    shuffled.write_text("\n".join([lines[0], *body]) + "\n", encoding="utf-8")
    assert load_dataset(shuffled, bundled_schema("titanic")).n_features == 11


def test_unknown_bundled_schema():
    with pytest.raises(DataError):
        bundled_schema("mnist")
