import numpy as np
import pytest

from hipar import DataError, holdout_split, k_folds, load_csv, write_csv


def test_load_toy_table(toy):
    assert toy.n == 6
    assert toy.target == "price"
    assert toy.categorical_features() == ["property-type", "state"]
    assert toy.numerical_features() == ["rooms", "surface"]
    assert toy.column("price")[0] == 510.0


def test_load_missing_file():
    with pytest.raises(DataError):
        load_csv("/nonexistent/nowhere.csv", target="y")


def test_load_target_absent(toy_csv):
    with pytest.raises(DataError, match="not found"):
        load_csv(toy_csv, target="nope")


def test_load_target_non_numeric(toy_csv):
    with pytest.raises(DataError, match="not numerical"):
        load_csv(toy_csv, target="state")


def test_load_single_column_no_features(tmp_path):
    path = tmp_path / "one.csv"
    path.write_text("y\n1\n2\n3\n")
    with pytest.raises(DataError, match="no feature columns"):
        load_csv(str(path), target="y")


def test_load_empty_table(tmp_path):
    path = tmp_path / "empty.csv"
    path.write_text("a,y\n")
    with pytest.raises(DataError, match="no data rows"):
        load_csv(str(path), target="y")


def test_categorical_override(toy_csv):
    d = load_csv(toy_csv, target="price", categorical_overrides={"rooms"})
    assert d.attribute("rooms").kind == "categorical"
    assert list(d.column("rooms")[:2]) == ["5", "3"]


def test_override_unknown_column(toy_csv):
    with pytest.raises(DataError, match="override"):
        load_csv(toy_csv, target="price", categorical_overrides={"zzz"})


def test_missing_cell_rejected_with_row_index(tmp_path):
    path = tmp_path / "holes.csv"
    path.write_text("a,y\n1,2\n,3\n")
    with pytest.raises(DataError, match="row 2"):
        load_csv(str(path), target="y")


def test_non_finite_cells_make_column_categorical(tmp_path):
    path = tmp_path / "inf.csv"
    path.write_text("a,y\ninf,1\n2,2\n")
    d = load_csv(str(path), target="y")
    assert d.attribute("a").kind == "categorical"


def test_round_trip(tmp_path, toy):
    out = tmp_path / "round.csv"
    write_csv(toy, str(out))
    back = load_csv(str(out), target="price")
    assert [(a.name, a.kind, a.role) for a in back.schema] == [
        (a.name, a.kind, a.role) for a in toy.schema
    ]
    for attr in toy.schema:
        a, b = toy.column(attr.name), back.column(attr.name)
        assert list(a) == list(b)


def test_type_inference_stable_under_row_permutation(tmp_path):
    rng = np.random.default_rng(0)
    body = [("x", "1.5", "7"), ("q", "2", "8"), ("z", "0.25", "9")]
    for perm in [body, body[::-1], [body[1], body[2], body[0]]]:
        path = tmp_path / f"perm{rng.integers(1e9)}.csv"
        path.write_text("a,b,y\n" + "\n".join(",".join(r) for r in perm) + "\n")
        d = load_csv(str(path), target="y")
        assert d.attribute("a").kind == "categorical"
        assert d.attribute("b").kind == "numerical"


def test_k_folds_balance_and_partition(toy):
    plan = k_folds(toy, 3, seed=11)
    sizes = sorted(len(plan.fold_rows(f)) for f in range(3))
    assert sizes == [2, 2, 2]
    union = np.concatenate([plan.fold_rows(f) for f in range(3)])
    assert sorted(union.tolist()) == list(range(6))


def test_k_folds_uneven_sizes(two_segment):
    sub = two_segment.subset(range(7))
    plan = k_folds(sub, 3, seed=5)
    sizes = sorted(len(plan.fold_rows(f)) for f in range(3))
    assert sizes == [2, 2, 3]


def test_k_folds_deterministic(toy):
    a = k_folds(toy, 3, seed=42)
    b = k_folds(toy, 3, seed=42)
    assert np.array_equal(a.assignments, b.assignments)
    c = k_folds(toy, 3, seed=43)
    assert not np.array_equal(a.assignments, c.assignments)


def test_k_folds_range(toy):
    with pytest.raises(DataError):
        k_folds(toy, 1, seed=0)
    with pytest.raises(DataError):
        k_folds(toy, 7, seed=0)


def test_holdout_sizes():
    train, test = holdout_split(range(10), 0.2, seed=0)
    assert len(train) == 8 and len(test) == 2
    train, test = holdout_split([3, 9], 0.2, seed=0)
    assert len(train) == 1 and len(test) == 1


def test_holdout_partition_and_determinism():
    rows = [2, 4, 8, 16, 23]
    t1 = holdout_split(rows, 0.2, seed=77)
    t2 = holdout_split(rows, 0.2, seed=77)
    assert np.array_equal(t1[0], t2[0]) and np.array_equal(t1[1], t2[1])
    merged = sorted(t1[0].tolist() + t1[1].tolist())
    assert merged == sorted(rows)
    assert len(np.intersect1d(t1[0], t1[1])) == 0


def test_holdout_too_few_rows():
    with pytest.raises(DataError):
        holdout_split([1], 0.2, seed=0)
