import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from rkssc.data import (
    DataFormatError, corrupt_sparse, gen_nonlinear_manifolds, gen_union_subspaces,
    load_csv, load_labels, load_matrix, load_raw, save_csv, save_labels, save_matrix,
    save_raw, stratified_split, unit_normalize_columns,
)


def write(tmp_path, text, name="x.csv"):
    p = tmp_path / name
    p.write_text(text)
    return p


def test_csv_rows_are_samples(tmp_path):
    np.testing.assert_array_equal(load_csv(write(tmp_path, "1,0\n0,1\n")), np.eye(2))
    X = load_csv(write(tmp_path, "1,2,3\n4,5,6\n"))
    assert X.shape == (3, 2)
    np.testing.assert_array_equal(X[:, 1], [4, 5, 6])


def test_csv_header_and_blank_lines(tmp_path):
    X = load_csv(write(tmp_path, "a,b\n1,2\n\n3,4\n"))
    np.testing.assert_array_equal(X, [[1, 3], [2, 4]])


@pytest.mark.parametrize("text,needle", [
    ("1,2\n3,nan\n", ":2:"),
    ("1,2\n3,inf\n", ":2:"),
    ("1,2\n3\n", "ragged"),
    ("1,2\n3,x\n", ":2:"),
    ("", "no data"),
])
def test_csv_rejects_bad_input(tmp_path, text, needle):
    with pytest.raises(DataFormatError, match=needle):
        load_csv(write(tmp_path, text))


def test_csv_allow_empty(tmp_path):
    assert load_csv(write(tmp_path, "a,b\n"), allow_empty=True).size == 0


def test_csv_round_trip(tmp_path, rng):
    X = rng.standard_normal((4, 7))
    p = tmp_path / "r.csv"
    save_csv(p, X)
    np.testing.assert_array_equal(load_csv(p), X)


def test_raw_round_trip_bit_identical(tmp_path, rng):
    X = rng.standard_normal((5, 3))
    p = tmp_path / "x.bin"
    save_raw(p, X)
    back = load_raw(p)
    assert back.tobytes() == X.tobytes() and back.shape == X.shape
    save_raw(tmp_path / "y.bin", back)
    assert (tmp_path / "y.bin").read_bytes() == p.read_bytes()
    assert p.stat().st_size == 20 + 8 * 15


def test_raw_rejects_bad_files(tmp_path, rng):
    p = tmp_path / "x.bin"
    save_raw(p, rng.standard_normal((2, 2)))
    buf = p.read_bytes()
    (tmp_path / "short.bin").write_bytes(buf[:-8])
    with pytest.raises(DataFormatError):
        load_raw(tmp_path / "short.bin")
    (tmp_path / "magic.bin").write_bytes(b"XXXX" + buf[4:])
    with pytest.raises(DataFormatError):
        load_raw(tmp_path / "magic.bin")
    bad = np.array([[1.0, np.nan]])
    save_raw(tmp_path / "nan.bin", bad)
    with pytest.raises(DataFormatError):
        load_raw(tmp_path / "nan.bin")


def test_format_detection(tmp_path, rng):
    X = rng.standard_normal((3, 4))
    save_matrix(tmp_path / "a.dat", X, format="raw")
    save_matrix(tmp_path / "b.dat", X, format="csv")
    np.testing.assert_array_equal(load_matrix(tmp_path / "a.dat"), X)
    np.testing.assert_array_equal(load_matrix(tmp_path / "b.dat"), X)
    with pytest.raises(ValueError):
        save_matrix(tmp_path / "c.dat", X, format="hdf5")


def test_labels_round_trip(tmp_path):
    p = tmp_path / "l.txt"
    save_labels(p, [2, 0, 1])
    np.testing.assert_array_equal(load_labels(p), [2, 0, 1])
    np.testing.assert_array_equal(load_labels(write(tmp_path, "label\n1\n0\n", "h.txt")), [1, 0])
    with pytest.raises(DataFormatError):
        load_labels(write(tmp_path, "1\nx\n", "bad.txt"))


def test_unit_normalize():
    np.testing.assert_allclose(unit_normalize_columns([[3.0], [4.0]]), [[0.6], [0.8]])
    with pytest.raises(ValueError, match="column 1"):
        unit_normalize_columns([[1.0, 0.0], [0.0, 0.0]])


@settings(max_examples=50, deadline=None)
@given(arrays(float, (3, 4), elements=st.floats(0.1, 100)))
def test_unit_normalize_property(X):
    Xn = unit_normalize_columns(X)
    np.testing.assert_allclose(np.linalg.norm(Xn, axis=0), 1.0)
    np.testing.assert_allclose(unit_normalize_columns(Xn), Xn)


def test_union_subspaces_shape_and_rank():
    ds = gen_union_subspaces(10, 3, 2, 8, 0.0, seed=4)
    assert ds.X.shape == (10, 24) and ds.n_clusters == 3
    np.testing.assert_array_equal(np.bincount(ds.labels), [8, 8, 8])
    for m in range(3):
        assert np.linalg.matrix_rank(ds.X[:, ds.labels == m]) == 2
    assert ds.provenance["seed"] == 4


def test_generators_deterministic():
    a = gen_union_subspaces(6, 2, 2, 5, 0.1, seed=7)
    b = gen_union_subspaces(6, 2, 2, 5, 0.1, seed=7)
    c = gen_union_subspaces(6, 2, 2, 5, 0.1, seed=8)
    np.testing.assert_array_equal(a.X, b.X)
    assert not np.array_equal(a.X, c.X)
    with pytest.raises(ValueError):
        gen_union_subspaces(3, 2, 3, 5)


def test_circles():
    ds = gen_nonlinear_manifolds("concentric_circles", {"radii": [1, 3], "n_per_cluster": 20}, seed=0)
    assert ds.X.shape == (2, 40)
    r = np.linalg.norm(ds.X, axis=0)
    np.testing.assert_allclose(r, np.where(ds.labels == 0, 1.0, 3.0))
    with pytest.raises(ValueError):
        gen_nonlinear_manifolds("concentric_circles", {"radii": [1, 1]})


def test_polynomial_embedding():
    ds = gen_nonlinear_manifolds("polynomial_embedding",
                                 {"D": 8, "c": 2, "degree": 3, "n_per_cluster": 15}, seed=1)
    assert ds.X.shape == (8, 30)
    with pytest.raises(ValueError):
        gen_nonlinear_manifolds("spirals")


def test_corruption_count(rng):
    X = rng.standard_normal((10, 25))
    Y = corrupt_sparse(X, 0.1, 50.0, seed=3)
    changed = X != Y
    assert changed.sum() == round(0.1 * X.size)
    np.testing.assert_array_equal(np.abs(Y[changed]), 50.0)
    np.testing.assert_array_equal(corrupt_sparse(X, 0.0, 50.0), X)
    assert np.all(np.abs(corrupt_sparse(X, 1.0, 2.0)) == 2.0)
    np.testing.assert_array_equal(corrupt_sparse(X, 0.1, 50.0, seed=3), Y)
    with pytest.raises(ValueError):
        corrupt_sparse(X, 1.5, 1.0)


def test_corruption_rounds_half_up():
    # 0.25 * 10 = 2.5 entries rounds to 3
    assert (corrupt_sparse(np.zeros((2, 5)), 0.25, 1.0) != 0).sum() == 3


def test_stratified_split():
    labels = np.repeat([0, 1, 2], 10)
    tr, te = stratified_split(labels, 6, 3, seed=0)
    assert len(np.intersect1d(tr, te)) == 0
    np.testing.assert_array_equal(np.bincount(labels[tr]), [6, 6, 6])
    np.testing.assert_array_equal(np.bincount(labels[te]), [3, 3, 3])
    tr2, te2 = stratified_split(labels, 6, 3, seed=0)
    np.testing.assert_array_equal(tr, tr2)
