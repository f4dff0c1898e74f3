import numpy as np
import pytest

from minkproj import (ModelGrid, ModelVector, dematricize_2d, devectorize,
                      join, matricize_2d, split, vectorize)


def test_vectorize_first_axis_fastest():
    g = ModelGrid((2, 2))
    m = vectorize(g, [[1, 2], [3, 4]])
    assert np.array_equal(m.data, [1, 3, 2, 4])


def test_vectorize_single_cell():
    g = ModelGrid((1, 1))
    assert np.array_equal(vectorize(g, [[7]]).data, [7])


def test_vectorize_roundtrip():
    rng = np.random.default_rng(0)
    a = rng.standard_normal((3, 4))
    g = ModelGrid((3, 4))
    assert np.array_equal(devectorize(vectorize(g, a)), a)


def test_vectorize_roundtrip_3d():
    rng = np.random.default_rng(1)
    a = rng.standard_normal((3, 4, 5))
    g = ModelGrid((3, 4, 5))
    assert np.array_equal(devectorize(vectorize(g, a)), a)


def test_vectorize_shape_mismatch():
    g = ModelGrid((2, 3))
    with pytest.raises(ValueError, match="shape"):
        vectorize(g, np.zeros((3, 2)))


def test_matricize_inverse_of_vectorize():
    g = ModelGrid((2, 2))
    m = ModelVector(g, [1, 3, 2, 4])
    assert np.array_equal(matricize_2d(m), [[1, 2], [3, 4]])


def test_matricize_zero():
    g = ModelGrid((3, 2))
    assert not matricize_2d(ModelVector(g, np.zeros(6))).any()


def test_matricize_roundtrip():
    rng = np.random.default_rng(2)
    g = ModelGrid((4, 5))
    m = ModelVector(g, rng.standard_normal(20))
    assert np.array_equal(dematricize_2d(g, matricize_2d(m)).data, m.data)


def test_matricize_rejects_3d():
    g = ModelGrid((2, 2, 2))
    with pytest.raises(ValueError, match="2D"):
        matricize_2d(ModelVector(g, np.zeros(8)))


def test_split_join_identity():
    g = ModelGrid((2, 1))
    u = ModelVector(g, [1.0, 2.0])
    v = ModelVector(g, [3.0, 4.0])
    uu, vv = split(join(u, v))
    assert np.array_equal(uu.data, u.data) and np.array_equal(vv.data, v.data)
    assert np.array_equal(join(u, v).sum_of().data, [4.0, 6.0])


def test_join_grid_mismatch():
    u = ModelVector(ModelGrid((2, 1)), [1.0, 2.0])
    v = ModelVector(ModelGrid((1, 2)), [1.0, 2.0])
    with pytest.raises(ValueError, match="grid"):
        join(u, v)


def test_grid_invariants():
    with pytest.raises(ValueError):
        ModelGrid((4,))
    with pytest.raises(ValueError):
        ModelGrid((0, 3))
    g = ModelGrid((3, 4, 5))
    assert g.N == 60
    with pytest.raises(ValueError, match="entries"):
        ModelVector(g, np.zeros(59))
    with pytest.raises(ValueError, match="finite"):
        ModelVector(ModelGrid((2, 1)), [1.0, np.nan])
