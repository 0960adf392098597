import numpy as np
import pytest

import oracles
from vpc.errors import DimensionError, ParameterError
from vpc.tensor_ops import (
    avg_pool_2d,
    global_pool_2d,
    resample_2d,
    temporal_global_pool,
    temporal_max_pool,
)


def test_avg_pool_worked_example():
    x = np.arange(1, 17, dtype=np.float32).reshape(4, 4)
    out = avg_pool_2d(x, (2, 2), (2, 2), padding="valid")
    assert np.array_equal(out, np.array([[3.5, 5.5], [11.5, 13.5]], np.float32))


def test_avg_pool_constant_and_identity():
    x = np.full((3, 5, 5), 2.25, np.float32)
    assert np.array_equal(avg_pool_2d(x, (3, 3), (1, 1), "same"), x)
    rng = np.random.default_rng(1)
    y = rng.normal(size=(2, 4, 4)).astype(np.float32)
    assert np.array_equal(avg_pool_2d(y, (1, 1), (1, 1), "valid"), y)


def test_avg_pool_same_preserves_dims_and_matches_oracle():
    rng = np.random.default_rng(2)
    for trial in range(60):
        h, w = rng.integers(1, 9, 2)
        kh, kw = rng.integers(1, 4, 2)
        lead = tuple(rng.integers(1, 3, rng.integers(0, 3)))
        x = rng.normal(size=lead + (int(h), int(w)))
        got = avg_pool_2d(x, (int(kh), int(kw)), (1, 1), "same")
        assert got.shape == x.shape
        want = oracles.avg_pool_2d(x, (int(kh), int(kw)), (1, 1), "same")
        np.testing.assert_allclose(got, want, rtol=1e-6, atol=1e-7)


def test_avg_pool_valid_strided_matches_oracle():
    rng = np.random.default_rng(3)
    for trial in range(60):
        kh, kw = rng.integers(1, 4, 2)
        sh, sw = rng.integers(1, 4, 2)
        h = int(rng.integers(kh, kh + 6))
        w = int(rng.integers(kw, kw + 6))
        x = rng.normal(size=(2, h, w))
        got = avg_pool_2d(x, (int(kh), int(kw)), (int(sh), int(sw)), "valid")
        want = oracles.avg_pool_2d(x, (int(kh), int(kw)), (int(sh), int(sw)), "valid")
        assert got.shape == want.shape
        np.testing.assert_allclose(got, want, rtol=1e-6, atol=1e-7)


def test_avg_pool_rejects_bad_inputs():
    x = np.zeros((2, 2), np.float32)
    with pytest.raises(DimensionError):
        avg_pool_2d(x, (3, 3), (1, 1), "valid")
    with pytest.raises(ParameterError):
        avg_pool_2d(x, (0, 1), (1, 1), "same")
    with pytest.raises(ParameterError):
        avg_pool_2d(x, (1, 1), (1, 1), "mirror")
    with pytest.raises(DimensionError):
        avg_pool_2d(np.zeros(3), (1, 1), (1, 1), "same")


def test_avg_pool_batch_permutation_equivariance():
    rng = np.random.default_rng(4)
    x = rng.normal(size=(5, 3, 6, 6))
    perm = rng.permutation(5)
    a = avg_pool_2d(x, (3, 3), (1, 1), "same")[perm]
    b = avg_pool_2d(x[perm], (3, 3), (1, 1), "same")
    assert np.array_equal(a, b)


def test_global_pool_modes():
    x = np.array([[[1.0, 2.0], [3.0, 4.0]]], np.float32)
    assert np.array_equal(global_pool_2d(x, "avg"), np.array([2.5], np.float32))
    assert np.array_equal(global_pool_2d(x, "max"), np.array([4.0], np.float32))
    single = np.full((3, 1, 1), 7.0, np.float32)
    assert np.array_equal(global_pool_2d(single, "avg"), global_pool_2d(single, "max"))


def test_global_pool_avg_below_max():
    rng = np.random.default_rng(5)
    for _ in range(30):
        x = rng.normal(size=(4, 3, 5))
        assert (global_pool_2d(x, "avg") <= global_pool_2d(x, "max") + 1e-6).all()
    with pytest.raises(ParameterError):
        global_pool_2d(x, "median")
    with pytest.raises(DimensionError):
        global_pool_2d(np.zeros((2, 0, 3)), "avg")


def test_temporal_global_pool():
    a = np.ones((1, 2, 1, 2, 2), np.float32)
    b = 3 * np.ones((1, 2, 1, 2, 2), np.float32)
    lf = np.concatenate([a, b], axis=2)
    out = temporal_global_pool(lf, axis=2)
    assert np.array_equal(out, 2 * np.ones((1, 2, 2, 2), np.float32))
    const = np.repeat(a, 4, axis=2)
    assert np.array_equal(temporal_global_pool(const, axis=2), a[:, :, 0])
    rng = np.random.default_rng(6)
    x = rng.normal(size=(2, 3, 5, 2, 2))
    want = sum(x[:, :, t] for t in range(5)) / 5.0
    np.testing.assert_allclose(temporal_global_pool(x, axis=2), want, rtol=1e-6)
    with pytest.raises(DimensionError):
        temporal_global_pool(np.zeros((1, 2, 0, 2, 2)), axis=2)


def test_temporal_max_pool_examples():
    assert np.array_equal(temporal_max_pool(np.array([1.0, 2.0, 3.0])), [2.0, 3.0, 3.0])
    const = np.full((2, 4), 1.5)
    assert np.array_equal(temporal_max_pool(const), const)
    one = np.array([[5.0]])
    assert np.array_equal(temporal_max_pool(one), one)


def test_temporal_max_pool_dominates_and_matches_oracle():
    rng = np.random.default_rng(7)
    for _ in range(40):
        x = rng.normal(size=(3, int(rng.integers(1, 9))))
        out = temporal_max_pool(x)
        assert (out >= x).all()
        assert np.array_equal(out, oracles.temporal_max_pool(x))


def test_resample_identity_and_constant():
    rng = np.random.default_rng(8)
    x = rng.normal(size=(2, 3, 4)).astype(np.float32)
    assert np.array_equal(resample_2d(x, 3, 4), x)
    const = np.full((1, 2, 2), 3.5, np.float32)
    out = resample_2d(const, 5, 7)
    np.testing.assert_allclose(out, 3.5, rtol=0, atol=1e-6)


def test_resample_matches_oracle():
    x = np.array([[0.0, 1.0], [2.0, 3.0]])
    got = resample_2d(x, 4, 4)
    want = oracles.resample_bilinear(x, 4, 4)
    np.testing.assert_allclose(got, want, rtol=1e-6, atol=1e-7)
    rng = np.random.default_rng(9)
    for _ in range(40):
        h, w = rng.integers(1, 7, 2)
        oh, ow = rng.integers(1, 9, 2)
        y = rng.normal(size=(2, int(h), int(w)))
        np.testing.assert_allclose(
            resample_2d(y, int(oh), int(ow)),
            oracles.resample_bilinear(y, int(oh), int(ow)),
            rtol=1e-5, atol=1e-6,
        )
    with pytest.raises(ParameterError):
        resample_2d(x, 0, 4)
