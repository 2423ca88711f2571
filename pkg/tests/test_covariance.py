import math
import tracemalloc

import numpy as np
import pytest
from scipy.special import kv

from softmvn import (DenseCov, DiagonalCov, KernelGramCov, ProbitBlockCov,
                     matern_kernel, sample_prior)


def random_spd(d, rng):
    a = rng.standard_normal((d, d))
    return a @ a.T + d * np.eye(d)


def test_dense_matmul_solve_round_trip():
    rng = np.random.default_rng(0)
    s = random_spd(5, rng)
    cov = DenseCov(s)
    x = rng.standard_normal(5)
    assert np.allclose(cov.matmul(x), s @ x)
    assert np.allclose(cov.solve(cov.matmul(x)), x, atol=1e-10)
    assert np.allclose(cov.dense(), s)


def test_dense_rejects_asymmetric_and_indefinite():
    with pytest.raises(ValueError):
        DenseCov(np.array([[1.0, 0.5], [0.4, 1.0]]))
    with pytest.raises(ValueError):
        DenseCov(np.array([[1.0, 2.0], [2.0, 1.0]]))  # eigenvalues 3, -1


def test_dense_sample_moments():
    rng = np.random.default_rng(1)
    s = np.array([[2.0, 0.6], [0.6, 1.0]])
    draws = DenseCov(s).sample(rng, size=200000)
    assert np.allclose(draws.mean(axis=0), 0.0, atol=0.02)
    assert np.allclose(np.cov(draws.T), s, atol=0.03)


def test_diagonal_paths():
    rng = np.random.default_rng(2)
    v = np.array([4.0, 0.25, 1.0])
    cov = DiagonalCov(v)
    x = rng.standard_normal(3)
    assert np.allclose(cov.matmul(x), v * x)
    assert np.allclose(cov.solve(x), x / v)
    assert np.allclose(cov.dense(), np.diag(v))
    draws = cov.sample(rng, size=100000)
    assert np.allclose(draws.var(axis=0), v, rtol=0.05)


def test_matern_closed_forms():
    r = np.array([0.0, 0.5, 1.3, 4.0])
    # nu = 1/2 is the exponential kernel
    assert np.allclose(matern_kernel(r, 0.5, 1.0), np.exp(-r))
    s3 = np.sqrt(3.0) * r
    assert np.allclose(matern_kernel(r, 1.5, 1.0), (1 + s3) * np.exp(-s3))
    s5 = np.sqrt(5.0) * r
    assert np.allclose(matern_kernel(r, 2.5, 1.0), (1 + s5 + s5**2 / 3) * np.exp(-s5))


def test_matern_general_nu_against_bessel():
    nu, r = 0.6, np.array([0.3, 1.0, 2.7])
    z = np.sqrt(2 * nu) * r
    expected = (2 ** (1 - nu) / math.gamma(nu)) * z**nu * kv(nu, z)
    assert np.allclose(matern_kernel(r, nu, 1.0), expected, rtol=1e-10)
    assert matern_kernel(np.array([0.0]), nu, 1.0)[0] == 1.0


def test_kernel_gram_is_spd_and_scaled():
    pts = np.linspace(0.0, 10.0, 40)
    cov = KernelGramCov(pts, nu=0.6, scale=2.0)
    w = np.linalg.eigvalsh(cov.dense())
    assert w.min() > 0
    # unit marginal variance up to the relative jitter
    assert np.allclose(np.diag(cov.dense()), 1.0, atol=1e-6)
    # scale stretches distances: larger scale, slower correlation decay
    tight = KernelGramCov(pts, nu=0.6, scale=0.5)
    assert cov.dense()[0, 5] > tight.dense()[0, 5]


def test_probit_block_dense_formula():
    rng = np.random.default_rng(3)
    n_obs, q = 4, 3
    h = rng.standard_normal((n_obs, q))
    lam = rng.uniform(0.5, 2.0, size=q)
    cov = ProbitBlockCov(h, lam)
    top_left = np.eye(n_obs) + h @ np.diag(lam) @ h.T
    top_right = h @ np.diag(lam)
    expected = np.block([[top_left, top_right],
                         [top_right.T, np.diag(lam)]])
    assert np.allclose(cov.dense(), expected, atol=1e-12)


def test_probit_block_matmul_solve_match_dense():
    rng = np.random.default_rng(4)
    h = rng.standard_normal((6, 2))
    lam = rng.uniform(0.2, 1.5, size=2)
    cov = ProbitBlockCov(h, lam)
    dense = cov.dense()
    x = rng.standard_normal(8)
    assert np.allclose(cov.matmul(x), dense @ x, atol=1e-10)
    assert np.allclose(cov.solve(x), np.linalg.solve(dense, x), atol=1e-8)


def test_probit_block_sample_moments():
    rng = np.random.default_rng(5)
    h = rng.standard_normal((3, 2))
    lam = np.array([0.5, 1.2])
    cov = ProbitBlockCov(h, lam)
    draws = cov.sample(rng, size=200000)
    assert np.allclose(np.cov(draws.T), cov.dense(), atol=0.04)


def test_probit_block_never_materializes_full_matrix():
    # sampling at N=3000, q=40 must stay O(N q) in memory; the dense
    # covariance would need (N+q)^2 floats ~ 74 MB
    rng = np.random.default_rng(6)
    h = rng.standard_normal((3000, 40))
    lam = rng.uniform(0.1, 1.0, size=40)
    cov = ProbitBlockCov(h, lam)
    tracemalloc.start()
    for _ in range(3):
        cov.sample(rng)
        cov.matmul(np.ones(3040))
        cov.solve(np.ones(3040))
    _, peak = tracemalloc.get_traced_memory()
    tracemalloc.stop()
    assert peak < 20 * 1024 * 1024


def test_sample_prior_delegates():
    rng1 = np.random.default_rng(7)
    rng2 = np.random.default_rng(7)
    cov = DiagonalCov(np.array([1.0, 2.0]))
    assert np.array_equal(sample_prior(cov, rng1), cov.sample(rng2))
