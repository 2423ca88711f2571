import numpy as np
import pytest

from softmvn import DenseCov, DiagonalCov, mean_shift, posterior_covariance, sample_posterior


def random_spd(d, rng):
    a = rng.standard_normal((d, d))
    return a @ a.T + d * np.eye(d)


def dense_posterior(phi, sigma, alpha):
    # textbook route: invert (Phi^T Phi + Sigma^{-1}) directly
    prec = phi.T @ phi + np.linalg.inv(sigma)
    cov = np.linalg.inv(prec)
    mean = cov @ phi.T @ alpha
    return mean, cov


def test_identities_on_random_instances():
    rng = np.random.default_rng(0)
    for _ in range(200):
        d = rng.integers(1, 7)
        r = rng.integers(1, 4)
        sigma = random_spd(d, rng)
        phi = rng.standard_normal((r, d))
        mu = rng.standard_normal(d)
        alpha = rng.standard_normal(r)
        _, cov_direct = dense_posterior(phi, sigma, alpha)
        cov_impl = posterior_covariance(phi, DenseCov(sigma))
        assert np.allclose(cov_impl, cov_direct, rtol=1e-9, atol=1e-12)
        # mean_shift is the posterior-covariance-weighted pullback of mu
        shift_direct = cov_direct @ np.linalg.solve(sigma, mu)
        shift_impl = mean_shift(phi, DenseCov(sigma), mu)
        assert np.allclose(shift_impl, shift_direct, rtol=1e-9, atol=1e-12)


def test_sample_moments_match_dense_oracle():
    rng = np.random.default_rng(1)
    d, r = 4, 2
    sigma = random_spd(d, rng)
    phi = rng.standard_normal((r, d))
    alpha = rng.standard_normal(r)
    mean, cov = dense_posterior(phi, sigma, alpha)
    draws = sample_posterior(phi, alpha, DenseCov(sigma), rng, size=200000)
    se = np.sqrt(np.diag(cov) / draws.shape[0])
    assert np.all(np.abs(draws.mean(axis=0) - mean) < 4 * se)
    assert np.allclose(np.cov(draws.T), cov, atol=4 * np.abs(cov).max() / np.sqrt(200000) * 3)


def test_single_draw_shape_and_determinism():
    rng1 = np.random.default_rng(2)
    rng2 = np.random.default_rng(2)
    cov = DiagonalCov(np.ones(5))
    phi = np.ones((1, 5))
    a = sample_posterior(phi, np.array([1.0]), cov, rng1)
    b = sample_posterior(phi, np.array([1.0]), cov, rng2)
    assert a.shape == (5,)
    assert np.array_equal(a, b)


def test_no_constraints_reduces_to_prior():
    rng = np.random.default_rng(3)
    cov = DiagonalCov(np.array([2.0, 3.0]))
    draws = sample_posterior(np.zeros((0, 2)), np.zeros(0), cov, rng, size=100000)
    assert np.allclose(draws.var(axis=0), [2.0, 3.0], rtol=0.05)


def test_rejects_dimension_mismatch():
    cov = DiagonalCov(np.ones(3))
    with pytest.raises(ValueError):
        sample_posterior(np.ones((1, 2)), np.ones(1), cov, np.random.default_rng(0))
    with pytest.raises(ValueError):
        sample_posterior(np.ones((2, 3)), np.ones(1), cov, np.random.default_rng(0))


def test_mean_shift_diagonal_closed_form():
    # d=1, r=1, phi=[c], sigma=[s]: shift = mu/(1 + c^2 s)
    c, s, mu = 2.0, 0.5, 3.0
    out = mean_shift(np.array([[c]]), DiagonalCov(np.array([s])), np.array([mu]))
    assert out[0] == pytest.approx(mu / (1 + c * c * s), rel=1e-12)
