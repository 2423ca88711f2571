import numpy as np
import pytest

from softmvn import (ConstraintSet, bernstein_basis, cumsum_matrix, gen_msim_data,
                     msim_constraints, transformed_basis)
from softmvn.distribution import SoftTmvnParams
from softmvn.msim import (MsimConfig, MsimData, MsimFit, _theta_pattern,
                          monotonicity_violation_fraction, msim_predict,
                          psi_conditional, run_msim)
from softmvn.reference import HardTmvn


def test_bernstein_rows_sum_to_one():
    u = np.linspace(0.0, 1.0, 23)
    b = bernstein_basis(6, u)
    assert b.shape == (23, 7)
    assert np.allclose(b.sum(axis=1), 1.0, atol=1e-12)
    assert np.all(b >= 0)


def test_bernstein_endpoints_and_midpoint():
    b0 = bernstein_basis(4, 0.0)
    b1 = bernstein_basis(4, 1.0)
    assert b0[0] == 1.0 and np.allclose(b0[1:], 0.0)
    assert b1[-1] == 1.0 and np.allclose(b1[:-1], 0.0)
    # M=2 at u=1/2: binomial(2,k) / 4
    assert np.allclose(bernstein_basis(2, 0.5), [0.25, 0.5, 0.25])


def test_bernstein_rejects_outside_unit_interval():
    with pytest.raises(ValueError):
        bernstein_basis(3, np.array([-0.01]))
    with pytest.raises(ValueError):
        bernstein_basis(3, 1.01)


def test_transformed_basis_halves_mass_on_pm_one():
    t = np.linspace(-1.0, 1.0, 11)
    bt = transformed_basis(5, t)
    assert np.allclose(bt.sum(axis=1), 0.5, atol=1e-12)
    assert np.allclose(bt, 0.5 * bernstein_basis(5, (t + 1) / 2))


def test_cumsum_matrix_inverse_is_first_difference():
    a = cumsum_matrix(6)
    assert a.shape == (7, 7)
    inv = np.linalg.inv(a)
    expected = np.eye(7) - np.eye(7, k=-1)
    assert np.allclose(inv, expected)


def test_msim_constraints_cover_increments():
    c = msim_constraints(8)
    assert c.d == 9 and c.r == 8
    assert np.all(c.signs == 1)
    # increments psi_1..psi_M constrained positive, offset psi_0 free
    assert np.allclose(c.directions, np.eye(9)[1:])


def test_theta_pattern_monotone():
    for m in (5, 10, 20, 37):
        th = _theta_pattern(m)
        assert th.shape == (m + 1,)
        assert np.all(np.diff(th) >= -1e-12)
        assert th[0] == -1.0 and th[-1] == 1.0


def test_gen_msim_data_shapes_and_scaling():
    data, truth = gen_msim_data(100, 4, 10, seed=0, n_test=30, sigma0=0.1)
    assert data.x.shape == (100, 4)
    assert data.y.shape == (100,)
    assert truth["x_test"].shape == (30, 4)
    assert truth["f_test"].shape == (30,)
    assert np.linalg.norm(truth["alpha0"]) == pytest.approx(1.0, rel=1e-12)
    # pooled scale: train and test indices both land in [-1, 1]
    assert np.max(np.abs(data.x_tilde @ truth["alpha0"])) <= 1.0 + 1e-12
    assert np.max(np.abs(truth["x_test"] / data.c @ truth["alpha0"])) <= 1.0 + 1e-12


def test_gen_msim_data_noise_level():
    data, truth = gen_msim_data(3000, 3, 10, seed=1, n_test=10, sigma0=0.25)
    resid = data.y - truth["f_train"]
    assert abs(resid.std() - 0.25) < 0.02


def test_psi_conditional_soft_matches_ridge_posterior():
    # the conditional is a Bayesian linear regression in increment space with
    # soft sign smoothing; against a dense textbook computation its Gaussian
    # part (mu, Sigma) must agree to near machine precision
    data, _ = gen_msim_data(50, 2, 6, seed=2, n_test=10, sigma0=0.1)
    alpha = np.array([0.6, 0.8])
    p = psi_conditional(data, alpha, 0.04, 6, "soft", 500.0, 25.0)
    assert isinstance(p, SoftTmvnParams)
    u = data.x_tilde @ alpha
    d_mat = transformed_basis(6, u) @ cumsum_matrix(6)
    prec = d_mat.T @ d_mat / 0.04 + np.eye(7) / 25.0
    cov = np.linalg.inv(prec)
    mean = cov @ (d_mat.T @ data.y / 0.04)
    assert np.allclose(p.sigma.dense(), cov, rtol=1e-9, atol=1e-12)
    assert np.allclose(p.mu, mean, rtol=1e-8, atol=1e-10)
    assert p.eta == 500.0


def test_psi_conditional_hard_variant():
    data, _ = gen_msim_data(50, 2, 6, seed=2, n_test=10, sigma0=0.1)
    p = psi_conditional(data, np.array([1.0, 0.0]), 0.04, 6, "hard", 500.0, 25.0)
    assert isinstance(p, HardTmvn)
    assert p.constraints.r == 6


def test_run_msim_smoke_and_fit_quality():
    data, truth = gen_msim_data(150, 2, 8, seed=3, n_test=50, sigma0=0.05)
    cfg = MsimConfig(M=8, prior="soft", eta=300, burn_in=200, thin=5, n_samples=150,
                     proposal_sd=0.15, seed=11)
    fit = run_msim(data, cfg)
    assert fit.psi_draws.shape == (150, 9)
    assert fit.alpha_draws.shape == (150, 2)
    assert np.allclose(np.linalg.norm(fit.alpha_draws, axis=1), 1.0, atol=1e-10)
    assert 0.0 < fit.accept_rate < 1.0
    _, mse = msim_predict(fit, truth["x_test"], truth["f_test"])
    assert mse < 0.05
    # increments are sign-constrained softly, so violations are rare and tiny
    assert monotonicity_violation_fraction(fit) < 0.1


def test_run_msim_deterministic():
    data, _ = gen_msim_data(60, 2, 5, seed=4, n_test=10, sigma0=0.1)
    cfg = MsimConfig(M=5, prior="soft", eta=200, burn_in=20, thin=2, n_samples=30, seed=5)
    a = run_msim(data, cfg)
    b = run_msim(data, cfg)
    assert np.array_equal(a.psi_draws, b.psi_draws)
    assert np.array_equal(a.beta_draws, b.beta_draws)


def synthetic_fit(psi_draws, p=2):
    n_draws = psi_draws.shape[0]
    m = psi_draws.shape[1] - 1
    cfg = MsimConfig(M=m, seed=0)
    data = MsimData(np.full((3, p), 0.5), np.ones(3), 2.0)
    beta = np.tile(np.eye(1, p).ravel(), (n_draws, 1))
    return MsimFit(psi_draws, beta, np.full(n_draws, 0.01), 0.3, 1.0, cfg, data)


def test_msim_predict_constant_function():
    # artificial fit whose psi draws encode a flat function: prediction must
    # be that constant and the mse against it zero
    psi = np.zeros((10, 5))
    psi[:, 0] = 2.0  # theta_j = 2 for all j -> f == 2 * sum(basis) == 1.0
    fit = synthetic_fit(psi)
    x_new = np.array([[0.5, 0.0], [-1.2, 3.0]])
    pred, mse = msim_predict(fit, x_new, np.array([1.0, 1.0]))
    assert np.allclose(pred, 1.0, atol=1e-12)
    assert mse == pytest.approx(0.0, abs=1e-24)


def test_monotonicity_fraction_flags_decreasing_draws():
    good = synthetic_fit(np.array([[0.0, 0.2, 0.3, 0.1]]))
    # the -0.6 increment drags the fitted curve down near the middle
    bad = synthetic_fit(np.array([[0.0, 0.1, -0.6, 0.1]]))
    assert monotonicity_violation_fraction(good) == 0.0
    assert monotonicity_violation_fraction(bad) == 1.0
