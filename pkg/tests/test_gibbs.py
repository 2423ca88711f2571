import numpy as np
import pytest

from softmvn import (ChainSpec, ChainState, ConstraintSet, DenseCov, DiagonalCov,
                     PseudoLogistic, SoftTmvnParams, gibbs_step, pg1_mean, run_chain,
                     run_lmc)
from softmvn.reference import quadrature_moments


def bivariate_params(rho, eta):
    sigma = np.array([[1.0, rho], [rho, 1.0]])
    return SoftTmvnParams(np.zeros(2), DenseCov(sigma), ConstraintSet.orthant([1, 1]), eta)


def test_pseudo_logistic_layout():
    cons = ConstraintSet([1, -1], np.array([[1.0, 0.0], [0.5, 0.5]]))
    pl = PseudoLogistic(cons, 10.0)
    assert pl.r == 2 and pl.d == 2
    # sign enters the offset, not the regressor rows
    assert np.allclose(pl.W, 10.0 * cons.directions)
    assert np.array_equal(pl.kappa, [0.5, -0.5])


def test_chain_state_validation():
    with pytest.raises(ValueError):
        ChainState(np.zeros(2), np.array([1.0, -1.0]), 0)


def test_run_chain_deterministic():
    p = bivariate_params(0.5, 50.0)
    spec = ChainSpec(50, 2, 100, seed=9)
    a = run_chain(p, spec)
    b = run_chain(p, spec)
    assert np.array_equal(a.draws, b.draws)
    assert a.extras["sampler"] == "soft-gibbs"


def test_run_chain_retention_schedule():
    p = bivariate_params(0.5, 50.0)
    b = run_chain(p, ChainSpec(3, 2, 4, seed=1))
    assert np.array_equal(b.iterations, [5, 7, 9, 11])


def test_unconstrained_chain_is_exact_gaussian():
    sigma = np.array([[2.0, 0.8], [0.8, 1.0]])
    p = SoftTmvnParams(np.array([1.0, -1.0]), DenseCov(sigma),
                       ConstraintSet.empty(2), 100.0)
    b = run_chain(p, ChainSpec(0, 1, 100000, seed=2))
    assert np.allclose(b.draws.mean(axis=0), [1.0, -1.0], atol=0.02)
    assert np.allclose(np.cov(b.draws.T), sigma, atol=0.04)


def test_chain_matches_quadrature_eta10():
    # fast-mixing regime: moments vs independent tensor quadrature
    p = bivariate_params(0.5, 10.0)
    mean_q, _ = quadrature_moments(p)
    b = run_chain(p, ChainSpec(500, 2, 30000, seed=3))
    from softmvn import ess
    for j in range(2):
        x = b.draws[:, j]
        se = x.std(ddof=1) / np.sqrt(ess(x))
        assert abs(x.mean() - mean_q[j]) < 5 * se


def test_gibbs_step_conditional_given_omega():
    # with omega frozen, the theta block must follow the explicit dense
    # conditional N((W'OW + S^-1)^-1 (W'k + S^-1 mu), (W'OW + S^-1)^-1)
    p = bivariate_params(0.3, 20.0)
    pl = PseudoLogistic(p.constraints, p.eta)
    omega = np.array([0.3, 0.07])
    prec = pl.W.T @ np.diag(omega) @ pl.W + np.linalg.inv(p.sigma.dense())
    cov = np.linalg.inv(prec)
    mean = cov @ (pl.W.T @ pl.kappa + np.linalg.solve(p.sigma.dense(), p.mu))
    # drive gibbs_step many times from the same omega state; each call resamples
    # omega first, so instead replicate its theta update via the public pieces:
    from softmvn.structured import sample_posterior
    rng = np.random.default_rng(4)
    s = np.sqrt(omega)
    phi = s[:, None] * pl.W
    alpha = pl.kappa / s - s * (pl.W @ p.mu)
    draws = p.mu + sample_posterior(phi, alpha, p.sigma, rng, size=200000)
    se = np.sqrt(np.diag(cov) / draws.shape[0])
    assert np.all(np.abs(draws.mean(axis=0) - mean) < 4 * se)
    assert np.allclose(np.cov(draws.T), cov, atol=0.01)


def test_gibbs_step_advances_iteration_counter():
    p = bivariate_params(0.5, 10.0)
    pl = PseudoLogistic(p.constraints, p.eta)
    rng = np.random.default_rng(5)
    st = ChainState(np.ones(2), np.full(2, 0.1), 0)
    st2 = gibbs_step(p, pl, st, rng)
    assert st2.iteration == 1
    assert st2.omega.shape == (2,)
    assert np.all(st2.omega > 0)


def test_omega_tracks_conditional_mean():
    # long chain: E[omega_i | tilt] should average pg1_mean(tilt) over draws
    p = bivariate_params(0.5, 10.0)
    pl = PseudoLogistic(p.constraints, p.eta)
    rng = np.random.default_rng(6)
    st = ChainState(np.ones(2), np.full(2, 0.25), 0)
    omegas, tilts = [], []
    for _ in range(20000):
        st = gibbs_step(p, pl, st, rng)
        omegas.append(st.omega.copy())
        tilts.append(pl.W @ st.theta)
    omegas = np.array(omegas)
    expected = pg1_mean(np.array(tilts))
    assert abs(omegas.mean() - expected.mean()) < 0.01


def test_no_constraint_step_draws_prior():
    p = SoftTmvnParams(np.zeros(2), DiagonalCov(np.ones(2)),
                       ConstraintSet.empty(2), 10.0)
    b = run_chain(p, ChainSpec(0, 1, 50000, seed=7))
    assert np.allclose(b.draws.var(axis=0), 1.0, rtol=0.05)


def test_lmc_tracks_target_loosely():
    # biased baseline: small-step unadjusted Langevin should land near the
    # soft target's mean at desk scale
    p = bivariate_params(0.5, 10.0)
    mean_q, _ = quadrature_moments(p)
    b = run_lmc(p, ChainSpec(2000, 5, 20000, seed=8), step_size=5e-3)
    assert np.allclose(b.draws.mean(axis=0), mean_q, atol=0.1)
    assert b.extras["sampler"] == "lmc"
