"""Monotone single-index regression via a shape-constrained Bernstein expansion.

The regression function on the index t = x~^T alpha in [-1, 1] is a linear
combination of rescaled Bernstein polynomials; writing the coefficient vector
as cumulative sums theta = A psi turns "f nondecreasing" into the cone
psi_1, ..., psi_M >= 0 with psi_0 free.  The fitter alternates (1) psi from
its constrained Gaussian conditional, drawn either through the smoothed-target
blocked Gibbs kernel (a few warm-started inner sweeps, an approximate-kernel
choice) or through the exact coordinatewise hard sampler at desk scale,
(2) sigma^2 from its inverse-Gamma conditional, and (3) a random-walk
Metropolis step on the unnormalized index direction beta with alpha =
beta / ||beta||.

The beta step uses the naive acceptance ratio on beta space even though the
unit-norm map is non-injective; magnitude information enters only through the
standard Gaussian prior on beta.
"""

from __future__ import annotations

import math
import time

import numpy as np
from scipy.special import comb

from .chain import ChainSpec
from .constraints import ConstraintSet
from .covariance import DenseCov
from .distribution import SoftTmvnParams
from .gibbs import ChainState, PseudoLogistic, _SweepCache, gibbs_step
from .reference import HardTmvn, gibbs_tmvn

__all__ = [
    "bernstein_basis",
    "transformed_basis",
    "cumsum_matrix",
    "msim_constraints",
    "psi_conditional",
    "MsimData",
    "MsimConfig",
    "MsimState",
    "MsimFit",
    "gen_msim_data",
    "msim_gibbs_sweep",
    "run_msim",
    "msim_predict",
    "monotonicity_violation_fraction",
]


def bernstein_basis(M, u):
    """Bernstein basis row(s) of degree M at u in [0, 1].

    Scalar u gives an (M+1,) vector; an array of n points gives (n, M+1).
    Rows sum to 1.
    """
    M = int(M)
    if M < 1:
        raise ValueError("degree M must be at least 1")
    u_arr = np.atleast_1d(np.asarray(u, dtype=float))
    if np.any((u_arr < 0.0) | (u_arr > 1.0)):
        raise ValueError("u must lie in [0, 1]")
    j = np.arange(M + 1)
    w = comb(M, j)
    out = w * (u_arr[:, None] ** j) * ((1.0 - u_arr[:, None]) ** (M - j))
    if np.isscalar(u) or np.asarray(u).ndim == 0:
        return out[0]
    return out


def transformed_basis(M, t):
    """Rescaled basis on [-1, 1]: half the Bernstein row at (t + 1) / 2.

    Equals the Beta(j+1, M-j+1) density at (t+1)/2 divided by 2(M+1); rows sum
    to 1/2, the Jacobian of the interval change of variables.
    """
    t_arr = np.asarray(t, dtype=float)
    if np.any((t_arr < -1.0) | (t_arr > 1.0)):
        raise ValueError("t must lie in [-1, 1]")
    return 0.5 * bernstein_basis(M, (t_arr + 1.0) / 2.0)


def cumsum_matrix(M):
    """(M+1) x (M+1) unit lower-triangular all-ones matrix: A psi = partial sums."""
    return np.tril(np.ones((int(M) + 1, int(M) + 1)))


def msim_constraints(M):
    """psi_1..psi_M >= 0 with psi_0 unconstrained, in dimension M + 1."""
    M = int(M)
    return ConstraintSet.axis_aligned(M + 1, np.arange(1, M + 1), np.ones(M, dtype=int))


class MsimData:
    """Covariates with their pooled scaling: x~ = x / c keeps |x~^T alpha| <= 1."""

    def __init__(self, x, y, c):
        x = np.array(x, dtype=float)
        y = np.array(y, dtype=float).ravel()
        if x.ndim != 2 or x.shape[0] != y.size:
            raise ValueError("x must be (n, p) with one response per row")
        if not c > 0:
            raise ValueError("scaling c must be positive")
        self.x = x
        self.y = y
        self.c = float(c)
        self.x_tilde = x / self.c
        for a in (self.x, self.y, self.x_tilde):
            a.setflags(write=False)

    @property
    def n(self):
        return self.x.shape[0]

    @property
    def p(self):
        return self.x.shape[1]


class MsimConfig:
    """Fitter knobs; defaults follow the full-scale experiment settings."""

    def __init__(self, M=20, prior="soft", eta=500.0, burn_in=1000, thin=100,
                 n_samples=1000, inner_soft=5, inner_hard=25, proposal_sd=0.01,
                 prior_var=25.0, seed=0):
        if prior not in ("soft", "hard"):
            raise ValueError("prior must be 'soft' or 'hard'")
        if not eta > 0 or not proposal_sd > 0 or not prior_var > 0:
            raise ValueError("eta, proposal_sd, prior_var must be positive")
        if inner_soft < 1 or inner_hard < 1:
            raise ValueError("inner iteration counts must be at least 1")
        self.M = int(M)
        self.prior = prior
        self.eta = float(eta)
        self.burn_in = int(burn_in)
        self.thin = int(thin)
        self.n_samples = int(n_samples)
        self.inner_soft = int(inner_soft)
        self.inner_hard = int(inner_hard)
        self.proposal_sd = float(proposal_sd)
        self.prior_var = float(prior_var)
        self.seed = int(seed)


class MsimState:
    """Current (psi, beta, alpha, sigma2)."""

    def __init__(self, psi, beta, sigma2):
        self.psi = np.asarray(psi, dtype=float)
        self.beta = np.asarray(beta, dtype=float)
        nrm = np.linalg.norm(self.beta)
        if nrm == 0:
            raise ValueError("beta must be nonzero")
        self.alpha = self.beta / nrm
        if not sigma2 > 0:
            raise ValueError("sigma2 must be positive")
        self.sigma2 = float(sigma2)


class MsimFit:
    """Retained draws plus acceptance and timing bookkeeping."""

    def __init__(self, psi_draws, beta_draws, sigma2_draws, accept_rate, wall_time,
                 config, data):
        self.psi_draws = psi_draws
        self.beta_draws = beta_draws
        self.sigma2_draws = sigma2_draws
        nrm = np.linalg.norm(beta_draws, axis=1, keepdims=True)
        self.alpha_draws = beta_draws / nrm
        self.accept_rate = float(accept_rate)
        self.wall_time = float(wall_time)
        self.config = config
        self.data = data

    @property
    def theta_draws(self):
        a = cumsum_matrix(self.psi_draws.shape[1] - 1)
        return self.psi_draws @ a.T


def _theta_pattern(M):
    # step pattern at degree 20, resampled by rounded index for other degrees
    base = np.array([-1.0] * 6 + [-0.5] + [0.0] * 7 + [0.5] + [1.0] * 6)
    if M == 20:
        return base.copy()
    idx = np.round(np.arange(M + 1) * 20.0 / M).astype(int)
    return base[idx]


def gen_msim_data(n=800, p=5, M=20, seed=0, n_test=200, sigma0=0.1):
    """Synthetic data with a nondecreasing step-like truth.

    The scaling c is the max covariate norm pooled over train and test rows, so
    held-out indices also stay inside [-1, 1] without clipping.  Returns the
    training MsimData and a dict with the truth and the held-out set (noiseless
    regression values included; the observation noise floor sigma0^2 would
    otherwise dominate desk-scale prediction error comparisons).
    """
    rng = np.random.default_rng(seed)
    theta0 = _theta_pattern(int(M))
    beta0 = rng.standard_normal(int(p))
    alpha0 = beta0 / np.linalg.norm(beta0)
    x_all = rng.standard_normal((int(n) + int(n_test), int(p)))
    c = float(np.max(np.linalg.norm(x_all, axis=1)))
    t_all = (x_all / c) @ alpha0
    f_all = transformed_basis(int(M), t_all) @ theta0
    noise = rng.standard_normal(int(n) + int(n_test)) * sigma0
    y_all = f_all + noise
    data = MsimData(x_all[: int(n)], y_all[: int(n)], c)
    truth = {
        "theta0": theta0,
        "alpha0": alpha0,
        "sigma0": float(sigma0),
        "x_test": x_all[int(n):],
        "y_test": y_all[int(n):],
        "f_test": f_all[int(n):],
        "f_train": f_all[: int(n)],
    }
    return data, truth


def _design(data, alpha, M):
    t = np.clip(data.x_tilde @ alpha, -1.0, 1.0)
    return transformed_basis(M, t) @ cumsum_matrix(M)


def psi_conditional(data, alpha, sigma2, M, prior="soft", eta=500.0, prior_var=25.0):
    """Constrained-Gaussian conditional for psi given the index and noise scale.

    Posterior covariance (D^T D / sigma2 + I / prior_var)^{-1} and matching
    mean; returned as a smoothed-target parameter bundle for prior='soft' or a
    hard spec for prior='hard'.
    """
    d_mat = _design(data, alpha, M)
    prec = d_mat.T @ d_mat / sigma2 + np.eye(M + 1) / prior_var
    sig = np.linalg.inv(prec)
    sig = 0.5 * (sig + sig.T)
    mu = sig @ (d_mat.T @ data.y) / sigma2
    cons = msim_constraints(M)
    if prior == "soft":
        return SoftTmvnParams(mu, DenseCov(sig), cons, eta)
    if prior == "hard":
        return HardTmvn(mu, DenseCov(sig), cons)
    raise ValueError("prior must be 'soft' or 'hard'")


def _loglik(data, y_hat, sigma2):
    resid = data.y - y_hat
    return -0.5 * float(resid @ resid) / sigma2


def msim_gibbs_sweep(state, data, config, rng):
    """One outer sweep; returns (new state, beta step accepted?)."""
    M = config.M
    # (1) psi | alpha, sigma2
    target = psi_conditional(
        data, state.alpha, state.sigma2, M,
        prior=config.prior, eta=config.eta, prior_var=config.prior_var,
    )
    if config.prior == "soft":
        pl = PseudoLogistic(target.constraints, target.eta)
        cache = _SweepCache(target, pl)
        inner = ChainState(state.psi, np.ones(pl.r), 0)
        for _ in range(config.inner_soft):
            inner = gibbs_step(target, pl, inner, rng, cache=cache)
        psi = inner.theta
    else:
        spec = ChainSpec(
            burn_in=config.inner_hard - 1, thin=1, n_samples=1,
            seed=int(rng.integers(2**63)), init=np.maximum(state.psi, 0.0),
        )
        psi = gibbs_tmvn(target.mu, target.sigma, target.constraints, spec).draws[-1]
    # (2) sigma2 | psi, alpha  (inverse-Gamma with prior shape 2.1, rate 1.1)
    d_mat = _design(data, state.alpha, M)
    resid = data.y - d_mat @ psi
    shape = 2.1 + 0.5 * data.n
    rate = 1.1 + 0.5 * float(resid @ resid)
    sigma2 = rate / rng.gamma(shape)
    # (3) beta | psi, sigma2 via random-walk Metropolis on beta space
    beta_prop = state.beta + config.proposal_sd * rng.standard_normal(data.p)
    accepted = False
    nrm = np.linalg.norm(beta_prop)
    if nrm > 0:
        alpha_prop = beta_prop / nrm
        theta = cumsum_matrix(M) @ psi
        t_cur = np.clip(data.x_tilde @ state.alpha, -1.0, 1.0)
        t_prop = np.clip(data.x_tilde @ alpha_prop, -1.0, 1.0)
        ll_cur = _loglik(data, transformed_basis(M, t_cur) @ theta, sigma2)
        ll_prop = _loglik(data, transformed_basis(M, t_prop) @ theta, sigma2)
        log_ratio = (
            ll_prop - ll_cur
            - 0.5 * (float(beta_prop @ beta_prop) - float(state.beta @ state.beta))
        )
        if math.log(rng.random()) < log_ratio:
            accepted = True
    new_beta = beta_prop if accepted else state.beta
    new = MsimState(psi, new_beta, sigma2)
    return new, accepted


def _init_state(data, config, rng):
    # least-squares index direction; fallback to e_1 for degenerate designs
    beta_ls, *_ = np.linalg.lstsq(data.x, data.y, rcond=None)
    nrm = np.linalg.norm(beta_ls)
    if nrm == 0 or not np.all(np.isfinite(beta_ls)):
        beta_ls = np.zeros(data.p)
        beta_ls[0] = 1.0
        nrm = 1.0
    beta = beta_ls / nrm
    sigma2 = max(float(np.var(data.y)), 1e-4)
    psi = np.zeros(config.M + 1)
    return MsimState(psi, beta, sigma2)


def run_msim(data, config):
    """Full fit: burn-in plus thinned retention per the config."""
    rng = np.random.default_rng(config.seed)
    state = _init_state(data, config, rng)
    n_keep = config.n_samples
    psi_draws = np.empty((n_keep, config.M + 1))
    beta_draws = np.empty((n_keep, data.p))
    sigma2_draws = np.empty(n_keep)
    total = config.burn_in + config.thin * n_keep
    accepted = 0
    kept = 0
    t0 = time.perf_counter()
    for i in range(1, total + 1):
        state, acc = msim_gibbs_sweep(state, data, config, rng)
        accepted += int(acc)
        if i > config.burn_in and (i - config.burn_in) % config.thin == 0:
            psi_draws[kept] = state.psi
            beta_draws[kept] = state.beta
            sigma2_draws[kept] = state.sigma2
            kept += 1
    wall = time.perf_counter() - t0
    return MsimFit(psi_draws, beta_draws, sigma2_draws, accepted / total, wall, config, data)


def msim_predict(fit, x_new, y_new=None):
    """Posterior predictive mean of the regression function at new covariates.

    Averages the fitted function over retained draws.  With y_new given, also
    returns the mean squared error against it.
    """
    x_new = np.asarray(x_new, dtype=float)
    if x_new.ndim != 2 or x_new.shape[1] != fit.data.p:
        raise ValueError(f"x_new must be (m, {fit.data.p})")
    m = fit.config.M
    t_all = np.clip((x_new / fit.data.c) @ fit.alpha_draws.T, -1.0, 1.0)
    preds = np.zeros(x_new.shape[0])
    theta_draws = fit.theta_draws
    for s in range(fit.psi_draws.shape[0]):
        preds += transformed_basis(m, t_all[:, s]) @ theta_draws[s]
    preds /= fit.psi_draws.shape[0]
    if y_new is None:
        return preds
    y_new = np.asarray(y_new, dtype=float).ravel()
    mse = float(np.mean((preds - y_new) ** 2))
    return preds, mse


def monotonicity_violation_fraction(fit, grid_size=101):
    """Fraction of retained draws whose fitted function decreases on a grid."""
    grid = np.linspace(-1.0, 1.0, grid_size)
    basis = transformed_basis(fit.config.M, grid)
    vals = basis @ fit.theta_draws.T
    diffs = np.diff(vals, axis=0)
    return float(np.mean(np.any(diffs < -1e-12, axis=0)))
