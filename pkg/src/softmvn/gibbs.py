"""Samplers for the smoothed constrained Gaussian target.

The main kernel is a two-block Gibbs sweep exploiting the logistic form of the
soft constraint terms.  Reading each constraint as a pseudo logistic-regression
observation with label t_i = 1(s_i = +1) and regressor row W_i = eta * a_i,
the augmentation draw omega_i ~ PG(1, W_i^T theta) makes theta | omega exactly
Gaussian with precision W^T Omega W + Sigma^{-1}.  That Gaussian is drawn
through the structured engine with Phi = Omega^{1/2} W, alpha = Omega^{-1/2}
kappa (kappa_i = t_i - 1/2), so each sweep costs one r x r factorization plus
O(r d) products once the chain-constant pieces (Sigma W^T, W Sigma W^T, W mu)
are precomputed.

A first-order unadjusted Langevin update is included as the cheap approximate
alternative; it is biased at any finite step size and is labeled accordingly.
"""

from __future__ import annotations

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from .chain import SampleBatch
from .distribution import grad_neg_log_density
from .polya_gamma import sample_pg1

__all__ = [
    "PseudoLogistic",
    "ChainState",
    "gibbs_step",
    "run_chain",
    "lmc_step",
    "run_lmc",
]

# alpha = Omega^{-1/2} kappa floor; PG draws are strictly positive so this
# never fires in practice, but it keeps the division total
_OMEGA_FLOOR = 1e-300


class PseudoLogistic:
    """Constraints recast as logistic pseudo-data (W, t, kappa)."""

    def __init__(self, constraints, eta):
        if not (eta > 0):
            raise ValueError("eta must be positive")
        w = eta * constraints.directions
        t = (constraints.signs > 0).astype(int)
        kappa = 0.5 * constraints.signs
        for a in (w, t, kappa):
            a.setflags(write=False)
        self.W = w
        self.t = t
        self.kappa = kappa
        self.eta = float(eta)

    @property
    def r(self):
        return self.W.shape[0]

    @property
    def d(self):
        return self.W.shape[1]


class ChainState:
    """One Gibbs iterate: current theta, current omega, iteration counter."""

    def __init__(self, theta, omega, iteration):
        self.theta = np.asarray(theta, dtype=float)
        self.omega = np.asarray(omega, dtype=float)
        if np.any(self.omega <= 0):
            raise ValueError("omega entries must be positive")
        self.iteration = int(iteration)


class _SweepCache:
    """Chain-constant matrices: Sigma W^T, W Sigma W^T, W mu.

    With these precomputed a sweep only touches O(r d) products and one r x r
    factorization; recomputing Sigma W^T each sweep would cost O(d^2 r) on the
    dense path and dominate everything.
    """

    def __init__(self, p, pl):
        if pl.d != p.d:
            raise ValueError(f"pseudo-data dimension {pl.d} does not match target {p.d}")
        self.sigma_wt = p.sigma.matmul(pl.W.T)
        self.wswt = pl.W @ self.sigma_wt
        self.wmu = pl.W @ p.mu


def gibbs_step(p, pl, state, rng, cache=None):
    """One full sweep: omega | theta then theta | omega (exact block draws).

    The theta block folds the prior mean into the pseudo-observation vector:
    theta = mu + draw from the zero-mean structured posterior with
    alpha = Omega^{-1/2} kappa - Omega^{1/2} W mu, which has exactly the
    N(mu_omega, Sigma_omega) law of the sweep.
    """
    if cache is None:
        cache = _SweepCache(p, pl)
    r = pl.r
    if r == 0:
        theta = p.mu + p.sigma.sample(rng)
        return ChainState(theta, np.empty(0), state.iteration + 1)
    tilt = pl.W @ state.theta
    omega = np.array([sample_pg1(c, rng) for c in tilt])
    s = np.sqrt(np.maximum(omega, _OMEGA_FLOOR))
    alpha = pl.kappa / s - s * cache.wmu
    m = cache.wswt * np.outer(s, s)
    m[np.diag_indices_from(m)] += 1.0
    cho = cho_factor(m, lower=True)
    u = p.sigma.sample(rng)
    delta = rng.standard_normal(r)
    v = s * (pl.W @ u) + delta
    w = cho_solve(cho, alpha - v)
    theta = p.mu + u + cache.sigma_wt @ (s * w)
    return ChainState(theta, omega, state.iteration + 1)


def run_chain(p, spec):
    """Run the blocked Gibbs chain per the ChainSpec; return thinned draws."""
    rng = np.random.default_rng(spec.seed)
    pl = PseudoLogistic(p.constraints, p.eta)
    cache = _SweepCache(p, pl)
    theta0 = spec.resolve_init(p.mu, p.constraints)
    state = ChainState(theta0, np.ones(pl.r), 0)
    draws = np.empty((spec.n_samples, p.d))
    iterations = np.empty(spec.n_samples, dtype=int)
    kept = 0
    for i in range(1, spec.total_iterations + 1):
        state = gibbs_step(p, pl, state, rng, cache=cache)
        if i > spec.burn_in and (i - spec.burn_in) % spec.thin == 0:
            draws[kept] = state.theta
            iterations[kept] = i
            kept += 1
    assert kept == spec.n_samples
    return SampleBatch(draws, iterations, spec.seed, extras={"sampler": "soft-gibbs"})


def lmc_step(p, theta, h, rng):
    """Unadjusted first-order Langevin update with step size h."""
    if not (h > 0):
        raise ValueError("step size must be positive")
    theta = np.asarray(theta, dtype=float)
    grad = grad_neg_log_density(p, theta)
    return theta - h * grad + np.sqrt(2.0 * h) * rng.standard_normal(theta.size)


def run_lmc(p, spec, step_size):
    """Langevin chain runner with the same burn-in/thin/retain policy.

    Biased at finite step size; exactness criteria apply only to the Gibbs
    kernel.
    """
    rng = np.random.default_rng(spec.seed)
    theta = spec.resolve_init(p.mu, p.constraints)
    draws = np.empty((spec.n_samples, p.d))
    iterations = np.empty(spec.n_samples, dtype=int)
    kept = 0
    for i in range(1, spec.total_iterations + 1):
        theta = lmc_step(p, theta, step_size, rng)
        if i > spec.burn_in and (i - spec.burn_in) % spec.thin == 0:
            draws[kept] = theta
            iterations[kept] = i
            kept += 1
    return SampleBatch(draws, iterations, spec.seed, extras={"sampler": "lmc", "step_size": float(step_size)})
