"""Seeded generators for the two probit-style experiment families.

probit-GP: binary observations of a Matern-kernel Gaussian process on the
integer sites 1..n, with a three-run sign pattern chosen by drawing the two
run boundaries uniformly; the target is the process posterior, an n-dim
constrained Gaussian with the Gram matrix as covariance and one axis-aligned
sign constraint per site.

probit-Gaussian: a latent-variable probit regression with Gaussian coefficient
prior; the joint of (latent z, coefficients beta) is Gaussian with the block
covariance [[I + X Lambda X^T, X Lambda], [Lambda X^T, Lambda]], and the
observed labels constrain the signs of the first N coordinates only.

Both generators are pure functions of their arguments; the same seed always
reproduces the same instance.
"""

from __future__ import annotations

import numpy as np

from .constraints import ConstraintSet
from .covariance import KernelGramCov, ProbitBlockCov, matern_kernel

__all__ = ["matern_kernel", "gen_probit_gp", "gen_probit_gauss"]


def gen_probit_gp(n, nu=0.6, scale=1.0, seed=0, return_meta=False):
    """Matern-GP sign-constraint instance on sites 1..n.

    The first run boundary is uniform on {10, ..., n//2}, the second on
    {n//2 + 1, ..., n - 10}; signs are +1, -1, +1 across the three runs.
    Requires n >= 21 so both ranges are nonempty.
    """
    n = int(n)
    if n < 21:
        raise ValueError("n must be at least 21 for the three-run sign pattern")
    rng = np.random.default_rng(seed)
    l1 = int(rng.integers(10, n // 2 + 1))
    l2 = int(rng.integers(n // 2 + 1, n - 10 + 1))
    sites = np.arange(1.0, n + 1.0)
    cov = KernelGramCov(sites, nu=nu, scale=scale)
    signs = np.where((np.arange(1, n + 1) > l1) & (np.arange(1, n + 1) <= l2), -1, 1)
    constraints = ConstraintSet.axis_aligned(n, np.arange(n), signs)
    if return_meta:
        return cov, constraints, {"l1": l1, "l2": l2, "sites": sites, "signs": signs}
    return cov, constraints


def gen_probit_gauss(N, P, seed=0, return_meta=False):
    """Latent probit regression instance with block covariance.

    Covariates are iid standard normal, prior coefficient variances are drawn
    from U[1/15, 1/5], labels come from the latent Gaussian's sign, and the
    resulting constraint set fixes the sign of each latent coordinate (the
    first N of the d = N + P total); coefficients are unconstrained.
    """
    N = int(N)
    P = int(P)
    if N < 1 or P < 1:
        raise ValueError("N and P must be positive")
    rng = np.random.default_rng(seed)
    x = rng.standard_normal((N, P))
    lam = rng.uniform(1.0 / 15.0, 1.0 / 5.0, size=P)
    beta = rng.standard_normal(P) * np.sqrt(lam)
    z = x @ beta + rng.standard_normal(N)
    y = (z >= 0.0).astype(int)
    signs = np.where(y == 1, 1, -1)
    cov = ProbitBlockCov(x, lam)
    constraints = ConstraintSet.axis_aligned(N + P, np.arange(N), signs)
    if return_meta:
        return cov, constraints, {"x": x, "lam": lam, "beta": beta, "z": z, "y": y}
    return cov, constraints
