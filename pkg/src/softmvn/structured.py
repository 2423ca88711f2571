"""Fast exact sampling from Gaussians with low-rank-plus-structured precision.

Target: N((Phi^T Phi + Sigma^{-1})^{-1} Phi^T alpha, (Phi^T Phi + Sigma^{-1})^{-1})
for an r x d matrix Phi, an r-vector alpha, and a structured covariance Sigma.
The draw is realized without ever forming the d x d posterior precision:

    u ~ N(0, Sigma);  delta ~ N(0, I_r);  v = Phi u + delta
    solve (Phi Sigma Phi^T + I_r) w = alpha - v
    draw = u + Sigma Phi^T w

Everything outside the prior draw costs O(r^2 d) plus one O(r^3) factorization,
which is what makes the blocked update viable when r << d or when Sigma has a
fast product.  The companion mean_shift computes the prior-mean correction
(Sigma^{-1}-weighted shrinkage of mu) through the same r x r system, using the
Sherman-Woodbury-Morrison identity.
"""

from __future__ import annotations

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from .covariance import CovStructure

__all__ = ["sample_posterior", "mean_shift", "posterior_covariance"]


def _check_phi(phi, cov):
    phi = np.asarray(phi, dtype=float)
    if phi.ndim != 2:
        raise ValueError("phi must be a 2-D (r x d) matrix")
    if phi.shape[1] != cov.d:
        raise ValueError(
            f"phi has {phi.shape[1]} columns but the covariance dimension is {cov.d}"
        )
    return phi


def _capacitance_factor(phi, cov):
    """Sigma Phi^T and the Cholesky factorization of Phi Sigma Phi^T + I_r."""
    sigma_phi_t = cov.matmul(phi.T)
    m = phi @ sigma_phi_t
    m[np.diag_indices_from(m)] += 1.0
    try:
        cho = cho_factor(m, lower=True)
    except np.linalg.LinAlgError as exc:
        raise ValueError(
            "r x r system is numerically singular; inputs are corrupted "
            f"(phi shape {phi.shape}): {exc}"
        ) from exc
    return sigma_phi_t, cho


def sample_posterior(phi, alpha, cov, rng, size=None):
    """Exact draw(s) from the zero-prior-mean structured posterior.

    Parameters
    ----------
    phi : (r, d) array
    alpha : (r,) array
    cov : CovStructure
        The prior covariance Sigma.
    rng : numpy.random.Generator
    size : int, optional
        Number of independent draws; None returns a single (d,) vector.

    Notes
    -----
    With r = 0 the posterior is the prior and the draw is plain N(0, Sigma).
    """
    phi = _check_phi(phi, cov)
    r = phi.shape[0]
    alpha = np.asarray(alpha, dtype=float).ravel()
    if alpha.size != r:
        raise ValueError(f"alpha has length {alpha.size}, expected {r}")
    if r == 0:
        return cov.sample(rng, size=size)
    n = 1 if size is None else int(size)
    sigma_phi_t, cho = _capacitance_factor(phi, cov)
    u = cov.sample(rng, size=n)
    delta = rng.standard_normal((n, r))
    v = u @ phi.T + delta
    w = cho_solve(cho, (alpha[None, :] - v).T)
    out = u + (sigma_phi_t @ w).T
    return out[0] if size is None else out


def mean_shift(phi, cov, mu):
    """Posterior mean offset for a nonzero prior mean mu.

    Returns mu - Sigma Phi^T (Phi Sigma Phi^T + I_r)^{-1} Phi mu, which equals
    (Phi^T Phi + Sigma^{-1})^{-1} Sigma^{-1} mu by Sherman-Woodbury-Morrison.
    Adding this to a sample_posterior draw gives the general-mean posterior.
    """
    phi = _check_phi(phi, cov)
    mu = np.asarray(mu, dtype=float).ravel()
    if mu.size != cov.d:
        raise ValueError(f"mu has length {mu.size}, expected {cov.d}")
    if phi.shape[0] == 0:
        return mu.copy()
    sigma_phi_t, cho = _capacitance_factor(phi, cov)
    return mu - sigma_phi_t @ cho_solve(cho, phi @ mu)


def posterior_covariance(phi, cov):
    """Dense (Phi^T Phi + Sigma^{-1})^{-1} via the same r x r solve.

    Computed as Sigma - Sigma Phi^T (Phi Sigma Phi^T + I_r)^{-1} Phi Sigma.
    Materializes a d x d matrix; desk-scale oracle use only.
    """
    phi = _check_phi(phi, cov)
    if phi.shape[0] == 0:
        return cov.dense()
    sigma_phi_t, cho = _capacitance_factor(phi, cov)
    return cov.dense() - sigma_phi_t @ cho_solve(cho, sigma_phi_t.T)
