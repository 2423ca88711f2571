"""The smoothed constrained Gaussian target and its derivatives.

A target is a Gaussian N(mu, Sigma) whose density is multiplied by one scaled
sigmoid per signed linear constraint.  The result is log-concave and supported
on all of R^d; as the sharpness parameter grows it converges to the Gaussian
restricted to the constraint cone.  This module holds the parameter bundle and
the unnormalized log density with its analytic gradient and Hessian.
"""

from __future__ import annotations

import numpy as np
from scipy.special import expit

from .constraints import ConstraintSet, log_soft_indicator
from .covariance import CovStructure

__all__ = [
    "SoftTmvnParams",
    "log_density_unnorm",
    "grad_neg_log_density",
    "hessian_neg_log_density",
]


class SoftTmvnParams:
    """Immutable bundle (mu, Sigma structure, constraints, sharpness eta)."""

    def __init__(self, mu, sigma, constraints, eta):
        mu = np.array(mu, dtype=float).ravel()
        if not isinstance(sigma, CovStructure):
            raise TypeError("sigma must be a CovStructure")
        if not isinstance(constraints, ConstraintSet):
            raise TypeError("constraints must be a ConstraintSet")
        if mu.size != sigma.d:
            raise ValueError(f"mu has length {mu.size}, covariance dimension is {sigma.d}")
        if constraints.d != mu.size:
            raise ValueError(
                f"constraints live in dimension {constraints.d}, mu has length {mu.size}"
            )
        if not (eta > 0):
            raise ValueError("eta must be positive")
        mu.setflags(write=False)
        self._mu = mu
        self._sigma = sigma
        self._constraints = constraints
        self._eta = float(eta)

    @property
    def mu(self):
        return self._mu

    @property
    def sigma(self):
        return self._sigma

    @property
    def constraints(self):
        return self._constraints

    @property
    def eta(self):
        return self._eta

    @property
    def d(self):
        return self._mu.size


def _check_theta(p, theta):
    theta = np.asarray(theta, dtype=float).ravel()
    if theta.size != p.d:
        raise ValueError(f"theta has length {theta.size}, expected {p.d}")
    return theta


def log_density_unnorm(p, theta):
    """-(theta-mu)^T Sigma^{-1} (theta-mu)/2 plus the log soft indicator."""
    theta = _check_theta(p, theta)
    dev = theta - p.mu
    quad = float(dev @ p.sigma.solve(dev))
    return -0.5 * quad + log_soft_indicator(p.constraints, theta, p.eta)


def grad_neg_log_density(p, theta):
    """Gradient of the negative log density (analytic)."""
    theta = _check_theta(p, theta)
    grad = p.sigma.solve(theta - p.mu)
    c = p.constraints
    if c.r:
        z = c.signs * (c.directions @ theta)
        coef = p.eta * c.signs * expit(-p.eta * z)
        grad = grad - c.directions.T @ coef
    return grad


def hessian_neg_log_density(p, theta):
    """Hessian of the negative log density; positive definite everywhere."""
    theta = _check_theta(p, theta)
    hess = p.sigma.solve(np.eye(p.d))
    c = p.constraints
    if c.r:
        # sigmoid curvature term is sign-free: sigma'(x) = sigma'(-x)
        z = c.directions @ theta
        s = expit(p.eta * z)
        coef = p.eta * p.eta * s * (1.0 - s)
        hess = hess + c.directions.T @ (coef[:, None] * c.directions)
    return 0.5 * (hess + hess.T)
