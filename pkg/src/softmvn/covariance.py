"""Covariance structures with exact N(0, Sigma) sampling and fast products.

Four forms cover everything the samplers need: a dense SPD matrix, a diagonal,
the probit latent-variable block form [[I + H L H^T, H L], [L H^T, L]], and a
Matern Gram matrix over a point set.  Each structure knows how to draw from
N(0, Sigma), apply Sigma and Sigma^{-1} to vectors or matrices, and (at desk
scale) materialize itself densely for oracles.  The probit block form does all
of this in O(N q) per vector without ever forming the (N+q)^2 matrix.

Instances are immutable after construction, including any cached factorization,
so they can be shared freely across concurrently running chains.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.linalg import cho_factor, cho_solve
from scipy.special import gamma as _gamma_fn, kv as _bessel_kv

__all__ = [
    "CovStructure",
    "DenseCov",
    "DiagonalCov",
    "ProbitBlockCov",
    "KernelGramCov",
    "matern_kernel",
    "sample_prior",
]


def matern_kernel(r, nu, scale):
    """Matern correlation at distance r with smoothness nu and length scale.

    Closed forms for nu in {1/2, 3/2, 5/2}; any other positive nu goes through
    the modified Bessel function of the second kind.  Accepts scalar or array
    distances; correlation at r = 0 is exactly 1.
    """
    if nu <= 0:
        raise ValueError("smoothness nu must be positive")
    if scale <= 0:
        raise ValueError("length scale must be positive")
    r = np.asarray(r, dtype=float)
    if np.any(r < 0):
        raise ValueError("distances must be nonnegative")
    s = r / scale
    if nu == 0.5:
        out = np.exp(-s)
    elif nu == 1.5:
        t = math.sqrt(3.0) * s
        out = (1.0 + t) * np.exp(-t)
    elif nu == 2.5:
        t = math.sqrt(5.0) * s
        out = (1.0 + t + t * t / 3.0) * np.exp(-t)
    else:
        t = math.sqrt(2.0 * nu) * s
        coef = (2.0 ** (1.0 - nu)) / _gamma_fn(nu)
        with np.errstate(invalid="ignore"):
            out = coef * np.power(t, nu) * _bessel_kv(nu, t)
        out = np.where(t == 0.0, 1.0, out)
    if out.ndim == 0:
        return float(out)
    return out


class CovStructure:
    """Base interface: dimension, sampling, Sigma-products, Sigma-solves."""

    @property
    def d(self):
        raise NotImplementedError

    def sample(self, rng, size=None):
        """Draw from N(0, Sigma); shape (d,) or (size, d)."""
        raise NotImplementedError

    def matmul(self, x):
        """Sigma @ x for x of shape (d,) or (d, k)."""
        raise NotImplementedError

    def solve(self, x):
        """Sigma^{-1} @ x for x of shape (d,) or (d, k)."""
        raise NotImplementedError

    def dense(self):
        """Materialize Sigma as a (d, d) array. Desk-scale use only."""
        raise NotImplementedError


def _chol_lower(mat, what):
    try:
        c, low = cho_factor(mat, lower=True)
    except np.linalg.LinAlgError as exc:
        # scipy's message carries the offending leading minor index
        raise ValueError(f"{what} is not positive definite: {exc}") from exc
    return np.tril(c), (c, low)


class DenseCov(CovStructure):
    """Dense SPD covariance with a factorization cached at construction."""

    def __init__(self, sigma):
        sigma = np.array(sigma, dtype=float)
        if sigma.ndim != 2 or sigma.shape[0] != sigma.shape[1]:
            raise ValueError("covariance must be a square matrix")
        if not np.allclose(sigma, sigma.T, rtol=1e-10, atol=1e-12):
            raise ValueError("covariance must be symmetric")
        self._sigma = sigma
        self._lower, self._cho = _chol_lower(sigma, "covariance matrix")
        self._sigma.setflags(write=False)
        self._lower.setflags(write=False)

    @property
    def d(self):
        return self._sigma.shape[0]

    def sample(self, rng, size=None):
        n = 1 if size is None else int(size)
        z = rng.standard_normal((n, self.d))
        out = z @ self._lower.T
        return out[0] if size is None else out

    def matmul(self, x):
        return self._sigma @ np.asarray(x, dtype=float)

    def solve(self, x):
        return cho_solve(self._cho, np.asarray(x, dtype=float))

    def sqrt_matmul(self, x):
        # lower Cholesky factor times x; used by whitening-style oracles
        return self._lower @ np.asarray(x, dtype=float)

    def dense(self):
        return self._sigma.copy()


class DiagonalCov(CovStructure):
    """Diagonal covariance given by a vector of positive variances."""

    def __init__(self, variances):
        v = np.array(variances, dtype=float).ravel()
        if v.size == 0 or np.any(v <= 0):
            raise ValueError("variances must be positive")
        self._var = v
        self._sd = np.sqrt(v)
        self._var.setflags(write=False)
        self._sd.setflags(write=False)

    @property
    def d(self):
        return self._var.size

    @property
    def variances(self):
        return self._var

    def sample(self, rng, size=None):
        n = 1 if size is None else int(size)
        out = rng.standard_normal((n, self.d)) * self._sd
        return out[0] if size is None else out

    def matmul(self, x):
        x = np.asarray(x, dtype=float)
        if x.ndim == 1:
            return self._var * x
        return self._var[:, None] * x

    def solve(self, x):
        x = np.asarray(x, dtype=float)
        if x.ndim == 1:
            return x / self._var
        return x / self._var[:, None]

    def dense(self):
        return np.diag(self._var)


class ProbitBlockCov(CovStructure):
    """Block covariance [[I_N + H L H^T, H L], [L H^T, L]] with diagonal L.

    Arises as the joint covariance of (z + H u2, u2) with z ~ N(0, I_N) and
    u2 ~ N(0, L).  Sampling, products, and solves all run in O(N q) per vector;
    the dense matrix is never formed outside of dense(), which exists for
    desk-scale oracles only.
    """

    def __init__(self, h, l_diag):
        h = np.array(h, dtype=float)
        l_diag = np.array(l_diag, dtype=float).ravel()
        if h.ndim != 2:
            raise ValueError("H must be a 2-D matrix")
        if h.shape[1] != l_diag.size:
            raise ValueError("H column count must match the length of L's diagonal")
        if np.any(l_diag <= 0):
            raise ValueError("L diagonal entries must be positive")
        self._h = h
        self._l = l_diag
        self._sqrt_l = np.sqrt(l_diag)
        for a in (self._h, self._l, self._sqrt_l):
            a.setflags(write=False)

    @property
    def n_obs(self):
        return self._h.shape[0]

    @property
    def q(self):
        return self._h.shape[1]

    @property
    def d(self):
        return self._h.shape[0] + self._h.shape[1]

    def sample(self, rng, size=None):
        n = 1 if size is None else int(size)
        nn, q = self._h.shape
        z = rng.standard_normal((n, nn))
        u2 = rng.standard_normal((n, q)) * self._sqrt_l
        u1 = z + u2 @ self._h.T
        out = np.concatenate([u1, u2], axis=1)
        return out[0] if size is None else out

    def _split(self, x):
        nn = self._h.shape[0]
        return x[:nn], x[nn:]

    def matmul(self, x):
        x = np.asarray(x, dtype=float)
        x1, x2 = self._split(x)
        g = self._h.T @ x1 + x2
        g = self._l[:, None] * g if x.ndim == 2 else self._l * g
        return np.concatenate([x1 + self._h @ g, g], axis=0)

    def solve(self, x):
        # analytic inverse [[I, -H], [-H^T, L^{-1} + H^T H]]
        x = np.asarray(x, dtype=float)
        x1, x2 = self._split(x)
        top = x1 - self._h @ x2
        hx2 = self._h.T @ (self._h @ x2)
        scaled = x2 / (self._l[:, None] if x.ndim == 2 else self._l)
        bottom = scaled + hx2 - self._h.T @ x1
        return np.concatenate([top, bottom], axis=0)

    def dense(self):
        hl = self._h * self._l
        top = np.concatenate([np.eye(self.n_obs) + hl @ self._h.T, hl], axis=1)
        bottom = np.concatenate([hl.T, np.diag(self._l)], axis=1)
        return np.concatenate([top, bottom], axis=0)


class KernelGramCov(DenseCov):
    """Matern Gram matrix over a point set, jittered for conditioning.

    The jitter added to the diagonal is 1e-8 times the mean diagonal entry;
    Matern Gram matrices on regular grids are numerically near-singular
    without it.
    """

    def __init__(self, points, nu, scale):
        pts = np.array(points, dtype=float)
        if pts.ndim == 1:
            pts = pts[:, None]
        if pts.ndim != 2 or pts.shape[0] == 0:
            raise ValueError("points must be a nonempty 1-D or 2-D array")
        diff = pts[:, None, :] - pts[None, :, :]
        dist = np.sqrt(np.sum(diff * diff, axis=2))
        gram = matern_kernel(dist, nu, scale)
        gram = 0.5 * (gram + gram.T)
        gram[np.diag_indices_from(gram)] += 1e-8 * float(np.mean(np.diag(gram)))
        super().__init__(gram)
        self._points = pts
        self._points.setflags(write=False)
        self.nu = nu
        self.scale = scale

    @property
    def points(self):
        return self._points


def sample_prior(cov, rng, size=None):
    """Exact draw(s) from N(0, Sigma) for any covariance structure."""
    return cov.sample(rng, size=size)
