"""Desk-scale exact machinery for the hard constrained Gaussian.

Three independent routes to the hard target and its moments: a univariate
truncated-normal draw (inverse-CDF body, exponential-rejection far tails), a
coordinatewise Gibbs sampler for axis-aligned sign constraints, and a naive
accept/reject sampler that proposes from the unconstrained Gaussian.  A
tensor-product Gauss-Legendre quadrature oracle computes 1-D/2-D moments of
either the hard target or its smoothed counterpart, with panels graded toward
the constraint boundary so the sigmoid transition layer is resolved to machine
precision; every call verifies itself by grid refinement.

These are oracles and validators: all of them scale badly with dimension on
purpose and none is used inside the fast sampling paths.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np
from scipy.special import ndtri

from .chain import SampleBatch
from .constraints import ConstraintSet, hard_indicator
from .covariance import CovStructure, DenseCov
from .distribution import SoftTmvnParams

__all__ = [
    "MaxTriesExceededError",
    "HardTmvn",
    "sample_trunc_norm_1d",
    "gibbs_tmvn",
    "rejection_tmvn",
    "rejection_tmvn_batch",
    "QuadratureGrid",
    "quadrature_moments",
]

_SQRT1_2 = 1.0 / math.sqrt(2.0)
# standardized bound beyond which the inverse-CDF body draw loses accuracy
_TAIL_CUT = 6.0


class MaxTriesExceededError(RuntimeError):
    """Raised when naive rejection gives up; the acceptance rate is too small."""


def _as_cov(sigma):
    if isinstance(sigma, CovStructure):
        return sigma
    return DenseCov(np.asarray(sigma, dtype=float))


class HardTmvn:
    """Hard target spec: N(mu, Sigma) restricted to the constraint cone."""

    def __init__(self, mu, sigma, constraints):
        self.sigma = _as_cov(sigma)
        mu = np.array(mu, dtype=float).ravel()
        if mu.size != self.sigma.d:
            raise ValueError(f"mu has length {mu.size}, covariance dimension is {self.sigma.d}")
        if not isinstance(constraints, ConstraintSet):
            raise TypeError("constraints must be a ConstraintSet")
        if constraints.d != mu.size:
            raise ValueError("constraint dimension does not match mu")
        mu.setflags(write=False)
        self.mu = mu
        self.constraints = constraints

    @property
    def d(self):
        return self.mu.size


def _ndtr(x):
    if x == -math.inf:
        return 0.0
    if x == math.inf:
        return 1.0
    return 0.5 * math.erfc(-x * _SQRT1_2)


def _tail_std(a, b, rng):
    # exponential-proposal rejection on [a, b) for a standardized lower bound
    # a > 0 well into the tail; optimal rate lam per the usual tilted proposal
    lam = 0.5 * (a + math.sqrt(a * a + 4.0))
    for _ in range(10**6):
        x = a + rng.standard_exponential() / lam
        if x > b:
            continue
        diff = x - lam
        if rng.random() <= math.exp(-0.5 * diff * diff):
            return x
    raise RuntimeError("truncated-normal tail rejection failed to accept")


def sample_trunc_norm_1d(mean, sd, lo, hi, rng):
    """Exact draw from N(mean, sd^2) restricted to [lo, hi].

    Inverse-CDF in the body; for a standardized bound beyond 6 the matching
    tail is sampled by exponential rejection instead, which stays exact where
    the CDF difference underflows.
    """
    if not sd > 0:
        raise ValueError("sd must be positive")
    if not lo < hi:
        raise ValueError(f"invalid interval [{lo}, {hi}]")
    a = (lo - mean) / sd
    b = (hi - mean) / sd
    if a > _TAIL_CUT:
        z = _tail_std(a, b, rng)
    elif b < -_TAIL_CUT:
        z = -_tail_std(-b, -a, rng)
    else:
        pa = _ndtr(a)
        pb = _ndtr(b)
        u = pa + (pb - pa) * rng.random()
        z = float(ndtri(u))
        z = min(max(z, a), b)
    x = mean + sd * z
    return min(max(x, lo), hi)


def _axis_intervals(c, d):
    """Per-coordinate [lo, hi] implied by axis-aligned rows; rejects other rows."""
    lo = np.full(d, -math.inf)
    hi = np.full(d, math.inf)
    for sign, a in c.rows:
        nz = np.nonzero(a)[0]
        if nz.size != 1:
            raise ValueError(
                "only axis-aligned constraints (single nonzero direction entry) "
                "are supported on this path"
            )
        j = int(nz[0])
        eff = sign * (1.0 if a[j] > 0 else -1.0)
        if eff > 0:
            lo[j] = max(lo[j], 0.0)
        else:
            hi[j] = min(hi[j], 0.0)
    if np.any(lo >= hi):
        raise ValueError("constraints are infeasible (some coordinate pinned to a point)")
    return lo, hi


def gibbs_tmvn(mu, sigma, c, spec):
    """Coordinatewise Gibbs for the hard target with axis-aligned constraints.

    Each coordinate is redrawn from its exact univariate truncated-normal full
    conditional, derived from the precision matrix.  Desk scale: the precision
    is formed densely.
    """
    cov = _as_cov(sigma)
    d = cov.d
    mu = np.asarray(mu, dtype=float).ravel()
    if mu.size != d:
        raise ValueError("mu length does not match covariance dimension")
    lo, hi = _axis_intervals(c, d)
    prec = np.linalg.inv(cov.dense())
    pdiag = np.diag(prec).copy()
    csd = 1.0 / np.sqrt(pdiag)
    rng = np.random.default_rng(spec.seed)
    theta = spec.resolve_init(mu, c)
    theta = np.minimum(np.maximum(theta, lo), hi)
    dev = theta - mu
    draws = np.empty((spec.n_samples, d))
    iterations = np.empty(spec.n_samples, dtype=int)
    kept = 0
    for i in range(1, spec.total_iterations + 1):
        for j in range(d):
            m = mu[j] - (prec[j] @ dev - pdiag[j] * dev[j]) / pdiag[j]
            x = sample_trunc_norm_1d(m, csd[j], lo[j], hi[j], rng)
            theta[j] = x
            dev[j] = x - mu[j]
        if i > spec.burn_in and (i - spec.burn_in) % spec.thin == 0:
            draws[kept] = theta
            iterations[kept] = i
            kept += 1
    return SampleBatch(draws, iterations, spec.seed, extras={"sampler": "hard-gibbs"})


def rejection_tmvn(mu, sigma, c, rng, max_tries=100000):
    """One exact hard-target draw by accept/reject from N(mu, Sigma).

    Returns (draw, tries).  Raises MaxTriesExceededError when max_tries
    proposals all miss the constraint cone.
    """
    cov = _as_cov(sigma)
    mu = np.asarray(mu, dtype=float).ravel()
    if mu.size != cov.d:
        raise ValueError("mu length does not match covariance dimension")
    if int(max_tries) < 1:
        raise ValueError("max_tries must be at least 1")
    for tries in range(1, int(max_tries) + 1):
        theta = mu + cov.sample(rng)
        if hard_indicator(c, theta):
            return theta, tries
    raise MaxTriesExceededError(
        f"max_tries exhausted: no accepted proposal in {max_tries} tries; "
        "the constraint region has too little Gaussian mass for naive rejection"
    )


def rejection_tmvn_batch(mu, sigma, c, n, rng, max_tries=100000, seed=-1):
    """n independent rejection draws; per-draw tries land in iterations."""
    cov = _as_cov(sigma)
    draws = np.empty((int(n), cov.d))
    tries = np.empty(int(n), dtype=int)
    for i in range(int(n)):
        draws[i], tries[i] = rejection_tmvn(mu, cov, c, rng, max_tries)
    return SampleBatch(
        draws, tries, seed,
        extras={"sampler": "hard-rejection", "iteration_meaning": "tries",
                "tries_total": int(tries.sum())},
    )


@lru_cache(maxsize=8)
def _gauss_legendre(n):
    return np.polynomial.legendre.leggauss(n)


def _graded_edges(lo, hi, w0):
    """Panel edges on [lo, hi], widths doubling away from 0 when 0 is interior."""
    if lo < 0.0 < hi:
        right = [0.0]
        w = w0
        while right[-1] < hi:
            right.append(min(right[-1] + w, hi))
            w *= 2.0
        left = [0.0]
        w = w0
        while left[-1] > lo:
            left.append(max(left[-1] - w, lo))
            w *= 2.0
        edges = list(reversed(left))[:-1] + right
    else:
        # 0 outside the domain: integrand smooth at the sd scale; uniform panels
        k = 8
        edges = list(np.linspace(lo, hi, k + 1))
    return np.asarray(edges)


def _axis_nodes(lo, hi, w0, npp):
    t, wt = _gauss_legendre(npp)
    edges = _graded_edges(lo, hi, w0)
    nodes = []
    weights = []
    for e0, e1 in zip(edges[:-1], edges[1:]):
        half = 0.5 * (e1 - e0)
        nodes.append(half * t + 0.5 * (e0 + e1))
        weights.append(half * wt)
    return np.concatenate(nodes), np.concatenate(weights)


class QuadratureGrid:
    """Tensor-product quadrature nodes/weights, one graded axis per dimension.

    Built from a target via for_target; remembers its recipe so a refined
    (doubled nodes-per-panel) copy can be produced for the self-check.
    """

    def __init__(self, axes, recipe=None):
        if not axes:
            raise ValueError("at least one axis required")
        for nodes, _ in axes:
            if nodes.size < 64:
                raise ValueError("each axis needs at least 64 nodes")
        self.axes = axes
        self._recipe = recipe

    @classmethod
    def for_target(cls, p, nodes_per_panel=24):
        hard = isinstance(p, HardTmvn)
        d = p.d
        if d > 2:
            raise ValueError("quadrature supports d <= 2 only")
        sds = np.sqrt(np.diag(p.sigma.dense()))
        if hard:
            clo, chi = _axis_intervals(p.constraints, d)
            w0s = [sd / 2.0 for sd in sds]
        else:
            clo = np.full(d, -math.inf)
            chi = np.full(d, math.inf)
            w0s = [min(sd / 2.0, 2.0 / p.eta) for sd in sds]
        axes = []
        for j in range(d):
            lo = max(p.mu[j] - 8.0 * sds[j], clo[j])
            hi = min(p.mu[j] + 8.0 * sds[j], chi[j])
            axes.append(_axis_nodes(lo, hi, w0s[j], nodes_per_panel))
        return cls(axes, recipe=(p, nodes_per_panel))

    def refined(self):
        if self._recipe is None:
            raise ValueError("grid was not built by for_target; cannot auto-refine")
        p, npp = self._recipe
        return QuadratureGrid.for_target(p, nodes_per_panel=2 * npp)


def _log_density_grid(p, pts):
    """Unnormalized log density at pts (m x d); independent of the sampler path."""
    prec = np.linalg.inv(p.sigma.dense())
    dev = pts - p.mu[None, :]
    logf = -0.5 * np.einsum("ni,ij,nj->n", dev, prec, dev)
    if isinstance(p, SoftTmvnParams):
        for sign, a in p.constraints.rows:
            z = p.eta * sign * (pts @ a)
            logf += np.where(z >= 0.0, -np.log1p(np.exp(-np.abs(z))), z - np.log1p(np.exp(-np.abs(z))))
    return logf


def _moments_on_grid(p, grid):
    axes = grid.axes
    d = len(axes)
    if d == 1:
        pts = axes[0][0][:, None]
        w = axes[0][1]
    else:
        x0, w0 = axes[0]
        x1, w1 = axes[1]
        xx, yy = np.meshgrid(x0, x1, indexing="ij")
        pts = np.column_stack([xx.ravel(), yy.ravel()])
        w = np.outer(w0, w1).ravel()
    logf = _log_density_grid(p, pts)
    f = np.exp(logf - logf.max()) * w
    z = f.sum()
    mean = pts.T @ f / z
    centered = pts - mean[None, :]
    cov = (centered * f[:, None]).T @ centered / z
    return mean, cov


def quadrature_moments(p, grid=None, return_error=False):
    """Mean and covariance of a 1-D/2-D hard or smoothed target by quadrature.

    The call evaluates on the grid and on a refined copy, and the maximum
    entrywise drift between the two must fall below 1e-6 or a RuntimeError is
    raised; the refined values are returned.
    """
    if p.d > 2:
        raise ValueError("quadrature supports d <= 2 only")
    if isinstance(p, HardTmvn):
        # axis-aligned feasibility must hold or the clipped box is wrong
        _axis_intervals(p.constraints, p.d)
    if grid is None:
        grid = QuadratureGrid.for_target(p)
    mean_c, cov_c = _moments_on_grid(p, grid)
    mean_f, cov_f = _moments_on_grid(p, grid.refined())
    err = max(np.max(np.abs(mean_c - mean_f)), np.max(np.abs(cov_c - cov_f)))
    if not err < 1e-6:
        raise RuntimeError(
            f"quadrature self-check failed: refinement drift {err:.3e} >= 1e-6"
        )
    if return_error:
        return mean_f, cov_f, float(err)
    return mean_f, cov_f
