"""Sample-comparison metrics and chain-quality measures.

Two sample sets are compared marginally: the exact empirical 1-D Wasserstein-1
distance per coordinate (sorted-sample coupling), its per-coordinate average,
and the squared gap between mean vectors scaled by dimension.  Chain quality is
summarized by an effective sample size built on the initial-monotone-positive-
sequence truncation of FFT-estimated autocorrelations.

The empirical W1 of two finite samples from the same distribution is positive
of order n^{-1/2}, not zero; thresholds downstream are calibrated against that
estimator bias rather than against population distances.
"""

from __future__ import annotations

import numpy as np

__all__ = ["w1_empirical_1d", "metric_D", "metric_xi", "ess"]


def w1_empirical_1d(x, y):
    """Exact empirical Wasserstein-1 distance between two 1-D samples.

    Equal sizes are compared by order-statistic matching; unequal sizes are
    truncated to the shorter length before sorting (unbiased for exchangeable
    draws).  Inputs need not be pre-sorted.
    """
    x = np.asarray(x, dtype=float).ravel()
    y = np.asarray(y, dtype=float).ravel()
    if x.size == 0 or y.size == 0:
        raise ValueError("samples must be nonempty")
    m = min(x.size, y.size)
    xs = np.sort(x[:m])
    ys = np.sort(y[:m])
    return float(np.mean(np.abs(xs - ys)))


def _check_2d(x, y):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.ndim != 2 or y.ndim != 2:
        raise ValueError("sample sets must be 2-D (draws x coordinates)")
    if x.shape[1] != y.shape[1]:
        raise ValueError(f"coordinate counts differ: {x.shape[1]} vs {y.shape[1]}")
    if x.shape[0] == 0 or y.shape[0] == 0:
        raise ValueError("sample sets must be nonempty")
    return x, y


def metric_D(x, y):
    """Average per-coordinate empirical W1 between two draw matrices."""
    x, y = _check_2d(x, y)
    d = x.shape[1]
    return float(np.mean([w1_empirical_1d(x[:, j], y[:, j]) for j in range(d)]))


def metric_xi(x, y):
    """Squared Euclidean distance between sample means, divided by dimension."""
    x, y = _check_2d(x, y)
    gap = x.mean(axis=0) - y.mean(axis=0)
    return float(gap @ gap / x.shape[1])


def ess(chain):
    """Effective sample size of a scalar chain.

    Uses FFT autocovariances with Geyer's initial monotone positive sequence:
    autocorrelations are summed in lag pairs, truncated at the first
    nonpositive pair sum, with the pair sums forced nonincreasing.  The result
    is clipped to (0, n].

    Raises
    ------
    ValueError
        For chains shorter than 10 or exactly constant chains.
    """
    x = np.asarray(chain, dtype=float).ravel()
    n = x.size
    if n < 10:
        raise ValueError("chain must have at least 10 points")
    x = x - x.mean()
    if not np.any(x != 0.0):
        raise ValueError("constant chain has undefined autocorrelation")
    nfft = 1
    while nfft < 2 * n:
        nfft *= 2
    f = np.fft.rfft(x, nfft)
    acov = np.fft.irfft(f * np.conj(f), nfft)[:n] / n
    rho = acov / acov[0]
    # pair sums Gamma_k = rho_{2k} + rho_{2k+1}; Gamma_0 >= 1 + rho_1 > 0
    n_pairs = n // 2
    tau = 0.0
    prev = np.inf
    for k in range(n_pairs):
        g = rho[2 * k] + rho[2 * k + 1]
        if g <= 0.0:
            break
        g = min(g, prev)
        prev = g
        tau += 2.0 * g
    tau -= 1.0
    tau = max(tau, 1e-12)
    return float(min(n / tau, float(n)))
