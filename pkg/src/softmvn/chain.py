"""Chain configuration and the immutable batch of retained draws.

A ChainSpec pins burn-in, thinning stride, retained draw count, seed, and the
starting point; a SampleBatch holds the thinned draw matrix with the absolute
iteration index of every retained draw, and serializes to CSV (one row per
draw, header "theta_0,...") and to a JSON-ready summary of means, sds, and
per-coordinate effective sample sizes.
"""

from __future__ import annotations

import numpy as np

from .diagnostics import ess

__all__ = ["ChainSpec", "SampleBatch"]


class ChainSpec:
    """Sampler run configuration.

    init is either an explicit d-vector or the string "origin", which resolves
    to the default start: the target mean with coordinate sign-flips applied to
    any axis-aligned constrained coordinate whose sign is wrong.  For the
    zero-mean targets used throughout, that is literally the origin.
    """

    def __init__(self, burn_in, thin, n_samples, seed, init="origin"):
        burn_in = int(burn_in)
        thin = int(thin)
        n_samples = int(n_samples)
        if burn_in < 0:
            raise ValueError("burn_in must be nonnegative")
        if thin < 1:
            raise ValueError("thin must be at least 1")
        if n_samples < 1:
            raise ValueError("n_samples must be at least 1")
        if isinstance(init, str):
            if init != "origin":
                raise ValueError(f"unknown init policy {init!r}; expected 'origin' or a vector")
            self.init = "origin"
        else:
            v = np.array(init, dtype=float).ravel()
            v.setflags(write=False)
            self.init = v
        self.burn_in = burn_in
        self.thin = thin
        self.n_samples = n_samples
        self.seed = int(seed)

    @property
    def total_iterations(self):
        return self.burn_in + self.thin * self.n_samples

    def resolve_init(self, mu, constraints):
        """Concrete starting vector for a target with the given mean/constraints."""
        if not isinstance(self.init, str):
            v = np.asarray(self.init, dtype=float)
            if v.size != mu.size:
                raise ValueError(f"init has length {v.size}, expected {mu.size}")
            return v.copy()
        theta = np.array(mu, dtype=float)
        for sign, a in constraints.rows:
            nz = np.nonzero(a)[0]
            if nz.size == 1:
                # axis-aligned row: flip the coordinate into the feasible half-line
                j = nz[0]
                want = sign * (1.0 if a[j] > 0 else -1.0)
                theta[j] = want * abs(theta[j])
        return theta


class SampleBatch:
    """Immutable matrix of retained draws with per-draw iteration indices."""

    def __init__(self, draws, iterations, seed, extras=None):
        draws = np.array(draws, dtype=float)
        if draws.ndim != 2:
            raise ValueError("draws must be 2-D (n_samples x d)")
        iterations = np.array(iterations, dtype=int).ravel()
        if iterations.size != draws.shape[0]:
            raise ValueError("one iteration index per retained draw required")
        draws.setflags(write=False)
        iterations.setflags(write=False)
        self.draws = draws
        self.iterations = iterations
        self.seed = int(seed)
        self.extras = dict(extras) if extras else {}

    @property
    def n(self):
        return self.draws.shape[0]

    @property
    def d(self):
        return self.draws.shape[1]

    def summary(self):
        """Means, sds, and per-coordinate ESS (null where ESS is undefined)."""
        ess_per_coord = []
        for j in range(self.d):
            try:
                ess_per_coord.append(ess(self.draws[:, j]))
            except ValueError:
                ess_per_coord.append(None)
        return {
            "n_samples": int(self.n),
            "d": int(self.d),
            "means": [float(v) for v in self.draws.mean(axis=0)],
            "sds": [float(v) for v in self.draws.std(axis=0, ddof=1)] if self.n > 1 else [0.0] * self.d,
            "ess_per_coord": ess_per_coord,
        }

    def to_csv_text(self):
        """CSV with header theta_0,..., LF endings, 17 significant digits."""
        lines = [",".join(f"theta_{j}" for j in range(self.d))]
        for row in self.draws:
            lines.append(",".join(f"{x:.17g}" for x in row))
        return "\n".join(lines) + "\n"
