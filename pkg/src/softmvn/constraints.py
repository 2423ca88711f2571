"""Signed linear constraint sets and their smooth (sigmoid) relaxation.

A constraint set holds r homogeneous half-space conditions ``s_i * a_i' theta >= 0``
on a vector in R^d.  The hard indicator of the feasible region is approximated by a
product of scaled sigmoids whose sharpness is controlled by ``eta``; all samplers in
this package share the machinery defined here.
"""

from __future__ import annotations

import json

import numpy as np
from scipy.special import expit

__all__ = [
    "ConstraintSet",
    "sigmoid_eta",
    "hard_indicator",
    "log_soft_indicator",
]


def sigmoid_eta(x, eta):
    """Scaled sigmoid 1 / (1 + exp(-eta * x)).

    Parameters
    ----------
    x : float or ndarray
        Evaluation point(s).
    eta : float or ndarray
        Sharpness, must be positive.  Larger values push the sigmoid toward the
        step indicator 1(x > 0).

    Returns
    -------
    float or ndarray
        Values in (0, 1); saturates to 0.0 or 1.0 in floating point for large
        |eta * x| without overflow.
    """
    eta = np.asarray(eta, dtype=float)
    if np.any(eta <= 0.0):
        raise ValueError("eta must be positive")
    out = expit(eta * np.asarray(x, dtype=float))
    if out.ndim == 0:
        return float(out)
    return out


def _log_sigmoid(z):
    # stable log(1/(1+exp(-z))), branch-free form of the sign split
    z = np.asarray(z, dtype=float)
    return np.minimum(z, 0.0) - np.log1p(np.exp(-np.abs(z)))


class ConstraintSet:
    """r signed linear constraints {(s_i, a_i)} over R^d.

    Each row encodes the half space ``s_i * (a_i' theta) >= 0`` with sign
    s_i in {-1, +1} and direction a_i in R^d.  Directions are stored raw; no
    unit-norm scaling is applied, so ``eta * norm(a_i)`` jointly controls the
    sharpness of the soft indicator.  Instances are immutable.
    """

    def __init__(self, signs, directions):
        signs = np.asarray(signs, dtype=int).reshape(-1)
        directions = np.asarray(directions, dtype=float)
        if directions.ndim != 2:
            raise ValueError("directions must be a 2-D array of shape (r, d)")
        if directions.shape[0] != signs.shape[0]:
            raise ValueError(
                f"got {signs.shape[0]} signs for {directions.shape[0]} direction rows"
            )
        if signs.size and not np.all(np.isin(signs, (-1, 1))):
            raise ValueError("signs must be +1 or -1")
        if directions.shape[0] > directions.shape[1]:
            raise ValueError(
                f"r={directions.shape[0]} constraints exceed ambient dimension "
                f"d={directions.shape[1]}"
            )
        norms = np.linalg.norm(directions, axis=1)
        if np.any(norms == 0.0):
            raise ValueError("constraint directions must have nonzero norm")
        self._signs = signs
        self._dirs = directions.copy()
        self._signs.flags.writeable = False
        self._dirs.flags.writeable = False

    @property
    def signs(self):
        return self._signs

    @property
    def directions(self):
        return self._dirs

    @property
    def r(self):
        return self._dirs.shape[0]

    @property
    def d(self):
        return self._dirs.shape[1]

    @property
    def rows(self):
        """List of (sign, direction) pairs."""
        return [(int(s), a.copy()) for s, a in zip(self._signs, self._dirs)]

    @classmethod
    def empty(cls, d):
        """Constraint-free set over R^d (the hard indicator is identically true)."""
        if d < 1:
            raise ValueError("d must be at least 1")
        return cls(np.zeros(0, dtype=int), np.zeros((0, d)))

    @classmethod
    def axis_aligned(cls, d, coords, signs):
        """Rows a_i = e_{coords[i]} with the given signs, in ambient dimension d."""
        coords = np.asarray(coords, dtype=int)
        signs = np.asarray(signs, dtype=int)
        if coords.shape != signs.shape:
            raise ValueError("coords and signs must have matching length")
        if coords.size and (coords.min() < 0 or coords.max() >= d):
            raise ValueError("coordinate index out of range")
        dirs = np.zeros((coords.size, d))
        dirs[np.arange(coords.size), coords] = 1.0
        return cls(signs, dirs)

    @classmethod
    def orthant(cls, signs, d=None):
        """Coordinatewise constraints s_j * theta_j >= 0 on the first len(signs) axes."""
        signs = np.asarray(signs, dtype=int)
        if d is None:
            d = signs.size
        return cls.axis_aligned(d, np.arange(signs.size), signs)

    def to_json(self):
        doc = {
            "d": int(self.d),
            "rows": [
                {"sign": int(s), "a": [float(v) for v in a]}
                for s, a in zip(self._signs, self._dirs)
            ],
        }
        return json.dumps(doc)

    @classmethod
    def from_json(cls, text):
        doc = json.loads(text)
        d = int(doc["d"])
        rows = doc["rows"]
        if not rows:
            return cls.empty(d)
        signs = [row["sign"] for row in rows]
        dirs = np.asarray([row["a"] for row in rows], dtype=float)
        if dirs.shape[1] != d:
            raise ValueError("row length does not match declared dimension")
        return cls(signs, dirs)

    def __repr__(self):
        return f"ConstraintSet(r={self.r}, d={self.d})"


def _check_theta(c, theta):
    theta = np.asarray(theta, dtype=float)
    if theta.shape != (c.d,):
        raise ValueError(f"theta has shape {theta.shape}, expected ({c.d},)")
    return theta


def hard_indicator(c, theta):
    """True iff s_i * (a_i' theta) >= 0 for every constraint row (vacuously true for r=0)."""
    theta = _check_theta(c, theta)
    return bool(np.all(c.signs * (c.directions @ theta) >= 0.0))


def log_soft_indicator(c, theta, eta):
    """Log of the product of scaled sigmoids, sum_i log sigmoid(eta * s_i * a_i' theta).

    Always <= 0; approaches 0 for points deep inside the feasible region and
    -inf is never reached (the soft indicator is strictly positive).
    """
    theta = _check_theta(c, theta)
    eta = float(eta)
    if eta <= 0.0:
        raise ValueError("eta must be positive")
    if c.r == 0:
        return 0.0
    z = eta * c.signs * (c.directions @ theta)
    return float(np.sum(_log_sigmoid(z)))
