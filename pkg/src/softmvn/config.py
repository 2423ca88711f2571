"""Config documents for the experiment commands: schema checks with field paths.

A config is one JSON object per command.  Validation is strict: unknown keys
are rejected (naming the offending dotted path), required keys must be
present, and values are range-checked before any sampler runs.  Validators
return a new dict with defaults filled in; that resolved form is what reports
embed for provenance.
"""

from __future__ import annotations

import json

import numpy as np

__all__ = ["ConfigError", "load_config", "validate_sample", "validate_compare",
           "validate_msim", "validate_bench"]

_TARGETS = ("soft", "hard-gibbs", "hard-rejection", "lmc")
_KINDS = ("dense", "probit_gp", "probit_gauss")


class ConfigError(ValueError):
    """Schema violation; the message names the offending field path."""


def load_config(path):
    try:
        with open(path, "r") as f:
            text = f.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError("config root must be a JSON object")
    return doc


def _check_keys(doc, path, allowed, required=()):
    if not isinstance(doc, dict):
        raise ConfigError(f"{path or 'config'} must be an object")
    for key in doc:
        if key not in allowed:
            raise ConfigError(f"unknown key '{path + '.' if path else ''}{key}'")
    for key in required:
        if key not in doc:
            raise ConfigError(f"missing required key '{path + '.' if path else ''}{key}'")


def _number(doc, path, key, default=None, minimum=None, integer=False, required=False):
    label = f"{path}.{key}" if path else key
    if key not in doc:
        if required:
            raise ConfigError(f"missing required key '{label}'")
        return default
    v = doc[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(f"'{label}' must be a number")
    if integer and int(v) != v:
        raise ConfigError(f"'{label}' must be an integer")
    if minimum is not None and v < minimum:
        raise ConfigError(f"'{label}' must be >= {minimum}")
    return int(v) if integer else float(v)


def _validate_constraint_rows(doc, path, d):
    if not isinstance(doc, dict):
        raise ConfigError(f"'{path}' must be an object")
    _check_keys(doc, path, allowed=("d", "rows"), required=("d", "rows"))
    if doc["d"] != d:
        raise ConfigError(f"'{path}.d' must equal the problem dimension {d}")
    rows = doc["rows"]
    if not isinstance(rows, list):
        raise ConfigError(f"'{path}.rows' must be a list")
    for i, row in enumerate(rows):
        _check_keys(row, f"{path}.rows[{i}]", allowed=("sign", "a"), required=("sign", "a"))
        if row["sign"] not in (1, -1):
            raise ConfigError(f"'{path}.rows[{i}].sign' must be +1 or -1")
        a = row["a"]
        if not isinstance(a, list) or len(a) != d:
            raise ConfigError(f"'{path}.rows[{i}].a' must be a list of {d} numbers")
    return doc


def _validate_problem(doc, path="problem"):
    _check_keys(doc, path, allowed=("kind", "mu", "sigma", "constraints", "n", "nu",
                                    "scale", "N", "P", "scenario_seed"),
                required=("kind",))
    kind = doc.get("kind")
    if kind not in _KINDS:
        raise ConfigError(f"'{path}.kind' must be one of {_KINDS}")
    out = {"kind": kind}
    if kind == "dense":
        for key in ("n", "nu", "scale", "N", "P", "scenario_seed"):
            if key in doc:
                raise ConfigError(f"unknown key '{path}.{key}' for kind 'dense'")
        if "sigma" not in doc:
            raise ConfigError(f"missing required key '{path}.sigma'")
        sigma = doc["sigma"]
        if not isinstance(sigma, list) or not sigma or not all(
            isinstance(r, list) and len(r) == len(sigma) for r in sigma
        ):
            raise ConfigError(f"'{path}.sigma' must be a square matrix (list of lists)")
        d = len(sigma)
        mu = doc.get("mu", [0.0] * d)
        if not isinstance(mu, list) or len(mu) != d:
            raise ConfigError(f"'{path}.mu' must be a list of {d} numbers")
        cons = doc.get("constraints", {"d": d, "rows": []})
        out.update(mu=mu, sigma=sigma,
                   constraints=_validate_constraint_rows(cons, f"{path}.constraints", d))
    elif kind == "probit_gp":
        for key in ("mu", "sigma", "constraints", "N", "P"):
            if key in doc:
                raise ConfigError(f"unknown key '{path}.{key}' for kind 'probit_gp'")
        out["n"] = _number(doc, path, "n", minimum=21, integer=True, required=True)
        out["nu"] = _number(doc, path, "nu", default=0.6, minimum=1e-6)
        out["scale"] = _number(doc, path, "scale", default=1.0, minimum=1e-12)
        out["scenario_seed"] = _number(doc, path, "scenario_seed", default=0, integer=True)
    else:
        for key in ("mu", "sigma", "constraints", "n", "nu", "scale"):
            if key in doc:
                raise ConfigError(f"unknown key '{path}.{key}' for kind 'probit_gauss'")
        out["N"] = _number(doc, path, "N", minimum=1, integer=True, required=True)
        out["P"] = _number(doc, path, "P", minimum=1, integer=True, required=True)
        out["scenario_seed"] = _number(doc, path, "scenario_seed", default=0, integer=True)
    return out


def _validate_chain(doc, path="chain"):
    _check_keys(doc, path, allowed=("burn_in", "thin", "n_samples", "init"))
    out = {
        "burn_in": _number(doc, path, "burn_in", default=1000, minimum=0, integer=True),
        "thin": _number(doc, path, "thin", default=1, minimum=1, integer=True),
        "n_samples": _number(doc, path, "n_samples", default=1000, minimum=1, integer=True),
    }
    init = doc.get("init", "origin")
    if isinstance(init, str):
        if init != "origin":
            raise ConfigError(f"'{path}.init' must be 'origin' or a numeric vector")
    elif isinstance(init, list):
        if not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in init):
            raise ConfigError(f"'{path}.init' vector entries must be numbers")
    else:
        raise ConfigError(f"'{path}.init' must be 'origin' or a numeric vector")
    out["init"] = init
    return out


def validate_sample(doc):
    _check_keys(doc, "", allowed=("seed", "target", "eta", "problem", "chain",
                                  "lmc", "max_tries"),
                required=("seed", "target", "problem"))
    target = doc.get("target")
    if target not in _TARGETS:
        raise ConfigError(f"'target' must be one of {_TARGETS}")
    out = {
        "seed": _number(doc, "", "seed", integer=True, required=True),
        "target": target,
        "eta": _number(doc, "", "eta", default=100.0, minimum=1e-12),
        "problem": _validate_problem(doc.get("problem", {})),
        "chain": _validate_chain(doc.get("chain", {})),
        "max_tries": _number(doc, "", "max_tries", default=100000, minimum=1, integer=True),
    }
    lmc = doc.get("lmc", {})
    _check_keys(lmc, "lmc", allowed=("step_size",))
    out["lmc"] = {"step_size": _number(lmc, "lmc", "step_size", default=1e-4, minimum=0.0)}
    if target == "lmc" and not out["lmc"]["step_size"] > 0:
        raise ConfigError("'lmc.step_size' must be positive for target 'lmc'")
    return out


def validate_compare(doc):
    _check_keys(doc, "", allowed=("seed", "eta", "problem", "chain_soft", "chain_hard",
                                  "replicates"),
                required=("seed", "problem"))
    return {
        "seed": _number(doc, "", "seed", integer=True, required=True),
        "eta": _number(doc, "", "eta", default=100.0, minimum=1e-12),
        "problem": _validate_problem(doc.get("problem", {})),
        "chain_soft": _validate_chain(doc.get("chain_soft", {}), "chain_soft"),
        "chain_hard": _validate_chain(doc.get("chain_hard", {}), "chain_hard"),
        "replicates": _number(doc, "", "replicates", default=1, minimum=1, integer=True),
    }


def validate_msim(doc):
    _check_keys(doc, "", allowed=("seed", "n", "p", "M", "prior", "eta", "burn_in",
                                  "thin", "n_samples", "inner_soft", "inner_hard",
                                  "proposal_sd", "prior_var", "data_seed", "n_test",
                                  "sigma0", "replicates"),
                required=("seed",))
    prior = doc.get("prior", "soft")
    if prior not in ("soft", "hard"):
        raise ConfigError("'prior' must be 'soft' or 'hard'")
    return {
        "seed": _number(doc, "", "seed", integer=True, required=True),
        "n": _number(doc, "", "n", default=800, minimum=2, integer=True),
        "p": _number(doc, "", "p", default=5, minimum=1, integer=True),
        "M": _number(doc, "", "M", default=20, minimum=1, integer=True),
        "prior": prior,
        "eta": _number(doc, "", "eta", default=500.0, minimum=1e-12),
        "burn_in": _number(doc, "", "burn_in", default=1000, minimum=0, integer=True),
        "thin": _number(doc, "", "thin", default=100, minimum=1, integer=True),
        "n_samples": _number(doc, "", "n_samples", default=1000, minimum=1, integer=True),
        "inner_soft": _number(doc, "", "inner_soft", default=5, minimum=1, integer=True),
        "inner_hard": _number(doc, "", "inner_hard", default=25, minimum=1, integer=True),
        "proposal_sd": _number(doc, "", "proposal_sd", default=0.01, minimum=1e-12),
        "prior_var": _number(doc, "", "prior_var", default=25.0, minimum=1e-12),
        "data_seed": _number(doc, "", "data_seed", default=0, integer=True),
        "n_test": _number(doc, "", "n_test", default=200, minimum=1, integer=True),
        "sigma0": _number(doc, "", "sigma0", default=0.1, minimum=0.0),
        "replicates": _number(doc, "", "replicates", default=1, minimum=1, integer=True),
    }


def validate_bench(doc):
    _check_keys(doc, "", allowed=("seed", "d_grid", "fixed_r", "r_grid", "fixed_d",
                                  "draws_per_cell"),
                required=("seed",))
    def _grid(key, default):
        grid = doc.get(key, default)
        if (not isinstance(grid, list) or not grid
                or not all(isinstance(v, int) and not isinstance(v, bool) and v >= 1 for v in grid)):
            raise ConfigError(f"'{key}' must be a nonempty list of positive integers")
        return grid
    return {
        "seed": _number(doc, "", "seed", integer=True, required=True),
        "d_grid": _grid("d_grid", [500, 1000, 2000, 4000]),
        "fixed_r": _number(doc, "", "fixed_r", default=50, minimum=1, integer=True),
        "r_grid": _grid("r_grid", [25, 50, 100, 200]),
        "fixed_d": _number(doc, "", "fixed_d", default=2000, minimum=1, integer=True),
        "draws_per_cell": _number(doc, "", "draws_per_cell", default=5, minimum=1, integer=True),
    }


def build_problem(problem):
    """Instantiate (mu, cov, constraints) from a validated problem section."""
    from .constraints import ConstraintSet
    from .covariance import DenseCov
    from .scenarios import gen_probit_gauss, gen_probit_gp

    kind = problem["kind"]
    if kind == "dense":
        cov = DenseCov(np.asarray(problem["sigma"], dtype=float))
        rows = problem["constraints"]["rows"]
        if rows:
            cons = ConstraintSet([r["sign"] for r in rows],
                                 np.asarray([r["a"] for r in rows], dtype=float))
        else:
            cons = ConstraintSet.empty(cov.d)
        mu = np.asarray(problem["mu"], dtype=float)
    elif kind == "probit_gp":
        cov, cons = gen_probit_gp(problem["n"], nu=problem["nu"], scale=problem["scale"],
                                  seed=problem["scenario_seed"])
        mu = np.zeros(cov.d)
    else:
        cov, cons = gen_probit_gauss(problem["N"], problem["P"],
                                     seed=problem["scenario_seed"])
        mu = np.zeros(cov.d)
    return mu, cov, cons
