"""Experiment command-line driver.

Four subcommands: sample (run one sampler, write draws + summary), compare
(soft sampler vs hard reference on one instance, write distribution metrics),
msim (replicated single-index fits with summary table), bench (scaling
measurements for the structured draw).

Every run is driven by a JSON config plus optional --seed/--replicates
overrides, and embeds its resolved config in the report for provenance.
Reports hold only deterministic content: rerunning a command with the same
config and seed reproduces report.json and draws.csv byte for byte.  Wall
times go to a timing.json sidecar, which is the one deliberately
non-deterministic output file.

Seed policy: the config seed drives everything; replicated runs derive child
seeds through numpy SeedSequence spawning in replicate order, so replicate k
is reproducible in isolation given the root seed.
"""

from __future__ import annotations

import argparse
import os
import sys
import time

import numpy as np

from .chain import ChainSpec
from .config import (ConfigError, build_problem, load_config, validate_bench,
                     validate_compare, validate_msim, validate_sample)
from .covariance import DiagonalCov
from .diagnostics import ess, metric_D, metric_xi, w1_empirical_1d
from .distribution import SoftTmvnParams
from .fileio import atomic_write_text, write_json
from .gibbs import run_chain, run_lmc
from .msim import (MsimConfig, gen_msim_data, monotonicity_violation_fraction,
                   msim_predict, run_msim)
from .reference import gibbs_tmvn, rejection_tmvn_batch
from .structured import sample_posterior

__all__ = ["main", "cmd_sample", "cmd_compare", "cmd_msim", "cmd_bench"]


def _chain_spec(chain_cfg, seed):
    init = chain_cfg["init"]
    if not isinstance(init, str):
        init = np.asarray(init, dtype=float)
    return ChainSpec(chain_cfg["burn_in"], chain_cfg["thin"], chain_cfg["n_samples"],
                     seed, init=init)


def _spawn_seeds(root_seed, count):
    children = np.random.SeedSequence(root_seed).spawn(count)
    return [int(c.generate_state(1, dtype=np.uint64)[0]) for c in children]


def _mean_ess(draws):
    vals = []
    for j in range(draws.shape[1]):
        try:
            vals.append(ess(draws[:, j]))
        except ValueError:
            continue
    return float(np.mean(vals)) if vals else None


def cmd_sample(cfg, out_dir):
    """Run the configured sampler; write draws.csv, report.json, timing.json."""
    mu, cov, cons = build_problem(cfg["problem"])
    spec = _chain_spec(cfg["chain"], cfg["seed"])
    target = cfg["target"]
    t0 = time.perf_counter()
    if target == "soft":
        p = SoftTmvnParams(mu, cov, cons, cfg["eta"])
        batch = run_chain(p, spec)
    elif target == "hard-gibbs":
        batch = gibbs_tmvn(mu, cov, cons, spec)
    elif target == "hard-rejection":
        rng = np.random.default_rng(cfg["seed"])
        batch = rejection_tmvn_batch(mu, cov, cons, spec.n_samples, rng,
                                     max_tries=cfg["max_tries"], seed=cfg["seed"])
    else:
        p = SoftTmvnParams(mu, cov, cons, cfg["eta"])
        batch = run_lmc(p, spec, cfg["lmc"]["step_size"])
    runtime = time.perf_counter() - t0
    atomic_write_text(os.path.join(out_dir, "draws.csv"), batch.to_csv_text())
    write_json(os.path.join(out_dir, "report.json"), {
        "command": "sample",
        "config": cfg,
        "seed": cfg["seed"],
        "summary": batch.summary(),
        "extras": batch.extras,
    })
    write_json(os.path.join(out_dir, "timing.json"), {"runtime_s": runtime})
    return 0


def cmd_compare(cfg, out_dir):
    """Soft chain vs hard coordinatewise reference; write metric report."""
    mu, cov, cons = build_problem(cfg["problem"])
    seeds = _spawn_seeds(cfg["seed"], 2 * cfg["replicates"])
    reps = []
    times = []
    for k in range(cfg["replicates"]):
        seed_soft, seed_hard = seeds[2 * k], seeds[2 * k + 1]
        t0 = time.perf_counter()
        p = SoftTmvnParams(mu, cov, cons, cfg["eta"])
        soft = run_chain(p, _chain_spec(cfg["chain_soft"], seed_soft))
        t_soft = time.perf_counter() - t0
        t0 = time.perf_counter()
        hard = gibbs_tmvn(mu, cov, cons, _chain_spec(cfg["chain_hard"], seed_hard))
        t_hard = time.perf_counter() - t0
        w1 = [w1_empirical_1d(soft.draws[:, j], hard.draws[:, j]) for j in range(soft.d)]
        reps.append({
            "replicate": k,
            "seed_soft": seed_soft,
            "seed_hard": seed_hard,
            "D": metric_D(soft.draws, hard.draws),
            "xi": metric_xi(soft.draws, hard.draws),
            "w1_per_coord": w1,
        })
        times.append({"replicate": k, "soft_s": t_soft, "hard_s": t_hard})
    write_json(os.path.join(out_dir, "report.json"), {
        "command": "compare",
        "config": cfg,
        "seed": cfg["seed"],
        "replicates": reps,
        "summary": {
            "D_mean": float(np.mean([r["D"] for r in reps])),
            "xi_mean": float(np.mean([r["xi"] for r in reps])),
        },
    })
    write_json(os.path.join(out_dir, "timing.json"), {"replicates": times})
    return 0


def cmd_msim(cfg, out_dir):
    """Replicated single-index fits; per-replicate reports plus a summary."""
    fit_seeds = _spawn_seeds(cfg["seed"], cfg["replicates"])
    rows = []
    times = []
    for k in range(cfg["replicates"]):
        data, truth = gen_msim_data(cfg["n"], cfg["p"], cfg["M"],
                                    seed=cfg["data_seed"] + k,
                                    n_test=cfg["n_test"], sigma0=cfg["sigma0"])
        mc = MsimConfig(M=cfg["M"], prior=cfg["prior"], eta=cfg["eta"],
                        burn_in=cfg["burn_in"], thin=cfg["thin"],
                        n_samples=cfg["n_samples"], inner_soft=cfg["inner_soft"],
                        inner_hard=cfg["inner_hard"], proposal_sd=cfg["proposal_sd"],
                        prior_var=cfg["prior_var"], seed=fit_seeds[k])
        fit = run_msim(data, mc)
        _, mse = msim_predict(fit, truth["x_test"], truth["f_test"])
        _, mse_vs_y = msim_predict(fit, truth["x_test"], truth["y_test"])
        row = {
            "replicate": k,
            "data_seed": cfg["data_seed"] + k,
            "fit_seed": fit_seeds[k],
            "mse": mse,
            "mse_vs_y": mse_vs_y,
            "accept_rate": fit.accept_rate,
            "ess_alpha": _mean_ess(fit.alpha_draws),
            "ess_psi": _mean_ess(fit.psi_draws),
            "monotonicity_violation": monotonicity_violation_fraction(fit),
            "sigma2_posterior_mean": float(fit.sigma2_draws.mean()),
        }
        rows.append(row)
        times.append({"replicate": k, "wall_s": fit.wall_time})
        write_json(os.path.join(out_dir, f"replicate_{k}.json"), row)
    def _m(key):
        vals = [r[key] for r in rows if r[key] is not None]
        return float(np.mean(vals)) if vals else None
    def _s(key):
        vals = [r[key] for r in rows if r[key] is not None]
        return float(np.std(vals, ddof=1)) if len(vals) > 1 else 0.0
    write_json(os.path.join(out_dir, "summary.json"), {
        "command": "msim",
        "config": cfg,
        "seed": cfg["seed"],
        "replicates": len(rows),
        "mse_mean": _m("mse"),
        "mse_sd": _s("mse"),
        "accept_rate_mean": _m("accept_rate"),
        "ess_alpha_mean": _m("ess_alpha"),
        "ess_psi_mean": _m("ess_psi"),
        "monotonicity_violation_mean": _m("monotonicity_violation"),
    })
    write_json(os.path.join(out_dir, "timing.json"), {
        "replicates": times,
        "wall_mean_s": float(np.mean([t["wall_s"] for t in times])),
        "wall_sd_s": float(np.std([t["wall_s"] for t in times], ddof=1)) if len(times) > 1 else 0.0,
    })
    return 0


def _bench_cell(r, d, draws_per_cell, rng):
    cov = DiagonalCov(np.ones(d))
    phi = rng.standard_normal((r, d))
    alpha = rng.standard_normal(r)
    sample_posterior(phi, alpha, cov, rng)  # warm-up
    totals = []
    priors = []
    for _ in range(draws_per_cell):
        t0 = time.perf_counter()
        sample_posterior(phi, alpha, cov, rng)
        totals.append(time.perf_counter() - t0)
        t0 = time.perf_counter()
        cov.sample(rng)
        priors.append(time.perf_counter() - t0)
    total = float(np.median(totals))
    prior = float(np.median(priors))
    return {
        "r": int(r),
        "d": int(d),
        "total_us": 1e6 * total,
        "prior_us": 1e6 * prior,
        "posterior_only_us": 1e6 * max(total - prior, 1e-9),
    }


def _fit_slope(cells, x_key):
    x = np.log([c[x_key] for c in cells])
    y = np.log([c["posterior_only_us"] for c in cells])
    return float(np.polyfit(x, y, 1)[0])


def cmd_bench(cfg, out_dir):
    """Time the structured draw over (r, d) grids; fit log-log slopes."""
    rng = np.random.default_rng(cfg["seed"])
    d_cells = [_bench_cell(cfg["fixed_r"], d, cfg["draws_per_cell"], rng)
               for d in cfg["d_grid"]]
    r_cells = [_bench_cell(r, cfg["fixed_d"], cfg["draws_per_cell"], rng)
               for r in cfg["r_grid"]]
    write_json(os.path.join(out_dir, "report.json"), {
        "command": "bench",
        "config": cfg,
        "seed": cfg["seed"],
        "d_grid": cfg["d_grid"],
        "r_grid": cfg["r_grid"],
    })
    write_json(os.path.join(out_dir, "timing.json"), {
        "d_cells": d_cells,
        "r_cells": r_cells,
        "slope_d": _fit_slope(d_cells, "d"),
        "slope_r": _fit_slope(r_cells, "r"),
    })
    return 0


_VALIDATORS = {
    "sample": validate_sample,
    "compare": validate_compare,
    "msim": validate_msim,
    "bench": validate_bench,
}
_RUNNERS = {
    "sample": cmd_sample,
    "compare": cmd_compare,
    "msim": cmd_msim,
    "bench": cmd_bench,
}


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="softmvn",
        description="Constrained-Gaussian sampling experiments",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("sample", "run one sampler and write draws + summary"),
        ("compare", "soft sampler vs hard reference distribution metrics"),
        ("msim", "replicated monotone single-index fits"),
        ("bench", "structured-draw scaling benchmark"),
    ):
        sp = sub.add_parser(name, help=help_text)
        sp.add_argument("--config", required=True, help="path to the JSON config")
        sp.add_argument("--out", default=".", help="output directory")
        sp.add_argument("--seed", type=int, default=None, help="override config seed")
        sp.add_argument("--replicates", type=int, default=None,
                        help="override config replicate count")
    args = parser.parse_args(argv)
    try:
        doc = load_config(args.config)
        if args.seed is not None:
            doc["seed"] = args.seed
        if args.replicates is not None:
            if args.command not in ("compare", "msim"):
                raise ConfigError(f"--replicates does not apply to '{args.command}'")
            doc["replicates"] = args.replicates
        cfg = _VALIDATORS[args.command](doc)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    os.makedirs(args.out, exist_ok=True)
    try:
        return _RUNNERS[args.command](cfg, args.out)
    except Exception as exc:
        print(f"error running '{args.command}': {exc}", file=sys.stderr)
        return 1
