"""Sampling for sign-constrained multivariate normals.

The core object is a smoothed constrained Gaussian: a N(mu, Sigma) kernel
multiplied by steep sigmoids that softly enforce linear sign constraints.
This package provides a blocked Gibbs sampler for that target (latent-variable
augmentation plus a structured Gaussian draw that avoids dense factorizations),
exact small-scale reference samplers for the hard truncated law, diagnostics
for comparing the two, and a monotone single-index regression built on top.
"""

from .chain import ChainSpec, SampleBatch
from .constraints import ConstraintSet, hard_indicator, log_soft_indicator, sigmoid_eta
from .covariance import (CovStructure, DenseCov, DiagonalCov, KernelGramCov,
                         ProbitBlockCov, matern_kernel, sample_prior)
from .diagnostics import ess, metric_D, metric_xi, w1_empirical_1d
from .distribution import (SoftTmvnParams, grad_neg_log_density,
                           hessian_neg_log_density, log_density_unnorm)
from .gibbs import ChainState, PseudoLogistic, gibbs_step, lmc_step, run_chain, run_lmc
from .msim import (MsimConfig, MsimData, MsimFit, bernstein_basis, cumsum_matrix,
                   gen_msim_data, monotonicity_violation_fraction, msim_constraints,
                   msim_predict, run_msim, transformed_basis)
from .polya_gamma import pg1_mean, sample_pg1
from .reference import (HardTmvn, MaxTriesExceededError, QuadratureGrid, gibbs_tmvn,
                        quadrature_moments, rejection_tmvn, rejection_tmvn_batch,
                        sample_trunc_norm_1d)
from .scenarios import gen_probit_gauss, gen_probit_gp
from .structured import mean_shift, posterior_covariance, sample_posterior

__version__ = "0.1.0"

__all__ = [
    "ChainSpec",
    "ChainState",
    "ConstraintSet",
    "CovStructure",
    "DenseCov",
    "DiagonalCov",
    "HardTmvn",
    "KernelGramCov",
    "MaxTriesExceededError",
    "MsimConfig",
    "MsimData",
    "MsimFit",
    "ProbitBlockCov",
    "PseudoLogistic",
    "QuadratureGrid",
    "SampleBatch",
    "SoftTmvnParams",
    "bernstein_basis",
    "cumsum_matrix",
    "ess",
    "gen_msim_data",
    "gen_probit_gauss",
    "gen_probit_gp",
    "gibbs_step",
    "gibbs_tmvn",
    "grad_neg_log_density",
    "hard_indicator",
    "hessian_neg_log_density",
    "lmc_step",
    "log_density_unnorm",
    "log_soft_indicator",
    "matern_kernel",
    "mean_shift",
    "metric_D",
    "metric_xi",
    "monotonicity_violation_fraction",
    "msim_constraints",
    "msim_predict",
    "pg1_mean",
    "posterior_covariance",
    "quadrature_moments",
    "rejection_tmvn",
    "rejection_tmvn_batch",
    "run_chain",
    "run_lmc",
    "run_msim",
    "sample_pg1",
    "sample_posterior",
    "sample_prior",
    "sample_trunc_norm_1d",
    "sigmoid_eta",
    "transformed_basis",
    "w1_empirical_1d",
]
