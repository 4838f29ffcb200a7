"""Derivative-free global optimization by sampling nascent minima distributions."""

from progo.density import NascentDensity, Prior, log_unnorm, uniform_prior
from progo.metrics import RegretPoint, function_log_regret, minima_log_regret
from progo.objectives import BoxDomain, Objective, ackley, demo1d, get_objective, levy, log_transform, negate
from progo.optimizer import (
    IterationEntry,
    ProgoConfig,
    RunRecord,
    k_schedule,
    optimize,
    random_search_baseline,
    select_stage_best,
)
from progo.sampler import LssConfig, LssState, init_state, lss_sample, lss_step, shrink

__version__ = "0.1.0"

__all__ = [
    "BoxDomain", "IterationEntry", "LssConfig", "LssState", "NascentDensity", "Objective",
    "Prior", "ProgoConfig", "RegretPoint", "RunRecord", "ackley", "demo1d",
    "function_log_regret", "get_objective", "init_state", "k_schedule", "levy",
    "log_transform", "log_unnorm", "lss_sample", "lss_step", "minima_log_regret", "negate",
    "optimize", "random_search_baseline", "select_stage_best", "shrink", "uniform_prior",
]
