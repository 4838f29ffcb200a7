"""Pure-Python implementation of the compiled kernel's interface.

Runs the reference sampler on ``-k f(x)`` restricted to the box, so both
backends consume the generator identically and differ only in how the
objective's floating-point sums are rounded.
"""

from __future__ import annotations

import math

import numpy as np

from progo import objectives
from progo.errors import EvaluationError
from progo.sampler import LssConfig, lss_sample

_FUNCTIONS = {
    objectives.KERNEL_ACKLEY: objectives._ackley_fn,
    objectives.KERNEL_LEVY: objectives._levy_fn,
    objectives.KERNEL_DEMO1D: objectives._demo1d_fn,
}


def evaluate(code: int, x) -> float:
    try:
        fn = _FUNCTIONS[code]
    except KeyError:
        raise ValueError(f"unknown kernel code {code}") from None
    return float(fn(np.asarray(x, dtype=float)))


def run_chain(code, k, lower, upper, x0, beta, burn_in, sample_count, max_shrink, rng):
    try:
        fn = _FUNCTIONS[code]
    except KeyError:
        raise ValueError(f"unknown kernel code {code}") from None
    lower = np.asarray(lower, dtype=float)
    upper = np.asarray(upper, dtype=float)
    evals = 0
    last_f = {}

    def log_target(x):
        nonlocal evals
        if not (np.all(x >= lower) and np.all(x <= upper)):
            return -math.inf
        fx = float(fn(x))
        evals += 1
        if not math.isfinite(fx):
            raise EvaluationError(f"non-finite objective value {fx} at {x}", point=x.copy())
        last_f[x.tobytes()] = fx
        return -k * fx

    cfg = LssConfig(beta=beta, max_shrink_steps=max_shrink, burn_in=burn_in,
                    sample_count=sample_count)
    result = lss_sample(log_target, x0, cfg, rng)
    fvals = np.array([last_f[row.tobytes()] for row in result.samples])
    return result.samples, fvals, evals
