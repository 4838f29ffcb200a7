"""Log-scale regret of an estimate against a known optimum."""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np


class RegretPoint(NamedTuple):
    r_f: float
    r_m: float


def function_log_regret(f_val: float, f_star: float) -> float:
    """``log(f_val - f_star)``, or ``-inf`` when the gap is not positive."""
    f_val = float(f_val)
    f_star = float(f_star)
    if not (math.isfinite(f_val) and math.isfinite(f_star)):
        raise ValueError(f"regret needs finite inputs, got f_val={f_val}, f_star={f_star}")
    gap = f_val - f_star
    return math.log(gap) if gap > 0 else -math.inf


def minima_log_regret(x_est, x_star) -> float:
    """``log(||x_est - x_star||_2 / sqrt(d))``, or ``-inf`` on an exact hit."""
    x_est = np.asarray(x_est, dtype=float).reshape(-1)
    x_star = np.asarray(x_star, dtype=float).reshape(-1)
    if x_est.size != x_star.size or x_est.size == 0:
        raise ValueError(f"length mismatch: {x_est.size} vs {x_star.size}")
    if not (np.all(np.isfinite(x_est)) and np.all(np.isfinite(x_star))):
        raise ValueError("regret needs finite points")
    diff = x_est - x_star
    # Scale first so tiny offsets do not underflow when squared.
    scale = float(np.max(np.abs(diff)))
    if scale == 0.0:
        return -math.inf
    norm = scale * math.sqrt(float(np.sum((diff / scale) ** 2)))
    return math.log(norm) - 0.5 * math.log(x_est.size)


def regret(f_val, x_est, f_star, x_star) -> RegretPoint:
    r_f = function_log_regret(f_val, f_star) if f_star is not None else math.nan
    r_m = minima_log_regret(x_est, x_star) if x_star is not None else math.nan
    return RegretPoint(r_f, r_m)
