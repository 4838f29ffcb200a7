"""Latent slice sampler over an arbitrary log-density.

Each Gibbs sweep draws a proposal uniformly from the bracket
``[l - s/2, l + s/2]``, shrinks the bracket towards the current point on
rejection, then refreshes the latent level, widths ``s`` and anchors ``l``.
The widths carry a Gamma(2, beta) prior, whose full conditional given the
anchor is ``2|l - x| + Exponential(beta)``.

Random draws are taken from a ``numpy.random.Generator`` in a fixed order
(documented on each function) that the compiled kernel reproduces:

* ``init_state``: level ``u``; ``d`` pairs of uniforms for the Gamma widths;
  ``d`` uniforms for the anchors.
* ``lss_step``: per proposal, ``d`` uniforms; after acceptance, one uniform
  for the level, ``d`` for the exponential widths and ``d`` for the anchors.

The slice test compares ``log_target(x') - log_target(x) > log u`` rather
than against an absolute level.  With a sharply peaked target (``k`` around
1e80) the absolute level ``log_target(x) + log u`` rounds to
``log_target(x)`` and equal-valued moves would be rejected forever.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

from progo.errors import (
    EvaluationError,
    InvalidStartError,
    NonTerminationError,
    ShrinkageError,
)

LogTarget = Callable[[np.ndarray], float]


@dataclass(frozen=True)
class LssConfig:
    beta: float = 20.0
    max_shrink_steps: int = 1000
    burn_in: int = 20
    sample_count: int = 200

    def __post_init__(self):
        if not (self.beta > 0 and math.isfinite(self.beta)):
            raise ValueError(f"beta must be positive, got {self.beta}")
        if self.max_shrink_steps < 1:
            raise ValueError("max_shrink_steps must be >= 1")
        if self.burn_in < 0:
            raise ValueError("burn_in must be >= 0")
        if self.sample_count < 1:
            raise ValueError("sample_count must be >= 1")


@dataclass
class LssState:
    """Chain state: point ``x`` and the latent slice variables.

    The slice level is stored as ``log_u`` relative to ``log_px``; the
    absolute ``log_w`` is derived.
    """

    x: np.ndarray
    log_px: float
    log_u: float
    s: np.ndarray
    l: np.ndarray

    @property
    def log_w(self) -> float:
        return self.log_px + self.log_u

    @property
    def bracket(self) -> tuple[np.ndarray, np.ndarray]:
        half = 0.5 * self.s
        return np.minimum(self.l - half, self.x), np.maximum(self.l + half, self.x)


class LssResult(NamedTuple):
    samples: np.ndarray      # (N, d)
    log_values: np.ndarray   # (N,) log_target at each sample
    evaluations: int         # log_target calls, including the start point
    state: LssState


def _gamma2(rng: np.random.Generator, d: int, beta: float) -> np.ndarray:
    u = rng.random(2 * d).reshape(d, 2)
    return beta * (-np.log1p(-u[:, 0]) - np.log1p(-u[:, 1]))


def _eval(log_target: LogTarget, x: np.ndarray) -> float:
    value = float(log_target(x))
    if math.isnan(value):
        raise EvaluationError(f"log-target returned NaN at {x}", point=x.copy())
    return value


def init_state(log_target: LogTarget, x0, cfg: LssConfig, rng: np.random.Generator) -> LssState:
    x0 = np.array(x0, dtype=float).reshape(-1)
    d = x0.size
    lp0 = _eval(log_target, x0)
    if lp0 == -math.inf:
        raise InvalidStartError(f"start point {x0} has zero target density")
    log_u = math.log(rng.random())
    s = _gamma2(rng, d, cfg.beta)
    l = x0 + s * (rng.random(d) - 0.5)
    return LssState(x0, lp0, log_u, s, l)


def shrink(a: np.ndarray, b: np.ndarray, proposal: np.ndarray, current: np.ndarray):
    """Move each bracket edge to the rejected proposal, on its side of ``current``.

    Per coordinate: a proposal below the current point replaces ``a``,
    otherwise it replaces ``b``.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    proposal = np.asarray(proposal, dtype=float)
    current = np.asarray(current, dtype=float)
    if not (np.all(a <= current) and np.all(current <= b)):
        raise ShrinkageError(f"current point outside bracket: a={a}, x={current}, b={b}")
    slack = 4.0 * np.spacing(np.maximum(np.abs(a), np.abs(b)))
    if not (np.all(proposal >= a - slack) and np.all(proposal <= b + slack)):
        raise ShrinkageError(f"proposal outside bracket: a={a}, p={proposal}, b={b}")
    below = proposal < current
    # A proposal that rounds onto an edge cannot shrink it; collapse that edge
    # onto the current point so ulp-wide brackets still terminate.
    new_a = np.where(below, np.where(proposal > a, proposal, current), a)
    new_b = np.where(below, b, np.where(proposal < b, proposal, current))
    return new_a, new_b


def lss_step(state: LssState, log_target: LogTarget, cfg: LssConfig,
             rng: np.random.Generator) -> tuple[LssState, int]:
    """One Gibbs sweep; returns the new state and the number of target evaluations."""
    x = state.x
    d = x.size
    a, b = state.bracket
    evals = 0
    for attempt in range(cfg.max_shrink_steps + 1):
        proposal = a + (b - a) * rng.random(d)
        lp = _eval(log_target, proposal)
        evals += 1
        if lp - state.log_px > state.log_u:
            break
        if attempt == cfg.max_shrink_steps:
            raise NonTerminationError(
                f"no acceptable proposal after {cfg.max_shrink_steps} shrinkage steps", state=state)
        a, b = shrink(a, b, proposal, x)

    log_u = math.log(rng.random())
    s = 2.0 * np.abs(state.l - proposal) + cfg.beta * -np.log1p(-rng.random(d))
    l = proposal + s * (rng.random(d) - 0.5)
    return LssState(proposal, lp, log_u, s, l), evals


def lss_sample(log_target: LogTarget, x0, cfg: LssConfig, rng: np.random.Generator) -> LssResult:
    """Run ``burn_in`` discarded sweeps then record ``sample_count`` sweeps."""
    state = init_state(log_target, x0, cfg, rng)
    evals = 1
    d = state.x.size
    n = cfg.sample_count
    samples = np.empty((n, d))
    log_values = np.empty(n)
    for t in range(cfg.burn_in + n):
        state, used = lss_step(state, log_target, cfg, rng)
        evals += used
        i = t - cfg.burn_in
        if i >= 0:
            samples[i] = state.x
            log_values[i] = state.log_px
    return LssResult(samples, log_values, evals, state)
