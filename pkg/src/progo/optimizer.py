"""ProGO driver: sample a sequence of sharpening nascent minima densities.

Stage ``t`` (1-based) targets ``m_k`` with ``k = k0 * e**(t - 1)``: the
first stage uses ``k0`` and every stage multiplies ``k`` by ``e``.  Each
stage runs a latent slice sampler chain, keeps its highest-density sample,
and the run's answer is the best of those stage winners.
"""

from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from progo import kernels
from progo.density import NascentDensity, Prior, uniform_prior
from progo.errors import OptimizationAborted, ProgoError, ScheduleOverflowError
from progo.objectives import Objective
from progo.sampler import LssConfig, lss_sample

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ProgoConfig:
    k0: float = 5.0
    max_iters: int = 200
    lss: LssConfig = field(default_factory=LssConfig)
    warm_start: bool = True
    seed: int = 0

    def __post_init__(self):
        if not (self.k0 > 0 and math.isfinite(self.k0)):
            raise ValueError(f"k0 must be positive, got {self.k0}")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")


@dataclass
class IterationEntry:
    t: int
    k: Optional[float]
    incumbent_x: np.ndarray
    incumbent_f: float
    stage_best_x: np.ndarray
    stage_best_f: float
    cumulative_evals: int
    elapsed: float  # seconds since the run started


@dataclass
class RunRecord:
    method: str
    entries: list[IterationEntry] = field(default_factory=list)
    seed: Optional[int] = None
    overflow: bool = False

    @property
    def best_x(self) -> Optional[np.ndarray]:
        return self.entries[-1].incumbent_x if self.entries else None

    @property
    def best_f(self) -> float:
        return self.entries[-1].incumbent_f if self.entries else math.nan

    @property
    def evaluations(self) -> int:
        return self.entries[-1].cumulative_evals if self.entries else 0


def k_schedule(k0: float, t: int) -> float:
    """``k0 * e**t``, the inverse temperature after ``t`` multiplicative updates."""
    if not k0 > 0:
        raise ValueError(f"k0 must be positive, got {k0}")
    if t < 0:
        raise ValueError(f"t must be >= 0, got {t}")
    try:
        k = k0 * math.exp(t)
    except OverflowError:
        k = math.inf
    if not math.isfinite(k):
        raise ScheduleOverflowError(f"k0 * e**{t} overflows")
    return k


def select_stage_best(samples: Sequence, nd: NascentDensity, log_values=None) -> np.ndarray:
    """Sample with the largest ``log m_k``; the first one wins ties.

    ``log_values`` may carry precomputed ``nd.log_unnorm`` values to avoid
    re-evaluating the objective.
    """
    samples = np.asarray(samples, dtype=float)
    if samples.size == 0:
        raise ValueError("select_stage_best needs at least one sample")
    if samples.ndim == 1:
        samples = samples.reshape(-1, nd.dim)
    if log_values is None:
        log_values = np.array([nd.log_unnorm(x) for x in samples])
    return samples[int(np.argmax(log_values))].copy()


def _kernel_eligible(obj: Objective, prior: Prior) -> bool:
    return obj.kernel_code is not None and prior.kind == "uniform"


class _CountingObjective:
    def __init__(self, obj: Objective):
        self.fn = obj.fn
        self.count = 0

    def __call__(self, x) -> float:
        self.count += 1
        return float(self.fn(x))


def optimize(obj: Objective, prior: Optional[Prior] = None, cfg: Optional[ProgoConfig] = None,
             rng: Optional[np.random.Generator] = None, backend: Optional[str] = None) -> RunRecord:
    """Run ProGO on ``obj``.

    With ``cfg.warm_start`` each stage's chain starts from the previous
    stage's best sample; otherwise every stage restarts from the single
    point drawn from the prior before stage 1.  ``rng`` defaults to a
    generator seeded with ``cfg.seed``.

    Raises ``OptimizationAborted`` (with the partial record attached) if a
    stage's sampler fails.  A schedule overflow ends the run early with
    ``record.overflow`` set.
    """
    cfg = cfg or ProgoConfig()
    prior = prior or uniform_prior(obj.bounds)
    rng = rng if rng is not None else np.random.default_rng(cfg.seed)
    record = RunRecord("progo", seed=cfg.seed)
    use_kernel = _kernel_eligible(obj, prior)
    counter = _CountingObjective(obj)
    lower, upper = prior.support.lower, prior.support.upper

    x0 = np.asarray(prior.sample(rng), dtype=float)
    start = x0
    evals = 0
    inc_x, inc_f = None, math.inf
    t0 = time.perf_counter()

    for t in range(1, cfg.max_iters + 1):
        try:
            k = k_schedule(cfg.k0, t - 1)
        except ScheduleOverflowError:
            record.overflow = True
            logger.warning("k schedule overflowed at stage %d; stopping early", t)
            break
        if not math.isfinite(k * max(1.0, abs(inc_f) if math.isfinite(inc_f) else 1.0)):
            record.overflow = True
            break
        try:
            if use_kernel:
                chain = kernels.run_chain(obj.kernel_code, k, lower, upper, start, cfg.lss, rng,
                                          backend=backend)
                evals += chain.evaluations
                # Under a uniform prior argmax m_k is argmin f; use f directly to avoid k*f rounding ties.
                i = int(np.argmin(chain.f_values))
                stage_x, stage_f = chain.samples[i].copy(), float(chain.f_values[i])
            else:
                nd = NascentDensity(obj, prior, k)
                before = counter.count

                def log_target(x, _k=k):
                    lp = prior.log_density(x)
                    if lp == -math.inf:
                        return -math.inf
                    fx = counter(x)
                    if not math.isfinite(fx):
                        return math.nan
                    return -_k * fx + lp

                result = lss_sample(log_target, start, cfg.lss, rng)
                stage_x = select_stage_best(result.samples, nd, result.log_values)
                stage_f = counter(stage_x)
                evals += counter.count - before
        except ProgoError as exc:
            raise OptimizationAborted(f"stage {t} failed: {exc}", record=record, cause=exc) from exc

        if stage_f < inc_f:
            inc_x, inc_f = stage_x, stage_f
        record.entries.append(IterationEntry(
            t=t, k=k, incumbent_x=inc_x, incumbent_f=inc_f,
            stage_best_x=stage_x, stage_best_f=stage_f,
            cumulative_evals=evals, elapsed=time.perf_counter() - t0))
        start = stage_x if cfg.warm_start else x0
    return record


def random_search_baseline(obj: Objective, budget_evals: int, rng: np.random.Generator,
                           checkpoints: Optional[Sequence[int]] = None,
                           chunk: int = 65536) -> RunRecord:
    """Uniform random search in the box with a running-minimum incumbent.

    One entry is recorded per evaluation, or at each cumulative evaluation
    count in ``checkpoints`` (used to align with another method's budget).
    """
    if budget_evals < 1:
        raise ValueError("budget_evals must be >= 1")
    if checkpoints is None:
        checkpoints = range(1, budget_evals + 1)
    marks = sorted({min(int(c), budget_evals) for c in checkpoints if c >= 1})
    if not marks or marks[-1] != budget_evals:
        marks.append(budget_evals)

    record = RunRecord("random_search")
    lower, upper = obj.bounds.lower, obj.bounds.upper
    inc_x, inc_f = None, math.inf
    done = 0
    t0 = time.perf_counter()
    for t, mark in enumerate(marks, start=1):
        stage_x, stage_f = None, math.inf
        while done < mark:
            n = min(chunk, mark - done)
            xs = lower + (upper - lower) * rng.random((n, obj.dim))
            fs = obj.eval_batch(xs)
            i = int(np.argmin(fs))
            if fs[i] < stage_f:
                stage_x, stage_f = xs[i].copy(), float(fs[i])
            done += n
        if stage_f < inc_f:
            inc_x, inc_f = stage_x, stage_f
        record.entries.append(IterationEntry(
            t=t, k=None, incumbent_x=inc_x, incumbent_f=inc_f,
            stage_best_x=stage_x, stage_best_f=stage_f,
            cumulative_evals=done, elapsed=time.perf_counter() - t0))
    return record
