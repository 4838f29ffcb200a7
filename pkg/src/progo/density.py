"""Nascent minima densities ``m_k(x) ∝ exp(-k f(x)) π(x)``, kept in log space."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from progo.errors import EvaluationError, InvalidDimensionError, InvalidDomainError
from progo.objectives import BoxDomain, Objective


@dataclass(frozen=True, eq=False)
class Prior:
    """Proper prior density with full support on ``support``.

    ``log_density`` returns ``-inf`` outside the support; ``direct_sampler``
    draws one point from a caller-supplied ``numpy.random.Generator``.
    """

    log_density: Callable[[np.ndarray], float]
    direct_sampler: Callable[[np.random.Generator], np.ndarray]
    support: BoxDomain
    log_density_batch: Optional[Callable[[np.ndarray], np.ndarray]] = None
    kind: str = "custom"

    @property
    def dim(self) -> int:
        return self.support.dim

    def sample(self, rng: np.random.Generator) -> np.ndarray:
        return self.direct_sampler(rng)

    def log_density_many(self, xs) -> np.ndarray:
        xs = np.asarray(xs, dtype=float)
        if self.log_density_batch is not None:
            return np.asarray(self.log_density_batch(xs), dtype=float)
        return np.array([self.log_density(x) for x in xs], dtype=float)


def uniform_prior(box: BoxDomain) -> Prior:
    """Uniform prior on a box; ``log π = -Σ log(upper - lower)`` inside."""
    if not isinstance(box, BoxDomain):
        try:
            box = BoxDomain(*box)
        except TypeError as exc:
            raise InvalidDomainError(f"not a box: {box!r}") from exc
    lower, upper = box.lower, box.upper
    log_const = -box.log_volume()
    d = box.dim

    def log_density(x):
        x = np.asarray(x, dtype=float)
        if np.all(x >= lower) and np.all(x <= upper):
            return log_const
        return -math.inf

    def log_density_batch(xs):
        xs = np.asarray(xs, dtype=float)
        inside = np.all((xs >= lower) & (xs <= upper), axis=-1)
        return np.where(inside, log_const, -np.inf)

    def sampler(rng):
        return lower + (upper - lower) * rng.random(d)

    return Prior(log_density, sampler, box, log_density_batch, kind="uniform")


@dataclass(frozen=True, eq=False)
class NascentDensity:
    """Unnormalised ``exp(-k f) π`` for a fixed inverse temperature ``k``."""

    objective: Objective
    prior: Prior
    k: float

    def __post_init__(self):
        k = float(self.k)
        if not math.isfinite(k) or k < 0:
            raise ValueError(f"k must be finite and >= 0, got {self.k!r}")
        if self.prior.dim != self.objective.dim:
            raise InvalidDimensionError(
                f"prior is {self.prior.dim}-dimensional, objective is {self.objective.dim}")
        object.__setattr__(self, "k", k)

    @property
    def dim(self) -> int:
        return self.objective.dim

    def log_unnorm(self, x) -> float:
        """``-k f(x) + log π(x)``; ``f`` is not evaluated off the prior's support."""
        x = np.asarray(x, dtype=float)
        if x.shape != (self.dim,):
            raise InvalidDimensionError(f"expected a point of length {self.dim}, got {x.shape}")
        lp = self.prior.log_density(x)
        if lp == -math.inf:
            return -math.inf
        fx = float(self.objective.fn(x))
        if not math.isfinite(fx):
            raise EvaluationError(f"{self.objective.name}: non-finite value {fx} at {x}", point=x)
        return -self.k * fx + lp

    __call__ = log_unnorm

    def with_k(self, k: float) -> "NascentDensity":
        return NascentDensity(self.objective, self.prior, k)


def log_unnorm(nd: NascentDensity, x) -> float:
    return nd.log_unnorm(x)
