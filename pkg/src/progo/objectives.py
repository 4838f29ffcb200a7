"""Objective functions on box domains.

Every objective carries its ground-truth optimum (when known) so that regret
is never computed against hard-coded constants.  Objective callables are
vectorised over the last axis: ``fn(X)`` maps an array of shape ``(..., d)``
to shape ``(...)``.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from progo.errors import EvaluationError, InvalidDimensionError, InvalidDomainError

logger = logging.getLogger(__name__)

# Identifiers understood by the compiled kernel; keep in sync with _lss_kernel.pyx.
KERNEL_ACKLEY = 0
KERNEL_LEVY = 1
KERNEL_DEMO1D = 2

# Tolerance for the opportunistic ``f(x) >= f*`` check.
_MIN_VALUE_SLACK = 1e-12


def _frozen(values) -> np.ndarray:
    arr = np.array(values, dtype=float).reshape(-1)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class BoxDomain:
    """Axis-aligned box ``[lower, upper]`` in R^d."""

    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lower = _frozen(self.lower)
        upper = _frozen(self.upper)
        if lower.shape != upper.shape or lower.size == 0:
            raise InvalidDomainError("lower and upper must be non-empty and the same length")
        if not (np.all(np.isfinite(lower)) and np.all(np.isfinite(upper))):
            raise InvalidDomainError("box bounds must be finite")
        if np.any(lower >= upper):
            raise InvalidDomainError(f"degenerate box: lower={lower}, upper={upper}")
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)

    @classmethod
    def cube(cls, lo: float, hi: float, dim: int) -> "BoxDomain":
        return cls(np.full(dim, lo, dtype=float), np.full(dim, hi, dtype=float))

    @property
    def dim(self) -> int:
        return self.lower.size

    @property
    def widths(self) -> np.ndarray:
        return self.upper - self.lower

    def log_volume(self) -> float:
        return float(np.sum(np.log(self.widths)))

    def contains(self, x) -> bool:
        x = np.asarray(x, dtype=float)
        return bool(np.all(x >= self.lower) and np.all(x <= self.upper))

    def __eq__(self, other):
        if not isinstance(other, BoxDomain):
            return NotImplemented
        return np.array_equal(self.lower, other.lower) and np.array_equal(self.upper, other.upper)

    def __hash__(self):
        return hash((self.lower.tobytes(), self.upper.tobytes()))

    def __repr__(self):
        if np.all(self.lower == self.lower[0]) and np.all(self.upper == self.upper[0]):
            return f"BoxDomain([{self.lower[0]:g}, {self.upper[0]:g}]^{self.dim})"
        return f"BoxDomain(lower={self.lower.tolist()}, upper={self.upper.tolist()})"


@dataclass(frozen=True, eq=False)
class Objective:
    """A deterministic scalar function on a box, with optional optimum metadata.

    ``kernel_code`` marks the built-in benchmarks the compiled sampler kernel
    can evaluate natively; wrapped or user objectives leave it as ``None``.
    """

    name: str
    dim: int
    bounds: BoxDomain
    fn: Callable[[np.ndarray], np.ndarray]
    known_min_value: Optional[float] = None
    known_minimizer: Optional[np.ndarray] = None
    kernel_code: Optional[int] = None
    _warned: list = field(default_factory=list, repr=False)

    def __post_init__(self):
        if int(self.dim) < 1:
            raise InvalidDimensionError(f"dimension must be >= 1, got {self.dim}")
        if self.bounds.dim != self.dim:
            raise InvalidDomainError(
                f"bounds have {self.bounds.dim} intervals but dim is {self.dim}")
        if self.known_minimizer is not None:
            xstar = _frozen(self.known_minimizer)
            if xstar.size != self.dim:
                raise InvalidDimensionError("known_minimizer length does not match dim")
            object.__setattr__(self, "known_minimizer", xstar)

    def eval(self, x) -> float:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.dim,):
            raise InvalidDimensionError(f"expected a point of length {self.dim}, got shape {x.shape}")
        value = float(self.fn(x))
        self._check_lower_bound(value, x)
        return value

    __call__ = eval

    def eval_batch(self, xs) -> np.ndarray:
        xs = np.asarray(xs, dtype=float)
        if xs.ndim != 2 or xs.shape[1] != self.dim:
            raise InvalidDimensionError(f"expected shape (n, {self.dim}), got {xs.shape}")
        return np.asarray(self.fn(xs), dtype=float)

    def _check_lower_bound(self, value, x):
        # Stored optima may be rounded (demo1d), so a violation is reported, not raised.
        if (self.known_min_value is not None and not self._warned
                and value < self.known_min_value - _MIN_VALUE_SLACK):
            self._warned.append(True)
            logger.warning("%s: f(%s) = %.17g is below the recorded minimum %.17g",
                           self.name, np.array2string(x, precision=6), value,
                           self.known_min_value)


# --- benchmark functions -------------------------------------------------

_ACKLEY_A = 20.0
_ACKLEY_B = 0.2
_ACKLEY_C = 2.0 * math.pi


def _ackley_fn(x):
    x = np.asarray(x, dtype=float)
    d = x.shape[-1]
    # Term order follows the textbook formula; near the origin it floors at 2**-51.
    t1 = -_ACKLEY_A * np.exp(-_ACKLEY_B * np.sqrt(np.sum(x * x, axis=-1) / d))
    t2 = -np.exp(np.sum(np.cos(_ACKLEY_C * x), axis=-1) / d)
    return t1 + t2 + _ACKLEY_A + math.e


def _sin2pi(v):
    # sin^2(pi v) after exact reduction by the nearest integer, so it is 0 at integers.
    return np.sin(math.pi * (v - np.rint(v))) ** 2


def _levy_fn(x):
    x = np.asarray(x, dtype=float)
    w = 1.0 + (x - 1.0) / 4.0
    head = _sin2pi(w[..., 0])
    wm = w[..., :-1]
    middle = np.sum((wm - 1.0) ** 2 * (1.0 + 10.0 * np.sin(math.pi * wm + 1.0) ** 2), axis=-1)
    wd = w[..., -1]
    tail = (wd - 1.0) ** 2 * (1.0 + _sin2pi(2.0 * wd))
    return head + middle + tail


def _demo1d_fn(x):
    x = np.asarray(x, dtype=float)[..., 0]
    return np.cos(x * x) + x / 5.0 + 1.0


def _check_dim(d) -> int:
    if isinstance(d, bool) or int(d) != d or int(d) < 1:
        raise InvalidDimensionError(f"dimension must be a positive integer, got {d!r}")
    return int(d)


def ackley(d: int) -> Objective:
    """Ackley function (a=20, b=0.2, c=2*pi) on [-20, 20]^d, minimum 0 at the origin."""
    d = _check_dim(d)
    return Objective("ackley", d, BoxDomain.cube(-20.0, 20.0, d), _ackley_fn,
                     known_min_value=0.0, known_minimizer=np.zeros(d),
                     kernel_code=KERNEL_ACKLEY)


def levy(d: int) -> Objective:
    """Levy function on [-7.5, 7.5]^d, minimum 0 at (1, ..., 1)."""
    d = _check_dim(d)
    return Objective("levy", d, BoxDomain.cube(-7.5, 7.5, d), _levy_fn,
                     known_min_value=0.0, known_minimizer=np.ones(d),
                     kernel_code=KERNEL_LEVY)


def demo1d() -> Objective:
    """``cos(x^2) + x/5 + 1`` on [0, 5].

    The optimum is stored at three decimals (0.353 at x = 1.756); the true
    minimum is slightly lower, so regret against it can go to ``-inf``.
    """
    return Objective("demo1d", 1, BoxDomain([0.0], [5.0]), _demo1d_fn,
                     known_min_value=0.353, known_minimizer=np.array([1.756]),
                     kernel_code=KERNEL_DEMO1D)


# --- transform wrappers --------------------------------------------------

def negate(obj: Objective) -> Objective:
    """Objective for maximising ``obj``: minimising ``-f``.

    The minimum of ``-f`` is unrelated to that of ``f``, so optimum metadata
    is dropped.
    """
    fn = obj.fn

    def neg(x):
        return -fn(x)

    return Objective(f"neg({obj.name})", obj.dim, obj.bounds, neg)


def log_transform(obj: Objective) -> Objective:
    """``log f`` for a strictly positive ``f``; argmin is unchanged."""
    fn = obj.fn

    def logf(x):
        v = np.asarray(fn(x), dtype=float)
        bad = ~(v > 0)
        if np.any(bad):
            xs = np.asarray(x, dtype=float)
            point = xs if v.ndim == 0 else xs.reshape(-1, obj.dim)[int(np.flatnonzero(bad.ravel())[0])]
            raise EvaluationError(f"log_transform({obj.name}): f <= 0 at {point}", point=point)
        return np.log(v)

    fstar = obj.known_min_value
    return Objective(
        f"log({obj.name})", obj.dim, obj.bounds, logf,
        known_min_value=math.log(fstar) if fstar is not None and fstar > 0 else None,
        known_minimizer=obj.known_minimizer if fstar is not None and fstar > 0 else None,
    )


REGISTRY: dict[str, Callable[[int], Objective]] = {
    "ackley": ackley,
    "levy": levy,
    "demo1d": lambda d=1: demo1d() if _check_dim(d) == 1 else _demo_dim_error(d),
}


def _demo_dim_error(d):
    raise InvalidDimensionError(f"demo1d is one-dimensional, got dim={d}")


def get_objective(name: str, dim: int = 1) -> Objective:
    """Look up a registered objective by name; raises ``KeyError`` if unknown."""
    try:
        factory = REGISTRY[name]
    except KeyError:
        raise KeyError(f"unknown objective {name!r}; choose from {sorted(REGISTRY)}") from None
    return factory(dim)
