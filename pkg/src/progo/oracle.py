"""Quadrature oracle for one-dimensional nascent minima densities.

Everything here integrates on a fixed composite-Simpson grid in log space
and shares nothing with the sampler or optimizer beyond evaluating the
objective and prior.  That independence is what makes agreement between the
two meaningful.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np
from scipy import stats
from scipy.special import logsumexp

from progo.density import NascentDensity, Prior
from progo.errors import UnsupportedDimensionError
from progo.objectives import Objective


@dataclass(frozen=True)
class QuadratureGrid:
    lo: float
    hi: float
    n: int = 20000

    def __post_init__(self):
        if not self.hi > self.lo:
            raise ValueError(f"need hi > lo, got [{self.lo}, {self.hi}]")
        if self.n < 2 or self.n % 2:
            raise ValueError(f"panel count must be even and >= 2, got {self.n}")

    @classmethod
    def for_density(cls, nd: NascentDensity, n: int = 20000) -> "QuadratureGrid":
        _require_1d(nd.objective)
        return cls(float(nd.prior.support.lower[0]), float(nd.prior.support.upper[0]), n)

    @property
    def step(self) -> float:
        return (self.hi - self.lo) / self.n

    def nodes(self) -> np.ndarray:
        return np.linspace(self.lo, self.hi, self.n + 1)

    def log_weights(self) -> np.ndarray:
        w = np.ones(self.n + 1)
        w[1:-1:2] = 4.0
        w[2:-1:2] = 2.0
        return np.log(w * self.step / 3.0)

    def refined(self) -> "QuadratureGrid":
        return QuadratureGrid(self.lo, self.hi, 2 * self.n)


def _require_1d(obj: Objective):
    if obj.dim != 1:
        raise UnsupportedDimensionError(f"quadrature oracle supports d = 1 only, got d = {obj.dim}")


def _grid(nd: NascentDensity, grid: Optional[QuadratureGrid]) -> QuadratureGrid:
    _require_1d(nd.objective)
    return grid if grid is not None else QuadratureGrid.for_density(nd)


def _tabulate(obj: Objective, prior: Prior, grid: QuadratureGrid):
    """Objective values and log prior on the grid nodes."""
    x = grid.nodes()
    f = obj.eval_batch(x[:, None])
    log_pi = prior.log_density_many(x[:, None])
    return x, f, log_pi


def _log_integrand(k, f, log_pi):
    # -k*f would give nan where the prior is zero and f is infinite; mask first.
    out = np.full_like(f, -np.inf)
    ok = np.isfinite(log_pi)
    out[ok] = -k * f[ok] + log_pi[ok]
    return out


def _normalised_weights(k, f, log_pi, log_w):
    a = _log_integrand(k, f, log_pi) + log_w
    return np.exp(a - logsumexp(a))


def quad_normalizer(nd: NascentDensity, grid: Optional[QuadratureGrid] = None) -> float:
    """Log of the normalising integral of ``exp(-k f) π``."""
    grid = _grid(nd, grid)
    _, f, log_pi = _tabulate(nd.objective, nd.prior, grid)
    return float(logsumexp(_log_integrand(nd.k, f, log_pi) + grid.log_weights()))


def quad_mean_f(nd: NascentDensity, grid: Optional[QuadratureGrid] = None) -> float:
    """``E[f(X)]`` for ``X ~ m_k``."""
    return quad_moments(nd, grid)[0]


def quad_var_f(nd: NascentDensity, grid: Optional[QuadratureGrid] = None) -> float:
    """``Var[f(X)]`` for ``X ~ m_k``."""
    return quad_moments(nd, grid)[1]


def quad_moments(nd: NascentDensity, grid: Optional[QuadratureGrid] = None) -> tuple[float, float]:
    grid = _grid(nd, grid)
    _, f, log_pi = _tabulate(nd.objective, nd.prior, grid)
    p = _normalised_weights(nd.k, f, log_pi, grid.log_weights())
    mu = float(np.sum(p * f))
    var = float(np.sum(p * (f - mu) ** 2))
    return mu, max(var, 0.0)


def quad_density(nd: NascentDensity, x, grid: Optional[QuadratureGrid] = None) -> np.ndarray:
    """Normalised ``m_k`` at the points ``x``."""
    x = np.atleast_1d(np.asarray(x, dtype=float)).reshape(-1, 1)
    log_z = quad_normalizer(nd, grid)
    f = nd.objective.eval_batch(x)
    log_pi = nd.prior.log_density_many(x)
    return np.exp(_log_integrand(nd.k, f, log_pi) - log_z)


# --- identity checks -----------------------------------------------------

@dataclass
class CheckResult:
    """One validation outcome; serialised as a single report line."""

    name: str
    computed: float
    expected: float
    tolerance: float
    passed: bool
    detail: str = ""

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        text = (f"{status}  {self.name}: computed={self.computed:.10g} "
                f"expected={self.expected:.10g} tol={self.tolerance:.3g}")
        return text + (f"  ({self.detail})" if self.detail else "")


@dataclass
class IdentityReport:
    lhs: float            # finite-difference side
    rhs: float            # closed-form side
    abs_error: float
    rel_error: float


def _report(lhs, rhs) -> IdentityReport:
    err = abs(lhs - rhs)
    scale = abs(rhs)
    return IdentityReport(lhs, rhs, err, err / scale if scale > 0 else (0.0 if err == 0 else math.inf))


def _default_h(k):
    return 1e-4 * max(1.0, k)


def check_derivative_identity(obj: Objective, prior: Prior, k: float,
                              grid: Optional[QuadratureGrid] = None,
                              h: Optional[float] = None) -> IdentityReport:
    """Central difference of ``mu_k`` in ``k`` against ``-Var_k(f)``."""
    h = _default_h(k) if h is None else h
    if k - h < 0:
        raise ValueError(f"step h={h} would take k={k} below zero")
    nd = NascentDensity(obj, prior, k)
    grid = _grid(nd, grid)
    mu_hi = quad_mean_f(nd.with_k(k + h), grid)
    mu_lo = quad_mean_f(nd.with_k(k - h), grid)
    return _report((mu_hi - mu_lo) / (2.0 * h), -quad_var_f(nd, grid))


def check_dlog_identity(nd: NascentDensity, x, grid: Optional[QuadratureGrid] = None,
                        h: Optional[float] = None) -> IdentityReport:
    """Central difference of ``log m_k(x)`` in ``k`` against ``mu_k - f(x)``."""
    k = nd.k
    h = _default_h(k) if h is None else h
    if k - h < 0:
        raise ValueError(f"step h={h} would take k={k} below zero")
    grid = _grid(nd, grid)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    fx = float(nd.objective.eval_batch(x[None, :])[0])
    log_pi = float(nd.prior.log_density_many(x[None, :])[0])
    if not math.isfinite(log_pi):
        raise ValueError(f"x={x} is outside the prior support")

    def log_m(kk):
        return -kk * fx + log_pi - quad_normalizer(nd.with_k(kk), grid)

    fd = (log_m(k + h) - log_m(k - h)) / (2.0 * h)
    return _report(fd, quad_mean_f(nd, grid) - fx)


@dataclass
class LimitReport:
    """Normalised densities over a ``k`` sequence.

    ``m_k(x_bad)`` only starts falling once ``mu_k`` drops below
    ``f(x_bad)``, so ``bad_decreasing`` (strict monotonicity over the whole
    sequence) can legitimately be false while ``bad_vanishing`` holds.
    """

    ks: list
    density_bad: list
    ratio_good_bad: list
    bad_decreasing: bool
    bad_vanishing: bool
    ratio_increasing: bool


def check_limit_behavior(obj: Objective, prior: Prior, x_good: float, x_bad: float,
                         ks: Sequence[float] = (1, 3, 9, 27),
                         grid: Optional[QuadratureGrid] = None) -> LimitReport:
    """Normalised density away from the minimiser falls with ``k``; the good/bad ratio grows."""
    dens_bad, ratios = [], []
    for k in ks:
        nd = NascentDensity(obj, prior, k)
        m_good, m_bad = quad_density(nd, [x_good, x_bad], grid)
        dens_bad.append(float(m_bad))
        ratios.append(float(m_good / m_bad))
    return LimitReport(list(ks), dens_bad, ratios,
                       bad_decreasing=bool(np.all(np.diff(dens_bad) < 0)),
                       bad_vanishing=dens_bad[-1] < dens_bad[0],
                       ratio_increasing=bool(np.all(np.diff(ratios) > 0)))


# --- distribution checks -------------------------------------------------

@dataclass(frozen=True)
class CdfTable:
    x: np.ndarray
    cdf: np.ndarray

    def __call__(self, q):
        return np.interp(q, self.x, self.cdf, left=0.0, right=1.0)

    def quantile(self, p):
        return np.interp(p, self.cdf, self.x)


def quad_cdf(nd: NascentDensity, grid: Optional[QuadratureGrid] = None) -> CdfTable:
    """CDF of ``m_k`` at every other grid node, by cumulative Simpson panels."""
    grid = _grid(nd, grid)
    x, f, log_pi = _tabulate(nd.objective, nd.prior, grid)
    a = _log_integrand(nd.k, f, log_pi)
    p = np.exp(a - np.max(a))
    pairs = (p[:-2:2] + 4.0 * p[1:-1:2] + p[2::2]) * grid.step / 3.0
    cdf = np.concatenate([[0.0], np.cumsum(pairs)])
    cdf /= cdf[-1]
    return CdfTable(x[::2].copy(), np.maximum.accumulate(cdf))


def ks_distance(samples: Iterable[float], cdf_table: CdfTable) -> float:
    """Kolmogorov-Smirnov statistic of ``samples`` against a tabulated CDF."""
    samples = np.asarray(list(samples) if not isinstance(samples, np.ndarray) else samples,
                         dtype=float).reshape(-1)
    if samples.size == 0:
        raise ValueError("ks_distance needs at least one sample")
    return float(stats.kstest(samples, cdf_table).statistic)
