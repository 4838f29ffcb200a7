"""Validation suite run by ``progo validate``.

``fast`` covers the quadrature identities plus a KS test of the sampler on
a uniform target; ``full`` adds KS tests of the sampler against quadrature
CDFs of the demo1d nascent densities.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.special import logsumexp

from progo import sampler
from progo.density import NascentDensity, uniform_prior
from progo.errors import ProgoError
from progo.objectives import demo1d
from progo.oracle import (
    CheckResult,
    QuadratureGrid,
    check_derivative_identity,
    check_dlog_identity,
    check_limit_behavior,
    ks_distance,
    quad_cdf,
    quad_density,
    quad_mean_f,
    quad_normalizer,
)

KS_SAMPLES = 5000
KS_BURN_IN = 200
KS_UNIFORM_TOL = 0.025
KS_DENSITY_TOL = 0.05
DEMO_F_STAR = 0.353


def lss_samples(log_target, x0, seed: int, n: int = KS_SAMPLES, burn_in: int = KS_BURN_IN):
    cfg = sampler.LssConfig(burn_in=burn_in, sample_count=n)
    return sampler.lss_sample(log_target, np.atleast_1d(x0), cfg, np.random.default_rng(seed))


def _check(name, computed, expected, tol, passed, detail=""):
    return CheckResult(name, float(computed), float(expected), float(tol), bool(passed), detail)


def _normalisation_checks(obj, prior):
    out = []
    for k in (0, 1, 3, 9):
        nd = NascentDensity(obj, prior, k)
        grid = QuadratureGrid.for_density(nd)
        fine = grid.refined()
        log_z = quad_normalizer(nd, grid)
        # Integrate the normalised density on the refined grid.
        x = fine.nodes()[:, None]
        a = -k * obj.eval_batch(x) + prior.log_density_many(x) - log_z
        mass = math.exp(logsumexp(a + fine.log_weights()))
        out.append(_check(f"normalisation k={k}", mass, 1.0, 1e-8, abs(mass - 1) < 1e-8))
        drift = abs(quad_normalizer(nd, fine) - log_z)
        out.append(_check(f"simpson refinement k={k}", drift, 0.0, 1e-9, drift < 1e-9))
    return out


def _identity_checks(obj, prior):
    out = []
    mus = [quad_mean_f(NascentDensity(obj, prior, k)) for k in range(10)]
    steps = np.diff(mus)
    out.append(_check("mean monotone decreasing k=0..9", float(np.max(steps)), 0.0, 1e-6,
                      np.all(steps < -1e-6), "largest consecutive difference"))
    mu50 = quad_mean_f(NascentDensity(obj, prior, 50))
    out.append(_check("mean limit k=50", mu50, DEMO_F_STAR, 0.05, abs(mu50 - DEMO_F_STAR) < 0.05))
    for k in (1, 5):
        rep = check_derivative_identity(obj, prior, k)
        out.append(_check(f"dmu/dk = -Var at k={k}", rep.lhs, rep.rhs, 1e-3, rep.rel_error < 1e-3,
                          f"rel_error={rep.rel_error:.3g}"))
    rep = check_dlog_identity(NascentDensity(obj, prior, 2), 1.0)
    out.append(_check("dlog m/dk = mu - f at x=1, k=2", rep.lhs, rep.rhs, 1e-3,
                      rep.rel_error < 1e-3, f"rel_error={rep.rel_error:.3g}"))
    lim = check_limit_behavior(obj, prior, 1.756, 4.0)
    out.append(_check("m_k(4.0) vanishing k=1->27", lim.density_bad[-1], lim.density_bad[0], 0.0,
                      lim.bad_vanishing, "computed at k=27, expected bound at k=1"))
    out.append(_check("m_k(1.756)/m_k(4.0) increasing", lim.ratio_good_bad[-1],
                      lim.ratio_good_bad[0], 0.0, lim.ratio_increasing))
    grid = np.linspace(0.0, 5.0, 11)
    m0 = quad_density(NascentDensity(obj, prior, 0), grid)
    err = float(np.max(np.abs(m0 - 0.2)))
    out.append(_check("m_0 equals uniform prior", err, 0.0, 1e-10, err < 1e-10))
    return out


def _ks_check(name, log_target, table, x0, seed, tol):
    try:
        samples = lss_samples(log_target, x0, seed).samples[:, 0]
    except ProgoError as exc:
        return _check(name, math.nan, 0.0, tol, False, f"sampler error: {exc}")
    ks = ks_distance(samples, table)
    return _check(name, ks, 0.0, tol, ks < tol)


def run_validation(level: str = "fast", seed: int = 20240) -> list[CheckResult]:
    if level not in ("fast", "full"):
        raise ValueError(f"level must be 'fast' or 'full', got {level!r}")
    obj = demo1d()
    prior = uniform_prior(obj.bounds)
    results = _normalisation_checks(obj, prior) + _identity_checks(obj, prior)

    uniform_table = quad_cdf(NascentDensity(obj, prior, 0))
    results.append(_ks_check("KS lss vs uniform(0,5)", prior.log_density, uniform_table,
                             2.5, seed, KS_UNIFORM_TOL))
    if level == "full":
        for k in (1, 3, 9):
            nd = NascentDensity(obj, prior, k)
            results.append(_ks_check(f"KS lss vs demo1d m_{k}", nd.log_unnorm, quad_cdf(nd),
                                     2.5, seed + k, KS_DENSITY_TOL))
    return results
