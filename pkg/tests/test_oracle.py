import math

import numpy as np
import pytest
from scipy.optimize import brentq

from progo.density import NascentDensity, uniform_prior
from progo.errors import UnsupportedDimensionError
from progo.objectives import BoxDomain, Objective, ackley, demo1d
from progo.oracle import (
    QuadratureGrid,
    check_derivative_identity,
    check_dlog_identity,
    check_limit_behavior,
    ks_distance,
    quad_cdf,
    quad_density,
    quad_mean_f,
    quad_moments,
    quad_normalizer,
    quad_var_f,
)

DEMO = demo1d()
PRIOR = uniform_prior(DEMO.bounds)


def nd(k, obj=DEMO, prior=PRIOR):
    return NascentDensity(obj, prior, k)


def constant(c):
    return Objective("const", 1, BoxDomain([0.0], [5.0]),
                     lambda x: np.full(np.shape(x)[:-1], c, dtype=float))


class TestGrid:
    @pytest.mark.parametrize("kw", [dict(lo=0, hi=1, n=3), dict(lo=1, hi=0), dict(lo=0, hi=1, n=0)])
    def test_invalid(self, kw):
        with pytest.raises(ValueError):
            QuadratureGrid(**kw)

    def test_weights_integrate_polynomial(self):
        g = QuadratureGrid(0.0, 2.0, 10)
        # Simpson is exact for cubics.
        assert np.sum(np.exp(g.log_weights()) * g.nodes() ** 3) == pytest.approx(4.0, rel=1e-14)


class TestNormalizer:
    def test_k0(self):
        assert quad_normalizer(nd(0.0)) == pytest.approx(0.0, abs=1e-12)

    def test_refinement(self):
        g = QuadratureGrid.for_density(nd(1.0))
        assert math.isfinite(quad_normalizer(nd(1.0), g))
        assert abs(quad_normalizer(nd(1.0), g) - quad_normalizer(nd(1.0), g.refined())) < 1e-10

    def test_remark_bound(self):
        # The integral of exp(-k f) pi is at most exp(-k min f).
        f_min = DEMO.eval_batch(np.linspace(0, 5, 200001)[:, None]).min()
        assert quad_normalizer(nd(9.0)) <= -9.0 * f_min

    def test_huge_k_finite(self):
        assert math.isfinite(quad_normalizer(nd(1e6)))

    def test_unsupported_dimension(self):
        obj = ackley(2)
        with pytest.raises(UnsupportedDimensionError):
            quad_normalizer(NascentDensity(obj, uniform_prior(obj.bounds), 1.0))

    @pytest.mark.parametrize("k", [0.0, 1.0, 3.0, 9.0])
    def test_self_consistency(self, k):
        g = QuadratureGrid.for_density(nd(k))
        for fn in (quad_normalizer, quad_mean_f, quad_var_f):
            assert abs(fn(nd(k), g) - fn(nd(k), g.refined())) < 1e-9


class TestMoments:
    def test_constant(self):
        c = constant(2.5)
        mu, var = quad_moments(nd(0.0, c, uniform_prior(c.bounds)))
        assert mu == pytest.approx(2.5, abs=1e-12)
        assert var == pytest.approx(0.0, abs=1e-12)

    def test_monotone(self):
        mus = [quad_mean_f(nd(k)) for k in range(10)]
        assert np.all(np.diff(mus) < -1e-6)

    def test_limit(self):
        assert quad_mean_f(nd(9.0)) - 0.353 < quad_mean_f(nd(0.0)) - 0.353
        assert abs(quad_mean_f(nd(50.0)) - 0.353) < 0.05


class TestIdentities:
    @pytest.mark.parametrize("k", [1.0, 5.0])
    def test_derivative(self, k):
        assert check_derivative_identity(DEMO, PRIOR, k).rel_error < 1e-3

    def test_derivative_constant(self):
        c = constant(1.5)
        rep = check_derivative_identity(c, uniform_prior(c.bounds), 2.0)
        assert abs(rep.lhs) < 1e-12 and abs(rep.rhs) < 1e-12

    @pytest.mark.parametrize("x", [1.0, 1.756])
    def test_dlog(self, x):
        assert check_dlog_identity(nd(2.0), x).rel_error < 1e-3

    def test_dlog_at_mean_level(self):
        mu = quad_mean_f(nd(2.0))
        # f rises from 0.35 at 1.756 to about 1.2 at 2.2; mu lies between.
        x = brentq(lambda t: DEMO.eval([t]) - mu, 1.756, 2.2, xtol=1e-14)
        assert abs(check_dlog_identity(nd(2.0), x).lhs) < 1e-6

    def test_dlog_constant(self):
        c = constant(1.5)
        rep = check_dlog_identity(nd(2.0, c, uniform_prior(c.bounds)), 3.0)
        assert abs(rep.lhs) < 1e-12 and abs(rep.rhs) < 1e-12

    def test_dlog_outside_support(self):
        with pytest.raises(ValueError):
            check_dlog_identity(nd(2.0), 6.0)


class TestLimit:
    def test_demo(self):
        rep = check_limit_behavior(DEMO, PRIOR, 1.756, 4.0)
        assert rep.density_bad[-1] < rep.density_bad[0]
        assert rep.ratio_good_bad[-1] > rep.ratio_good_bad[0]
        assert rep.ratio_increasing and rep.bad_vanishing

    def test_bad_density_rises_before_falling(self):
        # m_k(4.0) grows from k=1 to k=3 while mu_k is still above f(4.0).
        rep = check_limit_behavior(DEMO, PRIOR, 1.756, 4.0)
        assert rep.density_bad[1] > rep.density_bad[0]
        assert not rep.bad_decreasing

    def test_k0_uniform(self):
        np.testing.assert_allclose(quad_density(nd(0.0), np.linspace(0, 5, 101)), 0.2, atol=1e-10)


class TestKs:
    def test_inverse_cdf_samples(self):
        table = quad_cdf(nd(3.0))
        u = np.random.default_rng(0).random(5000)
        assert ks_distance(table.quantile(u), table) < 1.63 / math.sqrt(5000)

    def test_single_sample_at_median(self):
        table = quad_cdf(nd(3.0))
        assert ks_distance([table.quantile(0.5)], table) == pytest.approx(0.5, abs=1e-3)

    def test_empty(self):
        with pytest.raises(ValueError):
            ks_distance([], quad_cdf(nd(1.0)))

    def test_cdf_monotone(self):
        table = quad_cdf(nd(9.0))
        assert table.cdf[0] == 0.0 and table.cdf[-1] == 1.0
        assert np.all(np.diff(table.cdf) >= 0)
