"""End-to-end acceptance criteria, each at its stated tolerance.

Every test records a single PASS/FAIL line that is repeated in the pytest
terminal summary.  Criterion 9 is marked ``slow`` and is deselected by the
default profile; run it with ``pytest -m slow``.
"""

import math
import time

import numpy as np
import pytest

from progo.density import NascentDensity, uniform_prior
from progo.harness import main
from progo.objectives import ackley, demo1d, levy
from progo.optimizer import ProgoConfig, optimize
from progo.oracle import check_derivative_identity, check_dlog_identity, quad_mean_f
from progo.metrics import function_log_regret, minima_log_regret
from progo.validation import KS_BURN_IN, KS_SAMPLES, lss_samples
from progo.oracle import ks_distance, quad_cdf

SEEDS = range(10)


def final_regrets(obj, rec):
    return (function_log_regret(rec.best_f, obj.known_min_value),
            minima_log_regret(rec.best_x, obj.known_minimizer))


@pytest.fixture(scope="module")
def ackley20_runs():
    obj = ackley(20)
    t0 = time.perf_counter()
    runs = [optimize(obj, cfg=ProgoConfig(max_iters=200, seed=s)) for s in SEEDS]
    return obj, runs, time.perf_counter() - t0


def test_criterion_01_demo_optimum(report_criterion):
    obj = demo1d()
    t0 = time.perf_counter()
    recs = [optimize(obj, cfg=ProgoConfig(max_iters=30, seed=s)) for s in SEEDS]
    elapsed = time.perf_counter() - t0
    df = max(abs(r.best_f - 0.353) for r in recs)
    dx = max(abs(r.best_x[0] - 1.756) for r in recs)
    ok = df < 1e-3 and dx < 1e-2 and elapsed < 5.0
    report_criterion(1, ok, f"max|best_f-0.353|={df:.2e} max|best_x-1.756|={dx:.2e} "
                            f"time={elapsed:.2f}s")
    assert ok


def test_criterion_02_mean_monotone(report_criterion):
    obj = demo1d()
    prior = uniform_prior(obj.bounds)
    t0 = time.perf_counter()
    mus = [quad_mean_f(NascentDensity(obj, prior, k)) for k in range(10)]
    elapsed = time.perf_counter() - t0
    worst = float(np.max(np.diff(mus)))
    ok = worst < -1e-6 and elapsed < 1.0
    report_criterion(2, ok, f"largest step mu_(k+1)-mu_k={worst:.4g} time={elapsed:.2f}s")
    assert ok


def test_criterion_03_derivative_identity(report_criterion):
    obj = demo1d()
    prior = uniform_prior(obj.bounds)
    t0 = time.perf_counter()
    errs = [check_derivative_identity(obj, prior, k).rel_error for k in (1.0, 5.0)]
    elapsed = time.perf_counter() - t0
    ok = max(errs) < 1e-3 and elapsed < 1.0
    report_criterion(3, ok, f"rel errors k=1: {errs[0]:.2e}, k=5: {errs[1]:.2e} "
                            f"time={elapsed:.2f}s")
    assert ok


def test_criterion_04_dlog_identity(report_criterion):
    obj = demo1d()
    t0 = time.perf_counter()
    rep = check_dlog_identity(NascentDensity(obj, uniform_prior(obj.bounds), 2.0), 1.0)
    elapsed = time.perf_counter() - t0
    ok = rep.rel_error < 1e-3 and elapsed < 1.0
    report_criterion(4, ok, f"rel error at x=1, k=2: {rep.rel_error:.2e} time={elapsed:.2f}s")
    assert ok


def test_criterion_05_sampler_ks(report_criterion):
    obj = demo1d()
    prior = uniform_prior(obj.bounds)
    t0 = time.perf_counter()
    stats = {}
    base = NascentDensity(obj, prior, 0.0)
    out = lss_samples(prior.log_density, [2.5], seed=101)
    assert out.samples.shape == (KS_SAMPLES, 1)
    stats[0] = ks_distance(out.samples[:, 0], quad_cdf(base))
    for k in (1, 3, 9):
        nd = NascentDensity(obj, prior, float(k))
        stats[k] = ks_distance(lss_samples(nd.log_unnorm, [2.5], seed=101 + k).samples[:, 0],
                               quad_cdf(nd))
    elapsed = time.perf_counter() - t0
    ok = stats[0] < 0.025 and all(stats[k] < 0.05 for k in (1, 3, 9)) and elapsed < 30.0
    report_criterion(5, ok, f"KS uniform={stats[0]:.4f} m_1={stats[1]:.4f} m_3={stats[3]:.4f} "
                            f"m_9={stats[9]:.4f} (n={KS_SAMPLES}, burn-in={KS_BURN_IN}) "
                            f"time={elapsed:.1f}s")
    assert ok


def test_criterion_06_ackley20(ackley20_runs, report_criterion):
    obj, runs, elapsed = ackley20_runs
    regrets = [final_regrets(obj, r) for r in runs]
    for seed, (rf, rm) in zip(SEEDS, regrets):
        print(f"  ackley d=20 seed={seed}: r_f={rf!r} r_m={rm!r} best_f={runs[seed].best_f!r}")
    mean_rf = float(np.mean([r[0] for r in regrets]))
    mean_rm = float(np.mean([r[1] for r in regrets]))
    ok = mean_rf <= -10 and mean_rm <= -5
    report_criterion(6, ok, f"mean r_f={mean_rf:.4f} mean r_m={mean_rm:.4f} "
                            f"per-run r_f={[round(r[0], 4) for r in regrets]} time={elapsed:.1f}s")
    assert ok


def test_criterion_07_levy40(report_criterion):
    obj = levy(40)
    t0 = time.perf_counter()
    runs = [optimize(obj, cfg=ProgoConfig(max_iters=200, seed=s)) for s in SEEDS]
    elapsed = time.perf_counter() - t0
    regrets = [final_regrets(obj, r) for r in runs]
    for seed, (rf, rm) in zip(SEEDS, regrets):
        print(f"  levy d=40 seed={seed}: r_f={rf!r} r_m={rm!r}")
    mean_rf = float(np.mean([r[0] for r in regrets]))
    mean_rm = float(np.mean([r[1] for r in regrets]))
    ok = mean_rf <= 1.0 and mean_rm <= 0
    report_criterion(7, ok, f"mean r_f={mean_rf:.4f} mean r_m={mean_rm:.4f} time={elapsed:.1f}s")
    assert ok


def test_criterion_08_linear_log_regret(ackley20_runs, report_criterion):
    obj, runs, _ = ackley20_runs
    curves = np.array([[function_log_regret(e.incumbent_f, obj.known_min_value)
                        for e in r.entries[:50]] for r in runs])
    mean_curve = curves.mean(axis=0)
    slope = float(np.polyfit(np.arange(1, 51), mean_curve, 1)[0])
    ok = slope < 0 and abs(slope) > 0.05
    report_criterion(8, ok, f"least-squares slope of mean r_f over iterations 1-50 = "
                            f"{slope:.4f} per iteration")
    assert ok


@pytest.mark.slow
def test_criterion_09_ackley1000(report_criterion):
    obj = ackley(1000)
    t0 = time.perf_counter()
    rec = optimize(obj, cfg=ProgoConfig(max_iters=200, seed=0))
    elapsed = time.perf_counter() - t0
    rf, rm = final_regrets(obj, rec)
    ok = rf < 2.5 and elapsed < 1800
    report_criterion(9, ok, f"r_f={rf:.4f} r_m={rm:.4f} time={elapsed:.1f}s")
    assert ok


def test_criterion_10_determinism(tmp_path, report_criterion):
    paths = []
    for name in ("first.csv", "second.csv"):
        out = tmp_path / name
        assert main(["run", "--objective", "demo1d", "--repeats", "10", "--iters", "30",
                     "--seed", "0", "--out", str(out)]) == 0
        paths.append(out)

    def without_elapsed(path):
        return [line.rsplit(",", 1)[0] for line in path.read_text().splitlines()]

    a, b = (without_elapsed(p) for p in paths)
    ok = a == b and len(a) == 1 + 10 * 30
    report_criterion(10, ok, f"{len(a) - 1} rows identical excluding elapsed_ms: {a == b}")
    assert ok
