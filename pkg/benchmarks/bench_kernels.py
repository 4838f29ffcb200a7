"""Time the compiled LSS kernel against the pure-Python fallback.

Usage:
  python3 benchmarks/bench_kernels.py
  python3 benchmarks/bench_kernels.py --repeat 5 --cases demo1d:1 ackley:20
"""

import argparse
import time

import numpy as np

from progo import kernels
from progo.objectives import get_objective
from progo.sampler import LssConfig


def time_chain(obj, k, backend, repeat, seed):
    cfg = LssConfig()
    x0 = 0.5 * (obj.bounds.lower + obj.bounds.upper) + 0.1
    best = np.inf
    for r in range(repeat):
        rng = np.random.default_rng(seed + r)
        t0 = time.perf_counter()
        out = kernels.run_chain(obj.kernel_code, k, obj.bounds.lower, obj.bounds.upper, x0, cfg,
                                rng, backend=backend)
        best = min(best, time.perf_counter() - t0)
    return best, out.evaluations


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--cases", nargs="+", default=["demo1d:1", "ackley:20", "levy:40"],
                        help="objective:dim pairs")
    parser.add_argument("--k", type=float, default=5.0, help="inverse temperature")
    parser.add_argument("--repeat", type=int, default=3, help="best-of repeats per backend")
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    backends = kernels.available_backends()
    if "compiled" not in backends:
        print("compiled extension not built; timing the python fallback only")
    print(f"{'case':<12}{'backend':<10}{'seconds':>10}{'evals':>10}{'us/eval':>10}{'speedup':>10}")
    for case in args.cases:
        name, dim = case.split(":")
        obj = get_objective(name, int(dim))
        timed = {b: time_chain(obj, args.k, b, args.repeat, args.seed) for b in backends}
        for b, (sec, evals) in timed.items():
            speed = timed["python"][0] / sec
            print(f"{case:<12}{b:<10}{sec:>10.4f}{evals:>10d}{1e6 * sec / evals:>10.2f}"
                  f"{speed:>10.1f}")


if __name__ == "__main__":
    main()
