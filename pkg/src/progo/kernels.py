"""Backend selection for the LSS hot loop.

The compiled extension is used when it imports cleanly; otherwise the
pure-Python fallback runs the same algorithm.  Set ``PROGO_BACKEND=python``
to force the fallback.
"""

from __future__ import annotations

import os
from typing import NamedTuple

import numpy as np

from progo import _lss_fallback
from progo.sampler import LssConfig

try:
    from progo import _lss_kernel as _compiled
except ImportError:  # extension not built
    _compiled = None

COMPILED_AVAILABLE = _compiled is not None


def available_backends() -> list[str]:
    return ["compiled", "python"] if COMPILED_AVAILABLE else ["python"]


def _resolve(backend: str | None) -> str:
    if backend is None:
        backend = os.environ.get("PROGO_BACKEND", "auto")
    if backend == "auto":
        return "compiled" if COMPILED_AVAILABLE else "python"
    if backend not in ("compiled", "python"):
        raise ValueError(f"unknown backend {backend!r}")
    if backend == "compiled" and not COMPILED_AVAILABLE:
        raise RuntimeError("compiled backend requested but progo._lss_kernel is not built")
    return backend


DEFAULT_BACKEND = _resolve(None)


class ChainResult(NamedTuple):
    samples: np.ndarray   # (N, d)
    f_values: np.ndarray  # (N,)
    evaluations: int      # objective evaluations (out-of-box proposals are free)


def run_chain(code: int, k: float, lower, upper, x0, cfg: LssConfig,
              rng: np.random.Generator, backend: str | None = None) -> ChainResult:
    """Sample ``exp(-k f)`` on the box ``[lower, upper]`` for a built-in objective."""
    backend = _resolve(backend)
    lower = np.ascontiguousarray(lower, dtype=np.float64)
    upper = np.ascontiguousarray(upper, dtype=np.float64)
    x0 = np.ascontiguousarray(x0, dtype=np.float64)
    if backend == "compiled":
        bitgen = rng.bit_generator
        with bitgen.lock:
            out = _compiled.run_chain(int(code), float(k), lower, upper, x0, float(cfg.beta),
                                      cfg.burn_in, cfg.sample_count, cfg.max_shrink_steps,
                                      bitgen.capsule)
    else:
        out = _lss_fallback.run_chain(int(code), float(k), lower, upper, x0, float(cfg.beta),
                                      cfg.burn_in, cfg.sample_count, cfg.max_shrink_steps, rng)
    return ChainResult(*out)


def evaluate(code: int, x, backend: str | None = None) -> float:
    backend = _resolve(backend)
    x = np.ascontiguousarray(x, dtype=np.float64)
    if backend == "compiled":
        return _compiled.evaluate(int(code), x)
    return _lss_fallback.evaluate(int(code), x)
