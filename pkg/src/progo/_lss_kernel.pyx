# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled latent slice sampler for the built-in objectives under a uniform box prior.

Mirrors ``progo.sampler`` draw for draw: the same uniforms are consumed from
the generator in the same order, and the log-target is ``-k f(x)`` inside
the box (the uniform prior's constant cancels in the slice test).
"""

import numpy as np

from cpython.pycapsule cimport PyCapsule_GetPointer, PyCapsule_IsValid
from libc.math cimport INFINITY, M_E, M_PI, cos, exp, fabs, isfinite, log, log1p, nearbyint, sin, sqrt
from numpy.random cimport bitgen_t

from progo.errors import EvaluationError, InvalidStartError, NonTerminationError
from progo.sampler import LssState

DEF ACKLEY = 0
DEF LEVY = 1
DEF DEMO1D = 2


cdef inline double _ackley(const double *x, Py_ssize_t d) noexcept nogil:
    cdef double ss = 0.0, cs = 0.0, t1, t2
    cdef Py_ssize_t i
    for i in range(d):
        ss += x[i] * x[i]
        cs += cos(2.0 * M_PI * x[i])
    t1 = -20.0 * exp(-0.2 * sqrt(ss / d))
    t2 = -exp(cs / d)
    return t1 + t2 + 20.0 + M_E


cdef inline double _sin2pi(double v) noexcept nogil:
    cdef double t = sin(M_PI * (v - nearbyint(v)))
    return t * t


cdef inline double _levy(const double *x, Py_ssize_t d) noexcept nogil:
    cdef double w, t, head, mid = 0.0, tail
    cdef Py_ssize_t i
    w = 1.0 + (x[0] - 1.0) / 4.0
    head = _sin2pi(w)
    for i in range(d - 1):
        w = 1.0 + (x[i] - 1.0) / 4.0
        t = sin(M_PI * w + 1.0)
        mid += (w - 1.0) * (w - 1.0) * (1.0 + 10.0 * (t * t))
    w = 1.0 + (x[d - 1] - 1.0) / 4.0
    tail = (w - 1.0) * (w - 1.0) * (1.0 + _sin2pi(2.0 * w))
    return head + mid + tail


cdef inline double _demo1d(const double *x) noexcept nogil:
    return cos(x[0] * x[0]) + x[0] / 5.0 + 1.0


cdef inline double _objective(int code, const double *x, Py_ssize_t d) noexcept nogil:
    if code == ACKLEY:
        return _ackley(x, d)
    if code == LEVY:
        return _levy(x, d)
    return _demo1d(x)


def evaluate(int code, const double[::1] x):
    """Evaluate a built-in objective at one point (used to cross-check backends)."""
    if code < ACKLEY or code > DEMO1D:
        raise ValueError(f"unknown kernel code {code}")
    return _objective(code, &x[0], x.shape[0])


def run_chain(int code, double k, const double[::1] lower, const double[::1] upper,
              const double[::1] x0,
              double beta, Py_ssize_t burn_in, Py_ssize_t sample_count,
              Py_ssize_t max_shrink, object capsule):
    """Run one chain; returns ``(samples, f_values, f_evaluations)``."""
    if code < ACKLEY or code > DEMO1D:
        raise ValueError(f"unknown kernel code {code}")
    if not PyCapsule_IsValid(capsule, "BitGenerator"):
        raise ValueError("invalid BitGenerator capsule")
    cdef bitgen_t *rng = <bitgen_t *> PyCapsule_GetPointer(capsule, "BitGenerator")

    cdef Py_ssize_t d = x0.shape[0]
    cdef Py_ssize_t j, t, i, attempt
    cdef double u, fx, fp = 0.0, lpx, lp, log_u, half
    cdef bint inbox, accepted
    cdef long long evals = 0

    x_arr = np.array(x0, dtype=np.float64)
    s_arr = np.empty(d)
    l_arr = np.empty(d)
    a_arr = np.empty(d)
    b_arr = np.empty(d)
    p_arr = np.empty(d)
    samples = np.empty((sample_count, d))
    fvals = np.empty(sample_count)
    cdef double[::1] x = x_arr, s = s_arr, l = l_arr, a = a_arr, b = b_arr, p = p_arr
    cdef double[:, ::1] out = samples
    cdef double[::1] fout = fvals

    for j in range(d):
        if x[j] < lower[j] or x[j] > upper[j]:
            raise InvalidStartError(f"start point {x_arr} has zero target density")
    fx = _objective(code, &x[0], d)
    evals += 1
    if not isfinite(fx):
        raise EvaluationError(f"non-finite objective value {fx} at {x_arr}", point=x_arr.copy())
    lpx = -k * fx

    log_u = log(rng.next_double(rng.state))
    for j in range(d):
        u = rng.next_double(rng.state)
        s[j] = -log1p(-u)
        u = rng.next_double(rng.state)
        s[j] = beta * (s[j] - log1p(-u))
    for j in range(d):
        l[j] = x[j] + s[j] * (rng.next_double(rng.state) - 0.5)

    for t in range(burn_in + sample_count):
        for j in range(d):
            half = 0.5 * s[j]
            a[j] = l[j] - half
            if x[j] < a[j]:
                a[j] = x[j]
            b[j] = l[j] + half
            if x[j] > b[j]:
                b[j] = x[j]

        accepted = False
        for attempt in range(max_shrink + 1):
            inbox = True
            for j in range(d):
                p[j] = a[j] + (b[j] - a[j]) * rng.next_double(rng.state)
                if p[j] < lower[j] or p[j] > upper[j]:
                    inbox = False
            if inbox:
                fp = _objective(code, &p[0], d)
                evals += 1
                if not isfinite(fp):
                    raise EvaluationError(f"non-finite objective value {fp} at {p_arr}",
                                          point=p_arr.copy())
                lp = -k * fp
            else:
                lp = -INFINITY
            if lp - lpx > log_u:
                accepted = True
                break
            for j in range(d):
                if p[j] < x[j]:
                    a[j] = p[j] if p[j] > a[j] else x[j]
                else:
                    b[j] = p[j] if p[j] < b[j] else x[j]
        if not accepted:
            state = LssState(x_arr.copy(), lpx, log_u, s_arr.copy(), l_arr.copy())
            raise NonTerminationError(
                f"no acceptable proposal after {max_shrink} shrinkage steps", state=state)

        log_u = log(rng.next_double(rng.state))
        for j in range(d):
            s[j] = 2.0 * fabs(l[j] - p[j]) + beta * -log1p(-rng.next_double(rng.state))
        for j in range(d):
            l[j] = p[j] + s[j] * (rng.next_double(rng.state) - 0.5)
        for j in range(d):
            x[j] = p[j]
        lpx = lp
        fx = fp

        i = t - burn_in
        if i >= 0:
            for j in range(d):
                out[i, j] = x[j]
            fout[i] = fx

    return samples, fvals, int(evals)
