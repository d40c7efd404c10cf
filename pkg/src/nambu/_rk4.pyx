# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled RK4 loop over a flattened polynomial term plan."""

import numpy as np
cimport numpy as cnp
from libc.math cimport isfinite

cnp.import_array()


cdef void _eval(const double[:] coef, const long[:, :] exps, const long[:] comp,
                double* x, int nvars, double* out, int nout, double[:, :] pw,
                int maxdeg) noexcept nogil:
    cdef Py_ssize_t t, v, d
    cdef double val
    for v in range(nvars):
        pw[v, 0] = 1.0
        for d in range(1, maxdeg + 1):
            pw[v, d] = pw[v, d - 1] * x[v]
    for v in range(nout):
        out[v] = 0.0
    for t in range(coef.shape[0]):
        val = coef[t]
        for v in range(nvars):
            if exps[t, v]:
                val *= pw[v, exps[t, v]]
        out[comp[t]] += val


def rk4(double[:] coef, long[:, :] exps, long[:] comp,
        double[:] inv_coef, long[:, :] inv_exps, long[:] inv_comp, int ninv,
        double[:] z0, double dt, long nsteps, int maxdeg):
    """Integrate ``nsteps`` RK4 steps.

    Returns ``(states, invariants, bad_step)``; ``bad_step`` is -1 unless a
    non-finite state appeared, in which case arrays are truncated there.
    """
    cdef int n = z0.shape[0]
    cdef cnp.ndarray[double, ndim=2] states = np.empty((nsteps + 1, n))
    cdef cnp.ndarray[double, ndim=2] invs = np.empty((nsteps + 1, ninv))
    cdef double[:, :] S = states
    cdef double[:, :] I = invs
    cdef double[:, :] pw = np.empty((max(n, 1), maxdeg + 1))
    cdef double[:] z = np.array(z0, dtype=np.float64)
    cdef double[:] tmp = np.empty(n)
    cdef double[:] k1 = np.empty(n)
    cdef double[:] k2 = np.empty(n)
    cdef double[:] k3 = np.empty(n)
    cdef double[:] k4 = np.empty(n)
    cdef double[:] ival = np.empty(max(ninv, 1))
    cdef long step
    cdef int i
    cdef double h2 = 0.5 * dt, h6 = dt / 6.0

    with nogil:
        for i in range(n):
            S[0, i] = z[i]
        if ninv:
            _eval(inv_coef, inv_exps, inv_comp, &z[0], n, &ival[0], ninv, pw, maxdeg)
            for i in range(ninv):
                I[0, i] = ival[i]
        for step in range(1, nsteps + 1):
            _eval(coef, exps, comp, &z[0], n, &k1[0], n, pw, maxdeg)
            for i in range(n):
                tmp[i] = z[i] + h2 * k1[i]
            _eval(coef, exps, comp, &tmp[0], n, &k2[0], n, pw, maxdeg)
            for i in range(n):
                tmp[i] = z[i] + h2 * k2[i]
            _eval(coef, exps, comp, &tmp[0], n, &k3[0], n, pw, maxdeg)
            for i in range(n):
                tmp[i] = z[i] + dt * k3[i]
            _eval(coef, exps, comp, &tmp[0], n, &k4[0], n, pw, maxdeg)
            for i in range(n):
                z[i] = z[i] + h6 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])
                S[step, i] = z[i]
            for i in range(n):
                if not isfinite(z[i]):
                    with gil:
                        return states[:step + 1], invs[:step], step
            if ninv:
                _eval(inv_coef, inv_exps, inv_comp, &z[0], n, &ival[0], ninv, pw, maxdeg)
                for i in range(ninv):
                    I[step, i] = ival[i]
    return states, invs, -1
