"""Pure-Python twin of the compiled RK4 kernel (same signature and output)."""

import math

import numpy as np


def _compile(coef, exps, comp):
    plan = []
    for c, e, k in zip(coef, exps, comp):
        factors = tuple((v, int(d)) for v, d in enumerate(e) if d)
        plan.append((float(c), factors, int(k)))
    return plan


def _eval(plan, x, nout, maxdeg):
    # power table by repeated products so overflow gives inf, not an exception
    pw = []
    for v in x:
        row = [1.0]
        for _ in range(maxdeg):
            row.append(row[-1] * v)
        pw.append(row)
    out = [0.0] * nout
    for c, factors, k in plan:
        val = c
        for v, d in factors:
            val *= pw[v][d]
        out[k] += val
    return out


def rk4(coef, exps, comp, inv_coef, inv_exps, inv_comp, ninv, z0, dt, nsteps, maxdeg):
    n = len(z0)
    field = _compile(coef, exps, comp)
    invplan = _compile(inv_coef, inv_exps, inv_comp)
    z = [float(v) for v in z0]
    states = [list(z)]
    invs = [_eval(invplan, z, ninv, maxdeg)]
    h2, h6 = 0.5 * dt, dt / 6.0
    for step in range(1, nsteps + 1):
        k1 = _eval(field, z, n, maxdeg)
        k2 = _eval(field, [a + h2 * b for a, b in zip(z, k1)], n, maxdeg)
        k3 = _eval(field, [a + h2 * b for a, b in zip(z, k2)], n, maxdeg)
        k4 = _eval(field, [a + dt * b for a, b in zip(z, k3)], n, maxdeg)
        z = [a + h6 * (b + 2.0 * c + 2.0 * d + e) for a, b, c, d, e in zip(z, k1, k2, k3, k4)]
        states.append(z)
        if not all(math.isfinite(v) for v in z):
            return _pack(states, invs, n, ninv, step)
        invs.append(_eval(invplan, z, ninv, maxdeg))
    return _pack(states, invs, n, ninv, -1)


def _pack(states, invs, n, ninv, bad):
    return (np.array(states, dtype=float).reshape(len(states), n),
            np.array(invs, dtype=float).reshape(len(invs), ninv), bad)
