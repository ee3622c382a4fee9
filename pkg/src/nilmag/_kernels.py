"""Compiled inner loops for Euler fields on a dual Lie algebra.

A field is described by three sparse triplet lists: bracket entries
``(bi, bj, bk, bc)`` with ``[e_bi, e_bj] = bc * e_bk``, the inverse Gram
matrix ``(gi, gj, gv)`` and the magnetic matrix ``c * sigma`` as
``(mi, mj, mv)``.  All loops allocate their buffers once.
"""

import numpy as np
from numba import njit

OK = 0
DIVERGED = 1


@njit(cache=True, nogil=True, inline="always")
def _sharp(gi, gj, gv, x, out):
    for a in range(out.shape[0]):
        out[a] = 0.0
    for e in range(gi.shape[0]):
        out[gi[e]] += gv[e] * x[gj[e]]


@njit(cache=True, nogil=True, inline="always")
def field(bi, bj, bk, bc, gi, gj, gv, mi, mj, mv, lam, dh, out):
    _sharp(gi, gj, gv, lam, dh)
    for b in range(out.shape[0]):
        out[b] = 0.0
    for e in range(bi.shape[0]):
        i = bi[e]
        j = bj[e]
        w = bc[e] * lam[bk[e]]
        out[j] += w * dh[i]
        out[i] -= w * dh[j]
    for e in range(mi.shape[0]):
        out[mj[e]] += mv[e] * dh[mi[e]]


@njit(cache=True, nogil=True, inline="always")
def tangent(bi, bj, bk, bc, gi, gj, gv, mi, mj, mv, lam, dh, v, ddh, out):
    """Jacobian-vector product at ``lam``; ``dh`` must already hold ``G^{-1} lam``."""
    _sharp(gi, gj, gv, v, ddh)
    for b in range(out.shape[0]):
        out[b] = 0.0
    for e in range(bi.shape[0]):
        i = bi[e]
        j = bj[e]
        k = bk[e]
        c = bc[e]
        out[j] += c * (ddh[i] * lam[k] + dh[i] * v[k])
        out[i] -= c * (ddh[j] * lam[k] + dh[j] * v[k])
    for e in range(mi.shape[0]):
        out[mj[e]] += mv[e] * ddh[mi[e]]


@njit(cache=True, nogil=True, inline="always")
def _all_finite(x):
    for i in range(x.shape[0]):
        if not np.isfinite(x[i]):
            return False
    return True


@njit(cache=True, nogil=True)
def rk4_path(bi, bj, bk, bc, gi, gj, gv, mi, mj, mv, lam0, h, nsteps, stride):
    """Fixed-step RK4.  Returns (samples, number of valid samples, status, failing step)."""
    n = lam0.shape[0]
    nsamp = nsteps // stride + 1
    samples = np.empty((nsamp, n))
    y = lam0.copy()
    tmp = np.empty(n)
    dh = np.empty(n)
    k1 = np.empty(n)
    k2 = np.empty(n)
    k3 = np.empty(n)
    k4 = np.empty(n)
    samples[0, :] = y
    filled = 1
    for s in range(1, nsteps + 1):
        field(bi, bj, bk, bc, gi, gj, gv, mi, mj, mv, y, dh, k1)
        for a in range(n):
            tmp[a] = y[a] + 0.5 * h * k1[a]
        field(bi, bj, bk, bc, gi, gj, gv, mi, mj, mv, tmp, dh, k2)
        for a in range(n):
            tmp[a] = y[a] + 0.5 * h * k2[a]
        field(bi, bj, bk, bc, gi, gj, gv, mi, mj, mv, tmp, dh, k3)
        for a in range(n):
            tmp[a] = y[a] + h * k3[a]
        field(bi, bj, bk, bc, gi, gj, gv, mi, mj, mv, tmp, dh, k4)
        for a in range(n):
            y[a] = y[a] + h / 6.0 * (k1[a] + 2.0 * k2[a] + 2.0 * k3[a] + k4[a])
        if not _all_finite(y):
            return samples, filled, DIVERGED, s
        if s % stride == 0:
            samples[filled, :] = y
            filled += 1
    return samples, filled, OK, nsteps


@njit(cache=True, nogil=True, inline="always")
def _stage(bi, bj, bk, bc, gi, gj, gv, mi, mj, mv, y, V, kv, prev, frac, h, tmp, dh, ddh, vt, out, ky, s):
    """RK4 stage ``s``: state derivative into ``ky`` and frame derivatives into ``kv[s]``."""
    n = y.shape[0]
    field(bi, bj, bk, bc, gi, gj, gv, mi, mj, mv, tmp, dh, ky)
    for c in range(V.shape[1]):
        if s == 0:
            for a in range(n):
                vt[a] = V[a, c]
        else:
            for a in range(n):
                vt[a] = V[a, c] + frac * h * kv[prev, a, c]
        tangent(bi, bj, bk, bc, gi, gj, gv, mi, mj, mv, tmp, dh, vt, ddh, out)
        for a in range(n):
            kv[s, a, c] = out[a]


@njit(cache=True, nogil=True, inline="always")
def rk4_joint_step(bi, bj, bk, bc, gi, gj, gv, mi, mj, mv, y, V, h, buf, kv):
    """One RK4 step of the state ``y`` and every column of the tangent frame ``V``."""
    n = y.shape[0]
    tmp = buf[0]
    dh = buf[1]
    ddh = buf[2]
    vt = buf[3]
    out = buf[4]
    k1 = buf[5]
    k2 = buf[6]
    k3 = buf[7]
    k4 = buf[8]
    for a in range(n):
        tmp[a] = y[a]
    _stage(bi, bj, bk, bc, gi, gj, gv, mi, mj, mv, y, V, kv, 0, 0.0, h, tmp, dh, ddh, vt, out, k1, 0)
    for a in range(n):
        tmp[a] = y[a] + 0.5 * h * k1[a]
    _stage(bi, bj, bk, bc, gi, gj, gv, mi, mj, mv, y, V, kv, 0, 0.5, h, tmp, dh, ddh, vt, out, k2, 1)
    for a in range(n):
        tmp[a] = y[a] + 0.5 * h * k2[a]
    _stage(bi, bj, bk, bc, gi, gj, gv, mi, mj, mv, y, V, kv, 1, 0.5, h, tmp, dh, ddh, vt, out, k3, 2)
    for a in range(n):
        tmp[a] = y[a] + h * k3[a]
    _stage(bi, bj, bk, bc, gi, gj, gv, mi, mj, mv, y, V, kv, 2, 1.0, h, tmp, dh, ddh, vt, out, k4, 3)
    for a in range(n):
        y[a] = y[a] + h / 6.0 * (k1[a] + 2.0 * k2[a] + 2.0 * k3[a] + k4[a])
    for c in range(V.shape[1]):
        for a in range(n):
            V[a, c] = V[a, c] + h / 6.0 * (kv[0, a, c] + 2.0 * kv[1, a, c] + 2.0 * kv[2, a, c] + kv[3, a, c])


@njit(cache=True, nogil=True, inline="always")
def _column_norm(V, c):
    s = 0.0
    for a in range(V.shape[0]):
        s += V[a, c] * V[a, c]
    return np.sqrt(s)


@njit(cache=True, nogil=True)
def lyapunov_run(bi, bj, bk, bc, gi, gj, gv, mi, mj, mv, lam0, V0, h, nsteps, renorm, transient):
    """Benettin (one column) or QR (several columns) run of a tangent frame.

    The frame is re-orthonormalised every ``renorm`` steps and at the last
    step.  Log growth is accumulated from the first renormalisation at or after
    step ``transient``.  Returns (log sums per column, counted time, status,
    failing step).
    """
    n = lam0.shape[0]
    m = V0.shape[1]
    y = lam0.copy()
    V = V0.copy()
    buf = np.empty((9, n))
    kv = np.empty((4, n, m))
    sums = np.zeros(m)
    # norm right after the last renormalisation: an unchanged vector then
    # contributes log(1.0) == 0 exactly
    ref = _column_norm(V, 0)
    start = -1
    for s in range(1, nsteps + 1):
        rk4_joint_step(bi, bj, bk, bc, gi, gj, gv, mi, mj, mv, y, V, h, buf, kv)
        if not _all_finite(y):
            return sums, 0.0, DIVERGED, s
        if s % renorm == 0 or s == nsteps:
            if m == 1:
                nrm = _column_norm(V, 0)
                if start >= 0:
                    sums[0] += np.log(nrm / ref)
                for a in range(n):
                    V[a, 0] = V[a, 0] / nrm
                ref = _column_norm(V, 0)
            else:
                Q, R = np.linalg.qr(V)
                for c in range(m):
                    d = R[c, c]
                    if d < 0.0:
                        d = -d
                        for a in range(n):
                            Q[a, c] = -Q[a, c]
                    if start >= 0:
                        sums[c] += np.log(d)
                V[:, :] = Q
            if start < 0 and s >= transient:
                start = s
    if start < 0:
        return sums, 0.0, OK, nsteps
    return sums, (nsteps - start) * h, OK, nsteps

