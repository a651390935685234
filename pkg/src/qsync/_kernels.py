"""Compiled fixed-step RK4 inner loops.

The mean-field acceptance runs take 2e6 steps for thousands of oscillators;
plain numpy spends more time on per-call overhead than arithmetic at that
size, so the inner loops live here as numba kernels.  State layouts use one
contiguous row per real component, which lets LLVM vectorize the oscillator
loop.

Mean-field state rows (all real):
    0: rho00   1: rho11   2: rho22
    3: Re rho10   4: Im rho10
    5: Re rho21   6: Im rho21
    7: Re rho20   8: Im rho20
"""

import numpy as np
from numba import njit

SQRT2 = np.sqrt(2.0)


@njit(cache=True, nogil=True, fastmath=True)
def mean_field_deriv(y, dy, omega, k1, k2, V, ar, ai):
    """Time derivative of the mean-field state for a given mean field A."""
    N = y.shape[1]
    c10 = 3.0 * k1 + V
    c21 = 2.0 * k2 + 2.0 * k1 + 3.0 * V
    c20 = k1 + 2.0 * k2 + 2.0 * V
    sq2V = SQRT2 * V
    p0 = y[0]; p1 = y[1]; p2 = y[2]
    r10 = y[3]; i10 = y[4]
    r21 = y[5]; i21 = y[6]
    r20 = y[7]; i20 = y[8]
    d0 = dy[0]; d1 = dy[1]; d2 = dy[2]
    d3 = dy[3]; d4 = dy[4]
    d5 = dy[5]; d6 = dy[6]
    d7 = dy[7]; d8 = dy[8]
    for n in range(N):
        w = omega[n]
        t10 = ar * r10[n] + ai * i10[n]
        t21 = ar * r21[n] + ai * i21[n]
        wr = ar * r20[n] + ai * i20[n]
        wi = ar * i20[n] - ai * r20[n]
        d0[n] = -2.0 * k1 * p0[n] + 4.0 * k2 * p2[n] - 2.0 * V * t10 + 2.0 * V * p1[n]
        d1[n] = (
            2.0 * k1 * p0[n]
            - (4.0 * k1 + 2.0 * V) * p1[n]
            + 4.0 * V * p2[n]
            + 2.0 * V * t10
            - 2.0 * sq2V * t21
        )
        d2[n] = 4.0 * k1 * p1[n] - (4.0 * k2 + 4.0 * V) * p2[n] + 2.0 * sq2V * t21
        dp01 = p0[n] - p1[n]
        d3[n] = -c10 * r10[n] + w * i10[n] + 2.0 * sq2V * r21[n] - sq2V * wr + V * dp01 * ar
        d4[n] = -c10 * i10[n] - w * r10[n] + 2.0 * sq2V * i21[n] - sq2V * wi + V * dp01 * ai
        dp12 = p1[n] - p2[n]
        d5[n] = -c21 * r21[n] + w * i21[n] + 2.0 * SQRT2 * k1 * r10[n] + V * wr + sq2V * dp12 * ar
        d6[n] = -c21 * i21[n] - w * r21[n] + 2.0 * SQRT2 * k1 * i10[n] + V * wi + sq2V * dp12 * ai
        ur = SQRT2 * r10[n] - r21[n]
        ui = SQRT2 * i10[n] - i21[n]
        d7[n] = -c20 * r20[n] + 2.0 * w * i20[n] + V * (ar * ur - ai * ui)
        d8[n] = -c20 * i20[n] - 2.0 * w * r20[n] + V * (ar * ui + ai * ur)


@njit(cache=True, nogil=True, fastmath=True)
def _mean_field_of(y):
    N = y.shape[1]
    ar = 0.0
    ai = 0.0
    for n in range(N):
        ar += y[3, n] + SQRT2 * y[5, n]
        ai += y[4, n] + SQRT2 * y[6, n]
    return ar / N, ai / N


@njit(cache=True, nogil=True, fastmath=True)
def mean_field_rk4(y, omega, k1, k2, V, dt, nsteps, record_every, a_re, a_im):
    """Integrate the mean-field equations in place; record A every ``record_every`` steps.

    The recorded samples are the pre-step states at steps 0, r, 2r, ... plus
    the final state.  Returns ``(number_of_records, max_trace_deviation)``.
    """
    N = y.shape[1]
    ka = np.empty_like(y)
    kb = np.empty_like(y)
    kc = np.empty_like(y)
    kd = np.empty_like(y)
    yt = np.empty_like(y)
    half = 0.5 * dt
    sixth = dt / 6.0
    nrec = 0
    max_dev = 0.0
    ar, ai = _mean_field_of(y)
    for step in range(nsteps):
        if step % record_every == 0:
            a_re[nrec] = ar
            a_im[nrec] = ai
            nrec += 1
            for n in range(N):
                dev = abs(y[0, n] + y[1, n] + y[2, n] - 1.0)
                if dev > max_dev:
                    max_dev = dev
        mean_field_deriv(y, ka, omega, k1, k2, V, ar, ai)
        for r in range(9):
            for n in range(N):
                yt[r, n] = y[r, n] + half * ka[r, n]
        tr, ti = _mean_field_of(yt)
        mean_field_deriv(yt, kb, omega, k1, k2, V, tr, ti)
        for r in range(9):
            for n in range(N):
                yt[r, n] = y[r, n] + half * kb[r, n]
        tr, ti = _mean_field_of(yt)
        mean_field_deriv(yt, kc, omega, k1, k2, V, tr, ti)
        for r in range(9):
            for n in range(N):
                yt[r, n] = y[r, n] + dt * kc[r, n]
        tr, ti = _mean_field_of(yt)
        mean_field_deriv(yt, kd, omega, k1, k2, V, tr, ti)
        for r in range(9):
            for n in range(N):
                y[r, n] += sixth * (ka[r, n] + 2.0 * kb[r, n] + 2.0 * kc[r, n] + kd[r, n])
        ar, ai = _mean_field_of(y)
    a_re[nrec] = ar
    a_im[nrec] = ai
    nrec += 1
    for n in range(N):
        dev = abs(y[0, n] + y[1, n] + y[2, n] - 1.0)
        if dev > max_dev:
            max_dev = dev
    return nrec, max_dev


@njit(cache=True, nogil=True, fastmath=True)
def classical_ensemble_deriv(u, v, du, dv, omega, k1, k2, V, ar, ai):
    """Amplitude-equation derivative for all-to-all dissipative coupling."""
    N = u.shape[0]
    for n in range(N):
        rad = u[n] * u[n] + v[n] * v[n]
        gain = k1 - 2.0 * k2 * rad - V
        du[n] = omega[n] * v[n] + gain * u[n] + V * ar
        dv[n] = -omega[n] * u[n] + gain * v[n] + V * ai


@njit(cache=True, nogil=True, fastmath=True)
def classical_ensemble_rk4(u, v, omega, k1, k2, V, dt, nsteps, record_every, a_re, a_im):
    """Integrate the classical all-to-all ensemble; record A like the quantum kernel."""
    N = u.shape[0]
    kau = np.empty(N); kav = np.empty(N)
    kbu = np.empty(N); kbv = np.empty(N)
    kcu = np.empty(N); kcv = np.empty(N)
    kdu = np.empty(N); kdv = np.empty(N)
    ut = np.empty(N); vt = np.empty(N)
    half = 0.5 * dt
    sixth = dt / 6.0
    nrec = 0
    ar = u.mean()
    ai = v.mean()
    for step in range(nsteps):
        if step % record_every == 0:
            a_re[nrec] = ar
            a_im[nrec] = ai
            nrec += 1
        classical_ensemble_deriv(u, v, kau, kav, omega, k1, k2, V, ar, ai)
        for n in range(N):
            ut[n] = u[n] + half * kau[n]
            vt[n] = v[n] + half * kav[n]
        classical_ensemble_deriv(ut, vt, kbu, kbv, omega, k1, k2, V, ut.mean(), vt.mean())
        for n in range(N):
            ut[n] = u[n] + half * kbu[n]
            vt[n] = v[n] + half * kbv[n]
        classical_ensemble_deriv(ut, vt, kcu, kcv, omega, k1, k2, V, ut.mean(), vt.mean())
        for n in range(N):
            ut[n] = u[n] + dt * kcu[n]
            vt[n] = v[n] + dt * kcv[n]
        classical_ensemble_deriv(ut, vt, kdu, kdv, omega, k1, k2, V, ut.mean(), vt.mean())
        for n in range(N):
            u[n] += sixth * (kau[n] + 2.0 * kbu[n] + 2.0 * kcu[n] + kdu[n])
            v[n] += sixth * (kav[n] + 2.0 * kbv[n] + 2.0 * kcv[n] + kdv[n])
        ar = u.mean()
        ai = v.mean()
    a_re[nrec] = ar
    a_im[nrec] = ai
    nrec += 1
    return nrec


@njit(cache=True, nogil=True, fastmath=True)
def classical_two_rk4(state, w1, w2, k1, k2, V, dt, nsteps, sample_every, out):
    """Integrate two coupled amplitude equations; sample (u1, v1, u2, v2).

    ``state`` is the length-4 real vector (u1, v1, u2, v2), updated in place.
    Samples are the pre-step states at steps 0, s, 2s, ... plus the final
    state; returns the number of samples.
    """
    k = np.empty((4, 4))
    yt = np.empty(4)
    nrec = 0
    weights = (0.5 * dt, 0.5 * dt, dt)
    for step in range(nsteps):
        if step % sample_every == 0:
            for j in range(4):
                out[nrec, j] = state[j]
            nrec += 1
        for stage in range(4):
            src = state if stage == 0 else yt
            u1, v1, u2, v2 = src[0], src[1], src[2], src[3]
            g1 = k1 - 2.0 * k2 * (u1 * u1 + v1 * v1) - V
            g2 = k1 - 2.0 * k2 * (u2 * u2 + v2 * v2) - V
            k[stage, 0] = w1 * v1 + g1 * u1 + V * u2
            k[stage, 1] = -w1 * u1 + g1 * v1 + V * v2
            k[stage, 2] = w2 * v2 + g2 * u2 + V * u1
            k[stage, 3] = -w2 * u2 + g2 * v2 + V * v1
            if stage < 3:
                cf = weights[stage]
                for j in range(4):
                    yt[j] = state[j] + cf * k[stage, j]
        for j in range(4):
            state[j] += dt / 6.0 * (k[0, j] + 2.0 * k[1, j] + 2.0 * k[2, j] + k[3, j])
    for j in range(4):
        out[nrec, j] = state[j]
    nrec += 1
    return nrec
