# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled integration kernels.

Contract and arithmetic match halfparity.engine._reference exactly (same
update factors, same renormalization, same divergence guard); see that module
for the step definitions. Only the inner loops differ: amplitudes are held in
C locals so a 1e4-step trajectory costs microseconds, not milliseconds.
"""

from libc.math cimport sqrt

cimport numpy as cnp


def sse_path(double complex[::1] psi0, double[::1] dw, double gamma,
             double epsilon, double dt, cnp.int64_t[::1] store_idx,
             double complex[:, ::1] states, double[:, ::1] pops,
             double[::1] rec, double[::1] conc):
    """Integrate a normalized state vector through len(dw) steps."""
    cdef double complex a0 = psi0[0], a1 = psi0[1], a2 = psi0[2], a3 = psi0[3]
    cdef double complex f0, f1, f3, det
    cdef double complex drift_up = -1j * epsilon * dt
    cdef Py_ssize_t n = dw.shape[0], ns = store_idx.shape[0]
    cdef Py_ssize_t k, si = 0
    cdef double sg = sqrt(gamma), hg = 0.5 * gamma * dt
    cdef double p0, p1, p2, p3, m, w, norm2, inv
    for k in range(n):
        p0 = a0.real * a0.real + a0.imag * a0.imag
        p1 = a1.real * a1.real + a1.imag * a1.imag
        p2 = a2.real * a2.real + a2.imag * a2.imag
        p3 = a3.real * a3.real + a3.imag * a3.imag
        pops[k, 0] = p0
        pops[k, 1] = p1
        pops[k, 2] = p2
        pops[k, 3] = p3
        det = a0 * a3 - a1 * a2
        conc[k] = 2.0 * sqrt(det.real * det.real + det.imag * det.imag)
        if si < ns and store_idx[si] == k:
            states[si, 0] = a0
            states[si, 1] = a1
            states[si, 2] = a2
            states[si, 3] = a3
            si += 1
        m = p0 - p3
        w = sg * dw[k]
        # phi = (1, 0, 0, -1); the two odd components share one factor
        f0 = 1.0 + drift_up - hg * (1.0 - m) * (1.0 - m) + w * (1.0 - m)
        f1 = 1.0 - hg * m * m - w * m
        f3 = 1.0 - drift_up - hg * (1.0 + m) * (1.0 + m) - w * (1.0 + m)
        a0 = f0 * a0
        a1 = f1 * a1
        a2 = f1 * a2
        a3 = f3 * a3
        norm2 = (a0.real * a0.real + a0.imag * a0.imag
                 + a1.real * a1.real + a1.imag * a1.imag
                 + a2.real * a2.real + a2.imag * a2.imag
                 + a3.real * a3.real + a3.imag * a3.imag)
        if not (0.25 <= norm2 <= 2.25):
            return k
        inv = 1.0 / sqrt(norm2)
        a0 = a0 * inv
        a1 = a1 * inv
        a2 = a2 * inv
        a3 = a3 * inv
        rec[k] = m + dw[k] / (2.0 * sg * dt)
    pops[n, 0] = a0.real * a0.real + a0.imag * a0.imag
    pops[n, 1] = a1.real * a1.real + a1.imag * a1.imag
    pops[n, 2] = a2.real * a2.real + a2.imag * a2.imag
    pops[n, 3] = a3.real * a3.real + a3.imag * a3.imag
    det = a0 * a3 - a1 * a2
    conc[n] = 2.0 * sqrt(det.real * det.real + det.imag * det.imag)
    if si < ns and store_idx[si] == n:
        states[si, 0] = a0
        states[si, 1] = a1
        states[si, 2] = a2
        states[si, 3] = a3
    return -1


def sme_path(double complex[:, ::1] rho0, double[::1] dw, double gamma,
             double epsilon, double eta, double dt, cnp.int64_t[::1] store_idx,
             double complex[:, :, ::1] states, double[:, ::1] pops,
             double[::1] rec):
    """Integrate a density matrix through len(dw) steps."""
    cdef double complex r[4][4]
    cdef double complex f[4]
    cdef double a[4]
    cdef double phi[4]
    cdef double complex drift = -1j * epsilon * dt
    cdef Py_ssize_t n = dw.shape[0], ns = store_idx.shape[0]
    cdef Py_ssize_t k, si = 0, i, j
    cdef double seg = sqrt(eta * gamma), hg = 0.5 * gamma * dt
    cdef double rest = (1.0 - eta) * gamma * dt
    cdef double m, w, tr, inv
    phi[0] = 1.0
    phi[1] = 0.0
    phi[2] = 0.0
    phi[3] = -1.0
    for i in range(4):
        for j in range(4):
            r[i][j] = rho0[i, j]
    for k in range(n):
        for i in range(4):
            pops[k, i] = r[i][i].real
        if si < ns and store_idx[si] == k:
            for i in range(4):
                for j in range(4):
                    states[si, i, j] = r[i][j]
            si += 1
        m = r[0][0].real - r[3][3].real
        w = seg * dw[k]
        for i in range(4):
            a[i] = phi[i] - m
            f[i] = 1.0 + drift * phi[i] - hg * a[i] * a[i] + w * a[i]
        tr = 0.0
        for i in range(4):
            for j in range(4):
                r[i][j] = (f[i] * r[i][j] * f[j].conjugate()
                           + rest * a[i] * a[j] * r[i][j])
            tr += r[i][i].real
        if not (0.5 <= tr <= 1.5):
            return k
        inv = 1.0 / tr
        for i in range(4):
            for j in range(4):
                r[i][j] = r[i][j] * inv
        rec[k] = m + dw[k] / (2.0 * seg * dt)
    for i in range(4):
        pops[n, i] = r[i][i].real
    if si < ns and store_idx[si] == n:
        for i in range(4):
            for j in range(4):
                states[si, i, j] = r[i][j]
    return -1
