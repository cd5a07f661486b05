# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False, language_level=3
"""Compiled tube-flux density kernel (same contract as ``_kernels_py``)."""
import numpy as np


cdef double SG[6]
SG[:] = [-1.0, 1.0, 1.0, 1.0, 1.0, 1.0]


def tube_density(const double[::1] z, const double[::1] u, const double[::1] a,
                 const double[::1] adot, const double[:, ::1] k, const double[::1] w):
    cdef Py_ssize_t n = k.shape[0]
    if k.shape[1] != 6 or w.shape[0] != n:
        raise ValueError("k must be (N, 6) and w (N,)")
    mom_arr = np.zeros((5, 6))
    ang_arr = np.zeros((6, 6, 6))
    cdef double[:, ::1] mom = mom_arr
    cdef double[:, :, ::1] ang = ang_arr
    cdef double G[3][6][6]
    cdef double S[3][3]
    cdef double v3[6]
    cdef double wv[6]
    cdef double kk[6]
    cdef double d[2][6]
    cdef double x[3][6]
    cdef double J[6][6]
    cdef double jt
    cdef double ak, adk, wt, acc
    cdef int grades[3]
    grades[0] = 4
    grades[1] = 3
    grades[2] = 2
    cdef Py_ssize_t node, m, l, i, j, e, p, nu, sgm

    with nogil:
        for node in range(n):
            ak = 0.0
            adk = 0.0
            for m in range(6):
                kk[m] = k[node, m]
                ak += SG[m] * a[m] * kk[m]
                adk += SG[m] * adot[m] * kk[m]
            for m in range(6):
                v3[m] = 3.0 * (a[m] + 2.0 * u[m] * ak)
                wv[m] = adot[m] + u[m] * adk + 3.0 * a[m] * ak + 3.0 * u[m] * ak * ak
            for m in range(6):
                for l in range(6):
                    G[0][m][l] = 3.0 * (u[m] * kk[l] - u[l] * kk[m])
                    G[1][m][l] = (u[m] * a[l] - u[l] * a[m]) + (v3[m] * kk[l] - v3[l] * kk[m])
                    G[2][m][l] = wv[m] * kk[l] - wv[l] * kk[m]
            for i in range(3):
                for j in range(3):
                    acc = 0.0
                    for m in range(6):
                        for l in range(6):
                            acc += SG[m] * SG[l] * G[i][m][l] * G[j][m][l]
                    S[i][j] = acc
            for m in range(6):
                d[0][m] = SG[m] * (kk[m] - u[m])
                d[1][m] = SG[m] * ak * kk[m]
            for p in range(6):
                for nu in range(6):
                    J[p][nu] = 0.0
            for e in range(2):
                for i in range(3):
                    for l in range(6):
                        acc = 0.0
                        for m in range(6):
                            acc += d[e][m] * G[i][m][l]
                        x[i][l] = SG[l] * acc
                for i in range(3):
                    for j in range(3):
                        p = 4 - (grades[i] + grades[j]) + e + 4
                        for nu in range(6):
                            acc = 0.0
                            for sgm in range(6):
                                acc += G[j][nu][sgm] * x[i][sgm]
                            J[p][nu] += acc - 0.25 * SG[nu] * d[e][nu] * S[i][j]
            wt = w[node]
            for p in range(5):
                for nu in range(6):
                    jt = wt * J[p][nu]
                    mom[p, nu] += jt
                    for m in range(6):
                        ang[p, m, nu] += z[m] * jt
                        ang[p, nu, m] -= z[m] * jt
                        ang[p + 1, m, nu] += kk[m] * jt
                        ang[p + 1, nu, m] -= kk[m] * jt
    return mom_arr, ang_arr
