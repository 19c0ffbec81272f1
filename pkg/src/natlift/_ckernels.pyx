# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled tensor kernels; mirrors ``natlift._kernels_py`` function for function."""

import numpy as np

ctypedef double[:, ::1] M2
ctypedef double[:, :, ::1] M3
ctypedef double[:, :, :, ::1] M4
ctypedef const double[:, ::1] C2
ctypedef const double[:, :, ::1] C3
ctypedef const double[:, :, :, ::1] C4


def _c(a):
    return np.ascontiguousarray(a, dtype=np.float64)


def christoffel(ginv, dg):
    cdef C2 gi = _c(ginv)
    cdef C3 d = _c(dg)
    cdef Py_ssize_t n = gi.shape[0], a, b, c, e
    cdef double s
    res = np.zeros((n, n, n))
    cdef M3 out = res
    for a in range(n):
        for b in range(n):
            for c in range(b, n):
                s = 0.0
                for e in range(n):
                    s += gi[a, e] * (d[b, e, c] + d[c, e, b] - d[e, b, c])
                out[a, b, c] = 0.5 * s
                out[a, c, b] = 0.5 * s
    return res


def riemann(gamma, dgamma):
    cdef C3 G = _c(gamma)
    cdef C4 dG = _c(dgamma)
    cdef Py_ssize_t n = G.shape[0], a, b, c, d, e
    cdef double s
    res = np.zeros((n, n, n, n))
    cdef M4 out = res
    for a in range(n):
        for b in range(n):
            for c in range(n):
                for d in range(c + 1, n):
                    s = dG[c, a, d, b] - dG[d, a, c, b]
                    for e in range(n):
                        s += G[a, c, e] * G[e, d, b] - G[a, d, e] * G[e, c, b]
                    out[a, b, c, d] = s
                    out[a, b, d, c] = -s
    return res


def contract_last(A, H):
    cdef C3 a = _c(A)
    cdef C2 h_ = _c(H)
    cdef Py_ssize_t n = h_.shape[0], h, i, j, k
    cdef double s
    res = np.zeros((n, n, n))
    cdef M3 out = res
    for h in range(n):
        for i in range(n):
            for j in range(n):
                s = 0.0
                for k in range(n):
                    s += a[i, j, k] * h_[k, h]
                out[h, i, j] = s
    return res


def contract_last_deriv(dA, A, H, dH):
    cdef C4 da = _c(dA)
    cdef C3 a = _c(A)
    cdef C2 h_ = _c(H)
    cdef C3 dh = _c(dH)
    cdef Py_ssize_t n = h_.shape[0], m, h, i, j, k
    cdef double s
    res = np.zeros((n, n, n, n))
    cdef M4 out = res
    for m in range(n):
        for h in range(n):
            for i in range(n):
                for j in range(n):
                    s = 0.0
                    for k in range(n):
                        s += da[m, i, j, k] * h_[k, h] + a[i, j, k] * dh[m, k, h]
                    out[m, h, i, j] = s
    return res


def curvature_families(Q_, Qt_, P_, Pt_, S_, St_, dQ_, dQt_, dP_, dPt_, dS_, dSt_,
                       hP_, hPt_, hS_, hSt_, R_, R0_):
    cdef C3 Q = _c(Q_), Qt = _c(Qt_), P = _c(P_), Pt = _c(Pt_), S = _c(S_), St = _c(St_), R0 = _c(R0_)
    cdef C4 dQ = _c(dQ_), dQt = _c(dQt_), dP = _c(dP_), dPt = _c(dPt_), dS = _c(dS_), dSt = _c(dSt_)
    cdef C4 hP = _c(hP_), hPt = _c(hPt_), hS = _c(hS_), hSt = _c(hSt_), R = _c(R_)
    cdef Py_ssize_t n = Q.shape[0], h, k, i, j, l
    cdef double xxxx, xxxy, xxyx, xxyy, yyxx, yyxy, yyyx, yyyy, yxxx, yxxy, yxyx, yxyy
    res = np.zeros((12, n, n, n, n))
    cdef double[:, :, :, :, ::1] out = res
    for h in range(n):
        for k in range(n):
            for i in range(n):
                for j in range(n):
                    xxxx = R[h, k, i, j] + hSt[i, h, j, k] - hSt[j, h, i, k]
                    xxxy = hS[i, h, j, k] - hS[j, h, i, k]
                    xxyx = hP[i, h, k, j] - hP[j, h, k, i]
                    xxyy = R[h, k, i, j] + hPt[i, h, k, j] - hPt[j, h, k, i]
                    yyxx = dP[i, h, j, k] - dP[j, h, i, k]
                    yyxy = dPt[i, h, j, k] - dPt[j, h, i, k]
                    yyyx = dQt[i, h, j, k] - dQt[j, h, i, k]
                    yyyy = dQ[i, h, j, k] - dQ[j, h, i, k]
                    yxxx = dSt[i, h, j, k] - hP[j, h, i, k]
                    yxxy = dS[i, h, j, k] - hPt[j, h, i, k]
                    yxyx = dP[i, h, k, j]
                    yxyy = dPt[i, h, k, j]
                    for l in range(n):
                        xxxx += (St[l, j, k] * St[h, i, l] - St[l, i, k] * St[h, j, l]
                                 + S[l, j, k] * P[h, l, i] - S[l, i, k] * P[h, l, j]
                                 + R0[l, i, j] * P[h, l, k])
                        xxxy += (St[l, j, k] * S[h, i, l] - St[l, i, k] * S[h, j, l]
                                 + S[l, j, k] * Pt[h, l, i] - S[l, i, k] * Pt[h, l, j]
                                 + R0[l, i, j] * Pt[h, l, k])
                        xxyx += (Pt[l, k, j] * P[h, l, i] - Pt[l, k, i] * P[h, l, j]
                                 + P[l, k, j] * St[h, i, l] - P[l, k, i] * St[h, j, l]
                                 + R0[l, i, j] * Qt[h, l, k])
                        xxyy += (Pt[l, k, j] * Pt[h, l, i] - Pt[l, k, i] * Pt[h, l, j]
                                 + P[l, k, j] * S[h, i, l] - P[l, k, i] * S[h, j, l]
                                 + R0[l, i, j] * Q[h, l, k])
                        yyxx += (P[l, j, k] * P[h, i, l] - P[l, i, k] * P[h, j, l]
                                 + Pt[l, j, k] * Qt[h, i, l] - Pt[l, i, k] * Qt[h, j, l])
                        yyxy += (P[l, j, k] * Pt[h, i, l] - P[l, i, k] * Pt[h, j, l]
                                 + Pt[l, j, k] * Q[h, i, l] - Pt[l, i, k] * Q[h, j, l])
                        yyyx += (Q[l, j, k] * Qt[h, i, l] - Q[l, i, k] * Qt[h, j, l]
                                 + Qt[l, j, k] * P[h, i, l] - Qt[l, i, k] * P[h, j, l])
                        yyyy += (Q[l, j, k] * Q[h, i, l] - Q[l, i, k] * Q[h, j, l]
                                 + Qt[l, j, k] * Pt[h, i, l] - Qt[l, i, k] * Pt[h, j, l])
                        yxxx += (St[l, j, k] * P[h, i, l] + S[l, j, k] * Qt[h, i, l]
                                 - P[l, i, k] * St[h, j, l] - Pt[l, i, k] * P[h, l, j])
                        yxxy += (St[l, j, k] * Pt[h, i, l] + S[l, j, k] * Q[h, i, l]
                                 - P[l, i, k] * S[h, j, l] - Pt[l, i, k] * Pt[h, l, j])
                        yxyx += (Pt[l, k, j] * Qt[h, i, l] + P[l, k, j] * P[h, i, l]
                                 - Q[l, i, k] * P[h, l, j] - Qt[l, i, k] * St[h, j, l])
                        yxyy += (Pt[l, k, j] * Q[h, i, l] + P[l, k, j] * Pt[h, i, l]
                                 - Q[l, i, k] * Pt[h, l, j] - Qt[l, i, k] * S[h, j, l])
                    out[0, h, k, i, j] = xxxx
                    out[1, h, k, i, j] = xxxy
                    out[2, h, k, i, j] = xxyx
                    out[3, h, k, i, j] = xxyy
                    out[4, h, k, i, j] = yyxx
                    out[5, h, k, i, j] = yyxy
                    out[6, h, k, i, j] = yyyx
                    out[7, h, k, i, j] = yyyy
                    out[8, h, k, i, j] = yxxx
                    out[9, h, k, i, j] = yxxy
                    out[10, h, k, i, j] = yxyx
                    out[11, h, k, i, j] = yxyy
    return res
