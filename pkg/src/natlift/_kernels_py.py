"""Pure-Python tensor kernels.

Reference implementation of the hot contractions, written as explicit sums.
``_ckernels.pyx`` mirrors every function here; the two must stay in lockstep.

Index layout: a (1,2) array ``T[h, i, j]`` holds ``T^h_{ij}``; a (1,3) array
``F[h, k, i, j]`` holds ``F^h_{kij}``; fiber/horizontal derivative arrays put
the differentiation index first, ``dT[m, h, i, j]``.
"""

from __future__ import annotations

import numpy as np


def christoffel(ginv, dg):
    """Christoffel symbols ``gamma[a, b, c]`` from ``dg[c, a, b] = d_c g_ab``."""
    n = ginv.shape[0]
    out = np.zeros((n, n, n))
    for a in range(n):
        for b in range(n):
            for c in range(b, n):
                s = 0.0
                for d in range(n):
                    s += ginv[a, d] * (dg[b, d, c] + dg[c, d, b] - dg[d, b, c])
                out[a, b, c] = 0.5 * s
                out[a, c, b] = 0.5 * s
    return out


def riemann(gamma, dgamma):
    """``R[a, b, c, d] = R^a_{bcd}`` with ``R(e_c, e_d) e_b = R^a_{bcd} e_a``.

    ``dgamma[e, a, b, c]`` is ``d_e gamma^a_{bc}``.
    """
    n = gamma.shape[0]
    out = np.zeros((n, n, n, n))
    for a in range(n):
        for b in range(n):
            for c in range(n):
                for d in range(c + 1, n):
                    s = dgamma[c, a, d, b] - dgamma[d, a, c, b]
                    for e in range(n):
                        s += gamma[a, c, e] * gamma[e, d, b] - gamma[a, d, e] * gamma[e, c, b]
                    out[a, b, c, d] = s
                    out[a, b, d, c] = -s
    return out


def contract_last(A, H):
    """``T[h, i, j] = sum_k A[i, j, k] H[k, h]``."""
    n = H.shape[0]
    out = np.zeros((n, n, n))
    for h in range(n):
        for i in range(n):
            for j in range(n):
                s = 0.0
                for k in range(n):
                    s += A[i, j, k] * H[k, h]
                out[h, i, j] = s
    return out


def contract_last_deriv(dA, A, H, dH):
    """Product rule for :func:`contract_last`.

    ``dT[m, h, i, j] = sum_k dA[m, i, j, k] H[k, h] + A[i, j, k] dH[m, k, h]``.
    """
    n = H.shape[0]
    out = np.zeros((n, n, n, n))
    for m in range(n):
        for h in range(n):
            for i in range(n):
                for j in range(n):
                    s = 0.0
                    for k in range(n):
                        s += dA[m, i, j, k] * H[k, h] + A[i, j, k] * dH[m, k, h]
                    out[m, h, i, j] = s
    return out


def curvature_families(Q, Qt, P, Pt, S, St, dQ, dQt, dP, dPt, dS, dSt,
                       hP, hPt, hS, hSt, R, R0):
    """The twelve adapted-frame curvature families, stacked as ``out[f, h, k, i, j]``.

    Family order: XXXX, XXXY, XXYX, XXYY, YYXX, YYXY, YYYX, YYYY,
    YXXX, YXXY, YXYX, YXYY.  ``d*`` are fiber derivatives, ``h*`` horizontal
    covariant derivatives, ``R0[l, i, j] = y^m R^l_{mij}``.
    """
    n = Q.shape[0]
    out = np.zeros((12, n, n, n, n))
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
    return out
