"""Levi-Civita connection of a lifted metric in the adapted frame.

With ``E`` the horizontal frame ``δ_i`` and ``V`` the vertical frame ``∂/∂y^i``::

    ∇_{V_i} V_j = Q^h_ij V_h + Qt^h_ij δ_h
    ∇_{δ_i} V_j = (Γ^h_ij + Pt^h_ji) V_h + P^h_ji δ_h
    ∇_{V_i} δ_j = P^h_ij δ_h + Pt^h_ij V_h
    ∇_{δ_i} δ_j = (Γ^h_ij + St^h_ij) δ_h + S^h_ij V_h

Each family is ``A_{ijk} H_a^{kh} + B_{ijk} H_b^{kh}`` for a pair of index
arrays ``A, B`` built from block derivatives and the base curvature, so the
coefficients, their fiber derivatives ``∂_m`` and their horizontal covariant
derivatives ``∇_m`` all come out of one contraction kernel.

Curvature enters through ``R0[l, j, k] = y^m R^l_{mjk}`` and the lowered
``R0low[i, j, k] = g_{il} R0[l, j, k]`` (first index lowered), which is the
convention that matches the coordinate-frame oracle.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from . import lift as _lift
from .base import BaseGeometry
from .lift import LiftParams, LiftPoint, TangentPoint

FAMILIES = ("Q", "Qt", "P", "Pt", "S", "St")


@dataclass(frozen=True)
class ConnectionCoeffs:
    Q: np.ndarray
    Qt: np.ndarray
    P: np.ndarray
    Pt: np.ndarray
    S: np.ndarray
    St: np.ndarray
    gamma: np.ndarray


@dataclass(frozen=True)
class ConnectionDerivs:
    """Fiber derivatives ``d*[m, h, i, j] = ∂_m *^h_ij`` and horizontal
    covariant derivatives ``h*[m, h, i, j] = ∇_m *^h_ij`` (only the
    families that contain base curvature have a nonzero ``h*``)."""

    dQ: np.ndarray
    dQt: np.ndarray
    dP: np.ndarray
    dPt: np.ndarray
    dS: np.ndarray
    dSt: np.ndarray
    hP: np.ndarray
    hPt: np.ndarray
    hS: np.ndarray
    hSt: np.ndarray


@dataclass(frozen=True)
class _Pieces:
    """Index arrays ``(A, B)`` of every family plus their derivatives."""

    A: dict
    dA: dict
    hA: dict


def _pieces(lp: LiftPoint) -> _Pieces:
    geom = lp.geom
    g, y = geom.g, lp.y
    dG1, dG2, dG3 = lp.derivs.dG
    ddG1, ddG2, ddG3 = lp.derivs.ddG
    G2 = lp.blocks.G2
    R = geom.riemann
    c3 = lp.jets["c3"]

    R0 = np.einsum("m,lmjk->ljk", y, R)
    R0low = np.einsum("il,ljk->ijk", g, R0)
    Rlow = np.einsum("ia,amjk->imjk", g, R)
    nR0 = np.einsum("a,mlajk->mljk", y, geom.nabla_riemann)
    nR0low = np.einsum("ia,majk->mijk", g, nR0)
    # Σ_l R0[l, j, k] G2[l, i], arranged as [i, j, k]
    R0G2 = np.einsum("ljk,li->ijk", R0, G2)

    A, dA, hA = {}, {}, {}
    A["Q"] = 0.5 * (dG2 + np.einsum("jik->ijk", dG2) - np.einsum("kij->ijk", dG2))
    A["Qb"] = 0.5 * (dG3 + np.einsum("jik->ijk", dG3))
    A["P"] = 0.5 * (dG3 - np.einsum("kij->ijk", dG3))
    A["Pb"] = 0.5 * (dG1 + R0G2)
    A["S"] = -0.5 * (np.einsum("kij->ijk", dG1) + np.einsum("kij->ijk", R0G2))
    A["Sb"] = c3[0] * R0low

    dA["Q"] = 0.5 * (ddG2 + np.einsum("mjik->mijk", ddG2) - np.einsum("mkij->mijk", ddG2))
    dA["Qb"] = 0.5 * (ddG3 + np.einsum("mjik->mijk", ddG3))
    dA["P"] = 0.5 * (ddG3 - np.einsum("mkij->mijk", ddG3))
    dA["Pb"] = 0.5 * (ddG1 + np.einsum("lmjk,li->mijk", R, G2)
                      + np.einsum("ljk,mli->mijk", R0, dG2))
    dA["S"] = -0.5 * (np.einsum("mkij->mijk", ddG1) + np.einsum("lmij,lk->mijk", R, G2)
                      + np.einsum("lij,mlk->mijk", R0, dG2))
    dA["Sb"] = c3[1] * np.einsum("m,ijk->mijk", lp.g0, R0low) + c3[0] * np.einsum("imjk->mijk", Rlow)

    zero = np.zeros_like(dA["Q"])
    hA["Q"] = hA["Qb"] = hA["P"] = zero
    hA["Pb"] = 0.5 * np.einsum("mljk,li->mijk", nR0, G2)
    hA["S"] = -0.5 * np.einsum("mlij,lk->mijk", nR0, G2)
    hA["Sb"] = c3[0] * nR0low
    return _Pieces(A, dA, hA)


def _h_for(lp: LiftPoint):
    inv = lp.inverse
    d = lp.derivs.dH
    return {1: (inv.H1, d[0]), 2: (inv.H2, d[1]), 3: (inv.H3, d[2])}


# family -> ((A key, H block), (B key, H block))
_LAYOUT = {
    "Q": (("Q", 2), ("Qb", 3)),
    "Qt": (("Q", 3), ("Qb", 1)),
    "P": (("P", 3), ("Pb", 1)),
    "Pt": (("P", 2), ("Pb", 3)),
    "S": (("S", 2), ("Sb", 3)),
    "St": (("S", 3), ("Sb", 1)),
}


def _coeffs(lp: LiftPoint, pieces: _Pieces) -> ConnectionCoeffs:
    H = _h_for(lp)
    out = {}
    for fam, ((a, ha), (b, hb)) in _LAYOUT.items():
        out[fam] = (kernels.contract_last(pieces.A[a], H[ha][0])
                    + kernels.contract_last(pieces.A[b], H[hb][0]))
    return ConnectionCoeffs(gamma=lp.geom.gamma, **out)


def _derivs(lp: LiftPoint, pieces: _Pieces) -> ConnectionDerivs:
    H = _h_for(lp)
    n = lp.y.shape[0]
    zA = np.zeros((n, n, n))
    zH = np.zeros((n, n, n))
    out = {}
    for fam, ((a, ha), (b, hb)) in _LAYOUT.items():
        out["d" + fam] = (
            kernels.contract_last_deriv(pieces.dA[a], pieces.A[a], H[ha][0], H[ha][1])
            + kernels.contract_last_deriv(pieces.dA[b], pieces.A[b], H[hb][0], H[hb][1])
        )
        if fam in ("P", "Pt", "S", "St"):
            out["h" + fam] = (
                kernels.contract_last_deriv(pieces.hA[a], zA, H[ha][0], zH)
                + kernels.contract_last_deriv(pieces.hA[b], zA, H[hb][0], zH)
            )
    return ConnectionDerivs(**out)


def connection_at(lp: LiftPoint) -> tuple[ConnectionCoeffs, ConnectionDerivs]:
    pieces = _pieces(lp)
    return _coeffs(lp, pieces), _derivs(lp, pieces)


def connection_coeffs(params: LiftParams, geom: BaseGeometry, pt: TangentPoint) -> ConnectionCoeffs:
    lp = _lift.evaluate(params, geom, pt.y)
    return _coeffs(lp, _pieces(lp))


def connection_coeff_derivatives(params: LiftParams, geom: BaseGeometry,
                                 pt: TangentPoint) -> ConnectionDerivs:
    lp = _lift.evaluate(params, geom, pt.y)
    return _derivs(lp, _pieces(lp))


def _frame_index(spec) -> tuple[str, int]:
    kind, idx = spec
    if kind not in ("h", "v"):
        raise ValueError(f"frame index kind must be 'h' or 'v', got {kind!r}")
    return kind, int(idx)


def nabla_frame(coeffs: ConnectionCoeffs, direction, arg) -> np.ndarray:
    """Adapted-frame components of ``∇_direction arg``.

    ``direction`` and ``arg`` are ``("h", i)`` for ``δ_i`` or ``("v", i)`` for
    ``∂/∂y^i``.  The result stacks the horizontal components first.
    """
    (dk, i), (ak, j) = _frame_index(direction), _frame_index(arg)
    c = coeffs
    if dk == "v" and ak == "v":
        hor, ver = c.Qt[:, i, j], c.Q[:, i, j]
    elif dk == "h" and ak == "v":
        hor, ver = c.P[:, j, i], c.gamma[:, i, j] + c.Pt[:, j, i]
    elif dk == "v" and ak == "h":
        hor, ver = c.P[:, i, j], c.Pt[:, i, j]
    else:
        hor, ver = c.gamma[:, i, j] + c.St[:, i, j], c.S[:, i, j]
    return np.concatenate([hor, ver])


def frame_bracket(geom: BaseGeometry, y, a, b) -> np.ndarray:
    """Adapted-frame components of the Lie bracket ``[a, b]`` of frame fields."""
    (ak, i), (bk, j) = _frame_index(a), _frame_index(b)
    n = geom.dim
    out = np.zeros(2 * n)
    if ak == "v" and bk == "v":
        return out
    if ak == "h" and bk == "v":
        out[n:] = geom.gamma[:, i, j]
    elif ak == "v" and bk == "h":
        out[n:] = -geom.gamma[:, j, i]
    else:
        out[n:] = -np.einsum("m,lm->l", np.asarray(y, float), geom.riemann[:, :, i, j])
    return out
