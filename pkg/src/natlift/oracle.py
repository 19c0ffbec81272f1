"""Finite-difference oracle in induced coordinates.

The lifted metric is written in the coordinate frame ``(∂/∂x, ∂/∂y)`` of
``TM``, its Christoffel symbols and Riemann tensor are obtained by central
differences, and the result is transformed back to the adapted frame for
comparison with the closed-form curvature.  None of this path uses the
connection coefficients, so it checks them independently.
"""

from __future__ import annotations

import numpy as np

from . import connection as _conn
from . import kernels
from . import lift as _lift
from .base import BaseGeometry, BaseModel
from .curvature import CurvatureComponents, full_tensor
from .errors import DegenerateMetricError, DomainError, OracleError, SingularityError
from .lift import LiftParams, TangentPoint

DEFAULT_STEP = 1e-3
OUTER_FACTOR = 1.0  # outer differencing pass reuses the inner step


def _adapted_blocks(params: LiftParams, g: np.ndarray, y: np.ndarray, check: bool = True) -> np.ndarray:
    t = 0.5 * float(y @ g @ y)
    jets = params.jets(t)
    if check:
        _lift._check_positive(jets, t)
    w = g @ y
    ww = np.outer(w, w)
    G1 = jets["c1"][0] * g + jets["d1"][0] * ww
    G2 = jets["c2"][0] * g + jets["d2"][0] * ww
    G3 = jets["c3"][0] * g + jets["d3"][0] * ww
    return np.block([[G1, G3], [G3, G2]])


def frame_matrix(gamma: np.ndarray, y) -> np.ndarray:
    """Columns are ``δ_i`` and ``∂/∂y^i`` in coordinate components."""
    n = gamma.shape[0]
    N = np.einsum("k,hki->hi", np.asarray(y, float), gamma)  # Γ^h_{0i}
    E = np.eye(2 * n)
    E[n:, :n] = -N
    return E


def coordinate_metric(params: LiftParams, model: BaseModel, pt: TangentPoint, check: bool = True) -> np.ndarray:
    """The lifted metric as a symmetric ``2n x 2n`` matrix in ``(∂/∂x, ∂/∂y)``."""
    x = np.asarray(pt.x, float)
    y = np.asarray(pt.y, float)
    g, gamma = model.christoffel(x)
    Ga = _adapted_blocks(params, g, y, check=check)
    E = frame_matrix(gamma, y)
    T = np.linalg.inv(E)  # coordinate vectors in adapted components
    Gc = T.T @ Ga @ T
    return 0.5 * (Gc + Gc.T)


def _metric_fn(params, model, n, check):
    def f(z):
        try:
            return coordinate_metric(params, model, TangentPoint(z[:n], z[n:]), check=check)
        except (DegenerateMetricError, DomainError) as exc:
            raise OracleError(f"coordinate metric unavailable at {z.tolist()}: {exc}") from exc
    return f


def _fd_christoffel(metric, z, h):
    m = z.size
    dG = np.zeros((m, m, m))
    for c in range(m):
        e = np.zeros(m)
        e[c] = h
        dG[c] = (metric(z + e) - metric(z - e)) / (2 * h)
    G = metric(z)
    if np.linalg.cond(G) > 1e12:
        raise OracleError(f"coordinate metric is singular at {z.tolist()}")
    return kernels.christoffel(np.linalg.inv(G), dG)


def _default_step(pt: TangentPoint) -> float:
    return DEFAULT_STEP * max(1.0, float(np.linalg.norm(pt.x)), float(np.linalg.norm(pt.y)))


def fd_riemann(params: LiftParams, model: BaseModel, pt: TangentPoint, step: float | None = None,
               outer_step: float | None = None, check: bool = True) -> np.ndarray:
    """Coordinate-frame ``R^A_{BCD}`` of the lifted metric by nested central differences."""
    n = model.dim
    if step is None:
        step = _default_step(pt)
    if step <= 0:
        raise ValueError("step must be positive")
    if outer_step is None:
        outer_step = step * OUTER_FACTOR
    metric = _metric_fn(params, model, n, check)
    z = np.concatenate([np.asarray(pt.x, float), np.asarray(pt.y, float)])
    m = 2 * n
    gamma = _fd_christoffel(metric, z, step)
    dgamma = np.zeros((m, m, m, m))
    for e_ in range(m):
        e = np.zeros(m)
        e[e_] = outer_step
        dgamma[e_] = (_fd_christoffel(metric, z + e, step)
                      - _fd_christoffel(metric, z - e, step)) / (2 * outer_step)
    return kernels.riemann(gamma, dgamma)


def to_adapted(fdR: np.ndarray, geom: BaseGeometry, y) -> np.ndarray:
    """Transform a coordinate-frame (1,3) tensor to the adapted frame."""
    E = frame_matrix(geom.gamma, y)
    Einv = np.linalg.inv(E)
    return np.einsum("Aa,abcd,bB,cC,dD->ABCD", Einv, fdR, E, E, E)


def compare_adapted_detail(K: CurvatureComponents, fdR: np.ndarray, geom: BaseGeometry, pt: TangentPoint):
    """Return ``(max_rel_error, worst_index)`` over all adapted-frame entries."""
    tr = to_adapted(fdR, geom, pt.y)
    cf = full_tensor(K)
    err = np.abs(cf - tr) / (1.0 + np.abs(tr))
    idx = np.unravel_index(int(np.argmax(err)), err.shape)
    return float(err[idx]), tuple(int(i) for i in idx)


def compare_adapted(K: CurvatureComponents, fdR: np.ndarray, geom: BaseGeometry, pt: TangentPoint) -> float:
    return compare_adapted_detail(K, fdR, geom, pt)[0]


# -- connection checks ---------------------------------------------------------

def _frame_specs(n):
    return [("h", i) for i in range(n)] + [("v", i) for i in range(n)]


def metric_compatibility_residual(params: LiftParams, model: BaseModel, pt: TangentPoint,
                                  h: float = 1e-5) -> float:
    """Largest relative mismatch of ``E_C G(E_A, E_B)`` against the connection.

    The left side is a central difference along the frame field ``E_C`` (for
    ``δ_i`` the point moves in ``x`` with the ``-Γ^h_{0i}`` correction in ``y``).
    """
    n = model.dim
    x = np.asarray(pt.x, float)
    y = np.asarray(pt.y, float)
    geom = model.geometry_at(x)
    lp = _lift.evaluate(params, geom, y)
    coeffs, _ = _conn.connection_at(lp)
    G = lp.blocks.full()
    N = np.einsum("k,hki->hi", y, geom.gamma)
    specs = _frame_specs(n)

    def Ga(xx, yy):
        g, _ = model.christoffel(xx)
        return _adapted_blocks(params, g, yy)

    worst = 0.0
    for C in specs:
        kind, i = C
        dx = np.zeros(n)
        dy = np.zeros(n)
        if kind == "h":
            dx[i] = 1.0
            dy = -N[:, i]
        else:
            dy[i] = 1.0
        lhs = (Ga(x + h * dx, y + h * dy) - Ga(x - h * dx, y - h * dy)) / (2 * h)
        W = np.stack([_conn.nabla_frame(coeffs, C, A) for A in specs], axis=1)
        rhs = W.T @ G + G @ W
        err = np.abs(lhs - rhs) / np.maximum(1.0, np.abs(lhs))
        worst = max(worst, float(err.max()))
    return worst


def torsion_residual(coeffs, geom: BaseGeometry, y) -> float:
    """``max |∇_A E_B - ∇_B E_A - [E_A, E_B]|`` over all frame pairs."""
    specs = _frame_specs(geom.dim)
    worst = 0.0
    for A in specs:
        for B in specs:
            t = (_conn.nabla_frame(coeffs, A, B) - _conn.nabla_frame(coeffs, B, A)
                 - _conn.frame_bracket(geom, y, A, B))
            worst = max(worst, float(np.abs(t).max()))
    return worst


def fd_sectional_tensor(params: LiftParams, model: BaseModel, pt: TangentPoint,
                        step: float | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Oracle curvature in the adapted frame and the adapted metric matrix."""
    geom = model.geometry_at(pt.x)
    R = fd_riemann(params, model, pt, step)
    Ga = _adapted_blocks(params, geom.g, np.asarray(pt.y, float))
    return to_adapted(R, geom, pt.y), Ga


__all__ = [
    "coordinate_metric", "fd_riemann", "to_adapted", "compare_adapted", "compare_adapted_detail",
    "metric_compatibility_residual", "torsion_residual", "fd_sectional_tensor", "frame_matrix",
    "SingularityError",
]
