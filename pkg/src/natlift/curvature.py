"""Curvature of lifted metrics in the adapted frame.

The twelve families follow the naming in which each letter records whether
the corresponding argument of ``K(E_i, E_j) E_k`` and the output component is
horizontal (X) or vertical (Y); e.g. ``YXXY^h_kij`` is the vertical component
of ``K(∂/∂y^i, δ_j) δ_k``.  All arrays are indexed ``[h, k, i, j]``.

Besides the families this module builds the constant-curvature comparison
tensor, sectional curvatures of sampled planes and the isotropic
decompositions used to read off coefficients.  It also constructs two lift
families from ``(α, β, c)``; only :func:`flat_lift` is flat on a flat base in
general.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import connection as _conn
from . import kernels
from . import lift as _lift
from .base import BaseGeometry, BaseModel
from .errors import DecompositionError, DegenerateMetricError, PlaneError
from .lift import LiftParams, MetricBlocks, TangentPoint
from .scalarfn import CoeffFn

FAMILY_NAMES = ("XXXX", "XXXY", "XXYX", "XXYY", "YYXX", "YYXY",
                "YYYX", "YYYY", "YXXX", "YXXY", "YXYX", "YXYY")
# families whose first two arguments are of the same kind
SAME_KIND = FAMILY_NAMES[:8]
PLANE_TOL = 1e-8


@dataclass(frozen=True)
class CurvatureComponents:
    stacked: np.ndarray  # shape (12, n, n, n, n)

    def __getattr__(self, name):
        if name in FAMILY_NAMES:
            return self.stacked[FAMILY_NAMES.index(name)]
        raise AttributeError(name)

    def __getitem__(self, name: str) -> np.ndarray:
        return self.stacked[FAMILY_NAMES.index(name)]

    @property
    def dim(self) -> int:
        return self.stacked.shape[1]

    def as_dict(self) -> dict[str, np.ndarray]:
        return {name: self.stacked[f] for f, name in enumerate(FAMILY_NAMES)}

    def __sub__(self, other: "CurvatureComponents") -> "CurvatureComponents":
        return CurvatureComponents(self.stacked - other.stacked)


def _components_at(lp) -> CurvatureComponents:
    c, d = _conn.connection_at(lp)
    geom = lp.geom
    R0 = np.einsum("m,lmjk->ljk", lp.y, geom.riemann)
    out = kernels.curvature_families(c.Q, c.Qt, c.P, c.Pt, c.S, c.St,
                                     d.dQ, d.dQt, d.dP, d.dPt, d.dS, d.dSt,
                                     d.hP, d.hPt, d.hS, d.hSt, geom.riemann, R0)
    return CurvatureComponents(out)


def curvature_components(params: LiftParams, geom: BaseGeometry, pt: TangentPoint) -> CurvatureComponents:
    return _components_at(_lift.evaluate(params, geom, pt.y))


def curvature_and_blocks(params: LiftParams, geom: BaseGeometry, y, check: bool = True):
    """Curvature families together with the metric blocks at ``(geom.x, y)``."""
    lp = _lift.evaluate(params, geom, y, check=check)
    return _components_at(lp), lp.blocks


def k0_components(k: float, blocks: MetricBlocks) -> CurvatureComponents:
    """Families of ``K0(X, Y)Z = k [G(Y, Z) X - G(X, Z) Y]``."""
    n = blocks.G1.shape[0]
    eye = np.eye(n)
    out = np.zeros((12, n, n, n, n))

    def pair(Gb):
        # k [Gb_jk δ^h_i - Gb_ik δ^h_j] as [h, k, i, j]
        return k * (np.einsum("jk,hi->hkij", Gb, eye) - np.einsum("ik,hj->hkij", Gb, eye))

    out[0] = pair(blocks.G1)
    out[2] = pair(blocks.G3)
    out[5] = pair(blocks.G3)
    out[7] = pair(blocks.G2)
    out[8] = -k * np.einsum("ik,hj->hkij", blocks.G3, eye)
    out[9] = k * np.einsum("jk,hi->hkij", blocks.G1, eye)
    out[10] = -k * np.einsum("ik,hj->hkij", blocks.G2, eye)
    out[11] = k * np.einsum("jk,hi->hkij", blocks.G3, eye)
    return CurvatureComponents(out)


def constant_curvature_residual(K: CurvatureComponents, k: float, blocks: MetricBlocks):
    """Return ``(max_abs, per_family)`` of ``|K - K0|`` entrywise."""
    diff = np.abs(K.stacked - k0_components(k, blocks).stacked)
    per_family = diff.reshape(12, -1).max(axis=1)
    return float(per_family.max()), [float(v) for v in per_family]


def full_tensor(K: CurvatureComponents) -> np.ndarray:
    """Assemble ``F[D, C, A, B]``: the ``E_D`` component of ``K(E_A, E_B) E_C``.

    Frame order is ``(δ_1..δ_n, ∂/∂y^1..∂/∂y^n)``.
    """
    n = K.dim
    F = np.zeros((2 * n,) * 4)
    h, v = slice(0, n), slice(n, 2 * n)
    s = K.stacked
    # (A, B, C, D) slices for each family, in FAMILY_NAMES order
    layout = [(h, h, h, h), (h, h, h, v), (h, h, v, h), (h, h, v, v),
              (v, v, h, h), (v, v, h, v), (v, v, v, h), (v, v, v, v),
              (v, h, h, h), (v, h, h, v), (v, h, v, h), (v, h, v, v)]
    for f, (A, B, C, D) in enumerate(layout):
        F[D, C, A, B] = s[f]
    # K(δ_i, ∂_j) = -K(∂_j, δ_i)
    F[:, :, h, v] = -np.transpose(F[:, :, v, h], (0, 1, 3, 2))
    return F


def _curvature_operator(F: np.ndarray, X, Y) -> np.ndarray:
    # components of K(X, Y) Y
    return np.einsum("dcab,a,b,c->d", F, X, Y, Y)


def sectional_curvature(K: CurvatureComponents, blocks: MetricBlocks, X, Y, F=None) -> float:
    """``G(K(X, Y)Y, X) / (G(X, X) G(Y, Y) - G(X, Y)^2)`` for adapted-frame 2n-vectors."""
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    G = blocks.full()
    gram = (X @ G @ X) * (Y @ G @ Y) - (X @ G @ Y) ** 2
    if not gram > PLANE_TOL:
        raise PlaneError(f"plane is degenerate (Gram determinant {gram!r})")
    if F is None:
        F = full_tensor(K)
    return float(_curvature_operator(F, X, Y) @ G @ X / gram)


def sectional_from_full(F: np.ndarray, G: np.ndarray, X, Y) -> float:
    """Sectional curvature from an assembled (1,3) tensor and metric matrix."""
    gram = (X @ G @ X) * (Y @ G @ Y) - (X @ G @ Y) ** 2
    if not gram > PLANE_TOL:
        raise PlaneError(f"plane is degenerate (Gram determinant {gram!r})")
    return float(_curvature_operator(F, X, Y) @ G @ X / gram)


# -- isotropic decompositions ----------------------------------------------------

@dataclass(frozen=True)
class Decomposition:
    coeffs: tuple
    residual: float


def lemma1_decompose(S, geom: BaseGeometry, y) -> Decomposition:
    """Solve ``S = u g + v g0 ⊗ g0`` by least squares; coefficients ``(u, v)``."""
    S = np.asarray(S, dtype=float)
    y = np.asarray(y, dtype=float)
    n = geom.dim
    if n < 2:
        raise DecompositionError("the (u, v) decomposition needs n > 1")
    if not np.any(y):
        raise DecompositionError("degenerate basis: y = 0")
    g0 = geom.g @ y
    basis = np.stack([geom.g.ravel(), np.outer(g0, g0).ravel()], axis=1)
    sol, *_ = np.linalg.lstsq(basis, S.ravel(), rcond=None)
    residual = float(np.linalg.norm(basis @ sol - S.ravel()))
    if residual > 1e-8 * np.linalg.norm(S):
        raise DecompositionError(f"tensor is not in span{{g, g0 g0}} (residual {residual:.3e})")
    return Decomposition((float(sol[0]), float(sol[1])), residual)


LEMMA2_PATTERNS = (
    "δ^h_i g_jk", "δ^h_j g_ik", "δ^h_k g_ij", "δ^h_k g0_i g0_j", "δ^h_j g0_i g0_k",
    "δ^h_i g0_j g0_k", "g_jk g0_i y^h", "g_ik g0_j y^h", "g_ij g0_k y^h", "g0_i g0_j g0_k y^h",
)


def lemma2_basis(geom: BaseGeometry, y) -> np.ndarray:
    """The ten isotropic (1,3) patterns as arrays ``[h, k, i, j]``."""
    g = geom.g
    y = np.asarray(y, dtype=float)
    w = g @ y
    d = np.eye(geom.dim)
    e = np.einsum
    return np.stack([
        e("hi,jk->hkij", d, g),
        e("hj,ik->hkij", d, g),
        e("hk,ij->hkij", d, g),
        e("hk,i,j->hkij", d, w, w),
        e("hj,i,k->hkij", d, w, w),
        e("hi,j,k->hkij", d, w, w),
        e("jk,i,h->hkij", g, w, y),
        e("ik,j,h->hkij", g, w, y),
        e("ij,k,h->hkij", g, w, y),
        e("i,j,k,h->hkij", w, w, w, y),
    ])


def lemma2_decompose(T, geom: BaseGeometry, y) -> Decomposition:
    """Least-squares coefficients ``α_1..α_10`` of ``T`` in the isotropic basis."""
    n = geom.dim
    if n < 3:
        raise DecompositionError("the ten-pattern decomposition needs n >= 3")
    y = np.asarray(y, dtype=float)
    if not np.any(y):
        raise DecompositionError("degenerate basis: y = 0")
    B = lemma2_basis(geom, y).reshape(10, -1).T
    scale = np.linalg.norm(B, axis=0)
    Bn = B / scale
    cond = np.linalg.cond(Bn.T @ Bn)
    if cond > 1e10:
        raise DecompositionError(f"pattern Gram matrix is rank deficient (condition {cond:.3e})")
    sol, *_ = np.linalg.lstsq(Bn, np.asarray(T, dtype=float).ravel(), rcond=None)
    sol = sol / scale
    residual = float(np.linalg.norm(B @ sol - np.asarray(T).ravel()))
    return Decomposition(tuple(float(v) for v in sol), residual)


# -- lift families --------------------------------------------------------------

def _positivity_scan(params: LiftParams, t_range, samples: int = 41) -> None:
    for t in np.linspace(t_range[0], t_range[1], samples):
        _lift.check_positivity(params, float(t))


def theorem4_metric(alpha: CoeffFn, beta: CoeffFn, c: float, check: bool = True,
                    t_range=(0.0, 2.0)) -> LiftParams:
    """The family ``c1 = c, d1 = 0, c2 = α, c3 = β, d3 = β'`` with
    ``d2 = (α'β² + 2α'ββ't - 2αβ'²t) / β²``.

    The quotient requires ``β`` to be a positive constant or a polynomial with
    non-negative coefficients and positive constant term.  With ``check`` the
    lift is tested for positivity on a grid over ``t_range``.

    Note: on a flat base this family is flat only in special cases (for example
    when ``α`` and ``β`` are constant); see :func:`flat_lift` for a family that
    is flat in general.
    """
    t = CoeffFn.t()
    a1 = alpha.derivative()
    b1 = beta.derivative()
    d2 = (a1 * beta**2 + 2.0 * a1 * beta * b1 * t - 2.0 * alpha * b1**2 * t) / beta**2
    zero = CoeffFn.const(0.0)
    params = LiftParams(CoeffFn.const(c), alpha, beta, zero, d2, b1, name="theorem4")
    if check:
        _positivity_scan(params, t_range)
    return params


def flat_lift(alpha: CoeffFn, beta: CoeffFn, c: float, check: bool = True,
              t_range=(0.0, 2.0)) -> LiftParams:
    """Lift that is flat on a flat base for any admissible ``α, β`` and ``c > 0``.

    ``c1 = c, d1 = 0, c2 = α, c3 = β, d3 = β'`` and, with ``A = α - β²/c``,
    ``d2 = (2ββ' + 2tβ'²)/c + A' + tA'²/(2A)``.  On ``R^n`` the change of
    coordinates ``u = c x + grad B(y)`` (``B' = β``) splits the metric into a flat
    x-part and a radial y-part, and this choice of ``d2`` makes the radial part
    a flat cone-free metric.  ``A`` must be a polynomial with non-negative
    coefficients and positive constant term.
    """
    if c <= 0:
        raise DegenerateMetricError("flat_lift needs c > 0", inequality="c1 > 0")
    t = CoeffFn.t()
    b1 = beta.derivative()
    A = alpha - beta**2 / c
    A1 = A.derivative()
    d2 = (2.0 * beta * b1 + 2.0 * t * b1**2) / c + A1 + t * A1**2 / (2.0 * A)
    zero = CoeffFn.const(0.0)
    params = LiftParams(CoeffFn.const(c), alpha, beta, zero, d2, b1, name="flat")
    if check:
        _positivity_scan(params, t_range)
    return params


# -- sampling and reports ----------------------------------------------------------

@dataclass
class SampleSpec:
    points: int = 10
    planes: int = 200
    seed: int = 0
    y_scale: float = 1.0
    y_zero: bool = False


def sample_tangent_points(model: BaseModel, spec: SampleSpec, rng=None) -> list[TangentPoint]:
    rng = np.random.default_rng(spec.seed) if rng is None else rng
    pts = []
    for _ in range(spec.points):
        x = model.sample_point(rng)
        y = np.zeros(model.dim) if spec.y_zero else rng.uniform(-spec.y_scale, spec.y_scale, model.dim)
        pts.append(TangentPoint(x, y))
    return pts


def sample_plane(rng: np.random.Generator, G: np.ndarray, min_gram: float = 1e-4):
    """Draw ``X, Y`` uniform in ``[-1, 1]^{2n}``, normalised in ``G``; reject thin planes."""
    m = G.shape[0]
    while True:
        X = rng.uniform(-1.0, 1.0, m)
        Y = rng.uniform(-1.0, 1.0, m)
        X = X / np.sqrt(X @ G @ X)
        Y = Y / np.sqrt(Y @ G @ Y)
        gram = (X @ G @ X) * (Y @ G @ Y) - (X @ G @ Y) ** 2
        if gram >= min_gram:
            return X, Y


@dataclass
class PlaneSample:
    sample_id: int
    point: int
    x: np.ndarray
    y: np.ndarray
    X: np.ndarray
    Y: np.ndarray
    k_value: float


@dataclass
class FlatnessReport:
    min_residual: float
    best_k: float
    residual_at_zero: float
    per_family_at_zero: list
    spread: float
    k_min: float
    k_max: float
    max_component: float
    planes: list = field(default_factory=list)
    worst_point: int = -1

    def to_dict(self) -> dict:
        return {
            "min_residual_over_k": self.min_residual,
            "best_k": self.best_k,
            "residual_at_k0": self.residual_at_zero,
            "per_family_residual_at_k0": dict(zip(FAMILY_NAMES, self.per_family_at_zero)),
            "sectional_spread": self.spread,
            "sectional_min": self.k_min,
            "sectional_max": self.k_max,
            "max_component": self.max_component,
            "worst_point": self.worst_point,
            "n_planes": len(self.planes),
        }


def scan_planes(params: LiftParams, model: BaseModel, spec: SampleSpec, check: bool = True):
    """Evaluate curvature at seeded points and sectional curvature on seeded planes.

    Planes are assigned to points round-robin.  Returns ``(points, evals, planes)``
    where ``evals`` holds ``(K, blocks)`` per point.
    """
    rng = np.random.default_rng(spec.seed)
    pts = sample_tangent_points(model, spec, rng)
    evals = []
    for pt in pts:
        geom = model.geometry_at(pt.x)
        evals.append(curvature_and_blocks(params, geom, pt.y, check=check))
    fulls = [full_tensor(K) for K, _ in evals]
    planes = []
    for s in range(spec.planes):
        p = s % len(pts)
        G = evals[p][1].full()
        X, Y = sample_plane(rng, G)
        kv = sectional_from_full(fulls[p], G, X, Y)
        planes.append(PlaneSample(s, p, pts[p].x, pts[p].y, X, Y, kv))
    return pts, evals, planes


def flatness_report(params: LiftParams, model: BaseModel, spec: SampleSpec,
                    check: bool = True) -> FlatnessReport:
    """Test the constant-curvature condition at sampled points.

    Candidate constants are ``0`` and every sampled sectional curvature; for
    each the worst residual ``max |K - K0|`` over the points is computed and
    the smallest such value is reported, together with the spread of the
    sampled sectional curvatures.
    """
    pts, evals, planes = scan_planes(params, model, spec, check=check)
    ks = np.array([p.k_value for p in planes]) if planes else np.zeros(1)
    candidates = np.unique(np.concatenate([[0.0], ks]))
    best, best_k = np.inf, 0.0
    for k in candidates:
        worst = max(constant_curvature_residual(K, float(k), b)[0] for K, b in evals)
        if worst < best:
            best, best_k = worst, float(k)
    at_zero = [constant_curvature_residual(K, 0.0, b) for K, b in evals]
    worst_point = int(np.argmax([r[0] for r in at_zero]))
    per_family = np.max([r[1] for r in at_zero], axis=0).tolist()
    return FlatnessReport(
        min_residual=float(best),
        best_k=best_k,
        residual_at_zero=float(max(r[0] for r in at_zero)),
        per_family_at_zero=per_family,
        spread=float(ks.max() - ks.min()),
        k_min=float(ks.min()),
        k_max=float(ks.max()),
        max_component=float(max(np.abs(K.stacked).max() for K, _ in evals)),
        planes=planes,
        worst_point=worst_point,
    )
