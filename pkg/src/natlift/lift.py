"""General natural lifted metrics on the tangent bundle.

In the adapted frame ``(δ/δx^i, ∂/∂y^i)`` the metric is the block matrix
``[[G1, G3], [G3, G2]]`` with ``G_a = c_a(t) g + d_a(t) g0 ⊗ g0``, where
``g0_i = y^k g_ki`` and ``t = ½ g(y, y)``.  Its inverse has the same shape,
``H_a = p_a g^{-1} + q_a y ⊗ y``.

Everything here is evaluated pointwise.  Scalar quantities that depend on
``t`` (the six coefficients and the derived ``p_a``, ``q_a``) are carried as
derivative jets ``[f, f', f'', f''']`` so their ``t``-derivatives are exact.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import scalarfn
from .base import BaseGeometry
from .errors import ConfigError, DegenerateMetricError, SingularityError
from .scalarfn import CoeffFn, div_jets, mul_jets

COEFF_NAMES = ("c1", "c2", "c3", "d1", "d2", "d3")
SINGULAR_TOL = 1e-12


@dataclass(frozen=True)
class LiftParams:
    c1: CoeffFn
    c2: CoeffFn
    c3: CoeffFn
    d1: CoeffFn
    d2: CoeffFn
    d3: CoeffFn
    name: str = "explicit"

    def coeffs(self) -> dict[str, CoeffFn]:
        return {k: getattr(self, k) for k in COEFF_NAMES}

    def jets(self, t: float) -> dict[str, np.ndarray]:
        return {k: f.jet(t) for k, f in self.coeffs().items()}

    def is_constant(self) -> bool:
        return all(f.is_constant_function() for f in self.coeffs().values())

    def to_config(self) -> dict:
        return {"explicit": {k: f.to_config() for k, f in self.coeffs().items()}}


def explicit(**coeffs) -> LiftParams:
    """Build :class:`LiftParams`; missing coefficients are zero, numbers become constants."""
    unknown = set(coeffs) - set(COEFF_NAMES)
    if unknown:
        raise ConfigError(f"unknown lift coefficients {sorted(unknown)}")
    vals = {}
    for k in COEFF_NAMES:
        v = coeffs.get(k, 0.0)
        vals[k] = v if isinstance(v, CoeffFn) else CoeffFn.const(float(v))
    return LiftParams(**vals)


def sasaki() -> LiftParams:
    return LiftParams(*(CoeffFn.const(v) for v in (1, 1, 0, 0, 0, 0)), name="sasaki")


def cheeger_gromoll() -> LiftParams:
    w = CoeffFn.ratio([1.0], [1.0, 2.0])
    zero = CoeffFn.const(0.0)
    return LiftParams(CoeffFn.const(1.0), w, zero, zero, w, zero, name="cheeger-gromoll")


@dataclass(frozen=True)
class TangentPoint:
    x: np.ndarray
    y: np.ndarray

    def __init__(self, x, y):
        object.__setattr__(self, "x", np.asarray(x, dtype=float))
        object.__setattr__(self, "y", np.asarray(y, dtype=float))


@dataclass(frozen=True)
class MetricBlocks:
    G1: np.ndarray
    G2: np.ndarray
    G3: np.ndarray
    t: float
    g0: np.ndarray
    y: np.ndarray
    g: np.ndarray

    def full(self) -> np.ndarray:
        """The ``2n x 2n`` matrix ``[[G1, G3], [G3, G2]]`` (horizontal first)."""
        return np.block([[self.G1, self.G3], [self.G3, self.G2]])


@dataclass(frozen=True)
class InverseBlocks:
    H1: np.ndarray
    H2: np.ndarray
    H3: np.ndarray
    p: tuple | None = None
    q: tuple | None = None

    @property
    def p1(self):
        return None if self.p is None else self.p[0]

    @property
    def p2(self):
        return None if self.p is None else self.p[1]

    @property
    def p3(self):
        return None if self.p is None else self.p[2]

    @property
    def q1(self):
        return None if self.q is None else self.q[0]

    @property
    def q2(self):
        return None if self.q is None else self.q[1]

    @property
    def q3(self):
        return None if self.q is None else self.q[2]

    def full(self) -> np.ndarray:
        return np.block([[self.H1, self.H3], [self.H3, self.H2]])


@dataclass(frozen=True)
class BlockDerivatives:
    """Fiber derivatives of the metric and inverse blocks.

    ``dG[a][i, j, k] = ∂_i G_a,jk``; ``ddG[a][i, j, k, l] = ∂_i ∂_j G_a,kl``;
    ``dH[a][i, j, k] = ∂_i H_a^jk`` with ``a = 0, 1, 2`` for blocks 1, 2, 3.
    """

    dG: tuple
    ddG: tuple
    dH: tuple


def energy_density(geom: BaseGeometry, y) -> float:
    y = np.asarray(y, dtype=float)
    return 0.5 * float(y @ geom.g @ y)


def _check_positive(jets: dict, t: float) -> None:
    c1, c2, c3 = (jets[k][0] for k in ("c1", "c2", "c3"))
    d1, d2, d3 = (jets[k][0] for k in ("d1", "d2", "d3"))
    checks = (
        ("c1 > 0", c1),
        ("c1 + 2t d1 > 0", c1 + 2 * t * d1),
        ("c1 c2 - c3^2 > 0", c1 * c2 - c3**2),
        ("(c1 + 2t d1)(c2 + 2t d2) - (c3 + 2t d3)^2 > 0",
         (c1 + 2 * t * d1) * (c2 + 2 * t * d2) - (c3 + 2 * t * d3) ** 2),
    )
    for label, value in checks:
        if not value > 0:
            raise DegenerateMetricError(
                f"lifted metric is degenerate at t={t!r}: {label} fails (value {value!r})",
                inequality=label,
                t=t,
            )


def check_positivity(params: LiftParams, t: float) -> None:
    """Raise :class:`DegenerateMetricError` unless the lift is Riemannian at ``t``."""
    _check_positive(params.jets(t), t)


def _jet_const(v: float) -> np.ndarray:
    out = np.zeros(scalarfn.MAX_ORDER + 1)
    out[0] = v
    return out


def _check_den(jet: np.ndarray, label: str) -> None:
    if abs(jet[0]) < SINGULAR_TOL:
        raise SingularityError(f"closed-form inverse: {label} = {jet[0]!r} is singular")


def pq_jets(jets: dict, t: float) -> tuple[list, list]:
    """Jets of ``p1, p2, p3`` and ``q1, q2, q3`` at ``t``.

    The closed forms are evaluated in jet arithmetic so the returned arrays
    carry exact ``t``-derivatives.
    """
    c1, c2, c3, d1, d2, d3 = (jets[k] for k in COEFF_NAMES)
    tj = _jet_const(t)
    tj[1] = 1.0
    m = mul_jets
    two_t = 2.0 * tj
    delta = m(c1, c2) - m(c3, c3)
    _check_den(delta, "c1 c2 - c3^2")
    p1 = div_jets(c2, delta)
    p2 = div_jets(c1, delta)
    p3 = -div_jets(c3, delta)
    e1 = c1 + m(two_t, d1)
    e2 = c2 + m(two_t, d2)
    e3 = c3 + m(two_t, d3)
    big = m(e1, e2) - m(e3, e3)
    _check_den(big, "(c1 + 2t d1)(c2 + 2t d2) - (c3 + 2t d3)^2")
    _check_den(e2, "c2 + 2t d2")
    q1_num = (m(m(c2, d1), p1) - m(m(c3, d3), p1) - m(m(c3, d2), p3) + m(m(c2, d3), p3)
              + m(m(m(two_t, d1), d2), p1) - m(m(m(two_t, d3), d3), p1))
    q1 = -div_jets(q1_num, big)
    inner = m(m(d3, p1) + m(d2, p3), e1) - m(m(d1, p1) + m(d3, p3), e3)
    q2 = -div_jets(m(d2, p2) + m(d3, p3), e2) + div_jets(m(e3, inner), m(e2, big))
    q3 = -div_jets(inner, big)
    return [p1, p2, p3], [q1, q2, q3]


@dataclass
class LiftPoint:
    """Everything the connection and curvature need at one tangent vector."""

    params: LiftParams
    geom: BaseGeometry
    y: np.ndarray
    t: float
    g0: np.ndarray
    jets: dict
    p_jets: list
    q_jets: list
    blocks: MetricBlocks
    inverse: InverseBlocks
    derivs: BlockDerivatives = field(repr=False)


def _block_derivatives(jets, g, g_inv, g0, y, p_jets, q_jets):
    n = g.shape[0]
    eye = np.eye(n)
    dG, ddG, dH = [], [], []
    # ∂_i G_jk = c' g0_i g_jk + d' g0_i g0_j g0_k + d (g_ij g0_k + g_ik g0_j)
    g0g = np.einsum("i,jk->ijk", g0, g)
    g0g0g0 = np.einsum("i,j,k->ijk", g0, g0, g0)
    gg0 = np.einsum("ij,k->ijk", g, g0)
    g0g0gkl = np.einsum("i,j,kl->ijkl", g0, g0, g)
    gij_gkl = np.einsum("ij,kl->ijkl", g, g)
    g0x4 = np.einsum("i,j,k,l->ijkl", g0, g0, g0, g0)
    gij_g0k_g0l = np.einsum("ij,k,l->ijkl", g, g0, g0)
    gik_g0j_g0l = np.einsum("ik,j,l->ijkl", g, g0, g0)
    gil_g0j_g0k = np.einsum("il,j,k->ijkl", g, g0, g0)
    gjk_g0i_g0l = np.einsum("jk,i,l->ijkl", g, g0, g0)
    gjl_g0i_g0k = np.einsum("jl,i,k->ijkl", g, g0, g0)
    gjk_gil = np.einsum("jk,il->ijkl", g, g)
    gjl_gik = np.einsum("jl,ik->ijkl", g, g)
    g0_ginv = np.einsum("i,jk->ijk", g0, g_inv)
    g0_yy = np.einsum("i,j,k->ijk", g0, y, y)
    dy = np.einsum("ij,k->ijk", eye, y) + np.einsum("ik,j->ijk", eye, y)
    for a, (cn, dn) in enumerate((("c1", "d1"), ("c2", "d2"), ("c3", "d3"))):
        c, d = jets[cn], jets[dn]
        dG.append(c[1] * g0g + d[1] * g0g0g0 + d[0] * (gg0 + np.einsum("ikj->ijk", gg0)))
        ddG.append(
            c[2] * g0g0gkl + c[1] * gij_gkl + d[2] * g0x4
            + d[1] * (gij_g0k_g0l + gik_g0j_g0l + gil_g0j_g0k + gjk_g0i_g0l + gjl_g0i_g0k)
            + d[0] * (gjk_gil + gjl_gik)
        )
        p, q = p_jets[a], q_jets[a]
        dH.append(p[1] * g0_ginv + q[1] * g0_yy + q[0] * dy)
    return BlockDerivatives(tuple(dG), tuple(ddG), tuple(dH))


def evaluate(params: LiftParams, geom: BaseGeometry, y, check: bool = True) -> LiftPoint:
    """Evaluate blocks, closed-form inverse and fiber derivatives at ``(geom.x, y)``."""
    y = np.asarray(y, dtype=float)
    g, g_inv = geom.g, geom.g_inv
    t = energy_density(geom, y)
    g0 = g @ y
    jets = params.jets(t)
    if check:
        _check_positive(jets, t)
    ww = np.outer(g0, g0)
    G = [jets[c][0] * g + jets[d][0] * ww for c, d in (("c1", "d1"), ("c2", "d2"), ("c3", "d3"))]
    blocks = MetricBlocks(G[0], G[1], G[2], t, g0, y, g)
    p_jets, q_jets = pq_jets(jets, t)
    yy = np.outer(y, y)
    H = [p_jets[a][0] * g_inv + q_jets[a][0] * yy for a in range(3)]
    inverse = InverseBlocks(H[0], H[1], H[2],
                            tuple(float(p[0]) for p in p_jets),
                            tuple(float(q[0]) for q in q_jets))
    derivs = _block_derivatives(jets, g, g_inv, g0, y, p_jets, q_jets)
    return LiftPoint(params, geom, y, t, g0, jets, p_jets, q_jets, blocks, inverse, derivs)


def metric_blocks(params: LiftParams, geom: BaseGeometry, pt: TangentPoint) -> MetricBlocks:
    y = np.asarray(pt.y, dtype=float)
    t = energy_density(geom, y)
    jets = params.jets(t)
    _check_positive(jets, t)
    g0 = geom.g @ y
    ww = np.outer(g0, g0)
    G = [jets[c][0] * geom.g + jets[d][0] * ww
         for c, d in (("c1", "d1"), ("c2", "d2"), ("c3", "d3"))]
    return MetricBlocks(G[0], G[1], G[2], t, g0, y, geom.g)


def inverse_blocks_closed_form(params: LiftParams, geom: BaseGeometry, pt: TangentPoint,
                               blocks: MetricBlocks | None = None) -> InverseBlocks:
    y = np.asarray(pt.y, dtype=float)
    t = energy_density(geom, y) if blocks is None else blocks.t
    p_jets, q_jets = pq_jets(params.jets(t), t)
    yy = np.outer(y, y)
    H = [p_jets[a][0] * geom.g_inv + q_jets[a][0] * yy for a in range(3)]
    return InverseBlocks(H[0], H[1], H[2],
                         tuple(float(p[0]) for p in p_jets),
                         tuple(float(q[0]) for q in q_jets))


def inverse_blocks_numeric(blocks: MetricBlocks) -> InverseBlocks:
    """Invert the full block matrix directly and project onto ``g^{-1}``, ``y y``.

    ``p`` and ``q`` are recovered by least squares when ``n > 1`` and ``y`` is
    not negligibly small; otherwise they are left unset.
    """
    n = blocks.G1.shape[0]
    full = blocks.full()
    if np.linalg.cond(full) > 1e14:
        raise SingularityError("adapted-frame block matrix is not invertible")
    inv = np.linalg.inv(full)
    inv = 0.5 * (inv + inv.T)
    H1, H3, H2 = inv[:n, :n], inv[:n, n:], inv[n:, n:]
    y = blocks.y
    p = q = None
    g_inv = np.linalg.inv(blocks.g)
    # the y y direction carries no information when it is negligible next to g^{-1}
    if n > 1 and np.linalg.norm(np.outer(y, y)) > 1e-8 * np.linalg.norm(g_inv):
        basis = np.stack([g_inv.ravel(), np.outer(y, y).ravel()], axis=1)
        sols = [np.linalg.lstsq(basis, Hb.ravel(), rcond=None)[0] for Hb in (H1, H2, H3)]
        p = tuple(float(s[0]) for s in sols)
        q = tuple(float(s[1]) for s in sols)
    return InverseBlocks(H1, H2, H3, p, q)


def metric_block_derivatives(params: LiftParams, geom: BaseGeometry, pt: TangentPoint) -> BlockDerivatives:
    return evaluate(params, geom, pt.y).derivs


def from_config(cfg) -> LiftParams:
    """Lift from ``{"preset": ...}`` or ``{"explicit": {...}}``."""
    if not isinstance(cfg, dict):
        raise ConfigError(f"lift config must be an object, got {cfg!r}")
    if "preset" in cfg:
        name = cfg["preset"]
        if name == "sasaki":
            return sasaki()
        if name == "cheeger-gromoll":
            return cheeger_gromoll()
        if name == "theorem4":
            from .curvature import theorem4_metric

            try:
                alpha = scalarfn.from_config(cfg["alpha"])
                beta = scalarfn.from_config(cfg["beta"])
                c = float(cfg["c"])
            except KeyError as exc:
                raise ConfigError(f"theorem4 preset needs alpha, beta and c: missing {exc}") from exc
            return theorem4_metric(alpha, beta, c, check=False)
        raise ConfigError(f"unknown lift preset {name!r}")
    if "explicit" in cfg:
        body = cfg["explicit"]
        if not isinstance(body, dict):
            raise ConfigError("explicit lift must map coefficient names to coefficients")
        unknown = set(body) - set(COEFF_NAMES)
        if unknown:
            raise ConfigError(f"unknown lift coefficients {sorted(unknown)}")
        return explicit(**{k: scalarfn.from_config(v) for k, v in body.items()})
    raise ConfigError("lift config needs 'preset' or 'explicit'")
