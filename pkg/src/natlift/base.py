"""Base manifold models and their pointwise geometry.

Three models are provided: the flat :class:`Euclidean` space, the round
:class:`Sphere` of dimension two in the polar chart, and
:class:`CustomPolynomial` whose metric entries are polynomials in the chart
coordinates.  :func:`geometry_at` returns the metric, its inverse, the
Christoffel symbols, the Riemann tensor and its covariant derivative.

Conventions: ``gamma[h, i, j] = Γ^h_{ij}``; ``riemann[h, k, i, j] = R^h_{kij}``
with ``R(∂_i, ∂_j)∂_k = R^h_{kij} ∂_h``; ``nabla_riemann[m, h, k, i, j]`` is
``∇_m R^h_{kij}``.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

import numpy as np

from . import kernels
from .errors import ConfigError, DegenerateMetricError, DomainError

SPHERE_POLE_GUARD = 0.1


@dataclass(frozen=True)
class BaseGeometry:
    dim: int
    x: np.ndarray
    g: np.ndarray
    g_inv: np.ndarray
    gamma: np.ndarray
    riemann: np.ndarray
    nabla_riemann: np.ndarray

    @property
    def riemann_lowered(self) -> np.ndarray:
        """``R_{hkij} = g_{hl} R^l_{kij}``."""
        return np.einsum("hl,lkij->hkij", self.g, self.riemann)


class BaseModel:
    """Interface shared by the base manifold models."""

    kind: str = ""
    dim: int = 0

    def check_point(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.dim,):
            raise DomainError(f"expected a {self.dim}-vector, got shape {x.shape}", value=x)
        return x

    def metric(self, x) -> np.ndarray:
        raise NotImplementedError

    def christoffel(self, x) -> tuple[np.ndarray, np.ndarray]:
        """Return ``(g, gamma)`` at ``x`` without curvature."""
        raise NotImplementedError

    def geometry_at(self, x) -> BaseGeometry:
        raise NotImplementedError

    def sample_point(self, rng: np.random.Generator) -> np.ndarray:
        raise NotImplementedError

    def to_config(self) -> dict:
        raise NotImplementedError


class Euclidean(BaseModel):
    kind = "euclidean"

    def __init__(self, dim: int):
        if dim < 1:
            raise ConfigError("euclidean dimension must be >= 1")
        self.dim = int(dim)

    def metric(self, x) -> np.ndarray:
        self.check_point(x)
        return np.eye(self.dim)

    def christoffel(self, x):
        self.check_point(x)
        return np.eye(self.dim), np.zeros((self.dim,) * 3)

    def geometry_at(self, x) -> BaseGeometry:
        x = self.check_point(x)
        n = self.dim
        return BaseGeometry(n, x, np.eye(n), np.eye(n), np.zeros((n,) * 3),
                            np.zeros((n,) * 4), np.zeros((n,) * 5))

    def sample_point(self, rng):
        return rng.uniform(-1.0, 1.0, self.dim)

    def to_config(self):
        return {"kind": "euclidean", "dim": self.dim}


class Sphere(BaseModel):
    """Round 2-sphere of the given radius in the chart ``(theta, phi)``.

    Points closer than ``SPHERE_POLE_GUARD`` radians to a pole are rejected.
    """

    kind = "sphere"

    def __init__(self, radius: float = 1.0, dim: int = 2):
        if dim != 2:
            raise ConfigError("only the 2-sphere is supported")
        if radius <= 0:
            raise ConfigError("sphere radius must be positive")
        self.dim = 2
        self.radius = float(radius)

    def check_point(self, x):
        x = super().check_point(x)
        theta = x[0]
        if not (SPHERE_POLE_GUARD <= theta <= np.pi - SPHERE_POLE_GUARD):
            raise DomainError(
                f"polar angle {theta!r} is within {SPHERE_POLE_GUARD} rad of a pole", value=x
            )
        return x

    def metric(self, x):
        x = self.check_point(x)
        r2 = self.radius**2
        return np.diag([r2, r2 * np.sin(x[0]) ** 2])

    def christoffel(self, x):
        x = self.check_point(x)
        s, c = np.sin(x[0]), np.cos(x[0])
        gamma = np.zeros((2, 2, 2))
        gamma[0, 1, 1] = -s * c
        gamma[1, 0, 1] = gamma[1, 1, 0] = c / s
        return self.metric(x), gamma

    def metric_jets(self, x):
        """Exact ``g`` and its first three coordinate derivatives."""
        x = self.check_point(x)
        r2 = self.radius**2
        th = x[0]
        # sin^2 = (1 - cos 2θ)/2
        f = [np.sin(th) ** 2, np.sin(2 * th), 2 * np.cos(2 * th), -4 * np.sin(2 * th)]
        g = np.diag([r2, r2 * f[0]])
        dg = np.zeros((2, 2, 2))
        ddg = np.zeros((2, 2, 2, 2))
        dddg = np.zeros((2, 2, 2, 2, 2))
        dg[0, 1, 1] = r2 * f[1]
        ddg[0, 0, 1, 1] = r2 * f[2]
        dddg[0, 0, 0, 1, 1] = r2 * f[3]
        return g, dg, ddg, dddg

    def geometry_at(self, x):
        x = self.check_point(x)
        g, gamma = self.christoffel(x)
        g_inv = np.diag(1.0 / np.diag(g))
        curv = 1.0 / self.radius**2
        riemann = np.zeros((2, 2, 2, 2))
        for h, k, i, j in product(range(2), repeat=4):
            riemann[h, k, i, j] = curv * ((h == i) * g[k, j] - (h == j) * g[k, i])
        # locally symmetric space
        return BaseGeometry(2, x, g, g_inv, gamma, riemann, np.zeros((2,) * 5))

    def sample_point(self, rng):
        margin = np.pi / 4  # equatorial band keeps the chart well conditioned
        return np.array([rng.uniform(margin, np.pi - margin), rng.uniform(-np.pi, np.pi)])

    def to_config(self):
        return {"kind": "sphere", "dim": 2, "radius": self.radius}


class _Monomials:
    """Polynomial in ``n`` variables as a list of (coefficient, exponents)."""

    def __init__(self, terms, n: int):
        self.n = n
        self.terms = []
        for coeff, exps in terms:
            exps = tuple(int(e) for e in exps)
            if len(exps) != n or any(e < 0 for e in exps):
                raise ConfigError(f"bad exponent tuple {exps!r} for dimension {n}")
            self.terms.append((float(coeff), exps))

    def derivative_value(self, x, idx: tuple[int, ...]) -> float:
        """Value of the mixed partial ``∂_{idx}`` of the polynomial at ``x``."""
        total = 0.0
        for coeff, exps in self.terms:
            e = list(exps)
            c = coeff
            for v in idx:
                if e[v] == 0:
                    c = 0.0
                    break
                c *= e[v]
                e[v] -= 1
            if c == 0.0:
                continue
            total += c * float(np.prod([x[v] ** e[v] for v in range(self.n)]))
        return total


class CustomPolynomial(BaseModel):
    """Metric whose entries are polynomials in the chart coordinates.

    ``entries`` maps ``(i, j)`` (0-based, either triangle) to a list of
    ``(coefficient, exponents)`` terms; missing entries are zero.  The chart
    domain is the axis-aligned ``box``; positive definiteness is checked on a
    seeded sample of the box at construction.
    """

    kind = "custom-polynomial"

    def __init__(self, dim: int, entries: dict, box=None, n_checks: int = 64):
        self.dim = int(dim)
        n = self.dim
        self.box = np.array(box if box is not None else [[-1.0, 1.0]] * n, dtype=float)
        if self.box.shape != (n, 2) or np.any(self.box[:, 0] >= self.box[:, 1]):
            raise ConfigError("box must be a list of [lo, hi] pairs, one per coordinate")
        self._raw_entries = {}
        self.entries = {}
        for key, terms in entries.items():
            i, j = (int(v) for v in key)
            if not (0 <= i < n and 0 <= j < n):
                raise ConfigError(f"entry index {(i, j)} out of range for dimension {n}")
            a, b = min(i, j), max(i, j)
            if (a, b) in self.entries:
                raise ConfigError(f"metric entry {(a, b)} given twice")
            self.entries[(a, b)] = _Monomials(terms, n)
            self._raw_entries[(a, b)] = [(c, list(e)) for c, e in terms]
        rng = np.random.default_rng(12345)
        pts = [self.box.mean(axis=1)] + [
            rng.uniform(self.box[:, 0], self.box[:, 1]) for _ in range(n_checks)
        ]
        for p in pts:
            eig = np.linalg.eigvalsh(self._derivs(p, 0))
            if eig.min() <= 0:
                raise DegenerateMetricError(
                    f"custom metric is not positive definite at x={p.tolist()}",
                    inequality="g > 0",
                )

    def check_point(self, x):
        x = super().check_point(x)
        if np.any(x < self.box[:, 0]) or np.any(x > self.box[:, 1]):
            raise DomainError(f"point {x.tolist()} lies outside the chart box", value=x)
        return x

    def _derivs(self, x, order: int) -> np.ndarray:
        n = self.dim
        out = np.zeros((n,) * order + (n, n))
        for idx in product(range(n), repeat=order):
            for (a, b), poly in self.entries.items():
                v = poly.derivative_value(x, idx)
                out[idx + (a, b)] = v
                out[idx + (b, a)] = v
        return out

    def metric(self, x):
        return self._derivs(self.check_point(x), 0)

    def metric_jets(self, x):
        x = self.check_point(x)
        return tuple(self._derivs(x, k) for k in range(4))

    def christoffel(self, x):
        x = self.check_point(x)
        g, dg = self._derivs(x, 0), self._derivs(x, 1)
        return g, kernels.christoffel(np.linalg.inv(g), dg)

    def geometry_at(self, x):
        x = self.check_point(x)
        return geometry_from_jets(x, *self.metric_jets(x))

    def sample_point(self, rng):
        lo, hi = self.box[:, 0], self.box[:, 1]
        pad = 0.1 * (hi - lo)
        return rng.uniform(lo + pad, hi - pad)

    def to_config(self):
        return {
            "kind": "custom-polynomial",
            "dim": self.dim,
            "entries": {f"{a},{b}": [[c, e] for c, e in terms]
                        for (a, b), terms in self._raw_entries.items()},
            "box": self.box.tolist(),
        }


def geometry_from_jets(x, g, dg, ddg, dddg) -> BaseGeometry:
    """Geometry from exact metric derivatives.

    ``dg[c, a, b] = ∂_c g_ab``, ``ddg[d, c, a, b] = ∂_d ∂_c g_ab`` and so on.
    """
    n = g.shape[0]
    gi = np.linalg.inv(g)
    dgi = -np.einsum("ab,ebc,cd->ead", gi, dg, gi)
    ddgi = -(np.einsum("fab,ebc,cd->fead", dgi, dg, gi)
             + np.einsum("ab,febc,cd->fead", gi, ddg, gi)
             + np.einsum("ab,ebc,fcd->fead", gi, dg, dgi))
    # Christoffel symbols of the first kind and their derivatives
    c1 = 0.5 * (np.einsum("bdc->dbc", dg) + np.einsum("cdb->dbc", dg) - dg)
    dc1 = 0.5 * (np.einsum("ebdc->edbc", ddg) + np.einsum("ecdb->edbc", ddg) - ddg)
    ddc1 = 0.5 * (np.einsum("febdc->fedbc", dddg) + np.einsum("fecdb->fedbc", dddg) - dddg)
    gamma = np.einsum("ad,dbc->abc", gi, c1)
    dgamma = np.einsum("ead,dbc->eabc", dgi, c1) + np.einsum("ad,edbc->eabc", gi, dc1)
    ddgamma = (np.einsum("fead,dbc->feabc", ddgi, c1)
               + np.einsum("ead,fdbc->feabc", dgi, dc1)
               + np.einsum("fad,edbc->feabc", dgi, dc1)
               + np.einsum("ad,fedbc->feabc", gi, ddc1))
    riemann = kernels.riemann(gamma, dgamma)
    # ∂_f R^a_{bcd}
    dR = (np.einsum("fcadb->fabcd", ddgamma) - np.einsum("fdacb->fabcd", ddgamma)
          + np.einsum("face,edb->fabcd", dgamma, gamma)
          + np.einsum("ace,fedb->fabcd", gamma, dgamma)
          - np.einsum("fade,ecb->fabcd", dgamma, gamma)
          - np.einsum("ade,fecb->fabcd", gamma, dgamma))
    nabla = (dR
             + np.einsum("afe,ebcd->fabcd", gamma, riemann)
             - np.einsum("efb,aecd->fabcd", gamma, riemann)
             - np.einsum("efc,abed->fabcd", gamma, riemann)
             - np.einsum("efd,abce->fabcd", gamma, riemann))
    return BaseGeometry(n, np.asarray(x, dtype=float), g, gi, gamma, riemann, nabla)


def geometry_at(model: BaseModel, x) -> BaseGeometry:
    return model.geometry_at(x)


def from_config(cfg) -> BaseModel:
    """Build a model from ``{"kind": ..., "dim": ..., ...}`` or ``"euclidean:2"``."""
    if isinstance(cfg, str):
        return parse_base(cfg)
    if not isinstance(cfg, dict) or "kind" not in cfg:
        raise ConfigError(f"base config needs a 'kind' field: {cfg!r}")
    kind = cfg["kind"]
    try:
        if kind == "euclidean":
            return Euclidean(int(cfg["dim"]))
        if kind == "sphere":
            return Sphere(float(cfg.get("radius", 1.0)), int(cfg.get("dim", 2)))
        if kind == "custom-polynomial":
            entries = {}
            for key, terms in cfg["entries"].items():
                i, j = (int(v) for v in str(key).split(","))
                entries[(i, j)] = [(c, e) for c, e in terms]
            return CustomPolynomial(int(cfg["dim"]), entries, cfg.get("box"))
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, (ConfigError, DegenerateMetricError)):
            raise
        raise ConfigError(f"malformed {kind!r} base config: {exc}") from exc
    raise ConfigError(f"unknown base kind {kind!r}")


def parse_base(text: str) -> BaseModel:
    """``"euclidean:3"`` or ``"sphere:2:1.5"`` (dimension, radius)."""
    parts = text.split(":")
    try:
        if parts[0] == "euclidean" and len(parts) == 2:
            return Euclidean(int(parts[1]))
        if parts[0] == "sphere" and len(parts) in (2, 3):
            return Sphere(float(parts[2]) if len(parts) == 3 else 1.0, int(parts[1]))
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"cannot parse base {text!r}") from exc
    raise ConfigError(f"cannot parse base {text!r}; use 'euclidean:N' or 'sphere:2:R'")
