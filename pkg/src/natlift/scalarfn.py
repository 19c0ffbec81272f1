"""Scalar coefficient functions of the energy density ``t``.

A :class:`CoeffFn` is a small immutable expression tree built from constants,
the variable ``t``, sums, products, integer powers and quotients.  Derivatives
up to third order are evaluated exactly by propagating derivative jets
``(f, f', f'', f''')`` through the tree; no finite differencing happens here.

Quotients are only admitted when the denominator is a polynomial whose
coefficients are non-negative with a positive constant term, which makes it
strictly positive on ``t >= 0``.
"""

from __future__ import annotations

from math import comb

import numpy as np
from numpy.polynomial import polynomial as npoly

from .errors import CoeffConstructionError, ConfigError, DomainError

MAX_ORDER = 3
_JET = MAX_ORDER + 1


def mul_jets(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    out = np.zeros(_JET)
    for k in range(_JET):
        out[k] = sum(comb(k, j) * a[j] * b[k - j] for j in range(k + 1))
    return out


def div_jets(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    # q*b = a, solved order by order
    q = np.zeros(_JET)
    for k in range(_JET):
        acc = a[k] - sum(comb(k, j) * q[j] * b[k - j] for j in range(k))
        q[k] = acc / b[0]
    return q


class CoeffFn:
    """Immutable expression tree over ``t`` with exact low-order derivatives."""

    __slots__ = ("kind", "args", "domain_floor", "_poly")

    def __init__(self, kind: str, args: tuple = (), domain_floor: float = 0.0):
        if kind not in ("const", "t", "sum", "prod", "quot", "pow"):
            raise CoeffConstructionError(f"unknown node kind {kind!r}")
        if domain_floor < 0:
            raise CoeffConstructionError("domain_floor must be >= 0")
        self.kind = kind
        self.args = tuple(args)
        self.domain_floor = float(domain_floor)
        self._poly = self._polynomial_coeffs()
        if kind == "quot":
            den = self.args[1]._poly
            if den is None or not _positive_poly(den):
                raise CoeffConstructionError(
                    "quotient denominators must be polynomials with non-negative "
                    "coefficients and a positive constant term"
                )
        if kind == "pow" and (not isinstance(self.args[1], int) or self.args[1] < 0):
            raise CoeffConstructionError("only non-negative integer powers are supported")

    # -- construction helpers -------------------------------------------------

    @classmethod
    def const(cls, value: float) -> "CoeffFn":
        return cls("const", (float(value),))

    @classmethod
    def t(cls) -> "CoeffFn":
        return cls("t")

    @classmethod
    def poly(cls, coeffs) -> "CoeffFn":
        """Polynomial ``a0 + a1 t + a2 t^2 + ...``."""
        coeffs = [float(c) for c in coeffs]
        if not coeffs:
            return cls.const(0.0)
        var = cls.t()
        out = cls.const(coeffs[0])
        for k, a in enumerate(coeffs[1:], start=1):
            if a == 0.0:
                continue
            term = cls.const(a) * (var if k == 1 else var**k)
            out = out + term
        return out

    @classmethod
    def ratio(cls, num, den) -> "CoeffFn":
        return cls.poly(num) / cls.poly(den)

    # -- algebra ----------------------------------------------------------------

    @staticmethod
    def _wrap(other) -> "CoeffFn":
        if isinstance(other, CoeffFn):
            return other
        if isinstance(other, (int, float, np.floating, np.integer)):
            return CoeffFn.const(float(other))
        return NotImplemented

    def _floor_with(self, other: "CoeffFn") -> float:
        return max(self.domain_floor, other.domain_floor)

    def __add__(self, other):
        other = self._wrap(other)
        if other is NotImplemented:
            return other
        if self.is_const() and other.is_const():
            return CoeffFn("const", (self.args[0] + other.args[0],), self._floor_with(other))
        if other.is_zero():
            return self
        if self.is_zero():
            return other
        return CoeffFn("sum", (self, other), self._floor_with(other))

    __radd__ = __add__

    def __neg__(self):
        return CoeffFn.const(-1.0) * self

    def __sub__(self, other):
        other = self._wrap(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._wrap(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        other = self._wrap(other)
        if other is NotImplemented:
            return other
        if self.is_const() and other.is_const():
            return CoeffFn("const", (self.args[0] * other.args[0],), self._floor_with(other))
        if self.is_zero() or other.is_zero():
            return CoeffFn("const", (0.0,), self._floor_with(other))
        if self.is_one():
            return other
        if other.is_one():
            return self
        return CoeffFn("prod", (self, other), self._floor_with(other))

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._wrap(other)
        if other is NotImplemented:
            return other
        if other.is_const():
            if other.args[0] == 0.0:
                raise CoeffConstructionError("division by the zero constant")
            return self * (1.0 / other.args[0])
        if self.is_zero():
            return CoeffFn("const", (0.0,), self._floor_with(other))
        return CoeffFn("quot", (self, other), self._floor_with(other))

    def __rtruediv__(self, other):
        other = self._wrap(other)
        if other is NotImplemented:
            return other
        return other / self

    def __pow__(self, k):
        if not isinstance(k, (int, np.integer)) or k < 0:
            raise CoeffConstructionError("only non-negative integer powers are supported")
        k = int(k)
        if k == 0:
            return CoeffFn.const(1.0)
        if k == 1:
            return self
        if self.is_const():
            return CoeffFn.const(self.args[0] ** k)
        return CoeffFn("pow", (self, k), self.domain_floor)

    # -- inspection -------------------------------------------------------------

    def is_const(self) -> bool:
        return self.kind == "const"

    def is_zero(self) -> bool:
        return self.kind == "const" and self.args[0] == 0.0

    def is_one(self) -> bool:
        return self.kind == "const" and self.args[0] == 1.0

    def is_constant_function(self) -> bool:
        """True when the function does not depend on ``t`` (exact for polynomials)."""
        if self._poly is not None:
            return not np.any(self._poly[1:])
        if self.kind == "pow":
            return self.args[0].is_constant_function()
        return all(a.is_constant_function() for a in self.args)

    def _polynomial_coeffs(self):
        k = self.kind
        if k == "const":
            return np.array([self.args[0]])
        if k == "t":
            return np.array([0.0, 1.0])
        if k == "quot":
            return None
        if k == "pow":
            base = self.args[0]._poly
            return None if base is None else npoly.polypow(base, self.args[1])
        a, b = (arg._poly for arg in self.args)
        if a is None or b is None:
            return None
        return npoly.polyadd(a, b) if k == "sum" else npoly.polymul(a, b)

    @property
    def polynomial(self):
        """Coefficients ``[a0, a1, ...]`` when the tree is a polynomial, else None."""
        return None if self._poly is None else self._poly.copy()

    def as_ratio(self):
        """Return ``(num, den)`` coefficient arrays with ``self == num/den``."""
        k = self.kind
        if self._poly is not None:
            return self._poly.copy(), np.array([1.0])
        if k == "quot":
            n1, d1 = self.args[0].as_ratio()
            n2, d2 = self.args[1].as_ratio()
            return npoly.polymul(n1, d2), npoly.polymul(d1, n2)
        if k == "pow":
            n, d = self.args[0].as_ratio()
            e = self.args[1]
            return npoly.polypow(n, e), npoly.polypow(d, e)
        (n1, d1), (n2, d2) = (a.as_ratio() for a in self.args)
        if k == "prod":
            return npoly.polymul(n1, n2), npoly.polymul(d1, d2)
        return npoly.polyadd(npoly.polymul(n1, d2), npoly.polymul(n2, d1)), npoly.polymul(d1, d2)

    # -- evaluation ---------------------------------------------------------------

    def jet(self, t: float) -> np.ndarray:
        """Return ``[f(t), f'(t), f''(t), f'''(t)]``."""
        t = float(t)
        if t < self.domain_floor:
            raise DomainError(
                f"t={t!r} is below the domain floor {self.domain_floor!r}",
                value=t,
                floor=self.domain_floor,
            )
        return self._jet(t)

    def _jet(self, t: float) -> np.ndarray:
        k = self.kind
        if k == "const":
            out = np.zeros(_JET)
            out[0] = self.args[0]
            return out
        if k == "t":
            out = np.zeros(_JET)
            out[0], out[1] = t, 1.0
            return out
        if k == "sum":
            return self.args[0]._jet(t) + self.args[1]._jet(t)
        if k == "prod":
            return mul_jets(self.args[0]._jet(t), self.args[1]._jet(t))
        if k == "quot":
            return div_jets(self.args[0]._jet(t), self.args[1]._jet(t))
        base = self.args[0]._jet(t)
        out = base
        for _ in range(self.args[1] - 1):
            out = mul_jets(out, base)
        return out

    def __call__(self, t: float, order: int = 0) -> float:
        return eval_coeff(self, t, order)

    def derivative(self) -> "CoeffFn":
        """Symbolic first derivative as a new :class:`CoeffFn`."""
        k = self.kind
        floor = self.domain_floor
        if k == "const":
            out = CoeffFn.const(0.0)
        elif k == "t":
            out = CoeffFn.const(1.0)
        elif k == "sum":
            out = self.args[0].derivative() + self.args[1].derivative()
        elif k == "prod":
            f, g = self.args
            out = f.derivative() * g + f * g.derivative()
        elif k == "quot":
            f, g = self.args
            out = (f.derivative() * g - f * g.derivative()) / (g**2)
        else:
            f, e = self.args
            out = CoeffFn.const(e) * (f ** (e - 1)) * f.derivative()
        return out.with_floor(floor)

    def with_floor(self, floor: float) -> "CoeffFn":
        if floor == self.domain_floor:
            return self
        return CoeffFn(self.kind, self.args, floor)

    # -- serialization ------------------------------------------------------------

    def to_config(self) -> dict:
        if self.kind == "const":
            return {"const": self.args[0]}
        if self._poly is not None:
            return {"poly": [float(c) for c in self._poly]}
        num, den = self.as_ratio()
        return {"ratio": {"num": [float(c) for c in num], "den": [float(c) for c in den]}}

    def __repr__(self) -> str:
        k = self.kind
        if k == "const":
            return repr(self.args[0])
        if k == "t":
            return "t"
        if k == "pow":
            return f"({self.args[0]!r})**{self.args[1]}"
        op = {"sum": " + ", "prod": "*", "quot": "/"}[k]
        return f"({self.args[0]!r}{op}{self.args[1]!r})"


def _positive_poly(coeffs) -> bool:
    coeffs = np.trim_zeros(np.asarray(coeffs, dtype=float), "b")
    return coeffs.size > 0 and coeffs[0] > 0 and bool(np.all(coeffs >= 0))


def eval_coeff(f: CoeffFn, t: float, order: int = 0) -> float:
    """Exact ``order``-th derivative of ``f`` at ``t`` for ``order`` in 0..3."""
    if order not in range(_JET):
        raise ValueError(f"order must be in 0..{MAX_ORDER}, got {order!r}")
    return float(f.jet(t)[order])


def const(value: float) -> CoeffFn:
    return CoeffFn.const(value)


def poly(*coeffs: float) -> CoeffFn:
    return CoeffFn.poly(coeffs)


def from_config(cfg) -> CoeffFn:
    """Build a :class:`CoeffFn` from its tagged JSON form.

    Accepts ``{"poly": [...]}``, ``{"ratio": {"num": [...], "den": [...]}}``,
    ``{"const": a}`` and, for convenience, a bare number.
    """
    if isinstance(cfg, (int, float)) and not isinstance(cfg, bool):
        return CoeffFn.const(cfg)
    if not isinstance(cfg, dict) or len(cfg) != 1:
        raise ConfigError(f"coefficient config must be a single-key object, got {cfg!r}")
    (tag, body), = cfg.items()
    try:
        if tag == "const":
            return CoeffFn.const(float(body))
        if tag == "poly":
            return CoeffFn.poly([float(c) for c in body])
        if tag == "ratio":
            return CoeffFn.ratio([float(c) for c in body["num"]], [float(c) for c in body["den"]])
    except (TypeError, KeyError, ValueError) as exc:
        if isinstance(exc, CoeffConstructionError):
            raise ConfigError(str(exc)) from exc
        raise ConfigError(f"malformed {tag!r} coefficient: {body!r}") from exc
    raise ConfigError(f"unknown coefficient tag {tag!r}")


def parse_coeff(text: str) -> CoeffFn:
    """Parse the compact command-line form.

    ``"const:0.5"``, ``"poly:1,2"`` (meaning ``1 + 2t``) or
    ``"ratio:1/1,2"`` (meaning ``1/(1 + 2t)``).
    """
    tag, sep, body = text.partition(":")
    if not sep:
        raise ConfigError(f"coefficient {text!r} lacks a 'tag:' prefix")
    try:
        if tag == "const":
            return from_config({"const": float(body)})
        if tag == "poly":
            return from_config({"poly": [float(v) for v in body.split(",")]})
        if tag == "ratio":
            num, slash, den = body.partition("/")
            if not slash:
                raise ConfigError(f"ratio {text!r} needs 'num/den'")
            return from_config(
                {"ratio": {"num": [float(v) for v in num.split(",")],
                           "den": [float(v) for v in den.split(",")]}}
            )
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"cannot parse coefficient {text!r}") from exc
    raise ConfigError(f"unknown coefficient tag {tag!r}")
