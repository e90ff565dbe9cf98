"""The Weyl algebra in two commuting variables t, x.

Operators are finite sums of normally ordered monomials
t^pt * x^px * dt^dt * dx^dx (all polynomial factors to the left of all
derivatives) with Scalar coefficients.  ``compose`` re-normal-orders a
product with the exchange rule

    dt^m . t^n = sum_k C(m,k) * n!/(n-k)! * t^(n-k) * dt^(m-k)

and ``apply`` differentiates a polynomial directly; the two must agree
on every polynomial, which the tests use as a cross-check.
"""

from __future__ import annotations

from math import comb, perm
from typing import Mapping, NamedTuple

from .scalars import Scalar, as_scalar


class WeylMonomial(NamedTuple):
    """Exponents of the normally ordered word t^pt x^px dt^dt dx^dx."""

    pt: int
    px: int
    dt: int
    dx: int


_UNIT = WeylMonomial(0, 0, 0, 0)


class DiffOp:
    """A scalar differential operator in t, x (element of the Weyl algebra)."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[WeylMonomial, Scalar] = ()):
        clean = {}
        for mono, coeff in dict(terms).items():
            mono = WeylMonomial(*mono)
            if min(mono) < 0:
                raise ValueError(f"negative exponent in {mono}")
            coeff = as_scalar(coeff)
            if coeff:
                clean[mono] = coeff
        object.__setattr__(self, "terms", clean)

    def __setattr__(self, name, value):  # pragma: no cover - guard only
        raise AttributeError("DiffOp is immutable")

    def __getstate__(self):
        return self.terms

    def __setstate__(self, state):
        object.__setattr__(self, "terms", state)

    # -- constructors -----------------------------------------------------
    @classmethod
    def monomial(cls, pt=0, px=0, dt=0, dx=0, coeff=1) -> DiffOp:
        return cls({WeylMonomial(pt, px, dt, dx): as_scalar(coeff)})

    @classmethod
    def constant(cls, coeff) -> DiffOp:
        return cls({_UNIT: as_scalar(coeff)})

    # -- ring structure ----------------------------------------------------
    def __add__(self, other: DiffOp) -> DiffOp:
        terms = dict(self.terms)
        for mono, coeff in other.terms.items():
            acc = terms.get(mono, Scalar()) + coeff
            if acc:
                terms[mono] = acc
            else:
                terms.pop(mono, None)
        return DiffOp(terms)

    def __sub__(self, other: DiffOp) -> DiffOp:
        return self + (-other)

    def __neg__(self) -> DiffOp:
        return DiffOp({m: -c for m, c in self.terms.items()})

    def scale(self, factor) -> DiffOp:
        factor = as_scalar(factor)
        return DiffOp({m: c * factor for m, c in self.terms.items()})

    def __mul__(self, other) -> DiffOp:
        """Operator composition self . other; scalars scale instead."""
        if isinstance(other, DiffOp):
            return compose(self, other)
        return self.scale(other)

    def __rmul__(self, other) -> DiffOp:
        # scalar * op; operator * operator goes through __mul__
        return self.scale(other)

    # -- queries -------------------------------------------------------------
    @property
    def is_zero(self) -> bool:
        return not self.terms

    def order(self) -> int:
        """Highest total derivative order appearing (0 for a multiplication operator)."""
        return max((m.dt + m.dx for m in self.terms), default=0)

    def is_polynomial(self) -> bool:
        return all(m.dt == 0 and m.dx == 0 for m in self.terms)

    def lam_degree(self) -> int:
        return max((c.lam_degree() for c in self.terms.values()), default=-1)

    def apply(self, poly: DiffOp) -> DiffOp:
        return apply(self, poly)

    def __eq__(self, other) -> bool:
        if not isinstance(other, DiffOp):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __repr__(self) -> str:
        return f"DiffOp({self.terms!r})"

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for mono in sorted(self.terms):
            factors = []
            for sym, exp in zip(("t", "x", "dt", "dx"), mono):
                if exp == 1:
                    factors.append(sym)
                elif exp > 1:
                    factors.append(f"{sym}^{exp}")
            coeff = self.terms[mono]
            text = str(coeff)
            need_parens = ("+" in text[1:]) or ("-" in text[1:])
            if factors:
                if text == "1":
                    text = ""
                elif text == "-1":
                    text = "-"
                elif need_parens:
                    text = f"({text})*"
                else:
                    text += "*"
                parts.append(text + "*".join(factors))
            else:
                parts.append(f"({text})" if need_parens else text)
        out = parts[0]
        for part in parts[1:]:
            out += part if part.startswith("-") else "+" + part
        return out


ZERO = DiffOp()
ONE = DiffOp.constant(1)
T = DiffOp.monomial(pt=1)
X = DiffOp.monomial(px=1)
DT = DiffOp.monomial(dt=1)
DX = DiffOp.monomial(dx=1)


def _exchange(d_exp: int, p_exp: int):
    """Terms of d^m . v^n as (coefficient, v-power, d-power), one variable."""
    for k in range(min(d_exp, p_exp) + 1):
        yield comb(d_exp, k) * perm(p_exp, k), p_exp - k, d_exp - k


def compose(left: DiffOp, right: DiffOp) -> DiffOp:
    """Normal ordering of the operator product left . right."""
    terms: dict[WeylMonomial, Scalar] = {}
    for lm, lc in left.terms.items():
        for rm, rc in right.terms.items():
            coeff = lc * rc
            for ct, et, dt in _exchange(lm.dt, rm.pt):
                for cx, ex, dx in _exchange(lm.dx, rm.px):
                    mono = WeylMonomial(lm.pt + et, lm.px + ex, dt + rm.dt, dx + rm.dx)
                    acc = terms.get(mono, Scalar()) + coeff * (ct * cx)
                    if acc:
                        terms[mono] = acc
                    else:
                        terms.pop(mono, None)
    return DiffOp(terms)


def apply(op: DiffOp, poly: DiffOp) -> DiffOp:
    """Apply a differential operator to a polynomial in t, x.

    The polynomial is a DiffOp with no derivative factors; so is the result.
    Implemented by direct term-by-term differentiation, independently of
    ``compose``.
    """
    if not poly.is_polynomial():
        raise ValueError("apply expects a polynomial (no derivative factors)")
    terms: dict[WeylMonomial, Scalar] = {}
    for om, oc in op.terms.items():
        for pm, pc in poly.terms.items():
            if om.dt > pm.pt or om.dx > pm.px:
                continue
            factor = perm(pm.pt, om.dt) * perm(pm.px, om.dx)
            mono = WeylMonomial(om.pt + pm.pt - om.dt, om.px + pm.px - om.dx, 0, 0)
            acc = terms.get(mono, Scalar()) + oc * pc * factor
            if acc:
                terms[mono] = acc
            else:
                terms.pop(mono, None)
    return DiffOp(terms)
