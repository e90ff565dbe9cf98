"""Differential operators on Z2xZ2-graded polynomial algebras.

An operator is a sum of terms (coefficient monomial) * (ordered word of
partials) with Scalar coefficients, plus a declared degree.  A partial
d/d(v) carries the degree of v and obeys the graded Leibniz exchange

    d_v . f = (d_v f) + koszul_sign(deg v, deg f) * f . d_v

for homogeneous f, which is exactly how ``compose`` normal-orders
products.  Every stored term must match the declared degree; a mismatch
is a hard error rather than a warning.
"""

from __future__ import annotations

from typing import Mapping, Tuple, Union

from .grading import D00, Degree, koszul_sign
from .scalars import GaussianRational, Scalar, as_scalar
from .grassmann import (
    GradedPoly,
    GradedVariable,
    Monomial,
    UNIT,
    VarContext,
    derive_monomial,
    graded_derivative,
    mono_mul,
)

# (coefficient monomial, partial word) -- both normally ordered.
OpTerm = Tuple[Monomial, Monomial]


class GradedDiffOp:
    """A graded differential operator with declared degree."""

    __slots__ = ("ctx", "degree", "terms")

    def __init__(self, ctx: VarContext, degree: Degree, terms: Mapping[OpTerm, Scalar] = ()):
        clean = {}
        for (mono, parts), coeff in dict(terms).items():
            coeff = as_scalar(coeff)
            if not coeff:
                continue
            mono = tuple(mono)
            parts = tuple(parts)
            term_degree = ctx.monomial_degree(mono) + ctx.monomial_degree(parts)
            if term_degree != degree:
                raise ValueError(
                    f"term {ctx.monomial_str(mono)}*d[{ctx.monomial_str(parts)}] has degree "
                    f"{term_degree}, operator declares {degree}"
                )
            clean[(mono, parts)] = coeff
        object.__setattr__(self, "ctx", ctx)
        object.__setattr__(self, "degree", degree)
        object.__setattr__(self, "terms", clean)

    def __setattr__(self, name, value):  # pragma: no cover - guard only
        raise AttributeError("GradedDiffOp is immutable")

    def __getstate__(self):
        return self.ctx, self.degree, self.terms

    def __setstate__(self, state):
        object.__setattr__(self, "ctx", state[0])
        object.__setattr__(self, "degree", state[1])
        object.__setattr__(self, "terms", state[2])

    def _check_ctx(self, other: GradedDiffOp):
        if self.ctx != other.ctx:
            raise ValueError("operators belong to different variable contexts")

    # -- linear structure --------------------------------------------------
    def __add__(self, other: GradedDiffOp) -> GradedDiffOp:
        self._check_ctx(other)
        if not self.terms:
            return other
        if not other.terms:
            return self
        if self.degree != other.degree:
            raise ValueError(
                f"cannot add operators of degrees {self.degree} and {other.degree}"
            )
        terms = dict(self.terms)
        for key, coeff in other.terms.items():
            acc = terms.get(key, Scalar()) + coeff
            if acc:
                terms[key] = acc
            else:
                terms.pop(key, None)
        return GradedDiffOp(self.ctx, self.degree, terms)

    def __sub__(self, other: GradedDiffOp) -> GradedDiffOp:
        return self + (-other)

    def __neg__(self) -> GradedDiffOp:
        return GradedDiffOp(self.ctx, self.degree, {k: -c for k, c in self.terms.items()})

    def scale(self, factor) -> GradedDiffOp:
        factor = as_scalar(factor)
        return GradedDiffOp(self.ctx, self.degree, {k: c * factor for k, c in self.terms.items()})

    def __mul__(self, other) -> GradedDiffOp:
        if isinstance(other, GradedDiffOp):
            return compose(self, other)
        return self.scale(other)

    def __rmul__(self, other) -> GradedDiffOp:
        return self.scale(other)

    def lmul(self, poly: GradedPoly) -> GradedDiffOp:
        """Left multiplication by a homogeneous polynomial coefficient."""
        return compose(multiplier(poly), self)

    def bracket(self, other: GradedDiffOp) -> GradedDiffOp:
        return graded_bracket(self, other)

    def apply(self, poly: GradedPoly) -> GradedPoly:
        return apply(self, poly)

    # -- queries ---------------------------------------------------------------
    @property
    def is_zero(self) -> bool:
        return not self.terms

    def order(self) -> int:
        """Highest total number of partials in any term."""
        return max((sum(e for _, e in parts) for _, parts in self.terms), default=0)

    def lam_degree(self) -> int:
        return max((c.lam_degree() for c in self.terms.values()), default=-1)

    def coordinate_vector(self) -> dict:
        """Exact coordinates: (monomial, partial word, lam exponent) -> GaussianRational."""
        coords: dict[tuple, GaussianRational] = {}
        for (mono, parts), coeff in self.terms.items():
            for exp, value in coeff.items():
                coords[(mono, parts, exp)] = value
        return coords

    def __eq__(self, other) -> bool:
        if not isinstance(other, GradedDiffOp):
            return NotImplemented
        return self.ctx == other.ctx and self.degree == other.degree and self.terms == other.terms

    def __hash__(self):
        return hash((self.ctx, self.degree, frozenset(self.terms.items())))

    def __repr__(self) -> str:
        return f"GradedDiffOp(degree={self.degree}, terms={str(self)!r})"

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts_out = []
        for mono, parts in sorted(self.terms):
            coeff = self.terms[(mono, parts)]
            factors = []
            if mono:
                factors.append(self.ctx.monomial_str(mono))
            for index, exp in parts:
                name = f"D({self.ctx.variables[index].name})"
                factors.extend([name] * exp)
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
                parts_out.append(text + "*".join(factors))
            else:
                parts_out.append(f"({text})" if need_parens else text)
        out = parts_out[0]
        for part in parts_out[1:]:
            out += part if part.startswith("-") else "+" + part
        return out


def zero(ctx: VarContext, degree: Union[Degree, None] = None) -> GradedDiffOp:
    return GradedDiffOp(ctx, degree if degree is not None else D00, {})


def partial(ctx: VarContext, name: Union[str, GradedVariable]) -> GradedDiffOp:
    """The left derivative operator d/d(name)."""
    var = ctx[name] if isinstance(name, str) else name
    return GradedDiffOp(ctx, var.degree, {(UNIT, ((var.index, 1),)): as_scalar(1)})


def multiplier(poly: GradedPoly) -> GradedDiffOp:
    """Left multiplication by a homogeneous polynomial, as an operator."""
    degree = poly.homogeneous_degree()
    if degree is None:
        return zero(poly.ctx, D00)
    return GradedDiffOp(poly.ctx, degree, {(mono, UNIT): c for mono, c in poly.terms.items()})


def _partial_left(ctx: VarContext, index: int, terms: dict[OpTerm, Scalar]) -> dict[OpTerm, Scalar]:
    """Normal ordering of d_v . T for T a sum of (monomial, partials) terms."""
    var = ctx.variables[index]
    out: dict[OpTerm, Scalar] = {}

    def put(key: OpTerm, coeff: Scalar):
        acc = out.get(key, Scalar()) + coeff
        if acc:
            out[key] = acc
        else:
            out.pop(key, None)

    for (mono, parts), coeff in terms.items():
        hit = derive_monomial(ctx, var, mono)
        if hit is not None:
            factor, rest = hit
            put((rest, parts), coeff * factor)
        sign = koszul_sign(var.degree, ctx.monomial_degree(mono))
        merge_sign, merged = mono_mul(ctx, ((index, 1),), parts)
        if merged is not None:
            put((mono, merged), coeff * (sign * merge_sign))
    return out


def compose(left: GradedDiffOp, right: GradedDiffOp) -> GradedDiffOp:
    """Normal ordering of the operator product left . right."""
    left._check_ctx(right)
    ctx = left.ctx
    result: dict[OpTerm, Scalar] = {}
    for (lmono, lparts), lcoeff in left.terms.items():
        for rkey, rcoeff in right.terms.items():
            current = {rkey: rcoeff}
            for index, exp in reversed(lparts):
                for _ in range(exp):
                    current = _partial_left(ctx, index, current)
                    if not current:
                        break
                if not current:
                    break
            for (mono, parts), coeff in current.items():
                sign, merged = mono_mul(ctx, lmono, mono)
                if merged is None:
                    continue
                key = (merged, parts)
                acc = result.get(key, Scalar()) + lcoeff * coeff * sign
                if acc:
                    result[key] = acc
                else:
                    result.pop(key, None)
    return GradedDiffOp(ctx, left.degree + right.degree, result)


def graded_bracket(a: GradedDiffOp, b: GradedDiffOp) -> GradedDiffOp:
    """[[a, b]] = a.b - (-1)^<deg a, deg b> b.a."""
    sign = koszul_sign(a.degree, b.degree)
    first = compose(a, b)
    second = compose(b, a)
    return first - second if sign == 1 else first + second


def apply(op: GradedDiffOp, poly: GradedPoly) -> GradedPoly:
    """Apply the operator to a polynomial, partials acting innermost first.

    Implemented with graded_derivative directly, independently of
    ``compose``; the two must agree on every polynomial.
    """
    if op.ctx != poly.ctx:
        raise ValueError("operator and polynomial belong to different contexts")
    ctx = op.ctx
    out = ctx.zero()
    for (mono, parts), coeff in op.terms.items():
        value = poly
        for index, exp in reversed(parts):
            for _ in range(exp):
                value = graded_derivative(ctx.variables[index], value)
                if value.is_zero:
                    break
            if value.is_zero:
                break
        if value.is_zero:
            continue
        out = out + GradedPoly(ctx, {mono: coeff}) * value
    return out
