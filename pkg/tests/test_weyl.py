"""Weyl algebra: normal ordering cross-checked against direct application.

``apply`` differentiates polynomials directly and serves as the oracle
for ``compose``: (A.B) applied to p must equal A applied to (B applied
to p) for every polynomial p.
"""

import random

from colorlie.scalars import LAM, Scalar, rational
from colorlie import weyl
from colorlie.weyl import DT, DX, ONE, T, X, DiffOp, WeylMonomial, apply, compose


def poly(mapping):
    """Polynomial helper: {(pt, px): coeff} -> DiffOp."""
    return DiffOp({WeylMonomial(pt, px, 0, 0): c for (pt, px), c in mapping.items()})


def test_apply_oracle_basics():
    # dt acting on t^3 x -> 3 t^2 x ; dx on the same -> t^3
    p = poly({(3, 1): 1})
    assert apply(DT, p) == poly({(2, 1): 3})
    assert apply(DX, p) == poly({(3, 0): 1})
    assert apply(T, p) == poly({(4, 1): 1})
    assert apply(ONE, p) == p
    assert apply(DT * DT, poly({(1, 0): 1})).is_zero


def test_canonical_commutator_from_apply():
    # [dt, t] = 1 seen through the oracle on a basis of monomials
    for n in range(5):
        p = poly({(n, 0): 1})
        left = apply(DT, apply(T, p))
        right = apply(T, apply(DT, p))
        assert left - right == p


def test_compose_reproduces_canonical_commutator():
    assert compose(DT, T) - compose(T, DT) == ONE
    assert compose(DX, X) - compose(X, DX) == ONE
    assert compose(DT, X) == compose(X, DT)
    assert compose(DX, T) == compose(T, DX)


def test_normal_order_dx_squared_times_x():
    # dx^2 . x = x dx^2 + 2 dx, frozen via the apply oracle below
    lhs = compose(DX * DX, X)
    expected = DiffOp({
        WeylMonomial(0, 1, 0, 2): 1,
        WeylMonomial(0, 0, 0, 1): 2,
    })
    assert lhs == expected
    for n in range(6):
        p = poly({(0, n): 1})
        assert apply(lhs, p) == apply(DX, apply(DX, apply(X, p)))


def test_scaling_operator_with_lam_on_tx():
    # (t dt + 2 lam + x dx) applied to t*x gives (2 + 2 lam) t*x
    op = compose(T, DT) + DiffOp.constant(2 * LAM) + compose(X, DX)
    p = poly({(1, 1): 1})
    assert apply(op, p) == poly({(1, 1): 2 * LAM + 2})


def test_compose_is_associative_and_matches_apply_on_random_operators():
    rng = random.Random(2024)

    def random_op(max_terms=3):
        terms = {}
        for _ in range(rng.randint(1, max_terms)):
            mono = WeylMonomial(rng.randint(0, 2), rng.randint(0, 2),
                                rng.randint(0, 2), rng.randint(0, 2))
            coeff = Scalar({rng.randint(0, 1): rng.choice([1, -1, 2, rational(1, 2).constant_value()])})
            terms[mono] = terms.get(mono, Scalar()) + coeff
        return DiffOp(terms)

    def random_poly():
        return poly({(rng.randint(0, 3), rng.randint(0, 3)): rng.choice([1, -2, 3])
                     for _ in range(rng.randint(1, 3))})

    for _ in range(60):
        a, b, c = random_op(), random_op(), random_op()
        assert compose(compose(a, b), c) == compose(a, compose(b, c))
        p = random_poly()
        assert apply(compose(a, b), p) == apply(a, apply(b, p))


def test_faithfulness_low_degree():
    # distinct normally ordered operators act differently on some monomial
    # of bidegree <= (4,4); spot-check a spanning family
    ops = [ONE, T, X, DT, DX, compose(T, DT), compose(DX, DX)]
    probes = [poly({(a, b): 1}) for a in range(5) for b in range(5)]
    for idx, a in enumerate(ops):
        for b in ops[idx + 1:]:
            assert any(apply(a, p) != apply(b, p) for p in probes)


def test_diffop_queries():
    op = compose(T, DT) + DX
    assert op.order() == 1
    assert not op.is_polynomial()
    assert poly({(2, 1): 1}).is_polynomial()
    assert (DT * DT * DX).order() == 3
    assert DiffOp().is_zero
    assert str(DiffOp()) == "0"
