"""Grammar, error reporting, and round-trip behavior of the io module."""

from fractions import Fraction

import pytest

from colorlie.algebra import BracketTable
from colorlie.grading import Degree
from colorlie.grassmann import VarContext
from colorlie.io import (CorpusEntry, ParseError, emit_definition, emit_report,
                         emit_table, parse_combination, parse_definition,
                         parse_operator_expr, parse_scalar_expr, table_from_json,
                         table_to_dict)
from colorlie.matop import MatDiffOp
from colorlie.scalars import GaussianRational, Scalar
from colorlie.vecfield import GradedDiffOp, partial
from colorlie import weyl


CTX = VarContext([("x1", Degree(0, 0)), ("psi", Degree(0, 1)),
                  ("th", Degree(1, 0)), ("z", Degree(1, 1))])


def test_scalar_expressions():
    assert parse_scalar_expr("3/4") == Scalar.constant(Fraction(3, 4))
    assert parse_scalar_expr("-i") == Scalar.constant(GaussianRational(0, -1))
    assert parse_scalar_expr("2*lam + 1") == (
        Scalar.lam_power(1, 2) + Scalar.constant(1))
    assert parse_scalar_expr("(1+i)*(1-i)") == Scalar.constant(2)
    assert parse_scalar_expr("lam^2") == Scalar.lam_power(2)


def test_matrix_operator_expression():
    op = parse_operator_expr("e(1,3) + e(4,2) + (e(2,4) + e(3,1))*dt")
    assert isinstance(op, MatDiffOp)
    assert op.entries[0][2] == weyl.DiffOp.constant(1)
    assert op.entries[1][3] == weyl.DiffOp.monomial(dt=1)


def test_graded_operator_expression():
    op = parse_operator_expr("-D(psi) + 1/2*psi*D(x1)", context=CTX)
    assert isinstance(op, GradedDiffOp)
    assert op == (-partial(CTX, "psi")) + partial(CTX, "x1").lmul(
        CTX.poly("psi")).scale(Fraction(1, 2))


def test_implicit_multiplication_and_powers():
    a = parse_operator_expr("2t dx", )
    b = parse_operator_expr("2*t*dx")
    assert a == b
    c = parse_operator_expr("t^2*dt")
    d = parse_operator_expr("t*t*dt")
    assert c == d


def test_operator_reference_in_later_definition():
    text = """algebra demo
kind vector-field

variables:
  x1 (0,0)

basis:
  A (0,0)
  B (0,0)

operators:
  A = -D(x1)
  B = -2*x1*A
"""
    entry = parse_definition(text)
    real = entry.payload["realization"]
    ctx = entry.payload["context"]
    expected = partial(ctx, "x1").lmul(ctx.poly("x1")).scale(2)
    assert real.op("B") == expected


def test_mixing_matrix_and_graded_atoms_rejected():
    with pytest.raises(ParseError, match="mix"):
        parse_operator_expr("dt + D(psi)", context=CTX)


def test_unknown_identifier_rejected():
    with pytest.raises(ParseError, match="unknown"):
        parse_operator_expr("nope + dt")


def test_error_carries_line_and_column():
    bad = """algebra demo
kind table

basis:
  H (0,0)

table:
  [H, H] = 3 +
"""
    with pytest.raises(ParseError) as err:
        parse_definition(bad)
    assert err.value.line == 8
    assert err.value.col >= 11
    assert "line 8" in str(err.value)


def test_zero_expression_parses():
    op = parse_operator_expr("0")
    assert op.is_zero


def test_scalar_promotion_with_identity():
    op = parse_operator_expr("2 + dt")
    ident = weyl.DiffOp.constant(2)
    assert op.entries[0][0] == ident + weyl.DiffOp.monomial(dt=1)
    assert op.entries[1][1] == ident + weyl.DiffOp.monomial(dt=1)


def test_parse_combination():
    combo = parse_combination("2*A - B + 1/2*C~", ["A", "B", "C~"])
    assert combo == {"A": Scalar.constant(2), "B": Scalar.constant(-1),
                     "C~": Scalar.constant(Fraction(1, 2))}
    with pytest.raises(ParseError):
        parse_combination("A*B", ["A", "B"])


def test_reserved_words_rejected_as_labels():
    bad = """algebra demo
kind table

basis:
  lam (0,0)

table:
"""
    with pytest.raises(ParseError, match="reserved"):
        parse_definition(bad)


def test_duplicate_table_entry_rejected():
    bad = """algebra demo
kind table

basis:
  A (0,0)
  B (0,0)

table:
  [A, B] = A
  [B, A] = -A
"""
    with pytest.raises(ParseError, match="duplicate"):
        parse_definition(bad)


def test_table_orientation_normalized():
    text = """algebra demo
kind table

basis:
  Q (1,0)
  X (1,1)
  P (0,1)

table:
  [P, Q] = -X
"""
    table = parse_definition(text).payload["table"]
    # stored at (Q, P) with the graded-antisymmetry flip applied
    assert table.bracket_by_label("Q", "P") == ((1, Scalar.constant(1)),)


def test_definition_round_trips_all_kinds():
    from colorlie import corpus
    for entry_id in corpus.ids():
        entry = corpus.load(entry_id)
        text = emit_definition(entry)
        again = parse_definition(text)
        assert again.kind == entry.kind, entry_id
        if entry.kind == "table":
            assert again.payload["table"] == entry.payload["table"], entry_id
        elif entry.kind in ("d-module", "vector-field"):
            a, b = again.payload["realization"], entry.payload["realization"]
            assert a.basis == b.basis and a == b, entry_id
            assert again.payload["operator_order"] == entry.payload["operator_order"]
            assert again.payload["derived"] == entry.payload["derived"]
        else:
            assert again.payload == entry.payload, entry_id


def test_table_json_round_trip():
    from colorlie import corpus
    table = corpus.table("n1")
    text = emit_table(table, "json")
    assert table_from_json(text) == table
    data = table_to_dict(table)
    assert data["basis"][0] == {"label": "H", "degree": [0, 0]}


def test_table_text_contains_expected_line():
    from colorlie import corpus
    text = emit_table(corpus.table("n1"), "text")
    assert "{P,P} = P~" in text.replace(", ", ",")


def test_empty_table_emits_empty_sections():
    table = BracketTable([("A", Degree(0, 0))], {})
    assert emit_table(table, "text").strip() == ""
    assert "\\begin{align*}" not in emit_table(table, "latex")


def test_latex_labels():
    from colorlie.io import label_to_latex
    assert label_to_latex("P~") == r"\tilde{P}"
    assert label_to_latex("Rbar") == r"\bar{R}"
    assert label_to_latex("Qp") == "Q_{+}"
    assert label_to_latex("Lamm") == r"\Lambda_{-}"
    assert label_to_latex("Pi1") == r"\Pi_{1}"


def test_report_emitters():
    from colorlie.algebra import Discrepancy, DiscrepancyReport
    report = DiscrepancyReport("demo", 3, [
        Discrepancy("bracket", ("A", "B"), "0", "C", "C")])
    text = emit_report(report, "text")
    assert "demo: 3 checks, 1 discrepancies" in text
    js = emit_report(report, "json")
    assert '"ok": false' in js
    tex = emit_report(report, "latex")
    assert r"\begin{itemize}" in tex
