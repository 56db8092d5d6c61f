"""The diagram DSL: parsing, pretty-printing, typechecking, evaluation."""

import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

import catprob.diagram as dg
import catprob.matcat as mc
from catprob.backend import ClassicalBackend, QuantumBackend
from catprob.semirings import get_semiring

B = ClassicalBackend(get_semiring("ratnn"))

DOC = """
sys x classical 2
sys h classical 3
gen f : x -> h = [[1/2, 0], [1/2, 1/2], [0, 1/2]]
f ; disc[h]
"""


def test_parse_and_evaluate():
    doc = dg.parse(DOC)
    v = dg.run_document(doc, B)
    assert v.entries == ((F(1), F(1)),)


def test_precedence_par_tighter_than_seq_tighter_than_sum():
    doc = dg.parse(
        "sys x classical 2\n"
        "state[x,0] * effect[x,0] ; sw[x,x] + state[x,1] * effect[x,1] ; sw[x,x]"
    )
    node = doc.expr
    assert isinstance(node, dg.Sum)
    assert isinstance(node.left, dg.Seq)
    assert isinstance(node.left.left, dg.Par)


def test_sequential_composition_is_diagram_order():
    doc = dg.parse("sys x classical 2\nstate[x,0] ; effect[x,1]")
    v = dg.run_document(doc, B)
    assert v.entries == ((F(0),),)


def test_scalar_atom():
    doc = dg.parse("sys x classical 2\n1/3 . id[x] + 2/3 . id[x]")
    v = dg.run_document(doc, B)
    assert mc.equal(v, mc.identity(B.sr, mc.obj("0", "1")))


def test_typecheck_errors_carry_positions():
    doc = dg.parse("sys x classical 2\nsys h classical 3\nid[x] ; id[h]")
    with pytest.raises(dg.DiagramTypeError) as exc:
        dg.typecheck(doc.expr, doc.decls)
    assert "line 3" in str(exc.value)
    with pytest.raises(dg.DiagramTypeError, match="undeclared system"):
        dg.typecheck(dg.parse("id[nope]").expr, dg.Declarations({}, {}))
    with pytest.raises(dg.DiagramTypeError, match="undeclared generator"):
        doc2 = dg.parse("sys x classical 2\nmystery")
        dg.typecheck(doc2.expr, doc2.decls)


def test_sum_type_mismatch():
    doc = dg.parse("sys x classical 2\nsys h classical 3\ndisc[x] + disc[h]")
    with pytest.raises(dg.DiagramTypeError, match="different types"):
        dg.typecheck(doc.expr, doc.decls)


def test_state_effect_need_classical_wires():
    doc = dg.parse("sys q quantum 2\nstate[q,0]")
    with pytest.raises(dg.DiagramTypeError, match="classical wire"):
        dg.typecheck(doc.expr, doc.decls)
    doc2 = dg.parse("sys x classical 2\nstate[x,5]")
    with pytest.raises(dg.DiagramTypeError, match="not a label"):
        dg.typecheck(doc2.expr, doc2.decls)


def test_syntax_errors():
    with pytest.raises(dg.DiagramSyntaxError):
        dg.parse("sys x classical\nid[x]")
    with pytest.raises(dg.DiagramSyntaxError):
        dg.parse("sys x classical 2\nid[x] ;")
    with pytest.raises(dg.DiagramSyntaxError):
        dg.parse("sys x classical 2\n")
    with pytest.raises(dg.DiagramSyntaxError):
        dg.parse("sys x classical 2\nid[x] @ id[x]")


def test_duplicate_declarations_rejected():
    with pytest.raises(dg.DiagramSyntaxError, match="duplicate"):
        dg.parse("sys x classical 2\nsys x classical 3\nid[x]")
    with pytest.raises(dg.DiagramSyntaxError, match="duplicate"):
        dg.parse("sys x classical 2\ngen f : x -> x\ngen f : x -> x\nf")


def test_quantum_backend_evaluation():
    qb = QuantumBackend(get_semiring("gauss-rat"))
    doc = dg.parse("sys x classical 2\nsys q quantum 2\nid[x] * disc[q] ; id[x]")
    # bind nothing; all atoms are structural
    v = dg.run_document(doc, qb)
    assert qb.is_normalised(v)


def test_inline_matrices_are_classical_only():
    qb = QuantumBackend(get_semiring("gauss-rat"))
    doc = dg.parse("sys x classical 2\ngen f : x -> x = [[1, 0], [0, 1]]\nf")
    with pytest.raises(dg.DiagramTypeError, match="classical-only"):
        dg.run_document(doc, qb)


def test_bindings_file_roundtrip():
    doc = dg.parse("sys x classical 2\ngen f : x -> x\nf")
    raw = dg.load_bindings("semiring ratnn\ngen f = [[1/2, 0], [1/2, 1]]\n", B)
    bound = dg.bind_generators(doc, B, raw)
    v = dg.run_document(doc, B, bound)
    assert v.entries == ((F(1, 2), F(0)), (F(1, 2), F(1)))
    with pytest.raises(dg.DiagramTypeError):
        dg.load_bindings("semiring nat\ngen f = [[1]]\n", B)
    with pytest.raises(dg.DiagramSyntaxError):
        dg.load_bindings("wibble\n", B)


# ---------------------------------------------------------------------------
# pretty-printer round trip on random ASTs

_WIRES = ("x", "h")


def _ast(depth):
    leaves = st.one_of(
        st.sampled_from([dg.Id(("x",)), dg.Id(("h",)), dg.Disc("x"), dg.Gen("f"),
                         dg.Swap("x", "h"), dg.State("x", "0"), dg.Effect("h", "1")]),
    )
    if depth == 0:
        return leaves
    sub = _ast(depth - 1)
    return st.one_of(
        leaves,
        st.builds(dg.Seq, sub, sub),
        st.builds(dg.Par, sub, sub),
        st.builds(dg.Sum, sub, sub),
        st.builds(dg.Scale, st.sampled_from(["2", "1/3", "0"]), sub),
    )


@settings(max_examples=200, deadline=None)
@given(_ast(4))
def test_pretty_parse_roundtrip(node):
    assert dg.parse_expr(dg.pretty(node)) == node


def test_roundtrip_preserves_semantics():
    rng = random.Random(9)
    doc = dg.parse(
        "sys x classical 2\n"
        "gen f : x -> x\n"
        "(f ; f) * disc[x] + 1/2 . (f * disc[x]) + 1/2 . (f * disc[x])"
    )
    f = mc.random_normalised(B.sr, mc.obj("0", "1"), mc.obj("0", "1"), rng)
    v1 = dg.evaluate(dg.typecheck(doc.expr, doc.decls), B, doc.decls, {"f": f})
    reparsed = dg.parse_expr(dg.pretty(doc.expr))
    v2 = dg.evaluate(dg.typecheck(reparsed, doc.decls), B, doc.decls, {"f": f})
    assert mc.equal(v1, v2)
