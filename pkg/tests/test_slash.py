from dataclasses import replace

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from catslash.congruence import CongruenceOracle
from catslash.ctxiso import expand_unique_exists
from catslash.slash import (
    NotCongruent,
    NotEquivalence,
    NotProvable,
    OracleIncomplete,
    check_fp_implies_provable,
    congruence_close,
    discrete_model,
    dump_model,
    fp_eval,
    model_from_classes,
    parse_model,
    replay,
    validate_model,
)
from catslash.syntax import (
    ArrConst,
    ArrowSort,
    Bot,
    ForallArr,
    Implies,
    ObjConst,
    Or,
    parse_context,
    parse_formula,
    substitute,
)
from catslash.theoria import parse_theory

from conftest import load
from oracles import direct_truth
from strategies import POSITIVE, formulas

OBJS = (ObjConst("One"), ObjConst("A"))
GA = ArrowSort(ObjConst("One"), ObjConst("A"))

# f = g is an axiom, but h o f and h o g have their own names
SQUARE = """
theory square {
  object A B C
  arrow iA : A -> A  arrow iB : B -> B  arrow iC : C -> C
  arrow f : A -> B  arrow g : A -> B  arrow h : B -> C
  arrow hf : A -> C  arrow hg : A -> C
  axiom ida : id A = iA  axiom idb : id B = iB  axiom idc : id C = iC
  axiom fg : f = g
  axiom thf : comp h f = hf
  axiom thg : comp h g = hg
}
"""


@pytest.fixture(scope="module")
def square():
    return parse_theory(SQUARE, CongruenceOracle)


@pytest.fixture(scope="module")
def M2(two_arrow):
    return discrete_model(two_arrow)


def P(T, text):
    return parse_formula(text, T.signature)


def test_discrete_model_validates(two_arrow, M2):
    validate_model(two_arrow, M2)
    assert list(M2.merged_pairs()) == []


@pytest.mark.parametrize(
    "text, verdict",
    [
        ("top", True),
        ("bot", False),
        ("a1 = a1", True),
        ("comp i_A a1 = a1", True),
        ("a1 = a2", False),
        ("exists x : One -> A . top", True),
        ("exists x : A -> One . top", False),
        ("a1 = a2 \\/ a1 = a1", True),
        ("forall x : One -> A . x = a1 \\/ x = a2", True),
        ("forall x : One -> A . x = a1", False),
        ("a1 = a2 => bot", False),
    ],
)
def test_fp_examples(two_arrow, M2, text, verdict):
    cert = fp_eval(two_arrow, M2, P(two_arrow, text))
    assert cert.verdict is verdict
    assert replay(two_arrow, M2, cert) is verdict


def test_exists_reports_witness(two_arrow, M2):
    cert = fp_eval(two_arrow, M2, P(two_arrow, "exists x : One -> A . x = a2"))
    assert cert.trace["witness"] == "a2"


def test_open_formula_rejected(two_arrow, M2):
    with pytest.raises(ValueError):
        fp_eval(two_arrow, M2, parse_formula("x = a1", two_arrow.signature, ("x",)))


def test_incomplete_oracle_raises(two_arrow, M2):
    with pytest.raises(OracleIncomplete):
        fp_eval(two_arrow, M2, P(two_arrow, "forall X . top"))


def test_inconsistent_bot():
    T = load("two_arrow_inconsistent.theory")
    M = congruence_close(T, [("a1", "a2")])
    validate_model(T, M)
    assert fp_eval(T, M, Bot()).verdict is False
    assert M.same("a1", "a2")


def test_merge_without_axiom(two_arrow):
    with pytest.raises(NotProvable):
        validate_model(two_arrow, model_from_classes(two_arrow, [["a1", "a2"]]))
    with pytest.raises(NotProvable):
        congruence_close(two_arrow, [("a1", "a2")])


def _split_table(T):
    # keeps h o g apart from h o f, unlike the derived table
    cc = discrete_model(T).constants
    return replace(cc, table={**cc.table, ("h", "g"): "hg"})


def test_not_congruent(square):
    M = model_from_classes(square, [["f", "g"]], _split_table(square))
    with pytest.raises(NotCongruent):
        validate_model(square, M)


def test_mixed_sorts_rejected(two_arrow):
    with pytest.raises(NotEquivalence):
        model_from_classes(two_arrow, [["a1", "i_A"]])


def _naive_closure(cc, seeds):
    # fixpoint over explicit pairs, no union-find
    rel = {(n, n) for n in cc.sorts} | set(seeds) | {(b, a) for a, b in seeds}
    while True:
        new = set(rel)
        for a, b in rel:
            for c, d in rel:
                if b == c:
                    new.add((a, d))
        for (g1, f1), h1 in cc.table.items():
            for (g2, f2), h2 in cc.table.items():
                if (g1, g2) in rel and (f1, f2) in rel:
                    new.add((h1, h2))
        if new == rel:
            return rel
        rel = new


@pytest.mark.parametrize("split", [False, True])
@pytest.mark.parametrize("seeds", [[], [("f", "g")], [("hf", "hg")], [("f", "g"), ("hf", "hg")]])
def test_congruence_close_matches_naive(square, seeds, split):
    M = congruence_close(square, seeds, _split_table(square) if split else None)
    validate_model(square, M)
    rel = _naive_closure(M.constants, seeds)
    for a in M.constants.sorts:
        for b in M.constants.sorts:
            assert M.same(a, b) == ((a, b) in rel), (a, b)


def test_close_propagates(square):
    M = congruence_close(square, [("f", "g")], _split_table(square))
    validate_model(square, M)
    assert M.same("hf", "hg")
    assert not M.same("f", "h")


def test_model_file_round_trip(two_arrow):
    T = load("two_arrow_inconsistent.theory")
    M = parse_model("# a1 and a2 together\nmodel { class a2 a1 }", T)
    assert M.find("a2") == "a1"
    assert dump_model(M) == "model { class a1 a2 }\n"
    assert parse_model(dump_model(M), T).rep == M.rep
    assert dump_model(discrete_model(two_arrow)) == "model { }\n"
    with pytest.raises(ValueError):
        parse_model("model { klass a1 }", T)


@settings(max_examples=100, deadline=None)
@given(data=st.data())
def test_positive_fragment_is_truth(data, two_arrow, M2):
    phi = data.draw(formulas(two_arrow.signature, OBJS, depth=3, kinds=POSITIVE))
    assert fp_eval(two_arrow, M2, phi).verdict == direct_truth(two_arrow, M2, phi)


@settings(max_examples=50, deadline=None)
@given(data=st.data())
def test_disjunction(data, two_arrow, M2):
    a = data.draw(formulas(two_arrow.signature, OBJS, depth=2))
    b = data.draw(formulas(two_arrow.signature, OBJS, depth=2))
    v = fp_eval(two_arrow, M2, Or(a, b)).verdict
    assert v == (fp_eval(two_arrow, M2, a).verdict or fp_eval(two_arrow, M2, b).verdict)
    if v:
        assert two_arrow.query(a) or two_arrow.query(b)


@settings(max_examples=200, deadline=None)
@given(data=st.data())
def test_fp_implies_provable(data, two_arrow, M2):
    phi = data.draw(formulas(two_arrow.signature, OBJS, depth=3))
    assert check_fp_implies_provable(two_arrow, M2, phi) is None


@settings(max_examples=60, deadline=None)
@given(data=st.data())
def test_forall_decomposes(data, two_arrow, M2):
    env = (("x", GA),)
    p = data.draw(formulas(two_arrow.signature, OBJS, env, depth=2))
    q = data.draw(formulas(two_arrow.signature, OBJS, env, depth=2))
    phi = ForallArr("x", GA, Implies(p, q))
    inst = [fp_eval(two_arrow, M2, Implies(substitute(p, {"x": ArrConst(c)}), substitute(q, {"x": ArrConst(c)}))).verdict for c in M2.domain(GA)]
    expect = all(inst) and bool(two_arrow.query(phi))
    assert fp_eval(two_arrow, M2, phi).verdict == expect


@settings(max_examples=60, deadline=None)
@given(data=st.data())
def test_replay_agrees(data, two_arrow, M2):
    phi = data.draw(formulas(two_arrow.signature, OBJS, depth=3))
    cert = fp_eval(two_arrow, M2, phi)
    assert replay(two_arrow, M2, cert) == cert.verdict


@pytest.mark.parametrize("body", ["x = a1", "top", "x = a1 \\/ x = a2", "bot", "x = a2 /\\ x = a2"])
def test_unique_exists(two_arrow, M2, body):
    delta = parse_context("x : One -> A", two_arrow.signature)
    Pb = parse_formula(body, two_arrow.signature, ("x",))
    phi = expand_unique_exists(parse_context("", two_arrow.signature), delta, Pb)
    sat = [c for c in M2.domain(GA) if fp_eval(two_arrow, M2, substitute(Pb, {"x": ArrConst(c)})).verdict]
    v = fp_eval(two_arrow, M2, phi).verdict
    assert v == (len(sat) == 1)
    if v:
        assert two_arrow.query(phi)

