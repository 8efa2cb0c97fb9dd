import pytest

from catslash import kernel as K
from catslash.congruence import CongruenceOracle, PathEquality
from catslash.syntax import EMPTY_CONTEXT, parse_formula, parse_term


def P(T, text):
    return parse_formula(text, T.signature)


def test_two_arrow_is_enumerated(two_arrow):
    assert two_arrow.oracle.enumerated


@pytest.mark.parametrize(
    "text",
    [
        "a1 = a1",
        "comp (id A) (comp a1 (id One)) = a1",
        "exists x : One -> A . x = a2",
        "forall x : One -> A . x = a1 \\/ x = a2",
        "forall x : A -> One . bot",
        "a1 = a2 => comp i_A a1 = a2",
    ],
)
def test_proves(two_arrow, text):
    phi = P(two_arrow, text)
    ans = two_arrow.query(phi)
    assert ans
    K.check_proof(K.Judgement(two_arrow, EMPTY_CONTEXT, (), phi), ans.proof)


@pytest.mark.parametrize(
    "text",
    [
        "a1 = a2",
        "forall x : One -> A . x = a1",
        "exists x : A -> One . top",
        "(a1 = a2 => bot) \\/ a1 = a2",
        "((a1 = a2 => bot) => bot) => a1 = a2",
        "bot",
        "forall x : One -> A . forall y : One -> A . x = y \\/ (x = y => bot)",
    ],
)
def test_refutes(two_arrow, text):
    phi = P(two_arrow, text)
    assert not two_arrow.query(phi)
    assert two_arrow.oracle.complete_for(phi)


def test_object_quantifiers_are_outside(two_arrow):
    phi = P(two_arrow, "forall X . top")
    assert not two_arrow.oracle.complete_for(phi)
    assert not two_arrow.query(phi)


def test_not_enumerated_without_closures(fixtures):
    from catslash.theoria import parse_theory

    T = parse_theory("theory t { object A  arrow f : A -> A  axiom comp f f = f }", CongruenceOracle)
    assert not T.oracle.enumerated
    assert T.query(parse_formula("comp f (comp f f) = f", T.signature))


def test_path_equality_proofs(two_arrow):
    from catslash.derive import Pf

    sig = two_arrow.signature
    eqs = [Pf(K.Axiom(a), phi) for a, phi in two_arrow.axioms.items() if a.startswith("t") or a.startswith("id")]
    pe = PathEquality(sig, eqs)
    s, t = parse_term("comp i_A (comp a1 (id One))", sig), parse_term("a1", sig)
    pf = pe.prove(s, t)
    K.check_proof(K.Judgement(two_arrow, EMPTY_CONTEXT, (), pf.concl), pf.proof)
    assert pe.prove(parse_term("a1", sig), parse_term("a2", sig)) is None
