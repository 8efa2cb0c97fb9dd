import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from catslash import kernel as K
from catslash.derive import (
    BareTheory,
    SortMismatch,
    derive_substitution,
    substitution_formula,
)
from catslash.search import bounded_search
from catslash.syntax import (
    BOT,
    EMPTY_CONTEXT,
    EMPTY_SIGNATURE,
    TOP,
    ArrConst,
    ArrowSort,
    ArrVar,
    ObjConst,
    ObjVar,
    Signature,
    alpha_eq,
    parse_context,
    parse_formula,
    subst_sort,
)

from strategies import ALL, arrow_env, arrow_terms, formulas, object_terms

CTX = parse_context("A : Obj, B : Obj, f : A -> B, g : A -> B, h : A -> B")
NAMES = tuple(CTX.names())
SIG_A = Signature(("A",))


def F(text, ctx=CTX):
    return parse_formula(text, bound=tuple(ctx.names()))


def judge(phi, ctx=CTX, hyps=(), sig=EMPTY_SIGNATURE):
    return K.Judgement(BareTheory(sig), ctx, tuple(hyps), phi)


def test_reflexivity_proof():
    K.check_proof(judge(F("f = f")), K.EqRefl(ArrVar("f")))


def test_wrong_disjunct():
    with pytest.raises(K.RuleMismatch):
        K.check_proof(judge(F("g = f \\/ f = f")), K.OrIntroL(K.EqRefl(ArrVar("f")), F("g = f")))


def test_unknown_axiom():
    with pytest.raises(K.UnknownAxiom):
        K.check_proof(judge(TOP), K.Axiom("no.such"))


def test_eigenvariable_capture():
    p = K.ForallArrIntro("f", ArrowSort(ObjVar("A"), ObjVar("B")), K.EqRefl(ArrVar("f")))
    with pytest.raises(K.EigenvariableCapture):
        K.check_proof(judge(F("forall f : A -> B . f = f")), p)


def test_equality_axioms_contents():
    axioms = K.equality_axioms()
    wanted = [
        "forall A . forall B . forall f : A -> B . forall g : A -> B . forall h : A -> B . f = g => g = h => f = h",
        "forall A . forall B . forall C . forall D . forall f : A -> B . forall g : B -> C . forall h : C -> D . "
        "comp h (comp g f) = comp (comp h g) f",
        "forall A . forall B . forall f : A -> B . f = comp (id B) f /\\ f = comp f (id A)",
    ]
    for text in wanted:
        assert any(alpha_eq(parse_formula(text), a) for a in axioms), text


def test_identity_idempotent_search():
    phi = parse_formula("id A = comp (id A) (id A)", SIG_A)
    p = bounded_search(K.Judgement(BareTheory(SIG_A), EMPTY_CONTEXT, (), phi), 8)
    assert p is not None
    K.check_proof(K.Judgement(BareTheory(SIG_A), EMPTY_CONTEXT, (), phi), p)


def test_search_does_not_prove_bot(two_arrow):
    assert bounded_search(K.Judgement(two_arrow, EMPTY_CONTEXT, (), BOT), 6) is None


def test_search_hypothesis():
    phi = F("f = g")
    assert bounded_search(judge(phi, hyps=[phi]), 1) == K.Hyp(0)


def test_substitution_atomic():
    P = F("x = h", CTX.extend("x", ArrowSort(ObjVar("A"), ObjVar("B"))))
    p = derive_substitution(P, "x", ArrVar("f"), ArrVar("g"), ctx=CTX)
    K.check_proof(judge(substitution_formula(P, "x", ArrVar("f"), ArrVar("g"))), p)


def test_substitution_through_existential():
    P = F("exists k : A -> B . k = x /\\ top", CTX.extend("x", ArrowSort(ObjVar("A"), ObjVar("B"))))
    p = derive_substitution(P, "x", ArrVar("f"), ArrVar("g"), ctx=CTX)
    K.check_proof(judge(substitution_formula(P, "x", ArrVar("f"), ArrVar("g"))), p)


def test_substitution_top_is_two_intros():
    p = derive_substitution(TOP, "x", ArrVar("f"), ArrVar("g"), ctx=CTX)
    assert p == K.ImpliesIntro(F("f = g"), K.ImpliesIntro(TOP, K.TopIntro()))


def test_substitution_sort_mismatch():
    c = CTX.extend("k", ArrowSort(ObjVar("A"), ObjVar("A")))
    with pytest.raises(SortMismatch):
        derive_substitution(TOP, "x", ArrVar("f"), ArrVar("k"), ctx=c)


XS = ArrowSort(ObjVar("A"), ObjVar("B"))


@st.composite
def substitution_cases(draw):
    objs = object_terms(EMPTY_SIGNATURE, CTX)
    env = arrow_env(CTX)
    P = draw(formulas(EMPTY_SIGNATURE, objs, env + (("x", XS),), depth=3, kinds=ALL, object_binders=True))
    f = draw(arrow_terms(EMPTY_SIGNATURE, objs, env, XS))
    g = draw(arrow_terms(EMPTY_SIGNATURE, objs, env, XS))
    return P, f, g


@settings(max_examples=60, deadline=None)
@given(substitution_cases())
def test_substitution_property(case):
    P, f, g = case
    p = derive_substitution(P, "x", f, g, ctx=CTX)
    K.check_proof(judge(substitution_formula(P, "x", f, g)), p)


def test_weakening():
    phi, psi = F("f = g"), F("g = h")
    p = K.EqTrans(K.Hyp(0), K.Hyp(1))
    K.check_proof(judge(F("f = h"), hyps=[phi, psi]), p)
    wider = CTX.extend("C").extend("k", ArrowSort(ObjVar("C"), ObjVar("A")))
    extra = [F("h = h"), TOP]
    K.check_proof(judge(F("f = h"), wider, hyps=extra + [phi, psi]), K.shift_hypotheses(p, len(extra)))
    K.check_proof(judge(F("f = h"), wider, hyps=[phi, psi] + extra), p)


def test_substitution_stability():
    phi = F("forall k : A -> B . k = f => f = k")
    p = K.ForallArrIntro("k", XS, K.ImpliesIntro(F("k = f", CTX.extend("k", XS)), K.EqSym(K.Hyp(0))))
    K.check_proof(judge(phi), p)
    sigma = {"A": ObjConst("A0"), "B": ObjConst("A0"), "f": ArrConst("c")}
    sig = Signature(("A0",), (("c", ArrowSort(ObjConst("A0"), ObjConst("A0"))),))
    from catslash.syntax import substitute

    K.check_proof(judge(substitute(phi, sigma), EMPTY_CONTEXT, sig=sig), K.subst_proof(p, sigma))
    assert subst_sort(XS, sigma) == ArrowSort(ObjConst("A0"), ObjConst("A0"))


def test_certificate_round_trip():
    phi = parse_formula("id A = comp (id A) (id A)", SIG_A)
    p = bounded_search(K.Judgement(BareTheory(SIG_A), EMPTY_CONTEXT, (), phi), 8)
    text = K.dump_proof(p, phi)
    assert text.startswith("# conclusion: id A = comp (id A) (id A)\n")
    assert K.load_proof(text, SIG_A) == p


def test_search_is_deterministic():
    phi = parse_formula("id A = comp (id A) (id A)", SIG_A)
    j = K.Judgement(BareTheory(SIG_A), EMPTY_CONTEXT, (), phi)
    assert bounded_search(j, 8) == bounded_search(j, 8)
