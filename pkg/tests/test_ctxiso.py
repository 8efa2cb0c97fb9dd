from hypothesis import given, settings
from hypothesis import strategies as st

from catslash import kernel as K
from catslash.ctxiso import (
    expand_unique_exists,
    iso_formula,
    rename_context,
    renaming,
    transport_formula,
    transport_proof,
)
from catslash.derive import BareTheory
from catslash.syntax import (
    BOT,
    EMPTY_CONTEXT,
    TOP,
    And,
    ArrowSort,
    ArrVar,
    ExistsObj,
    ObjConst,
    ObjVar,
    Signature,
    alpha_eq,
    check_formula,
    parse_context,
    parse_formula,
    show,
    show_formula,
    substitute,
)

from strategies import arrow_env, contexts, formulas, object_terms

SIG = Signature(("C",), (("k", ArrowSort(ObjConst("C"), ObjConst("C"))),))


def ctx(text):
    return parse_context(text, SIG)


def test_rename_examples():
    assert show(rename_context(ctx("A : Obj, f : C -> A"), 1)) == "A_1 : Obj, f_1 : C -> A_1"
    assert rename_context(EMPTY_CONTEXT, 1) == EMPTY_CONTEXT
    assert show(rename_context(ctx("A : Obj, B : Obj, g : A -> B"), 2)) == "A_2 : Obj, B_2 : Obj, g_2 : A_2 -> B_2"


def test_iso_single_object():
    c, cond = iso_formula(EMPTY_CONTEXT, ctx("A : Obj"))
    assert show(c) == "A_1 : Obj, A_2 : Obj, f_A : A_1 -> A_2"
    assert show_formula(cond) == "exists g : A_2 -> A_1 . comp g f_A = id A_1 /\\ comp f_A g = id A_2"
    check_formula(SIG, c, cond)


def test_iso_ambient_endpoint_uses_identity():
    c, cond = iso_formula(EMPTY_CONTEXT, ctx("A : Obj, f : C -> A"))
    assert show_formula(cond).startswith("comp f_2 (id C) = comp f_A f_1 /\\ ")
    check_formula(SIG, c, cond)


def test_iso_square():
    c, cond = iso_formula(EMPTY_CONTEXT, ctx("A : Obj, B : Obj, g : A -> B"))
    assert "comp g_2 f_A = comp f_B g_1" in show_formula(cond)
    check_formula(SIG, c, cond)


def test_unique_iso_example_well_formed():
    gamma = ctx("A : Obj")
    delta = parse_context("B : Obj, f : A -> B", SIG)
    P = parse_formula("exists g : B -> A . comp g f = id A /\\ comp f g = id B", SIG, ("A", "B", "f"))
    check_formula(SIG, gamma, expand_unique_exists(gamma, delta, P))


def test_unique_exists_empty_top():
    phi = expand_unique_exists(EMPTY_CONTEXT, EMPTY_CONTEXT, TOP)
    assert show_formula(phi) == "top /\\ (top /\\ top => top /\\ (top => top))"


def test_unique_exists_bot():
    phi = expand_unique_exists(EMPTY_CONTEXT, ctx("A : Obj"), BOT)
    assert isinstance(phi, And)
    assert phi.left == ExistsObj("A", BOT)
    check_formula(SIG, EMPTY_CONTEXT, phi)


def _check_transport(delta, P):
    p = transport_proof(EMPTY_CONTEXT, delta, P, SIG)
    K.check_proof(K.Judgement(BareTheory(SIG), EMPTY_CONTEXT, (), transport_formula(EMPTY_CONTEXT, delta, P)), p)
    return p


def test_transport_base_case():
    delta = ctx("A : Obj, B : Obj, f : A -> B, g : A -> B")
    _check_transport(delta, parse_formula("f = g", SIG, tuple(delta.names())))


def test_transport_top():
    _check_transport(ctx("A : Obj"), TOP)


def test_transport_object_quantifier():
    delta = ctx("A : Obj")
    _check_transport(delta, parse_formula("exists V . forall h : V -> V . h = h", SIG, ("A",)))


@st.composite
def transport_cases(draw, max_vars=3, depth=3):
    delta = draw(contexts(SIG, max_vars))
    P = draw(formulas(SIG, object_terms(SIG, delta), arrow_env(delta), depth=depth, object_binders=True))
    return delta, P


@settings(max_examples=30, deadline=None)
@given(transport_cases())
def test_transport_fuzz(case):
    _check_transport(*case)


@settings(max_examples=50, deadline=None)
@given(transport_cases())
def test_conditions_well_formed(case):
    delta, P = case
    c, cond = iso_formula(EMPTY_CONTEXT, delta)
    check_formula(SIG, c, cond)
    check_formula(SIG, EMPTY_CONTEXT, expand_unique_exists(EMPTY_CONTEXT, delta, P))


@settings(max_examples=50, deadline=None)
@given(transport_cases())
def test_expansion_stable_under_renaming(case):
    delta, P = case
    renamed, names = renaming(delta, "r")
    sigma = {v: (ObjVar(n) if delta.lookup(v).is_obj else ArrVar(n)) for v, n in names.items()}
    a = expand_unique_exists(EMPTY_CONTEXT, delta, P)
    b = expand_unique_exists(EMPTY_CONTEXT, renamed, substitute(P, sigma))
    assert alpha_eq(a, b)
