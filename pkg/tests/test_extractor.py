import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from catslash import kernel as K
from catslash.corpus import goal_corpus
from catslash.extractor import (
    AxiomNotCertified,
    Disjunct,
    InconsistencyWitness,
    Plain,
    Witness,
    certify_axioms,
    extract,
    run_criterion,
)
from catslash.slash import congruence_close, discrete_model, fp_eval
from catslash.syntax import ArrConst, Bot, Eq, Or, parse_formula, parse_term, substitute

from conftest import load


@pytest.fixture(scope="module")
def setup(two_arrow):
    M = discrete_model(two_arrow)
    return two_arrow, M, certify_axioms(two_arrow, M)


def F(T, text):
    return parse_formula(text, T.signature)


def _class_of(T, M, t):
    # brute force: every constant provably equal to t, then its class
    hits = {M.find(n) for n in M.constants.sorts if T.query(Eq(t, ArrConst(n)))}
    assert len(hits) == 1
    return hits.pop()


def test_certify_covers_every_axiom(setup):
    T, _, certs = setup
    assert set(certs) >= set(T.axioms)
    assert all(c.verdict for c in certs.values())


def test_exists_intro_witness(setup):
    T, M, certs = setup
    phi = F(T, "exists x : One -> A . x = a1")
    res = extract(T, M, certs, K.ExistsArrIntro(phi, ArrConst("a1"), K.EqRefl(ArrConst("a1"))))
    assert res.payload == Witness((("x", "a1"),))
    assert str(res.payload) == "Witness{x -> a1}"


def test_or_intro_payloads(setup):
    T, M, certs = setup
    a1 = ArrConst("a1")
    left = extract(T, M, certs, K.OrIntroL(K.EqRefl(a1), F(T, "a1 = a2")))
    right = extract(T, M, certs, K.OrIntroR(K.EqRefl(a1), F(T, "a1 = a2")))
    assert left.payload == Disjunct("Left")
    assert right.payload == Disjunct("Right")


def test_plain_payload(setup):
    T, M, certs = setup
    assert extract(T, M, certs, K.EqRefl(ArrConst("a2"))).payload == Plain()


def test_conclusion_must_match(setup):
    T, M, certs = setup
    with pytest.raises(K.ProofError):
        extract(T, M, certs, K.EqRefl(ArrConst("a2")), F(T, "a1 = a1"))


def test_missing_axiom_certificate(setup):
    T, M, certs = setup
    partial = {k: v for k, v in certs.items() if k != "hom_One_A"}
    p = K.ForallArrElim(K.Axiom("hom_One_A"), ArrConst("a1"))
    with pytest.raises(AxiomNotCertified):
        extract(T, M, partial, p)


def _corpus(T):
    return [g for g in goal_corpus(T.signature) if g[0] != "exists_elim_pick"]


@pytest.mark.parametrize("k", range(6))
def test_or_elim_witness_matches_brute_force(setup, k):
    T, M, certs = setup
    goals = {n: (p, phi) for n, p, phi in _corpus(T)}
    p, phi = goals[f"or_elim_exists_{k}"]
    res = extract(T, M, certs, p, phi)
    (var, c), = res.payload.assignment
    assert c == _class_of(T, M, phi.body.rhs)
    assert T.query(substitute(phi.body, {var: ArrConst(c)}))


def test_corpus_payloads_are_sound(setup):
    T, M, certs = setup
    for name, p, phi in _corpus(T):
        res = extract(T, M, certs, p, phi)
        if isinstance(phi, Or):
            side = phi.left if res.payload.side == "Left" else phi.right
            assert T.query(side), name
        elif isinstance(res.payload, Witness):
            body = phi
            for v, c in res.payload.assignment:
                body = substitute(body.body, {v: ArrConst(c)})
            assert T.query(body), name


def test_run_criterion_empty(setup):
    T, M, certs = setup
    rep = run_criterion(T, M, certs, [])
    assert rep.records == [] and rep.consistent


def test_run_criterion_records(setup):
    T, M, certs = setup
    a1 = ArrConst("a1")
    good = (K.EqRefl(a1), F(T, "a1 = a1"))
    bad = (K.EqRefl(a1), F(T, "a1 = a2"))
    rep = run_criterion(T, M, certs, [good, bad])
    assert [r["status"] for r in rep.records] == ["ok", "rejected"]
    assert "a1 = a1" in rep.to_text()
    assert rep.dumps() == run_criterion(T, M, certs, [good, bad]).dumps()


def test_rejected_bot_is_not_a_witness(setup):
    T, M, certs = setup
    rep = run_criterion(T, M, certs, [(K.Axiom("hom_A_One"), Bot())])
    assert rep.records[0]["status"] == "rejected"
    assert rep.consistent


def test_checked_bot_raises():
    T = load("two_arrow_inconsistent.theory")
    M = congruence_close(T, [("a1", "a2")])
    p = K.ImpliesElim(K.Axiom("apart"), K.Axiom("clash"))
    with pytest.raises(InconsistencyWitness):
        run_criterion(T, M, {}, [(p, Bot())])


TERMS = ["a1", "a2", "comp a1 i_One", "comp i_A a2", "comp (id A) (comp a2 i_One)"]


@settings(max_examples=30, deadline=None)
@given(st.sampled_from(TERMS), st.integers(0, 3))
def test_weakening_keeps_payload(setup, text, extra):
    T, M, certs = setup
    t = parse_term(text, T.signature)
    phi = F(T, f"exists x : One -> A . x = {text}")
    p = K.ExistsArrIntro(phi, t, K.EqRefl(t))
    base = extract(T, M, certs, p, phi).payload
    padded = K.ImpliesIntro(F(T, "a1 = a1"), p)
    for _ in range(extra):
        padded = K.ImpliesElim(padded, K.EqRefl(ArrConst("a1")))
        padded = K.ImpliesIntro(F(T, "a1 = a1"), padded)
    q = K.ImpliesElim(padded, K.EqRefl(ArrConst("a1")))
    assert extract(T, M, certs, q, phi).payload == base
    assert base.assignment[0][1] == _class_of(T, M, t)


def test_disjunction_property(setup):
    T, M, certs = setup
    for name, p, phi in _corpus(T):
        if isinstance(phi, Or):
            res = extract(T, M, certs, p, phi)
            assert fp_eval(T, M, phi).verdict
            assert isinstance(res.payload, Disjunct), name
