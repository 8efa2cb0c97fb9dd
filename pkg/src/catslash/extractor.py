"""Witness and disjunct extraction by following the soundness induction over a proof.

Each rule turns slash certificates of its premises into a certificate of its
conclusion, with eigenvariables bound to constants.  Rules that only move a
formula around (equality, universal elimination, weakening of targets) are
certified by re-evaluating FP on their instantiated conclusion.
"""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field

from . import kernel as K
from .slash import Evaluator, FpCertificate, Model, OracleIncomplete, replay
from .syntax import (
    EMPTY_CONTEXT,
    ArrConst,
    Bot,
    ExistsArr,
    ExistsObj,
    Formula,
    Implies,
    ObjConst,
    Or,
    alpha_eq,
    show_formula,
    substitute,
)


class ExtractionError(Exception):
    pass


class AxiomNotCertified(ExtractionError):
    def __init__(self, ax_id):
        super().__init__(f"AxiomNotCertified({ax_id})")
        self.axiom = ax_id


class InconsistencyWitness(ExtractionError):
    """A proof of bot went through with certified axioms; the slash must be broken."""


@dataclass(frozen=True)
class Witness:
    assignment: tuple  # ((variable, constant), ...) along the leading existentials

    def __str__(self):
        return "Witness{" + ", ".join(f"{v} -> {c}" for v, c in self.assignment) + "}"


@dataclass(frozen=True)
class Disjunct:
    side: str  # "Left" or "Right"

    def __str__(self):
        return f"Disjunct({self.side})"


@dataclass(frozen=True)
class Plain:
    def __str__(self):
        return "Plain"


@dataclass(frozen=True)
class ExtractionResult:
    conclusion: Formula
    payload: object
    certificate: FpCertificate


def certify_axioms(T, M: Model, evaluator: Evaluator | None = None) -> dict:
    """FP certificates for every axiom of ``T``; fails on the first one that is not FP-true."""
    ev = evaluator or Evaluator(T, M)
    out = {}
    for ax_id, phi in T.axioms.items():
        cert = ev(phi)
        if not cert.verdict:
            raise AxiomNotCertified(ax_id)
        out[ax_id] = cert
    return out


def payload_of(cert: FpCertificate):
    phi, tr = cert.formula, cert.trace
    if isinstance(phi, Or):
        return Disjunct("Left" if tr["side"] == "left" else "Right")
    if isinstance(phi, (ExistsObj, ExistsArr)):
        chain = []
        while isinstance(cert.formula, (ExistsObj, ExistsArr)) and cert.trace.get("witness") is not None:
            chain.append((cert.formula.var, cert.trace["witness"]))
            cert = cert.trace["sub"]
        return Witness(tuple(chain))
    return Plain()


class _Extractor:
    def __init__(self, T, M: Model, axiom_certs: dict):
        self.T = T
        self.M = M
        self.certs = axiom_certs
        self.ev = Evaluator(T, M)
        self._memo: dict = {}

    def conclusion(self, hyps, p) -> Formula:
        return K.conclusion_of(self.T, EMPTY_CONTEXT, [c.formula for c in hyps], p)

    def evaluated(self, phi) -> FpCertificate:
        cert = self.ev(phi)
        if not cert.verdict:
            raise ExtractionError(f"FP fails on a derived formula: {show_formula(phi)}")
        return cert

    def run(self, hyps: tuple, p) -> FpCertificate:
        key = (p, tuple(c.formula for c in hyps))
        if key not in self._memo:
            self._memo[key] = self._run(hyps, p)
        return self._memo[key]

    def _run(self, hyps, p) -> FpCertificate:
        match p:
            case K.Hyp(i):
                return hyps[i]
            case K.Axiom(ax):
                cert = self.certs.get(ax)
                if cert is None and ax in K.BUILTIN_AXIOMS:
                    try:
                        cert = self.ev(K.BUILTIN_AXIOMS[ax])
                    except OracleIncomplete:
                        cert = None
                if cert is None or not cert.verdict:
                    raise AxiomNotCertified(ax)
                return cert
            case K.BotElim(q, _):
                self.run(hyps, q)
                raise InconsistencyWitness("a certified derivation reached bot")
            case K.AndIntro(q, r):
                cq, cr = self.run(hyps, q), self.run(hyps, r)
                phi = K.And(cq.formula, cr.formula)
                return FpCertificate(phi, True, {"rule": "and", "left": cq, "right": cr})
            case K.AndElimL(q):
                return self.run(hyps, q).trace["left"]
            case K.AndElimR(q):
                return self.run(hyps, q).trace["right"]
            case K.OrIntroL(q, right):
                cq = self.run(hyps, q)
                return FpCertificate(Or(cq.formula, right), True, {"rule": "or", "side": "left", "sub": cq})
            case K.OrIntroR(q, left):
                cq = self.run(hyps, q)
                return FpCertificate(Or(left, cq.formula), True, {"rule": "or", "side": "right", "sub": cq})
            case K.OrElim(q, r, s):
                major = self.run(hyps, q)
                # the certificate of the disjunction already says which side holds
                branch = r if major.trace["side"] == "left" else s
                return self.run(hyps + (major.trace["sub"],), branch)
            case K.ImpliesIntro(a, q):
                ca = self.ev(a)
                cb = self.run(hyps + (ca,), q) if ca.verdict else None
                phi = Implies(a, cb.formula if cb else self.conclusion(hyps + (ca,), q))
                ok = self.ev.provable(phi)
                if not ok:
                    raise ExtractionError(f"oracle rejects a derived implication: {show_formula(phi)}")
                return FpCertificate(phi, True, {"rule": "implies", "antecedent": ca, "consequent": cb, "provable": True})
            case K.ImpliesElim(q, r):
                imp, ca = self.run(hyps, q), self.run(hyps, r)
                cb = imp.trace["consequent"]
                if cb is None:
                    raise ExtractionError("implication certified with a false antecedent that was then proved")
                return cb
            case K.ExistsObjElim(q, v, r) | K.ExistsArrElim(q, v, r):
                major = self.run(hyps, q)
                c = major.trace["witness"]
                const = ObjConst(c) if isinstance(p, K.ExistsObjElim) else ArrConst(c)
                return self.run(hyps + (major.trace["sub"],), K.subst_proof(r, {v: const}))
            case K.ExistsObjIntro(phi, t, q) | K.ExistsArrIntro(phi, t, q):
                cq = self.run(hyps, q)
                if isinstance(phi, ExistsObj):
                    c, inst = t.name, substitute(phi.body, {phi.var: t})
                else:
                    c = self.M.find(self.M.retract(t))
                    inst = substitute(phi.body, {phi.var: ArrConst(c)})
                sub = cq if alpha_eq(cq.formula, inst) else self.evaluated(inst)
                return FpCertificate(phi, True, {"rule": "exists", "witness": c, "sub": sub})
            case K.ForallObjIntro(v, q) | K.ForallArrIntro(v, _, q):
                phi = self.conclusion(hyps, p)
                if isinstance(p, K.ForallObjIntro):
                    dom = [(o, ObjConst(o)) for o in self.M.objects()]
                else:
                    dom = [(c, ArrConst(c)) for c in self.M.domain(phi.sort)]
                done = []
                for c, const in dom:
                    ci = self.run(hyps, K.subst_proof(q, {v: const}))
                    inst = substitute(phi.body, {phi.var: const})
                    if not alpha_eq(ci.formula, inst):
                        ci = self.evaluated(inst)
                    done.append({"instance": c, "cert": ci})
                if not self.ev.provable(phi):
                    raise ExtractionError(f"oracle rejects a derived sentence: {show_formula(phi)}")
                return FpCertificate(phi, True, {"rule": "forall", "instances": done, "provable": True})
        # equality rules, universal elimination, top
        for q in K.premises(p):
            self.run(hyps, q)
        return self.evaluated(self.conclusion(hyps, p))


def extract(T, M: Model, axiom_certs: dict, p, phi: Formula | None = None) -> ExtractionResult:
    """Certify the closed conclusion of ``p`` and read off its witness or chosen disjunct."""
    concl = K.conclusion_of(T, EMPTY_CONTEXT, (), p)
    if phi is not None:
        K.check_proof(K.Judgement(T, EMPTY_CONTEXT, (), phi), p)
        concl = phi
    ex = _Extractor(T, M, axiom_certs)
    cert = ex.run((), p)
    if isinstance(cert.formula, Bot) or cert.verdict is not True:
        raise InconsistencyWitness("bot certified")
    if not alpha_eq(cert.formula, concl):
        raise ExtractionError(f"certificate for {show_formula(cert.formula)} does not match {show_formula(concl)}")
    if not ex.ev(concl).verdict or not replay(T, M, cert):
        raise ExtractionError(f"FP does not confirm {show_formula(concl)}")
    return ExtractionResult(concl, payload_of(cert), cert)


def certificate_digest(cert: FpCertificate) -> str:
    return hashlib.sha256(json.dumps(cert.to_json(), sort_keys=True).encode()).hexdigest()[:16]


@dataclass
class Report:
    records: list = field(default_factory=list)
    consistent: bool = True
    metadata: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"metadata": self.metadata, "consistent": self.consistent, "goals": self.records}

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, indent=1) + "\n"

    def to_text(self) -> str:
        lines = [f"{k}: {v}" for k, v in sorted(self.metadata.items())]
        lines.append(f"consistent: {'yes' if self.consistent else 'NO'}")
        for r in self.records:
            lines.append(f"{r['index']:>3}  {r['status']:<8}  {r['payload']:<28}  {r['formula']}")
        return "\n".join(lines) + "\n"


def run_criterion(T, M: Model, axiom_certs: dict, goals, metadata=None) -> Report:
    """Check and extract every goal; a proof of bot that checks is an inconsistency witness."""
    report = Report(metadata=dict(metadata or {}))
    for i, (p, phi) in enumerate(goals):
        rec = {"index": i, "formula": show_formula(phi), "digest": K.formula_digest(phi)}
        try:
            K.check_proof(K.Judgement(T, EMPTY_CONTEXT, (), phi), p)
        except K.ProofError as e:
            rec.update(status="rejected", payload="-", error=str(e))
            report.records.append(rec)
            continue
        if isinstance(phi, Bot):
            report.consistent = False
            raise InconsistencyWitness(f"goal {i} proves bot")
        res = extract(T, M, axiom_certs, p, phi)
        rec.update(status="ok", payload=str(res.payload), certificate=certificate_digest(res.certificate))
        report.records.append(rec)
    return report
