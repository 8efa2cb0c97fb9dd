"""Models given by a provable partition of arrow constants, and the slash predicate FP.

FP mixes truth in the model with provability:

* ``t = u`` holds when both sides evaluate to constants in the same class;
* ``/\\`` and ``\\/`` are componentwise, ``top`` and ``bot`` literal;
* ``exists`` needs a constant witness;
* ``a => b`` needs FP(a) to imply FP(b) *and* a proof of ``a => b``;
* ``forall`` needs FP of every constant instance *and* a proof of the sentence.
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass, field

from .syntax import (
    And,
    ArrConst,
    ArrowSort,
    Bot,
    Eq,
    ExistsArr,
    ExistsObj,
    ForallArr,
    ForallObj,
    Formula,
    Implies,
    ObjConst,
    Or,
    Top,
    free_vars,
    show,
    show_formula,
    substitute,
)
from .theoria import ConstantCategory, Theory, constant_category


class ModelError(Exception):
    kind = "ModelError"

    def __init__(self, *args):
        super().__init__(*args)
        self.args_ = args

    def __str__(self):
        return f"{self.kind}({', '.join(map(str, self.args_))})"


class NotProvable(ModelError):
    kind = "NotProvable"


class NotEquivalence(ModelError):
    kind = "NotEquivalence"


class NotCongruent(ModelError):
    kind = "NotCongruent"


class OracleIncomplete(Exception):
    def __init__(self, phi):
        super().__init__(f"OracleIncomplete({show_formula(phi)})")
        self.formula = phi


# --------------------------------------------------------------------------
# models


@dataclass
class Model:
    """A partition of arrow constants (by representative) over a constant category."""

    theory: Theory
    constants: ConstantCategory
    rep: dict = field(default_factory=dict)  # constant -> least member of its class

    def __post_init__(self):
        for n in self.constants.sorts:
            self.rep.setdefault(n, n)

    def find(self, c: str) -> str:
        return self.rep.get(c, c)

    def same(self, a: str, b: str) -> bool:
        return self.find(a) == self.find(b)

    def retract(self, t) -> str:
        return self.constants.retract(t)

    def holds(self, lhs, rhs) -> bool:
        return self.same(self.retract(lhs), self.retract(rhs))

    def classes(self) -> dict:
        out: dict = {}
        for n, s in self.constants.sorts.items():
            out.setdefault(s, {}).setdefault(self.find(n), []).append(n)
        return {s: sorted(sorted(c) for c in cls.values()) for s, cls in out.items()}

    def domain(self, s: ArrowSort) -> list:
        return sorted({self.find(n) for n in self.constants.homs.get(s, ())})

    def objects(self) -> list:
        return list(self.constants.objects)

    def merged_pairs(self):
        for n in sorted(self.constants.sorts):
            r = self.find(n)
            if r != n:
                yield r, n


def discrete_model(T: Theory, constants: ConstantCategory | None = None) -> Model:
    return Model(T, constants or T.metadata.get("constants") or constant_category(T))


def model_from_classes(T: Theory, classes, constants: ConstantCategory | None = None) -> Model:
    """Build a model from explicit classes, checking they partition constants of one sort each."""
    cc = constants or T.metadata.get("constants") or constant_category(T)
    rep = {}
    for cls in classes:
        cls = list(cls)
        for n in cls:
            if n not in cc.sorts:
                raise NotEquivalence(f"unknown constant {n}")
            if n in rep:
                raise NotEquivalence(show(cc.sorts[n]))
        sorts = {cc.sorts[n] for n in cls}
        if len(sorts) > 1:
            raise NotEquivalence(" / ".join(sorted(show(s) for s in sorts)))
        least = min(cls)
        for n in cls:
            rep[n] = least
    return Model(T, cc, rep)


def parse_model(text: str, T: Theory, constants: ConstantCategory | None = None) -> Model:
    """Read ``model { class f g ; class h }``."""
    text = re.sub(r"#[^\n]*", "", text)
    m = re.fullmatch(r"\s*model\s*\{(.*)\}\s*", text, re.S)
    if not m:
        raise ValueError("expected 'model { class ... ; ... }'")
    classes = []
    for chunk in m.group(1).split(";"):
        words = chunk.split()
        if not words:
            continue
        if words[0] != "class":
            raise ValueError(f"expected 'class', found {words[0]!r}")
        classes.append(words[1:])
    return model_from_classes(T, classes, constants)


def dump_model(M: Model) -> str:
    parts = [" ".join(["class"] + c) for s in sorted(M.classes(), key=show) for c in M.classes()[s] if len(c) > 1]
    return "model { " + " ; ".join(parts) + " }\n" if parts else "model { }\n"


def validate_model(T: Theory, M: Model) -> None:
    """Raise unless merged constants are provably equal and the partition is a congruence."""
    cc = M.constants
    for a, b in M.merged_pairs():
        if cc.sorts[a] != cc.sorts[b]:
            raise NotEquivalence(show(cc.sorts[a]))
        if M.find(a) != M.find(M.find(a)):
            raise NotEquivalence(show(cc.sorts[a]))
        if not T.query(Eq(ArrConst(a), ArrConst(b))):
            raise NotProvable(a, b)
    names = sorted(cc.sorts)
    for f1 in names:
        for f2 in names:
            if f1 > f2 or not M.same(f1, f2):
                continue
            for g1 in names:
                for g2 in names:
                    if not M.same(g1, g2) or cc.sorts[g1].dom != cc.sorts[f1].cod:
                        continue
                    h1, h2 = cc.table.get((g1, f1)), cc.table.get((g2, f2))
                    if h1 is None or h2 is None or not M.same(h1, h2):
                        raise NotCongruent(f1, f2, g1, g2)


def congruence_close(T: Theory, seeds, constants: ConstantCategory | None = None) -> Model:
    """The least congruence containing ``seeds``; each seed must be provable."""
    cc = constants or T.metadata.get("constants") or constant_category(T)
    parent = {n: n for n in cc.sorts}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(a, b):
        ra, rb = find(a), find(b)
        if ra != rb:
            lo, hi = sorted((ra, rb))
            parent[hi] = lo
            return True
        return False

    for a, b in seeds:
        if not T.query(Eq(ArrConst(a), ArrConst(b))):
            raise NotProvable(a, b)
        union(a, b)
    changed = True
    while changed:
        changed = False
        for (g1, f1), h1 in cc.table.items():
            for (g2, f2), h2 in cc.table.items():
                if find(g1) == find(g2) and find(f1) == find(f2) and find(h1) != find(h2):
                    changed |= union(h1, h2)
    rep = {}
    for n in cc.sorts:
        rep[n] = min(m for m in cc.sorts if find(m) == find(n))
    return Model(T, cc, rep)


# --------------------------------------------------------------------------
# the slash


@dataclass(frozen=True)
class FpCertificate:
    formula: Formula
    verdict: bool
    trace: dict

    def to_json(self) -> dict:
        return {"formula": show_formula(self.formula), "verdict": self.verdict, "trace": _jsonable(self.trace)}

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, indent=1)


def _jsonable(x):
    if isinstance(x, FpCertificate):
        return x.to_json()
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    return x


class Evaluator:
    """Computes FP certificates for closed formulas, memoized per formula."""

    def __init__(self, T: Theory, M: Model):
        self.T = T
        self.M = M
        self._memo: dict = {}
        self.queries = 0

    def provable(self, phi) -> bool:
        self.queries += 1
        r = self.T.query(phi)
        if r:
            return True
        if self.T.oracle.complete_for(phi):
            return False
        raise OracleIncomplete(phi)

    def __call__(self, phi: Formula) -> FpCertificate:
        if phi not in self._memo:
            self._memo[phi] = self._eval(phi)
        return self._memo[phi]

    def _instances(self, phi):
        if isinstance(phi, (ForallObj, ExistsObj)):
            return [(o, substitute(phi.body, {phi.var: ObjConst(o)})) for o in self.M.objects()]
        return [(c, substitute(phi.body, {phi.var: ArrConst(c)})) for c in self.M.domain(phi.sort)]

    def _eval(self, phi) -> FpCertificate:
        match phi:
            case Top():
                return FpCertificate(phi, True, {"rule": "top"})
            case Bot():
                return FpCertificate(phi, False, {"rule": "bot"})
            case Eq(l, r):
                a, b = self.M.retract(l), self.M.retract(r)
                ok = self.M.same(a, b)
                return FpCertificate(phi, ok, {"rule": "eq", "lhs": a, "rhs": b})
            case And(a, b):
                ca = self(a)
                if not ca.verdict:
                    return FpCertificate(phi, False, {"rule": "and", "left": ca})
                cb = self(b)
                return FpCertificate(phi, cb.verdict, {"rule": "and", "left": ca, "right": cb})
            case Or(a, b):
                ca = self(a)
                if ca.verdict:
                    return FpCertificate(phi, True, {"rule": "or", "side": "left", "sub": ca})
                cb = self(b)
                if cb.verdict:
                    return FpCertificate(phi, True, {"rule": "or", "side": "right", "sub": cb})
                return FpCertificate(phi, False, {"rule": "or", "side": None, "left": ca, "right": cb})
            case Implies(a, b):
                ca = self(a)
                cb = self(b) if ca.verdict else None
                trace = {"rule": "implies", "antecedent": ca, "consequent": cb}
                if cb is not None and not cb.verdict:
                    return FpCertificate(phi, False, trace)
                trace["provable"] = self.provable(phi)
                return FpCertificate(phi, trace["provable"], trace)
            case ExistsObj() | ExistsArr():
                tried = []
                for c, inst in self._instances(phi):
                    ci = self(inst)
                    if ci.verdict:
                        return FpCertificate(phi, True, {"rule": "exists", "witness": c, "sub": ci})
                    tried.append({"witness": c, "cert": ci})
                return FpCertificate(phi, False, {"rule": "exists", "witness": None, "tried": tried})
            case ForallObj() | ForallArr():
                done = []
                for c, inst in self._instances(phi):
                    ci = self(inst)
                    done.append({"instance": c, "cert": ci})
                    if not ci.verdict:
                        return FpCertificate(phi, False, {"rule": "forall", "instances": done})
                ok = self.provable(phi)
                return FpCertificate(phi, ok, {"rule": "forall", "instances": done, "provable": ok})
        raise TypeError(phi)


def fp_eval(T: Theory, M: Model, phi: Formula, evaluator: Evaluator | None = None) -> FpCertificate:
    """FP of a closed formula, with a trace that :func:`replay` can re-check."""
    if free_vars(phi):
        raise ValueError(f"fp_eval needs a closed formula: {show_formula(phi)}")
    return (evaluator or Evaluator(T, M))(phi)


def replay(T: Theory, M: Model, cert: FpCertificate) -> bool:
    """Re-derive the verdict from the trace, re-asking the oracle where the trace relied on it."""
    phi, tr = cert.formula, cert.trace
    ev = Evaluator(T, M)
    rule = tr["rule"]
    if rule == "top":
        out = True
    elif rule == "bot":
        out = False
    elif rule == "eq":
        out = (M.retract(phi.lhs), M.retract(phi.rhs)) == (tr["lhs"], tr["rhs"]) and M.same(tr["lhs"], tr["rhs"])
    elif rule == "and":
        out = replay(T, M, tr["left"]) and "right" in tr and replay(T, M, tr["right"])
    elif rule == "or":
        if tr["side"] is None:
            out = replay(T, M, tr["left"]) or replay(T, M, tr["right"])
        else:
            part = phi.left if tr["side"] == "left" else phi.right
            out = tr["sub"].formula == part and replay(T, M, tr["sub"])
    elif rule == "implies":
        a_ok = replay(T, M, tr["antecedent"])
        b_ok = replay(T, M, tr["consequent"]) if tr["consequent"] is not None else None
        out = (not a_ok or bool(b_ok)) and ev.provable(phi) if "provable" in tr else False
    elif rule == "exists":
        if tr["witness"] is None:
            out = any(replay(T, M, t["cert"]) for t in tr["tried"])
        else:
            out = tr["sub"].formula == _instance(phi, tr["witness"]) and replay(T, M, tr["sub"])
    elif rule == "forall":
        names = [c for c, _ in ev._instances(phi)]
        seen = [t["instance"] for t in tr["instances"]]
        all_ok = all(replay(T, M, t["cert"]) for t in tr["instances"])
        out = all_ok and seen == names and ev.provable(phi)
    else:
        raise ValueError(rule)
    return out


def _instance(phi, c):
    if isinstance(phi, (ForallObj, ExistsObj)):
        return substitute(phi.body, {phi.var: ObjConst(c)})
    return substitute(phi.body, {phi.var: ArrConst(c)})


def check_fp_implies_provable(T: Theory, M: Model, phis):
    """The first formula with a true FP that the oracle cannot prove, or ``None``."""
    if isinstance(phis, Formula):
        phis = [phis]
    ev = Evaluator(T, M)
    for phi in phis:
        if ev(phi).verdict and not T.query(phi):
            return phi
    return None
