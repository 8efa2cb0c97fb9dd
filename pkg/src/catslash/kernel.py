"""Natural-deduction proof trees and the checker.

Hypotheses are addressed by position in the judgement's hypothesis list; rules
that discharge an assumption append it at the end.  Equality is governed by
four primitive rules (refl, sym, trans, congruence of composition); the
category laws and the schematic equality axioms are available as built-in
axioms under fixed ids.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass, fields
from typing import Optional, Sequence, Union

from .syntax import (
    EMPTY_SIGNATURE,
    OBJ,
    And,
    ArrowSort,
    ArrVar,
    Bot,
    Comp,
    Context,
    Eq,
    ExistsArr,
    ExistsObj,
    ForallArr,
    ForallObj,
    Formula,
    Id,
    Implies,
    ObjVar,
    Or,
    Parser,
    Signature,
    Top,
    WellFormednessError,
    alpha_eq,
    check_formula,
    free_vars,
    infer_sort,
    instantiate,
    parse_formula,
    parse_term,
    show,
    subst_sort,
    subst_term,
    substitute,
)


class ProofError(Exception):
    kind = "ProofError"

    def __init__(self, path, *detail):
        self.path = path
        self.detail = detail
        super().__init__(path, *detail)

    def __str__(self):
        where = ".".join(map(str, self.path)) or "root"
        return f"{self.kind} at {where}: " + "; ".join(map(str, self.detail))


class RuleMismatch(ProofError):
    kind = "RuleMismatch"


class EigenvariableCapture(ProofError):
    kind = "EigenvariableCapture"


class UnknownAxiom(ProofError):
    kind = "UnknownAxiom"


# --------------------------------------------------------------------------
# proof nodes


@dataclass(frozen=True)
class Hyp:
    index: int


@dataclass(frozen=True)
class Axiom:
    id: str


@dataclass(frozen=True)
class TopIntro:
    pass


@dataclass(frozen=True)
class BotElim:
    p: "Proof"
    target: Formula


@dataclass(frozen=True)
class AndIntro:
    p: "Proof"
    q: "Proof"


@dataclass(frozen=True)
class AndElimL:
    p: "Proof"


@dataclass(frozen=True)
class AndElimR:
    p: "Proof"


@dataclass(frozen=True)
class OrIntroL:
    p: "Proof"
    right: Formula


@dataclass(frozen=True)
class OrIntroR:
    p: "Proof"
    left: Formula


@dataclass(frozen=True)
class OrElim:
    p: "Proof"
    q: "Proof"
    r: "Proof"


@dataclass(frozen=True)
class ImpliesIntro:
    hyp: Formula
    p: "Proof"


@dataclass(frozen=True)
class ImpliesElim:
    p: "Proof"
    q: "Proof"


@dataclass(frozen=True)
class ForallObjIntro:
    var: str
    p: "Proof"


@dataclass(frozen=True)
class ForallObjElim:
    p: "Proof"
    term: object


@dataclass(frozen=True)
class ExistsObjIntro:
    formula: Formula
    witness: object
    p: "Proof"


@dataclass(frozen=True)
class ExistsObjElim:
    p: "Proof"
    var: str
    q: "Proof"


@dataclass(frozen=True)
class ForallArrIntro:
    var: str
    sort: ArrowSort
    p: "Proof"


@dataclass(frozen=True)
class ForallArrElim:
    p: "Proof"
    term: object


@dataclass(frozen=True)
class ExistsArrIntro:
    formula: Formula
    witness: object
    p: "Proof"


@dataclass(frozen=True)
class ExistsArrElim:
    p: "Proof"
    var: str
    q: "Proof"


@dataclass(frozen=True)
class EqRefl:
    term: object


@dataclass(frozen=True)
class EqSym:
    p: "Proof"


@dataclass(frozen=True)
class EqTrans:
    p: "Proof"
    q: "Proof"


@dataclass(frozen=True)
class EqCongComp:
    p: "Proof"  # outer: g1 = g2
    q: "Proof"  # inner: f1 = f2


@dataclass(frozen=True)
class Named:
    """Builder-only reference to a hypothesis by its formula; see :func:`resolve_named`."""

    formula: Formula


Proof = Union[
    Hyp, Axiom, TopIntro, BotElim, AndIntro, AndElimL, AndElimR, OrIntroL, OrIntroR,
    OrElim, ImpliesIntro, ImpliesElim, ForallObjIntro, ForallObjElim, ExistsObjIntro,
    ExistsObjElim, ForallArrIntro, ForallArrElim, ExistsArrIntro, ExistsArrElim,
    EqRefl, EqSym, EqTrans, EqCongComp,
]
RULES = {cls.__name__: cls for cls in Proof.__args__}


def premises(p) -> list:
    return [getattr(p, f.name) for f in fields(p) if _is_node(getattr(p, f.name))]


def _is_node(x) -> bool:
    return type(x).__name__ in RULES or isinstance(x, Named)


def proof_size(p) -> int:
    return 1 + sum(proof_size(q) for q in premises(p))


# --------------------------------------------------------------------------
# built-in axioms


def _v(n):
    return ObjVar(n)


def _a(n):
    return ArrVar(n)


def _sort(a, b):
    return ArrowSort(_v(a), _v(b))


def _objs(names, body):
    for n in reversed(names):
        body = ForallObj(n, body)
    return body


def _arrs(decls, body):
    for n, s in reversed(decls):
        body = ForallArr(n, s, body)
    return body


def _builtin_axioms() -> dict:
    AB = _sort("A", "B")
    f, g, h = _a("f"), _a("g"), _a("h")
    refl = _objs("AB", _arrs([("f", AB)], Eq(f, f)))
    sym = _objs("AB", _arrs([("f", AB), ("g", AB)], Implies(Eq(f, g), Eq(g, f))))
    trans = _objs(
        "AB",
        _arrs([("f", AB), ("g", AB), ("h", AB)], Implies(Eq(f, g), Implies(Eq(g, h), Eq(f, h)))),
    )
    cong = _objs(
        "ABC",
        _arrs(
            [("f1", AB), ("f2", AB), ("g1", _sort("B", "C")), ("g2", _sort("B", "C"))],
            Implies(
                And(Eq(_a("f1"), _a("f2")), Eq(_a("g1"), _a("g2"))),
                Eq(Comp(_a("g1"), _a("f1")), Comp(_a("g2"), _a("f2"))),
            ),
        ),
    )
    assoc = _objs(
        "ABCD",
        _arrs(
            [("f", AB), ("g", _sort("B", "C")), ("h", _sort("C", "D"))],
            Eq(Comp(h, Comp(g, f)), Comp(Comp(h, g), f)),
        ),
    )
    ident = _objs(
        "AB",
        _arrs([("f", AB)], And(Eq(f, Comp(Id(_v("B")), f)), Eq(f, Comp(f, Id(_v("A")))))),
    )
    return {
        "eq.refl": refl,
        "eq.sym": sym,
        "eq.trans": trans,
        "eq.cong": cong,
        "cat.assoc": assoc,
        "cat.id": ident,
    }


BUILTIN_AXIOMS = _builtin_axioms()


def equality_axioms(sig: Signature = EMPTY_SIGNATURE) -> list:
    """Universal closures of the equality and category axioms.

    They do not depend on the signature; constants are covered by
    instantiating the object quantifiers.
    """
    return list(BUILTIN_AXIOMS.values())


# --------------------------------------------------------------------------
# judgements and checking


@dataclass(frozen=True)
class Judgement:
    theory: object  # anything with .signature and .axiom(id); None for the bare logic
    ctx: Context
    hypotheses: tuple
    conclusion: Formula


def _signature(theory) -> Signature:
    return theory.signature if theory is not None else EMPTY_SIGNATURE


def lookup_axiom(theory, ax_id: str):
    if ax_id in BUILTIN_AXIOMS:
        return BUILTIN_AXIOMS[ax_id]
    if theory is None:
        return None
    return theory.axiom(ax_id)


class _Checker:
    def __init__(self, theory, named=False):
        self.theory = theory
        self.sig = _signature(theory)
        self.named = named

    def wf(self, path, ctx, phi):
        try:
            check_formula(self.sig, ctx, phi)
        except WellFormednessError as e:
            raise RuleMismatch(path, "well-formed formula", str(e)) from None

    def sort_of(self, path, ctx, t):
        try:
            return infer_sort(self.sig, ctx, t)
        except WellFormednessError as e:
            raise RuleMismatch(path, "well-sorted term", str(e)) from None

    def fresh(self, path, ctx, var):
        if ctx.lookup(var) is not None or var in self.sig:
            raise EigenvariableCapture(path, var)

    def expect(self, path, cls, phi, what):
        if not isinstance(phi, cls):
            raise RuleMismatch(path, what, show(phi))
        return phi

    def run(self, ctx: Context, hyps: tuple, p, path=()) -> Formula:
        sub = lambda i: path + (i,)  # noqa: E731
        match p:
            case Hyp(i):
                if not 0 <= i < len(hyps):
                    raise RuleMismatch(path, f"hypothesis index < {len(hyps)}", i)
                return hyps[i]
            case Named(phi) if self.named:
                if not any(alpha_eq(phi, h) for h in hyps):
                    raise RuleMismatch(path, "named hypothesis in scope", show(phi))
                return phi
            case Axiom(ax):
                phi = lookup_axiom(self.theory, ax)
                if phi is None:
                    raise UnknownAxiom(path, ax)
                return phi
            case TopIntro():
                return Top()
            case BotElim(q, target):
                self.expect(path, Bot, self.run(ctx, hyps, q, sub(0)), "bot")
                self.wf(path, ctx, target)
                return target
            case AndIntro(q, r):
                return And(self.run(ctx, hyps, q, sub(0)), self.run(ctx, hyps, r, sub(1)))
            case AndElimL(q):
                return self.expect(path, And, self.run(ctx, hyps, q, sub(0)), "conjunction").left
            case AndElimR(q):
                return self.expect(path, And, self.run(ctx, hyps, q, sub(0)), "conjunction").right
            case OrIntroL(q, right):
                self.wf(path, ctx, right)
                return Or(self.run(ctx, hyps, q, sub(0)), right)
            case OrIntroR(q, left):
                self.wf(path, ctx, left)
                return Or(left, self.run(ctx, hyps, q, sub(0)))
            case OrElim(q, r, s):
                d = self.expect(path, Or, self.run(ctx, hyps, q, sub(0)), "disjunction")
                c1 = self.run(ctx, hyps + (d.left,), r, sub(1))
                c2 = self.run(ctx, hyps + (d.right,), s, sub(2))
                if not alpha_eq(c1, c2):
                    raise RuleMismatch(path, show(c1), show(c2))
                return c1
            case ImpliesIntro(a, q):
                self.wf(path, ctx, a)
                return Implies(a, self.run(ctx, hyps + (a,), q, sub(0)))
            case ImpliesElim(q, r):
                imp = self.expect(path, Implies, self.run(ctx, hyps, q, sub(0)), "implication")
                a = self.run(ctx, hyps, r, sub(1))
                if not alpha_eq(imp.left, a):
                    raise RuleMismatch(path, show(imp.left), show(a))
                return imp.right
            case ForallObjIntro(v, q):
                self.fresh(path, ctx, v)
                return ForallObj(v, self.run(ctx.extend(v), hyps, q, sub(0)))
            case ForallObjElim(q, t):
                phi = self.expect(path, ForallObj, self.run(ctx, hyps, q, sub(0)), "forall over objects")
                if self.sort_of(path, ctx, t) != OBJ:
                    raise RuleMismatch(path, "object term", show(t))
                return instantiate(phi, t)
            case ForallArrIntro(v, s, q):
                self.fresh(path, ctx, v)
                for end in (s.dom, s.cod):
                    if self.sort_of(path, ctx, end) != OBJ:
                        raise RuleMismatch(path, "object term", show(end))
                return ForallArr(v, s, self.run(ctx.extend(v, s), hyps, q, sub(0)))
            case ForallArrElim(q, t):
                phi = self.expect(path, ForallArr, self.run(ctx, hyps, q, sub(0)), "forall over arrows")
                s = self.sort_of(path, ctx, t)
                if s != phi.sort:
                    raise RuleMismatch(path, show(phi.sort), show(s) if s != OBJ else OBJ)
                return instantiate(phi, t)
            case ExistsObjIntro(phi, t, q):
                self.expect(path, ExistsObj, phi, "exists over objects")
                self.wf(path, ctx, phi)
                if self.sort_of(path, ctx, t) != OBJ:
                    raise RuleMismatch(path, "object term", show(t))
                got = self.run(ctx, hyps, q, sub(0))
                want = instantiate(phi, t)
                if not alpha_eq(got, want):
                    raise RuleMismatch(sub(0), show(want), show(got))
                return phi
            case ExistsArrIntro(phi, t, q):
                self.expect(path, ExistsArr, phi, "exists over arrows")
                self.wf(path, ctx, phi)
                s = self.sort_of(path, ctx, t)
                if s != phi.sort:
                    raise RuleMismatch(path, show(phi.sort), show(s) if s != OBJ else OBJ)
                got = self.run(ctx, hyps, q, sub(0))
                want = instantiate(phi, t)
                if not alpha_eq(got, want):
                    raise RuleMismatch(sub(0), show(want), show(got))
                return phi
            case ExistsObjElim(q, v, r):
                ex = self.expect(path, ExistsObj, self.run(ctx, hyps, q, sub(0)), "exists over objects")
                self.fresh(path, ctx, v)
                body = instantiate(ex, ObjVar(v))
                c = self.run(ctx.extend(v), hyps + (body,), r, sub(1))
                if v in free_vars(c):
                    raise EigenvariableCapture(path, v)
                return c
            case ExistsArrElim(q, v, r):
                ex = self.expect(path, ExistsArr, self.run(ctx, hyps, q, sub(0)), "exists over arrows")
                self.fresh(path, ctx, v)
                body = instantiate(ex, ArrVar(v))
                c = self.run(ctx.extend(v, ex.sort), hyps + (body,), r, sub(1))
                if v in free_vars(c):
                    raise EigenvariableCapture(path, v)
                return c
            case EqRefl(t):
                s = self.sort_of(path, ctx, t)
                if s == OBJ:
                    raise RuleMismatch(path, "arrow term", show(t))
                return Eq(t, t)
            case EqSym(q):
                e = self.expect(path, Eq, self.run(ctx, hyps, q, sub(0)), "equation")
                return Eq(e.rhs, e.lhs)
            case EqTrans(q, r):
                e1 = self.expect(path, Eq, self.run(ctx, hyps, q, sub(0)), "equation")
                e2 = self.expect(path, Eq, self.run(ctx, hyps, r, sub(1)), "equation")
                if e1.rhs != e2.lhs:
                    raise RuleMismatch(path, show(e1.rhs), show(e2.lhs))
                return Eq(e1.lhs, e2.rhs)
            case EqCongComp(q, r):
                eg = self.expect(path, Eq, self.run(ctx, hyps, q, sub(0)), "equation")
                ef = self.expect(path, Eq, self.run(ctx, hyps, r, sub(1)), "equation")
                out = Eq(Comp(eg.lhs, ef.lhs), Comp(eg.rhs, ef.rhs))
                for t in (out.lhs, out.rhs):
                    self.sort_of(path, ctx, t)
                return out
        raise RuleMismatch(path, "proof node", repr(p))


def conclusion_of(theory, ctx: Context, hyps: Sequence[Formula], p) -> Formula:
    """The formula ``p`` derives; raises :class:`ProofError` on invalid trees."""
    return _Checker(theory).run(ctx, tuple(hyps), p)


def check_proof(j: Judgement, p) -> None:
    """Raise a :class:`ProofError` unless ``p`` derives ``j``."""
    checker = _Checker(j.theory)
    for phi in tuple(j.hypotheses) + (j.conclusion,):
        checker.wf((), j.ctx, phi)
    got = checker.run(j.ctx, tuple(j.hypotheses), p)
    if not alpha_eq(got, j.conclusion):
        raise RuleMismatch((), show(j.conclusion), show(got))


def is_valid(j: Judgement, p) -> bool:
    try:
        check_proof(j, p)
    except ProofError:
        return False
    return True


# --------------------------------------------------------------------------
# structural operations on proofs


def map_proof(p, term_fn, formula_fn, sort_fn, hyp_fn=None):
    """Rebuild ``p`` applying the given functions to every payload."""
    def go(node, depth):
        kwargs = {}
        for f in fields(node):
            val = getattr(node, f.name)
            if type(val).__name__ in RULES:
                extra = 1 if _discharges(node, f.name) else 0
                kwargs[f.name] = go(val, depth + extra)
            elif f.name in ("target", "right", "left", "hyp", "formula"):
                kwargs[f.name] = formula_fn(val)
            elif f.name in ("term", "witness"):
                kwargs[f.name] = term_fn(val)
            elif f.name == "sort":
                kwargs[f.name] = sort_fn(val)
            elif f.name == "index" and hyp_fn is not None:
                kwargs[f.name] = hyp_fn(val, depth)
            else:
                kwargs[f.name] = val
        return type(node)(**kwargs)

    return go(p, 0)


def _discharges(node, fname) -> bool:
    return (
        (isinstance(node, OrElim) and fname in ("q", "r"))
        or (isinstance(node, ImpliesIntro) and fname == "p")
        or (isinstance(node, (ExistsObjElim, ExistsArrElim)) and fname == "q")
    )


def subst_proof(p, sigma: dict):
    """Apply a substitution to every term and formula carried by ``p``."""
    return map_proof(
        p,
        lambda t: subst_term(t, sigma),
        lambda phi: substitute(phi, sigma),
        lambda s: subst_sort(s, sigma),
    )


def shift_hypotheses(p, k: int):
    """Renumber hypothesis references after inserting ``k`` hypotheses in front."""
    ident = lambda x: x  # noqa: E731
    return map_proof(p, ident, ident, ident, hyp_fn=lambda i, depth: i + k)


def resolve_named(theory, ctx: Context, hyps: Sequence[Formula], p):
    """Replace :class:`Named` references by positional :class:`Hyp` nodes."""
    checker = _Checker(theory, named=True)

    def go(node, ctx, hyps):
        match node:
            case Named(phi):
                for i in range(len(hyps) - 1, -1, -1):
                    if alpha_eq(hyps[i], phi):
                        return Hyp(i)
                raise RuleMismatch((), "named hypothesis in scope", show(phi))
            case OrElim(q, r, s):
                d = checker.run(ctx, hyps, q)
                if not isinstance(d, Or):
                    raise RuleMismatch((), "disjunction", show(d))
                return OrElim(go(q, ctx, hyps), go(r, ctx, hyps + (d.left,)), go(s, ctx, hyps + (d.right,)))
            case ImpliesIntro(a, q):
                return ImpliesIntro(a, go(q, ctx, hyps + (a,)))
            case ForallObjIntro(v, q):
                return ForallObjIntro(v, go(q, ctx.extend(v), hyps))
            case ForallArrIntro(v, srt, q):
                return ForallArrIntro(v, srt, go(q, ctx.extend(v, srt), hyps))
            case ExistsObjElim(q, v, r) | ExistsArrElim(q, v, r):
                ex = checker.run(ctx, hyps, q)
                if not isinstance(ex, (ExistsObj, ExistsArr)):
                    raise RuleMismatch((), "existential", show(ex))
                var = ObjVar(v) if isinstance(ex, ExistsObj) else ArrVar(v)
                ctx2 = ctx.extend(v) if isinstance(ex, ExistsObj) else ctx.extend(v, ex.sort)
                return type(node)(go(q, ctx, hyps), v, go(r, ctx2, hyps + (instantiate(ex, var),)))
        kwargs = {}
        for f in fields(node):
            val = getattr(node, f.name)
            kwargs[f.name] = go(val, ctx, hyps) if type(val).__name__ in RULES or isinstance(val, Named) else val
        return type(node)(**kwargs)

    return go(p, ctx, tuple(hyps))


# --------------------------------------------------------------------------
# certificate text format


def _arg_text(x) -> str:
    if isinstance(x, str):
        return x
    if isinstance(x, int):
        return str(x)
    return show(x)


def _node_args(p) -> list:
    match p:
        case Hyp(i):
            return [i]
        case Axiom(a):
            return [a]
        case BotElim(_, t):
            return [t]
        case OrIntroL(_, phi) | OrIntroR(_, phi):
            return [phi]
        case ImpliesIntro(a, _):
            return [a]
        case ForallObjIntro(v, _) | ExistsObjElim(_, v, _) | ExistsArrElim(_, v, _):
            return [v]
        case ForallArrIntro(v, s, _):
            return [v, s]
        case ForallObjElim(_, t) | ForallArrElim(_, t) | EqRefl(t):
            return [t]
        case ExistsObjIntro(phi, t, _) | ExistsArrIntro(phi, t, _):
            return [phi, t]
    return []


def dump_proof(p, conclusion: Optional[Formula] = None) -> str:
    """Serialize a proof, one node per line, premises before conclusions."""
    ids: dict = {}
    lines = []
    if conclusion is not None:
        lines.append(f"# conclusion: {show(conclusion)}")

    def emit(node):
        key = node
        if key in ids:
            return ids[key]
        prem = [emit(q) for q in premises(node)]
        nid = len(ids)
        ids[key] = nid
        parts = [str(nid), type(node).__name__, ",".join(map(str, prem)) or "-"]
        line = " ".join(parts)
        for a in _node_args(node):
            line += " | " + _arg_text(a)
        lines.append(line)
        return nid

    emit(p)
    return "\n".join(lines) + "\n"


def load_proof(text: str, sig: Signature = EMPTY_SIGNATURE):
    """Inverse of :func:`dump_proof`; the last node is the root."""
    nodes: dict = {}
    last = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        head, *args = [s.strip() for s in line.split(" | ")]
        try:
            nid, rule, prem = head.split()
        except ValueError:
            raise ValueError(f"line {lineno}: malformed node header {head!r}") from None
        if rule not in RULES:
            raise ValueError(f"line {lineno}: unknown rule {rule}")
        ps = [] if prem == "-" else [nodes[int(x)] for x in prem.split(",")]
        try:
            node = _build(rule, ps, args, sig)
        except Exception as e:  # noqa: BLE001
            raise ValueError(f"line {lineno}: {e}") from e
        nodes[int(nid)] = node
        last = node
    if last is None:
        raise ValueError("empty proof certificate")
    return last


def _obj(text, sig):
    p = Parser(text, sig)
    out = p.obj_term()
    p.finish()
    return out


def _sort_arg(text, sig):
    p = Parser(text, sig)
    out = p.arrow_sort()
    p.finish()
    return out


def _build(rule, ps, args, sig):
    F = lambda s: parse_formula(s, sig)  # noqa: E731
    T = lambda s: parse_term(s, sig)  # noqa: E731
    match rule:
        case "Hyp":
            return Hyp(int(args[0]))
        case "Axiom":
            return Axiom(args[0])
        case "TopIntro":
            return TopIntro()
        case "BotElim":
            return BotElim(ps[0], F(args[0]))
        case "OrIntroL":
            return OrIntroL(ps[0], F(args[0]))
        case "OrIntroR":
            return OrIntroR(ps[0], F(args[0]))
        case "ImpliesIntro":
            return ImpliesIntro(F(args[0]), ps[0])
        case "ForallObjIntro":
            return ForallObjIntro(args[0], ps[0])
        case "ForallArrIntro":
            return ForallArrIntro(args[0], _sort_arg(args[1], sig), ps[0])
        case "ForallObjElim":
            return ForallObjElim(ps[0], _obj(args[0], sig))
        case "ForallArrElim":
            return ForallArrElim(ps[0], T(args[0]))
        case "ExistsObjIntro":
            return ExistsObjIntro(F(args[0]), _obj(args[1], sig), ps[0])
        case "ExistsArrIntro":
            return ExistsArrIntro(F(args[0]), T(args[1]), ps[0])
        case "ExistsObjElim":
            return ExistsObjElim(ps[0], args[0], ps[1])
        case "ExistsArrElim":
            return ExistsArrElim(ps[0], args[0], ps[1])
        case "EqRefl":
            return EqRefl(T(args[0]))
    return RULES[rule](*ps)


def formula_digest(phi: Formula) -> str:
    """Content digest of a formula's printed form (certificate database key)."""
    return hashlib.sha256(show(phi).encode("utf-8")).hexdigest()[:32]
