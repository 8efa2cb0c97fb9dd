"""Bounded proof search over the natural-deduction rules.

The search is iterative deepening on proof size.  For each goal it tries, in
a fixed order: hypotheses, the primitive equality rules, introduction rules,
elimination spines headed by a hypothesis or an axiom (with metavariables for
quantifier instances, solved by first-order unification), and case splits on
disjunctive or existential hypotheses.  Minimal-size proofs are memoized per
(context, hypotheses, goal), so the result is a pure function of the input.
"""
from __future__ import annotations

import itertools
from typing import Optional

from . import kernel as K
from .syntax import (
    OBJ,
    And,
    ArrConst,
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
    ObjConst,
    ObjVar,
    Or,
    Top,
    alpha_eq,
    free_vars,
    fresh_name,
    infer_sort,
    show,
    substitute,
)

_SPINE_AXIOMS = ("cat.assoc", "cat.id")


def _is_meta(t) -> bool:
    return isinstance(t, (ObjVar, ArrVar)) and t.name.startswith("?")


def _unify_term(p, g, s) -> Optional[dict]:
    if _is_meta(p):
        bound = s.get(p.name)
        if bound is None:
            return {**s, p.name: g}
        return s if bound == g else None
    if type(p) is not type(g):
        return None
    match p:
        case Id(o):
            return _unify_term(o, g.obj, s)
        case Comp(a, b):
            s = _unify_term(a, g.outer, s)
            return None if s is None else _unify_term(b, g.inner, s)
    return s if p == g else None


def _unify_sort(p: ArrowSort, g: ArrowSort, s):
    s = _unify_term(p.dom, g.dom, s)
    return None if s is None else _unify_term(p.cod, g.cod, s)


class _Fresh:
    def __init__(self):
        self.n = 0

    def __call__(self, prefix="%"):
        self.n += 1
        return f"{prefix}{self.n}"


def _unify(p: Formula, g: Formula, s, fresh) -> Optional[dict]:
    if type(p) is not type(g):
        return None
    match p:
        case Eq(l, r):
            s = _unify_term(l, g.lhs, s)
            return None if s is None else _unify_term(r, g.rhs, s)
        case And(a, b) | Or(a, b) | Implies(a, b):
            s = _unify(a, g.left, s, fresh)
            return None if s is None else _unify(b, g.right, s, fresh)
        case ForallObj(v, body) | ExistsObj(v, body):
            z = ObjVar(fresh())
            return _unify(substitute(body, {v: z}), substitute(g.body, {g.var: z}), s, fresh)
        case ForallArr(v, srt, body) | ExistsArr(v, srt, body):
            s = _unify_sort(srt, g.sort, s)
            if s is None:
                return None
            z = ArrVar(fresh())
            return _unify(substitute(body, {v: z}), substitute(g.body, {g.var: z}), s, fresh)
    return s


def _subterms(t, out):
    match t:
        case Id(o):
            out.add(o)
            out.add(t)
        case Comp(a, b):
            out.add(t)
            _subterms(a, out)
            _subterms(b, out)
        case _:
            out.add(t)


def _formula_terms(phi, out):
    match phi:
        case Eq(l, r):
            _subterms(l, out)
            _subterms(r, out)
        case And(a, b) | Or(a, b) | Implies(a, b):
            _formula_terms(a, out)
            _formula_terms(b, out)
        case ForallArr(_, srt, body) | ExistsArr(_, srt, body):
            out.add(srt.dom)
            out.add(srt.cod)
            _formula_terms(body, out)
        case ForallObj(_, body) | ExistsObj(_, body):
            _formula_terms(body, out)


def _key(t) -> tuple:
    s = show(t)
    return (len(s), s)


class Searcher:
    """Proof search in a fixed theory; reusable across goals."""

    def __init__(self, theory):
        self.theory = theory
        self.sig = K._signature(theory)
        axioms = getattr(theory, "axioms", None) or {}
        self.heads = [(K.Axiom(a), K.BUILTIN_AXIOMS[a]) for a in _SPINE_AXIOMS]
        self.heads += [(K.Axiom(a), phi) for a, phi in sorted(axioms.items())]
        self.memo: dict = {}
        self.fresh = _Fresh()

    # term pool
    def pool(self, ctx: Context, hyps, goal):
        terms = set()
        for phi in (goal, *hyps):
            _formula_terms(phi, terms)
        objs = {t for t in terms if isinstance(t, (ObjConst, ObjVar))}
        objs |= {ObjConst(n) for n in self.sig.object_names}
        objs |= {ObjVar(n) for n in ctx.object_vars()}
        objs = {o for o in objs if not _is_meta(o) and not o.name.startswith("%")}
        arrows = {t for t in terms if not isinstance(t, (ObjConst, ObjVar))}
        arrows |= {ArrConst(n) for n in self.sig.arrow_names}
        arrows |= {ArrVar(d.var) for d in ctx.arrow_decls()}
        arrows |= {Id(o) for o in objs}
        typed = []
        for a in arrows:
            try:
                typed.append((a, infer_sort(self.sig, ctx, a)))
            except Exception:
                continue
        return sorted(objs, key=_key), sorted(typed, key=lambda p: _key(p[0]))

    # main entry
    def best(self, ctx: Context, hyps: tuple, goal: Formula, b: int):
        if b <= 0:
            return None
        key = (ctx, hyps, goal)
        found, failed = self.memo.get(key, (None, 0))
        if found is not None:
            return found if K.proof_size(found) <= b else None
        if failed >= b:
            return None
        for k in range(failed + 1, b + 1):
            p = self.attempt(ctx, hyps, goal, k)
            if p is not None:
                self.memo[key] = (p, k - 1)
                return p
            self.memo[key] = (None, k)
        return None

    def attempt(self, ctx, hyps, goal, b):
        """A proof of size at most ``b`` (callers ensure nothing smaller exists)."""
        for i, h in enumerate(hyps):
            if alpha_eq(h, goal):
                return K.Hyp(i)
        for head, phi in self.heads:
            if alpha_eq(phi, goal):
                return head
        if isinstance(goal, Top):
            return K.TopIntro()
        if isinstance(goal, Eq) and goal.lhs == goal.rhs:
            return K.EqRefl(goal.lhs)
        if b == 1:
            return None
        for fn in (self._intro, self._equality, self._spines, self._left, self._absurd):
            p = fn(ctx, hyps, goal, b)
            if p is not None:
                return p
        return None

    def seq(self, ctx, hyps, goals, b):
        """Greedy minimal proofs of independent goals within a joint budget."""
        out = []
        for i, g in enumerate(goals):
            p = self.best(ctx, hyps, g, b - (len(goals) - 1 - i))
            if p is None:
                return None
            out.append(p)
            b -= K.proof_size(p)
        return out

    def _eigen(self, ctx, v):
        avoid = set(ctx.names()) | set(self.sig.object_names) | set(self.sig.arrow_names)
        return fresh_name(v, avoid) if v in avoid else v

    # introduction rules
    def _intro(self, ctx, hyps, goal, b):
        match goal:
            case And(a, c):
                ps = self.seq(ctx, hyps, [a, c], b - 1)
                return K.AndIntro(*ps) if ps else None
            case Implies(a, c):
                p = self.best(ctx, hyps + (a,), c, b - 1)
                return K.ImpliesIntro(a, p) if p else None
            case Or(a, c):
                p = self.best(ctx, hyps, a, b - 1)
                if p is not None:
                    return K.OrIntroL(p, c)
                p = self.best(ctx, hyps, c, b - 1)
                return K.OrIntroR(p, a) if p else None
            case ForallObj(v, body):
                v2 = self._eigen(ctx, v)
                body2 = substitute(body, {v: ObjVar(v2)}) if v2 != v else body
                p = self.best(ctx.extend(v2), hyps, body2, b - 1)
                return K.ForallObjIntro(v2, p) if p else None
            case ForallArr(v, srt, body):
                v2 = self._eigen(ctx, v)
                body2 = substitute(body, {v: ArrVar(v2)}) if v2 != v else body
                p = self.best(ctx.extend(v2, srt), hyps, body2, b - 1)
                return K.ForallArrIntro(v2, srt, p) if p else None
            case ExistsObj(v, body):
                objs, _ = self.pool(ctx, hyps, goal)
                for o in objs:
                    p = self.best(ctx, hyps, substitute(body, {v: o}), b - 1)
                    if p is not None:
                        return K.ExistsObjIntro(goal, o, p)
            case ExistsArr(v, srt, body):
                _, arrows = self.pool(ctx, hyps, goal)
                for a, s in arrows:
                    if s != srt:
                        continue
                    p = self.best(ctx, hyps, substitute(body, {v: a}), b - 1)
                    if p is not None:
                        return K.ExistsArrIntro(goal, a, p)
        return None

    # primitive equality rules
    def _equality(self, ctx, hyps, goal, b):
        if not isinstance(goal, Eq):
            return None
        l, r = goal.lhs, goal.rhs
        if isinstance(l, Comp) and isinstance(r, Comp):
            try:
                ok = infer_sort(self.sig, ctx, l.inner).cod == infer_sort(self.sig, ctx, r.inner).cod
            except Exception:
                ok = False
            if ok:
                ps = self.seq(ctx, hyps, [Eq(l.outer, r.outer), Eq(l.inner, r.inner)], b - 1)
                if ps:
                    return K.EqCongComp(*ps)
        p = self.best(ctx, hyps, Eq(r, l), b - 1)
        if p is not None and not isinstance(p, K.EqSym):
            return K.EqSym(p)
        if b >= 3:
            srt = infer_sort(self.sig, ctx, l)
            _, arrows = self.pool(ctx, hyps, goal)
            for m, s in arrows:
                if s != srt or m == l or m == r:
                    continue
                ps = self.seq(ctx, hyps, [Eq(l, m), Eq(m, r)], b - 1)
                if ps:
                    return K.EqTrans(*ps)
        return None

    # elimination spines
    def _spine_states(self, proof, phi, budget, metas, pending):
        yield proof, phi, metas, pending
        if budget <= 0:
            return
        match phi:
            case ForallObj(v, body):
                m = self.fresh("?")
                yield from self._spine_states(
                    ("fo", proof, m), substitute(body, {v: ObjVar(m)}), budget - 1, {**metas, m: OBJ}, pending
                )
            case ForallArr(v, srt, body):
                m = self.fresh("?")
                yield from self._spine_states(
                    ("fa", proof, m), substitute(body, {v: ArrVar(m)}), budget - 1, {**metas, m: srt}, pending
                )
            case And(a, c):
                yield from self._spine_states(("l", proof), a, budget - 1, metas, pending)
                yield from self._spine_states(("r", proof), c, budget - 1, metas, pending)
            case Implies(a, c):
                if budget >= 2:
                    yield from self._spine_states(("i", proof, a), c, budget - 2, metas, pending + (a,))

    def _spines(self, ctx, hyps, goal, b):
        heads = [(K.Hyp(i), h) for i, h in enumerate(hyps)] + self.heads
        for head, phi in heads:
            for spine, concl, metas, pending in self._spine_states(head, phi, b - 1, {}, ()):
                if spine is head:
                    continue
                s = _unify(concl, goal, {}, self.fresh)
                if s is None:
                    continue
                for full in self._complete(ctx, hyps, goal, metas, s):
                    p = self._build(ctx, hyps, spine, full, b)
                    if p is not None:
                        return p
        return None

    def _complete(self, ctx, hyps, goal, metas, s):
        """Extend a partial solution to all metavariables, with sorts respected."""
        for m, srt in metas.items():
            if srt is OBJ or m not in s:
                continue
            try:
                actual = infer_sort(self.sig, ctx, s[m])
            except Exception:
                return
            s = _unify_sort(srt, actual, s)
            if s is None:
                return
        objs, arrows = self.pool(ctx, hyps, goal)
        free_obj = [m for m, srt in metas.items() if srt is OBJ and m not in s]
        free_arr = [m for m, srt in metas.items() if srt is not OBJ and m not in s]
        for combo in itertools.product(objs, repeat=len(free_obj)):
            s1 = {**s, **dict(zip(free_obj, combo))}
            yield from self._complete_arrows(free_arr, metas, s1, arrows)

    def _complete_arrows(self, free_arr, metas, s, arrows):
        if not free_arr:
            yield s
            return
        m, rest = free_arr[0], free_arr[1:]
        want = metas[m]
        for a, srt in arrows:
            s1 = _unify_sort(want, srt, s)
            if s1 is not None:
                yield from self._complete_arrows(rest, metas, {**s1, m: a}, arrows)

    def _build(self, ctx, hyps, spine, s, b):
        # unwind the spine into elimination nodes, collecting antecedent subgoals
        steps = []
        node = spine
        while isinstance(node, tuple):
            steps.append(node)
            node = node[1]
        steps.reverse()
        goals = [substitute(st[2], s) for st in steps if st[0] == "i"]
        used = 1 + len(steps)
        if used + len(goals) > b:
            return None
        subs = self.seq(ctx, hyps, goals, b - used) if goals else []
        if subs is None:
            return None
        it = iter(subs)
        p = node
        for st in steps:
            match st[0]:
                case "fo":
                    p = K.ForallObjElim(p, s[st[2]])
                case "fa":
                    p = K.ForallArrElim(p, s[st[2]])
                case "l":
                    p = K.AndElimL(p)
                case "r":
                    p = K.AndElimR(p)
                case "i":
                    p = K.ImpliesElim(p, next(it))
        return p

    # left rules on hypotheses
    def _left(self, ctx, hyps, goal, b):
        for i, h in enumerate(hyps):
            match h:
                case Or(a, c):
                    if any(alpha_eq(a, x) or alpha_eq(c, x) for x in hyps):
                        continue
                    ps = [self.best(ctx, hyps + (a,), goal, b - 2)]
                    if ps[0] is None:
                        continue
                    q = self.best(ctx, hyps + (c,), goal, b - 1 - 1 - K.proof_size(ps[0]))
                    if q is not None:
                        return K.OrElim(K.Hyp(i), ps[0], q)
                case ExistsObj(v, body) | ExistsArr(v, _, body):
                    v2 = self._eigen(ctx, v)
                    if v2 in free_vars(goal):
                        v2 = fresh_name(v2, set(ctx.names()) | free_vars(goal))
                    obj = isinstance(h, ExistsObj)
                    var = ObjVar(v2) if obj else ArrVar(v2)
                    body2 = substitute(body, {v: var})
                    if any(alpha_eq(body2, x) for x in hyps):
                        continue
                    ctx2 = ctx.extend(v2) if obj else ctx.extend(v2, h.sort)
                    q = self.best(ctx2, hyps + (body2,), goal, b - 2)
                    if q is not None:
                        return (K.ExistsObjElim if obj else K.ExistsArrElim)(K.Hyp(i), v2, q)
        return None

    def _absurd(self, ctx, hyps, goal, b):
        if isinstance(goal, Bot):
            return None
        p = self.best(ctx, hyps, Bot(), b - 1)
        return K.BotElim(p, goal) if p else None


def bounded_search(j: K.Judgement, depth: int):
    """A kernel-checked proof of size at most ``depth``, or ``None``.

    ``None`` only means nothing was found within the bound.
    """
    if depth < 0:
        raise ValueError("depth must be non-negative")
    s = Searcher(j.theory)
    p = s.best(j.ctx, tuple(j.hypotheses), j.conclusion, depth)
    if p is None:
        return None
    K.check_proof(j, p)
    return p
