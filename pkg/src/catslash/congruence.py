"""A proof-producing decision procedure for enumerated finite theories.

Three layers, each emitting kernel proofs:

* ground equality modulo the category laws, decided by searching rewrites of
  composable paths (a path is a term with identities dropped and composition
  flattened);
* elimination of arrow quantifiers over homs whose elements are listed by a
  domain-closure axiom ``forall x : A -> B . x = c1 \\/ ... \\/ x = cn``;
* intuitionistic propositional search (Dyckhoff's contraction-free calculus)
  with atoms decided by the first layer.

Object quantifiers are outside the fragment.
"""
from __future__ import annotations

from collections import deque
from itertools import count

from . import kernel as K
from .derive import Eqn, Pf, close, substitution_pf
from .syntax import (
    EMPTY_CONTEXT,
    And,
    ArrConst,
    ArrowSort,
    ArrVar,
    Bot,
    Comp,
    Eq,
    ExistsArr,
    ExistsObj,
    ForallArr,
    ForallObj,
    Formula,
    Id,
    Implies,
    ObjConst,
    Or,
    Top,
    conj,
    disj,
    free_vars,
    substitute,
)
from .theoria import Oracle, Unknown

N = K.Named


# --------------------------------------------------------------------------
# proof combinators


def cut(psi, proof_of_psi, rest):
    return K.ImpliesElim(K.ImpliesIntro(psi, rest), proof_of_psi)


def conj_intro(proofs):
    if not proofs:
        return K.TopIntro()
    out = proofs[-1]
    for p in reversed(proofs[:-1]):
        out = K.AndIntro(p, out)
    return out


def conj_elim(h, i, n):
    for _ in range(i):
        h = K.AndElimR(h)
    return K.AndElimL(h) if i < n - 1 else h


def inject(p, i, parts):
    """Put a proof of ``parts[i]`` into the right-nested disjunction of ``parts``."""
    if len(parts) == 1:
        return p
    if i == 0:
        return K.OrIntroL(p, disj(parts[1:]))
    return K.OrIntroR(inject(p, i - 1, parts[1:]), parts[0])


def or_cases(major, parts, branch):
    """Case split on a proof of ``disj(parts)``; ``branch(i)`` may cite ``Named(parts[i])``."""
    if len(parts) == 1:
        return cut(parts[0], major, branch(0))
    return K.OrElim(major, branch(0), or_cases(N(disj(parts[1:])), parts[1:], lambda i: branch(i + 1)))


# --------------------------------------------------------------------------
# ground equality on paths


class PathEquality:
    """Equalities between closed terms from a fixed list of closed equations."""

    def __init__(self, sig, equations, bound=None):
        self.eqn = Eqn(sig, EMPTY_CONTEXT)
        self.rules = []
        longest = 2
        for pf in equations:
            l, r = pf.concl.lhs, pf.concl.rhs
            pl, el = self.eqn.normalize(l)
            pr, er = self.eqn.normalize(r)
            s = self.eqn.sort(l)
            proof = self.eqn.chain(self.eqn.sym(el), pf, er)
            self.rules.append((tuple(pl), tuple(pr), s, proof))
            self.rules.append((tuple(pr), tuple(pl), s, self.eqn.sym(proof)))
            longest = max(longest, len(pl), len(pr))
        self.bound = bound if bound is not None else longest
        self._reach: dict = {}

    def node(self, t):
        path, pf = self.eqn.normalize(t)
        s = self.eqn.sort(t)
        return (tuple(path), s.dom, s.cod), pf

    def _neighbours(self, node, bound):
        path, dom, cod = node
        for idx, (l, r, s, _) in enumerate(self.rules):
            if not l:
                if not path and s.dom == dom and s.cod == cod:
                    yield (r, dom, cod), (idx, 0, 0)
                continue
            k = len(l)
            for i in range(len(path) - k + 1):
                if path[i : i + k] == l:
                    new = path[:i] + r + path[i + k :]
                    if len(new) <= bound:
                        yield (new, dom, cod), (idx, i, k)

    def _component(self, start, bound):
        key = (start, bound)
        if key not in self._reach:
            prev = {start: None}
            queue = deque([start])
            while queue:
                cur = queue.popleft()
                for nxt, how in self._neighbours(cur, bound):
                    if nxt not in prev:
                        prev[nxt] = (cur, how)
                        queue.append(nxt)
            self._reach[key] = prev
        return self._reach[key]

    def _edge(self, node, how):
        path, dom, cod = node
        idx, i, k = how
        proof = self.rules[idx][3]
        if k == 0:
            return proof
        return self.eqn.rewrite(list(path), i, k, proof, dom)[1]

    def prove(self, s, t):
        """A proof of ``s = t`` or ``None``."""
        ns, ps = self.node(s)
        nt, pt = self.node(t)
        if ns[1:] != nt[1:]:
            return None
        bound = max(self.bound, len(ns[0]), len(nt[0]))
        prev = self._component(ns, bound)
        if nt not in prev:
            return None
        steps = []
        cur = nt
        while prev[cur] is not None:
            before, how = prev[cur]
            steps.append(self._edge(before, how))
            cur = before
        steps.reverse()
        e = self.eqn
        return e.chain(ps, *steps, e.sym(pt))

    def representatives(self, t, bound=None):
        """All path nodes provably equal to ``t`` within the length bound."""
        ns, _ = self.node(t)
        return set(self._component(ns, max(bound or self.bound, len(ns[0]))))


# --------------------------------------------------------------------------
# quantifier elimination over enumerated homs


def closure_shape(phi):
    """``(sort, [constant names])`` when ``phi`` lists the elements of a hom."""
    if not isinstance(phi, ForallArr):
        return None
    x, body = phi.var, phi.body
    if isinstance(body, Bot):
        return phi.sort, []
    parts = []
    while isinstance(body, Or):
        parts.append(body.left)
        body = body.right
    parts.append(body)
    names = []
    for p in parts:
        if not (isinstance(p, Eq) and p.lhs == ArrVar(x) and isinstance(p.rhs, ArrConst)):
            return None
        names.append(p.rhs.name)
    if len(set(names)) != len(names):
        return None
    return phi.sort, names


class Reducer:
    """Rewrites closed formulas into quantifier-free ones, with proofs both ways."""

    def __init__(self, theory):
        self.theory = theory
        self.sig = theory.signature
        self.domains: dict = {}
        for ax_id, phi in theory.axioms.items():
            shape = closure_shape(phi)
            if shape and shape[0] not in self.domains:
                self.domains[shape[0]] = (ax_id, phi, shape[1])
        self._memo: dict = {}
        self._names = count(1)

    def in_fragment(self, phi) -> bool:
        match phi:
            case ForallObj() | ExistsObj():
                return False
            case ForallArr(_, s, b) | ExistsArr(_, s, b):
                return s in self.domains and self.in_fragment(b)
            case And(a, b) | Or(a, b) | Implies(a, b):
                return self.in_fragment(a) and self.in_fragment(b)
        return True

    def _fresh(self):
        return f"w_{next(self._names)}"

    def reduce(self, phi):
        """``(phi', to, fro)``: proofs of ``phi => phi'`` and ``phi' => phi`` citing ``Named`` hyps."""
        if phi in self._memo:
            return self._memo[phi]
        out = self._reduce(phi)
        self._memo[phi] = out
        return out

    def _identity(self, phi):
        p = K.ImpliesIntro(phi, N(phi))
        return phi, p, p

    def _reduce(self, phi):
        match phi:
            case Eq() | Top() | Bot():
                return self._identity(phi)
            case And(a, b):
                a2, ta, fa = self.reduce(a)
                b2, tb, fb = self.reduce(b)
                new = And(a2, b2)
                if new == phi:
                    return self._identity(phi)
                to = K.ImpliesIntro(phi, K.AndIntro(K.ImpliesElim(ta, K.AndElimL(N(phi))), K.ImpliesElim(tb, K.AndElimR(N(phi)))))
                fro = K.ImpliesIntro(new, K.AndIntro(K.ImpliesElim(fa, K.AndElimL(N(new))), K.ImpliesElim(fb, K.AndElimR(N(new)))))
                return new, to, fro
            case Or(a, b):
                a2, ta, fa = self.reduce(a)
                b2, tb, fb = self.reduce(b)
                new = Or(a2, b2)
                if new == phi:
                    return self._identity(phi)
                to = K.ImpliesIntro(phi, K.OrElim(N(phi), K.OrIntroL(K.ImpliesElim(ta, N(a)), b2), K.OrIntroR(K.ImpliesElim(tb, N(b)), a2)))
                fro = K.ImpliesIntro(new, K.OrElim(N(new), K.OrIntroL(K.ImpliesElim(fa, N(a2)), b), K.OrIntroR(K.ImpliesElim(fb, N(b2)), a)))
                return new, to, fro
            case Implies(a, b):
                a2, ta, fa = self.reduce(a)
                b2, tb, fb = self.reduce(b)
                new = Implies(a2, b2)
                if new == phi:
                    return self._identity(phi)
                to = K.ImpliesIntro(phi, K.ImpliesIntro(a2, K.ImpliesElim(tb, K.ImpliesElim(N(phi), K.ImpliesElim(fa, N(a2))))))
                fro = K.ImpliesIntro(new, K.ImpliesIntro(a, K.ImpliesElim(fb, K.ImpliesElim(N(new), K.ImpliesElim(ta, N(a))))))
                return new, to, fro
            case ForallArr(x, s, body) | ExistsArr(x, s, body):
                return self._quantifier(phi, x, s, body)
        raise ValueError(f"outside the decidable fragment: {phi}")

    def _quantifier(self, phi, x, s, body):
        ax_id, cl, names = self.domains[s]
        consts = [ArrConst(n) for n in names]
        inst = [substitute(body, {x: c}) for c in consts]
        red = [self.reduce(p) for p in inst]
        qs = [r[0] for r in red]
        w = self._fresh()
        wv = ArrVar(w)
        ctx_w = EMPTY_CONTEXT.extend(w, s)
        body_w = substitute(body, {x: wv})
        cl_w = K.ForallArrElim(K.Axiom(ax_id), wv)
        cases = [Eq(wv, c) for c in consts]

        def transport(f, g, eq_proof, from_proof):
            sub = substitution_pf(body, x, f, g, self.sig, ctx_w)
            return K.ImpliesElim(K.ImpliesElim(sub.proof, eq_proof), from_proof)

        if isinstance(phi, ForallArr):
            new = conj(qs)
            to = K.ImpliesIntro(phi, conj_intro([K.ImpliesElim(t, K.ForallArrElim(N(phi), c)) for (_, t, _), c in zip(red, consts)]))
            if not consts:
                inner = K.BotElim(cl_w, body_w)
            else:
                inner = or_cases(
                    cl_w,
                    cases,
                    lambda i: transport(consts[i], wv, K.EqSym(N(cases[i])), K.ImpliesElim(red[i][2], conj_elim(N(new), i, len(qs)))),
                )
            fro = K.ImpliesIntro(new, K.ForallArrIntro(w, s, inner))
            return new, to, fro
        new = disj(qs)
        if not consts:
            to = K.ImpliesIntro(phi, K.ExistsArrElim(N(phi), w, K.BotElim(cl_w, new)))
            fro = K.ImpliesIntro(new, K.BotElim(N(new), phi))
            return new, to, fro
        to = K.ImpliesIntro(
            phi,
            K.ExistsArrElim(
                N(phi),
                w,
                or_cases(
                    cl_w,
                    cases,
                    lambda i: inject(K.ImpliesElim(red[i][1], transport(wv, consts[i], N(cases[i]), N(body_w))), i, qs),
                ),
            ),
        )
        fro = K.ImpliesIntro(new, or_cases(N(new), qs, lambda i: K.ExistsArrIntro(phi, consts[i], K.ImpliesElim(red[i][2], N(qs[i])))))
        return new, to, fro


# --------------------------------------------------------------------------
# propositional search


class G4:
    """Contraction-free intuitionistic sequent search over equational atoms."""

    def __init__(self, sig, ground_axioms):
        self.sig = sig
        self.ground = ground_axioms  # Pf list of closed equations
        self._eq: dict = {}
        self._memo: dict = {}

    def equality(self, atoms: frozenset) -> PathEquality:
        if atoms not in self._eq:
            eqs = list(self.ground) + [Pf(N(a), a) for a in sorted(atoms, key=repr)]
            self._eq[atoms] = PathEquality(self.sig, eqs)
        return self._eq[atoms]

    def entails(self, atoms, a: Eq):
        if a.lhs == a.rhs:
            return K.EqRefl(a.lhs)
        if a in atoms:
            return N(a)
        pf = self.equality(atoms).prove(a.lhs, a.rhs)
        return None if pf is None else pf.proof

    def prove(self, atoms: frozenset, rest: tuple, goal: Formula):
        key = (atoms, rest, goal)
        if key in self._memo:
            return self._memo[key]
        self._memo[key] = None  # guards re-entry on identical sequents
        out = self._prove(atoms, rest, goal)
        self._memo[key] = out
        return out

    def _add(self, atoms, rest, *phis):
        for phi in phis:
            if isinstance(phi, Eq):
                atoms = atoms | {phi}
            elif not isinstance(phi, Top) and phi not in rest:
                rest = rest + (phi,)
        return atoms, rest

    def _prove(self, atoms, rest, goal):
        if isinstance(goal, Eq):
            p = self.entails(atoms, goal)
            if p is not None:
                return p
        for phi in rest:
            if isinstance(phi, Bot):
                return K.BotElim(N(phi), goal)
            if phi == goal:
                return N(phi)
        # invertible left rules
        for i, phi in enumerate(rest):
            others = rest[:i] + rest[i + 1 :]
            match phi:
                case And(a, b):
                    at, rs = self._add(atoms, others, a, b)
                    p = self.prove(at, rs, goal)
                    return None if p is None else cut(a, K.AndElimL(N(phi)), cut(b, K.AndElimR(N(phi)), p))
                case Or(a, b):
                    p = self.prove(*self._add(atoms, others, a), goal)
                    if p is None:
                        return None
                    q = self.prove(*self._add(atoms, others, b), goal)
                    return None if q is None else K.OrElim(N(phi), p, q)
                case Implies(Top(), b):
                    p = self.prove(*self._add(atoms, others, b), goal)
                    return None if p is None else cut(b, K.ImpliesElim(N(phi), K.TopIntro()), p)
                case Implies(Bot(), b):
                    return self.prove(atoms, others, goal)
                case Implies(Eq() as a, b):
                    e = self.entails(atoms, a)
                    if e is not None:
                        p = self.prove(*self._add(atoms, others, b), goal)
                        return None if p is None else cut(b, K.ImpliesElim(N(phi), e), p)
                case Implies(And(c, d), b):
                    new = Implies(c, Implies(d, b))
                    p = self.prove(*self._add(atoms, others, new), goal)
                    if p is None:
                        return None
                    bridge = K.ImpliesIntro(c, K.ImpliesIntro(d, K.ImpliesElim(N(phi), K.AndIntro(N(c), N(d)))))
                    return cut(new, bridge, p)
                case Implies(Or(c, d), b):
                    n1, n2 = Implies(c, b), Implies(d, b)
                    p = self.prove(*self._add(atoms, others, n1, n2), goal)
                    if p is None:
                        return None
                    b1 = K.ImpliesIntro(c, K.ImpliesElim(N(phi), K.OrIntroL(N(c), d)))
                    b2 = K.ImpliesIntro(d, K.ImpliesElim(N(phi), K.OrIntroR(N(d), c)))
                    return cut(n1, b1, cut(n2, b2, p))
        # invertible right rules
        match goal:
            case Top():
                return K.TopIntro()
            case And(a, b):
                p = self.prove(atoms, rest, a)
                q = None if p is None else self.prove(atoms, rest, b)
                return None if q is None else K.AndIntro(p, q)
            case Implies(a, b):
                p = self.prove(*self._add(atoms, rest, a), b)
                return None if p is None else K.ImpliesIntro(a, p)
            case Or(a, b):
                p = self.prove(atoms, rest, a)
                if p is not None:
                    return K.OrIntroL(p, b)
                p = self.prove(atoms, rest, b)
                if p is not None:
                    return K.OrIntroR(p, a)
        # (c => d) => b on the left
        for i, phi in enumerate(rest):
            if isinstance(phi, Implies) and isinstance(phi.left, Implies):
                others = rest[:i] + rest[i + 1 :]
                c, d, b = phi.left.left, phi.left.right, phi.right
                db = Implies(d, b)
                p1 = self.prove(*self._add(atoms, others, db), phi.left)
                if p1 is None:
                    continue
                p2 = self.prove(*self._add(atoms, others, b), goal)
                if p2 is None:
                    continue
                bridge = K.ImpliesIntro(d, K.ImpliesElim(N(phi), K.ImpliesIntro(c, N(d))))
                return cut(db, bridge, cut(b, K.ImpliesElim(N(phi), p1), p2))
        return None


# --------------------------------------------------------------------------
# the oracle


def _closed_eq(phi) -> bool:
    return isinstance(phi, Eq) and not free_vars(phi)


class CongruenceOracle(Oracle):
    """Decides closed formulas without object quantifiers over enumerated theories.

    The theory is *enumerated* when every hom between its object constants has
    a domain-closure axiom, every composite of two constants and every
    identity reduces to a constant through its closed equations, and all its
    other axioms avoid object quantifiers.  ``complete_for`` holds exactly
    there; elsewhere ``Unknown`` is not a refutation.
    """

    def __init__(self, theory):
        self.theory = theory
        self.sig = theory.signature
        self.reducer = Reducer(theory)
        self.ground = [Pf(K.Axiom(a), phi) for a, phi in theory.axioms.items() if _closed_eq(phi)]
        self.g4 = G4(self.sig, self.ground)
        closures = {a for a, phi in theory.axioms.items() if closure_shape(phi) and self.reducer.domains.get(phi.sort, (None,))[0] == a}
        self.extra = [
            (a, phi)
            for a, phi in theory.axioms.items()
            if a not in closures and not _closed_eq(phi)
        ]
        self.usable = [(a, phi) for a, phi in self.extra if self.reducer.in_fragment(phi)]
        self.enumerated = len(self.usable) == len(self.extra) and self._table_total()
        self._cache: dict = {}

    def _table_total(self) -> bool:
        sig = self.sig
        for a in sig.objects:
            for b in sig.objects:
                if ArrowSort(ObjConst(a), ObjConst(b)) not in self.reducer.domains:
                    return False
        eq = self.g4.equality(frozenset())
        consts = [(ArrConst(n), s) for n, s in sig.arrows]
        probes = [Id(ObjConst(o)) for o in sig.objects]
        probes += [Comp(g, f) for g, sg in consts for f, sf in consts if sf.cod == sg.dom]
        for t in probes:
            if not any(len(p) == 1 for p, _, _ in eq.representatives(t, 2)):
                return False
        return True

    def in_fragment(self, phi) -> bool:
        return self.reducer.in_fragment(phi)

    def complete_for(self, phi) -> bool:
        return self.enumerated and self.in_fragment(phi)

    def query(self, phi):
        if phi in self._cache:
            return self._cache[phi]
        out = self._query(phi)
        self._cache[phi] = out
        return out

    def _query(self, phi):
        if free_vars(phi) or not self.in_fragment(phi):
            return Unknown("outside the decidable fragment")
        new, _, fro = self.reducer.reduce(phi)
        atoms, rest = frozenset(), ()
        reduced_axioms = []
        for a, ax in self.usable:
            ax2, to, _ = self.reducer.reduce(ax)
            reduced_axioms.append((a, ax2, to))
            atoms, rest = self.g4._add(atoms, rest, ax2)
        p = self.g4.prove(atoms, rest, new)
        if p is None:
            return Unknown("refuted" if self.complete_for(phi) else "not found")
        proof = K.ImpliesElim(fro, p)
        for a, ax2, to in reversed(reduced_axioms):
            proof = cut(ax2, K.ImpliesElim(to, K.Axiom(a)), proof)
        return self._verified(phi, close(self.theory, EMPTY_CONTEXT, proof))
