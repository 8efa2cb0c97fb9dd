"""Context renaming, context isomorphisms and unique existence up to unique iso.

Given a context Δ over an ambient Γ, a context isomorphism between two
renamed copies Δ₁ and Δ₂ picks one arrow ``f_V : V₁ -> V₂`` per object
variable V of Δ, subject to naturality squares for the arrow variables and
invertibility of every component.  :func:`transport_proof` produces kernel
proofs that every formula is invariant under such isomorphisms.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace

from . import kernel as K
from .derive import BareTheory, Eqn, Pf, close, substitution_pf
from .syntax import (
    EMPTY_SIGNATURE,
    And,
    ArrowSort,
    ArrVar,
    Bot,
    Comp,
    Context,
    Decl,
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
    Signature,
    Top,
    conj,
    free_vars,
    fresh_name,
    infer_sort,
    subst_sort,
    subst_term,
    substitute,
)

# --------------------------------------------------------------------------
# renaming


def renaming(delta: Context, tag, avoid=()) -> tuple[Context, dict]:
    """Rename every variable of ``delta`` to ``<name>_<tag>``, avoiding ``avoid``."""
    taken = set(avoid) | set(delta.names())
    names = {}
    decls = []
    for d in delta.decls:
        new = fresh_name(f"{d.var}_{tag}", taken) if f"{d.var}_{tag}" in taken else f"{d.var}_{tag}"
        taken.add(new)
        names[d.var] = new
        decls.append(Decl(new, d.sort if d.is_obj else _rename_sort(d.sort, names)))
    return Context(tuple(decls)), names


def _rename_sort(s: ArrowSort, names: dict) -> ArrowSort:
    return subst_sort(s, {k: ObjVar(v) for k, v in names.items()})


def rename_context(delta: Context, tag, avoid=()) -> Context:
    return renaming(delta, tag, avoid)[0]


def _var_map(delta: Context, names: dict) -> dict:
    return {d.var: (ObjVar(names[d.var]) if d.is_obj else ArrVar(names[d.var])) for d in delta.decls}


# --------------------------------------------------------------------------
# isomorphism conditions


@dataclass(frozen=True)
class ContextIso:
    """The data of ``τ : Δ₁ ≅ Δ₂``: renamed copies and one component per object variable."""

    ambient: Context
    delta: Context
    source: Context
    target: Context
    rho1: dict
    rho2: dict
    components: dict  # object variable of delta -> component variable name

    @property
    def tau(self) -> Context:
        return Context(tuple(Decl(c, self.component_sort(v)) for v, c in self.components.items()))

    @property
    def context(self) -> Context:
        return self.ambient + self.source + self.target + self.tau

    def component_sort(self, v) -> ArrowSort:
        return ArrowSort(self.rho1[v], self.rho2[v])

    def component(self, obj):
        """``τ_S`` for an object term: the component, or ``1_S`` for ambient objects."""
        if isinstance(obj, ObjVar) and obj.name in self.components:
            return ArrVar(self.components[obj.name])
        return Id(obj)

    def side(self, t, which):
        rho = self.rho1 if which == 1 else self.rho2
        if isinstance(t, ObjVar):
            return rho.get(t.name, t)
        return substitute(t, rho) if isinstance(t, Formula) else subst_term(t, rho)

    def squares(self) -> list:
        out = []
        for d in self.delta.decls:
            if d.is_obj:
                continue
            a1, a2 = self.rho1[d.var], self.rho2[d.var]
            out.append(Eq(Comp(a2, self.component(d.sort.dom)), Comp(self.component(d.sort.cod), a1)))
        return out

    def invertibility(self, v, inv_name=None) -> Formula:
        f = ArrVar(self.components[v])
        s = self.component_sort(v)
        g = inv_name or fresh_name("g", set(self.context.names()))
        body = And(Eq(Comp(ArrVar(g), f), Id(s.dom)), Eq(Comp(f, ArrVar(g)), Id(s.cod)))
        return ExistsArr(g, ArrowSort(s.cod, s.dom), body)

    def condition(self) -> Formula:
        return conj(self.squares() + [self.invertibility(v) for v in self.components])


def make_iso(gamma: Context, delta: Context, tags=(1, 2), avoid=()) -> ContextIso:
    taken = set(avoid) | set(gamma.names())
    d1, n1 = renaming(delta, tags[0], taken)
    taken |= set(d1.names())
    d2, n2 = renaming(delta, tags[1], taken)
    taken |= set(d2.names()) | set(delta.names())
    comps = {}
    for v in delta.object_vars():
        name = fresh_name(f"f_{v}", taken) if f"f_{v}" in taken else f"f_{v}"
        taken.add(name)
        comps[v] = name
    return ContextIso(gamma, delta, d1, d2, _var_map(delta, n1), _var_map(delta, n2), comps)


def iso_formula(gamma: Context, delta: Context, avoid=()) -> tuple[Context, Formula]:
    """``(τctx, cond)``: the context ``(Γ, Δ₁, Δ₂, τ)`` and the iso condition."""
    iso = make_iso(gamma, delta, avoid=avoid)
    return iso.context, iso.condition()


# --------------------------------------------------------------------------
# binder helpers


def forall_ctx(c: Context, body: Formula) -> Formula:
    for d in reversed(c.decls):
        body = ForallObj(d.var, body) if d.is_obj else ForallArr(d.var, d.sort, body)
    return body


def exists_ctx(c: Context, body: Formula) -> Formula:
    for d in reversed(c.decls):
        body = ExistsObj(d.var, body) if d.is_obj else ExistsArr(d.var, d.sort, body)
    return body


def expand_unique_exists(gamma: Context, delta: Context, P: Formula) -> Formula:
    """``∃!Δ P`` spelled out in the base language."""
    avoid = set(gamma.names()) | free_vars(P) | _bound_names(P)
    iso = make_iso(gamma, delta, avoid=avoid)
    avoid |= set(iso.context.names())
    # the second τ shares Δ₁ and Δ₂ with the first, only its components differ
    comps2 = {}
    taken = set(iso.context.names()) | avoid
    for v, c in iso.components.items():
        n = fresh_name(c, taken)
        taken.add(n)
        comps2[v] = n
    iso2 = replace(iso, components=comps2)
    P1, P2 = iso.side(P, 1), iso.side(P, 2)
    same = conj(Eq(ArrVar(iso.components[v]), ArrVar(comps2[v])) for v in iso.components)
    unique = forall_ctx(iso2.tau, Implies(iso2.condition(), same))
    exists_tau = exists_ctx(iso.tau, And(iso.condition(), unique))
    both = forall_ctx(iso.source, forall_ctx(iso.target, Implies(And(P1, P2), exists_tau)))
    return And(exists_ctx(delta, P), both)


def _bound_names(phi) -> set:
    match phi:
        case ForallObj(v, b) | ExistsObj(v, b) | ForallArr(v, _, b) | ExistsArr(v, _, b):
            return {v} | _bound_names(b)
        case And(a, b) | Or(a, b) | Implies(a, b):
            return _bound_names(a) | _bound_names(b)
    return set()


# --------------------------------------------------------------------------
# transport


@dataclass
class _Situation:
    """Proof-time data: both renderings of every variable plus the iso evidence."""

    eqn: Eqn
    rho1: dict
    rho2: dict
    fwd: dict = field(default_factory=dict)  # object name -> f_S
    bwd: dict = field(default_factory=dict)  # object name -> g_S
    inv1: dict = field(default_factory=dict)  # g_S o f_S = 1
    inv2: dict = field(default_factory=dict)  # f_S o g_S = 1
    square: dict = field(default_factory=dict)  # arrow name -> a2 o f_A = f_B o a1
    sorts: dict = field(default_factory=dict)  # arrow name -> sort in the base language

    def flipped(self) -> "_Situation":
        e = self.eqn
        sq = {a: self._reverse_square(a) for a in self.square}
        return _Situation(e, self.rho2, self.rho1, self.bwd, self.fwd, self.inv2, self.inv1, sq, self.sorts)

    def f(self, obj):
        if isinstance(obj, ObjVar) and obj.name in self.fwd:
            return self.fwd[obj.name]
        return Id(self.obj(obj, 1))

    def g(self, obj):
        if isinstance(obj, ObjVar) and obj.name in self.bwd:
            return self.bwd[obj.name]
        return Id(self.obj(obj, 1))

    def obj(self, o, which):
        rho = self.rho1 if which == 1 else self.rho2
        return rho.get(o.name, o) if isinstance(o, ObjVar) else o

    def term(self, t, which):
        return subst_term(t, self.rho1 if which == 1 else self.rho2)

    def inv(self, obj, which):
        """``g o f = 1`` (which=1) or ``f o g = 1`` (which=2) at ``obj``."""
        e = self.eqn
        if isinstance(obj, ObjVar) and obj.name in self.fwd:
            return (self.inv1 if which == 1 else self.inv2)[obj.name]
        o = self.obj(obj, which)
        return e.sym(e.idl(Id(o)))

    def _reverse_square(self, a):
        """From ``a2 o f_A = f_B o a1`` derive ``a1 o g_A = g_B o a2``."""
        e = self.eqn
        srt = self.sorts[a]
        A, B = srt.dom, srt.cod
        a1, a2 = self.term(ArrVar(a), 1), self.term(ArrVar(a), 2)
        fA, gA, gB = self.f(A), self.g(A), self.g(B)
        fB = self.f(B)
        # a1 o g_A = (g_B o f_B) o a1 o g_A = g_B o (a2 o f_A) o g_A = g_B o a2
        s1 = e.trans(e.idl(Comp(a1, gA)), e.cong(e.sym(self.inv(B, 1)), e.refl(Comp(a1, gA))))
        s1 = e.trans(s1, e.reassoc(s1.concl.rhs, Comp(gB, Comp(Comp(fB, a1), gA))))
        s2 = e.cong(e.refl(gB), e.cong(e.sym(self.square[a]), e.refl(gA)))
        s3 = e.reassoc(s2.concl.rhs, Comp(gB, Comp(a2, Comp(fA, gA))))
        s4 = e.cong(e.refl(gB), e.cong(e.refl(a2), self.inv(A, 2)))
        s5 = e.cong(e.refl(gB), e.sym(e.idr(a2)))
        return e.chain(s1, s2, s3, s4, s5)

    def naturality(self, t) -> Pf:
        """``t2 o f_A = f_B o t1`` for an arrow term ``t : A -> B``."""
        e = self.eqn
        match t:
            case ArrVar(n) if n in self.square:
                return self.square[n]
            case Id(o):
                fo = self.f(o)
                return e.trans(e.sym(e.idl(fo)), e.idr(fo))
            case Comp(g, h):
                sh = self._sort(h)
                A, B, C = sh.dom, sh.cod, self._sort(g).cod
                g1, g2, h1, h2 = self.term(g, 1), self.term(g, 2), self.term(h, 1), self.term(h, 2)
                fA, fB, fC = self.f(A), self.f(B), self.f(C)
                return e.chain(
                    e.sym(e.assoc(g2, h2, fA)),
                    e.cong(e.refl(g2), self.naturality(h)),
                    e.assoc(g2, fB, h1),
                    e.cong(self.naturality(g), e.refl(h1)),
                    e.sym(e.assoc(fC, g1, h1)),
                )
        # constants and ambient variables live entirely in Γ
        return e.trans(e.sym(e.idr(t)), e.idl(t))

    def _sort(self, t) -> ArrowSort:
        """Sort of a base-language arrow term, read off world 1 and mapped back."""
        match t:
            case ArrVar(n) if n in self.sorts:
                return self.sorts[n]
            case Id(o):
                return ArrowSort(o, o)
            case Comp(g, h):
                return ArrowSort(self._sort(h).dom, self._sort(g).cod)
        return infer_sort(e_sig(self.eqn), self.eqn.ctx, t)

    def conjugate(self, t) -> Pf:
        """``t2 = (f_B o t1) o g_A``."""
        e = self.eqn
        srt = self._sort(t)
        A = srt.dom
        t2 = self.term(t, 2)
        fA, gA = self.f(A), self.g(A)
        return e.chain(
            e.idr(t2),
            e.cong(e.refl(t2), e.sym(self.inv(A, 2))),
            e.assoc(t2, fA, gA),
            e.cong(self.naturality(t), e.refl(gA)),
        )

    def with_eqn(self, ctx) -> "_Situation":
        return replace(self, eqn=self.eqn.under(ctx), fwd=dict(self.fwd), bwd=dict(self.bwd),
                       inv1=dict(self.inv1), inv2=dict(self.inv2), square=dict(self.square),
                       rho1=dict(self.rho1), rho2=dict(self.rho2), sorts=dict(self.sorts))


def e_sig(eqn: Eqn) -> Signature:
    return eqn.sig


def _imp(P1, P2, body_proof) -> Pf:
    return Pf(K.ImpliesIntro(P1, body_proof), Implies(P1, P2))


def _transport(P: Formula, sit: _Situation, avoid: set) -> Pf:
    """``P1 => P2`` in the situation's context, citing iso evidence by name."""
    e = sit.eqn
    P1 = substitute(P, sit.rho1)
    P2 = substitute(P, sit.rho2)
    match P:
        case Top():
            return _imp(P1, P2, K.TopIntro())
        case Bot():
            return _imp(P1, P2, K.Named(P1))
        case Eq(t, u):
            x = fresh_name("x", avoid | set(e.ctx.names()))
            srt = sit._sort(t)
            fB, gA = sit.f(srt.cod), sit.g(srt.dom)
            t2 = sit.term(t, 2)
            pattern = Eq(t2, Comp(Comp(fB, ArrVar(x)), gA))
            t1, u1 = sit.term(t, 1), sit.term(u, 1)
            sub = substitution_pf(pattern, x, t1, u1, e.sig, e.ctx)
            step = K.ImpliesElim(K.ImpliesElim(sub.proof, K.Named(P1)), sit.conjugate(t).proof)
            mid = Pf(step, Eq(t2, Comp(Comp(fB, u1), gA)))
            return _imp(P1, P2, e.trans(mid, e.sym(sit.conjugate(u))).proof)
        case And(a, b):
            pa, pb = _transport(a, sit, avoid), _transport(b, sit, avoid)
            h = K.Named(P1)
            return _imp(P1, P2, K.AndIntro(K.ImpliesElim(pa.proof, K.AndElimL(h)), K.ImpliesElim(pb.proof, K.AndElimR(h))))
        case Or(a, b):
            pa, pb = _transport(a, sit, avoid), _transport(b, sit, avoid)
            proof = K.OrElim(
                K.Named(P1),
                K.OrIntroL(K.ImpliesElim(pa.proof, K.Named(pa.concl.left)), pb.concl.right),
                K.OrIntroR(K.ImpliesElim(pb.proof, K.Named(pb.concl.left)), pa.concl.right),
            )
            return _imp(P1, P2, proof)
        case Implies(a, b):
            back = _transport(a, sit.flipped(), avoid)
            pb = _transport(b, sit, avoid)
            a2 = back.concl.left
            inner = K.ImpliesElim(pb.proof, K.ImpliesElim(K.Named(P1), K.ImpliesElim(back.proof, K.Named(a2))))
            return _imp(P1, P2, K.ImpliesIntro(a2, inner))
        case ForallObj(v, body) | ExistsObj(v, body):
            w = fresh_name(v, avoid | set(e.ctx.names()))
            sit2 = sit.with_eqn(e.ctx.extend(w))
            sit2.rho1[v] = sit2.rho2[v] = ObjVar(w)
            sit2.fwd.pop(v, None)
            sit2.bwd.pop(v, None)
            sit2.square = {k: s for k, s in sit2.square.items() if k != v}
            inner = _transport(body, sit2, avoid | {w})
            if isinstance(P, ForallObj):
                proof = K.ForallObjIntro(w, K.ImpliesElim(inner.proof, K.ForallObjElim(K.Named(P1), ObjVar(w))))
            else:
                proof = K.ExistsObjElim(
                    K.Named(P1), w, K.ExistsObjIntro(P2, ObjVar(w), K.ImpliesElim(inner.proof, K.Named(inner.concl.left)))
                )
            return _imp(P1, P2, proof)
        case ForallArr(v, srt, body) | ExistsArr(v, srt, body):
            w = fresh_name(v, avoid | set(e.ctx.names()))
            s1 = ArrowSort(sit.obj(srt.dom, 1), sit.obj(srt.cod, 1))
            s2 = ArrowSort(sit.obj(srt.dom, 2), sit.obj(srt.cod, 2))
            A, B = srt.dom, srt.cod
            fA, fB, gA, gB = sit.f(A), sit.f(B), sit.g(A), sit.g(B)
            universal = isinstance(P, ForallArr)
            sit2 = sit.with_eqn(e.ctx.extend(w, s2 if universal else s1))
            sit2.sorts[v] = srt
            ev = sit2.eqn
            if universal:
                # the eigenvariable lives in world 2; world 1 sees g_B o w o f_A
                a2, a1 = ArrVar(w), Comp(gB, Comp(ArrVar(w), fA))
                sq = ev.chain(
                    ev.idl(Comp(a2, fA)),
                    ev.cong(ev.sym(sit.inv(B, 2)), ev.refl(Comp(a2, fA))),
                    ev.reassoc(Comp(Comp(fB, gB), Comp(a2, fA)), Comp(fB, a1)),
                )
            else:
                a1, a2 = ArrVar(w), Comp(fB, Comp(ArrVar(w), gA))
                sq = ev.chain(
                    ev.reassoc(Comp(a2, fA), Comp(Comp(fB, a1), Comp(gA, fA))),
                    ev.cong(ev.refl(Comp(fB, a1)), sit.inv(A, 1)),
                    ev.sym(ev.idr(Comp(fB, a1))),
                )
            sit2.rho1[v], sit2.rho2[v] = a1, a2
            sit2.square[v] = sq
            inner = _transport(body, sit2, avoid | {w})
            if universal:
                proof = K.ForallArrIntro(w, s2, K.ImpliesElim(inner.proof, K.ForallArrElim(K.Named(P1), a1)))
            else:
                proof = K.ExistsArrElim(
                    K.Named(P1), w, K.ExistsArrIntro(P2, a2, K.ImpliesElim(inner.proof, K.Named(inner.concl.left)))
                )
            return _imp(P1, P2, proof)
    raise TypeError(P)


def transport_formula(gamma: Context, delta: Context, P: Formula, iso: ContextIso | None = None) -> Formula:
    iso = iso or make_iso(gamma, delta, avoid=free_vars(P) | _bound_names(P))
    P1, P2 = iso.side(P, 1), iso.side(P, 2)
    body = Implies(iso.condition(), And(Implies(P1, P2), Implies(P2, P1)))
    return forall_ctx(iso.source, forall_ctx(iso.target, forall_ctx(iso.tau, body)))


def transport_proof(gamma: Context, delta: Context, P: Formula, sig: Signature = EMPTY_SIGNATURE):
    """Kernel proof, in context Γ, of ``∀Δ₁ ∀Δ₂ ∀τ (cond => (P₁ => P₂) ∧ (P₂ => P₁))``."""
    avoid = free_vars(P) | _bound_names(P)
    iso = make_iso(gamma, delta, avoid=avoid)
    full = iso.context
    avoid |= set(full.names()) | set(sig.object_names) | set(sig.arrow_names)
    cond = iso.condition()
    squares = iso.squares()
    comps = list(iso.components.items())
    parts = squares + [iso.invertibility(v) for v, _ in comps]
    # names for the inverses, bound by existential elimination
    inv_names = {}
    for v, _ in comps:
        n = fresh_name(f"g_{v}", avoid)
        avoid.add(n)
        inv_names[v] = n
    inner_ctx = full
    for v, c in comps:
        inner_ctx = inner_ctx.extend(inv_names[v], ArrowSort(iso.rho2[v], iso.rho1[v]))
    eqn = Eqn(sig, inner_ctx)
    sit = _Situation(eqn, dict(iso.rho1), dict(iso.rho2))
    for d in delta.decls:
        if not d.is_obj:
            sit.sorts[d.var] = d.sort
    for v, c in comps:
        f, g = ArrVar(c), ArrVar(inv_names[v])
        sit.fwd[v], sit.bwd[v] = f, g
        s = iso.component_sort(v)
        both = And(Eq(Comp(g, f), Id(s.dom)), Eq(Comp(f, g), Id(s.cod)))
        sit.inv1[v] = Pf(K.AndElimL(K.Named(both)), both.left)
        sit.inv2[v] = Pf(K.AndElimR(K.Named(both)), both.right)
    hyp = K.Named(cond)
    for i, (d, sq) in enumerate(zip([d for d in delta.decls if not d.is_obj], squares)):
        sit.square[d.var] = Pf(_conjunct(hyp, i, len(parts)), sq)
    fwd = _transport(P, sit, set(avoid))
    bwd = _transport(P, sit.flipped(), set(avoid))
    body = K.AndIntro(fwd.proof, bwd.proof)
    # open the invertibility witnesses, innermost last
    for j in reversed(range(len(comps))):
        v, _ = comps[j]
        inv = iso.invertibility(v)
        renamed = ExistsArr(inv_names[v], inv.sort, substitute(inv.body, {inv.var: ArrVar(inv_names[v])}))
        body = K.ExistsArrElim(_conjunct(hyp, len(squares) + j, len(parts)), renamed.var, body)
    proof = K.ImpliesIntro(cond, body)
    for d in reversed((iso.source + iso.target + iso.tau).decls):
        proof = K.ForallObjIntro(d.var, proof) if d.is_obj else K.ForallArrIntro(d.var, d.sort, proof)
    return close(BareTheory(sig), gamma, proof)


def _conjunct(h, i, n):
    for _ in range(i):
        h = K.AndElimR(h)
    return K.AndElimL(h) if i < n - 1 else h
