"""Proof-building helpers: equational reasoning in a category and substitution.

Builders return :class:`Pf` pairs (proof, conclusion).  Hypotheses are cited
with :class:`~catslash.kernel.Named`; :func:`close` turns the result into a
positional proof the kernel accepts.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

from . import kernel as K
from .syntax import (
    EMPTY_CONTEXT,
    EMPTY_SIGNATURE,
    TOP,
    And,
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
    Signature,
    Top,
    WellFormednessError,
    free_vars,
    fresh_name,
    infer_sort,
    substitute,
    term_vars,
)


class Pf(NamedTuple):
    proof: object
    concl: Formula


@dataclass(frozen=True)
class BareTheory:
    """A signature with no axioms beyond the built-in ones."""

    signature: Signature = EMPTY_SIGNATURE

    def axiom(self, ax_id):
        return None


def named(phi: Formula) -> Pf:
    return Pf(K.Named(phi), phi)


def close(theory, ctx: Context, pf, hyps=()) -> object:
    """Resolve named hypotheses against ``hyps`` and return the bare proof."""
    proof = pf.proof if isinstance(pf, Pf) else pf
    return K.resolve_named(theory, ctx, tuple(hyps), proof)


class SortMismatch(WellFormednessError):
    kind = "SortMismatch"


class Eqn:
    """Equational reasoning modulo the category laws, in a fixed context."""

    def __init__(self, sig: Signature, ctx: Context):
        self.sig = sig
        self.ctx = ctx

    def under(self, ctx: Context) -> "Eqn":
        return Eqn(self.sig, ctx)

    def sort(self, t):
        return infer_sort(self.sig, self.ctx, t)

    # primitive steps
    def refl(self, t) -> Pf:
        return Pf(K.EqRefl(t), Eq(t, t))

    def sym(self, p: Pf) -> Pf:
        if isinstance(p.proof, K.EqRefl):
            return p
        if isinstance(p.proof, K.EqSym):
            return Pf(p.proof.p, Eq(p.concl.rhs, p.concl.lhs))
        return Pf(K.EqSym(p.proof), Eq(p.concl.rhs, p.concl.lhs))

    def trans(self, p: Pf, q: Pf) -> Pf:
        assert p.concl.rhs == q.concl.lhs, (p.concl, q.concl)
        if isinstance(p.proof, K.EqRefl):
            return q
        if isinstance(q.proof, K.EqRefl):
            return p
        return Pf(K.EqTrans(p.proof, q.proof), Eq(p.concl.lhs, q.concl.rhs))

    def chain(self, *ps: Pf) -> Pf:
        out = ps[0]
        for p in ps[1:]:
            out = self.trans(out, p)
        return out

    def cong(self, pg: Pf, pf: Pf) -> Pf:
        lhs = Comp(pg.concl.lhs, pf.concl.lhs)
        rhs = Comp(pg.concl.rhs, pf.concl.rhs)
        if isinstance(pg.proof, K.EqRefl) and isinstance(pf.proof, K.EqRefl):
            return self.refl(lhs)
        return Pf(K.EqCongComp(pg.proof, pf.proof), Eq(lhs, rhs))

    def assoc(self, h, g, f) -> Pf:
        """``h o (g o f) = (h o g) o f``."""
        sf, sg, sh = self.sort(f), self.sort(g), self.sort(h)
        p = K.Axiom("cat.assoc")
        for o in (sf.dom, sf.cod, sg.cod, sh.cod):
            p = K.ForallObjElim(p, o)
        for a in (f, g, h):
            p = K.ForallArrElim(p, a)
        return Pf(p, Eq(Comp(h, Comp(g, f)), Comp(Comp(h, g), f)))

    def _ident(self, f):
        s = self.sort(f)
        return K.ForallArrElim(K.ForallObjElim(K.ForallObjElim(K.Axiom("cat.id"), s.dom), s.cod), f), s

    def idl(self, f) -> Pf:
        """``f = id o f``."""
        p, s = self._ident(f)
        return Pf(K.AndElimL(p), Eq(f, Comp(Id(s.cod), f)))

    def idr(self, f) -> Pf:
        """``f = f o id``."""
        p, s = self._ident(f)
        return Pf(K.AndElimR(p), Eq(f, Comp(f, Id(s.dom))))

    # paths: lists of atomic arrows, outermost first
    @staticmethod
    def path_term(path, dom):
        if not path:
            return Id(dom)
        out = path[-1]
        for a in reversed(path[:-1]):
            out = Comp(a, out)
        return out

    def normalize(self, t):
        """Return ``(path, Pf(t = path_term(path)))``."""
        match t:
            case Id():
                return [], self.refl(t)
            case Comp(g, f):
                pg, eg = self.normalize(g)
                pf, ef = self.normalize(f)
                step = self.cong(eg, ef)
                dom = self.sort(f).dom
                return pg + pf, self.trans(step, self._append(pg, pf, dom, self.sort(g).dom))
        return [t], self.refl(t)

    def _append(self, l1, l2, dom, mid) -> Pf:
        """``path(l1) o path(l2) = path(l1 + l2)``; ``mid`` is the shared endpoint."""
        left = self.path_term(l1, mid)
        right = self.path_term(l2, dom)
        if not l1:
            return self.sym(self.idl(right))
        if not l2:
            return self.sym(self.idr(left))
        if len(l1) == 1:
            return self.refl(Comp(left, right))
        a, rest = l1[0], l1[1:]
        rest_t = self.path_term(rest, mid)
        step = self.sym(self.assoc(a, rest_t, right))
        inner = self._append(rest, l2, dom, mid)
        return self.trans(step, self.cong(self.refl(a), inner))

    def by_normalization(self, s, t):
        """A proof of ``s = t`` when both sides have the same normal form, else ``None``."""
        ps, es = self.normalize(s)
        pt, et = self.normalize(t)
        if ps != pt or self.sort(s) != self.sort(t):
            return None
        return self.trans(es, self.sym(et))

    def reassoc(self, s, t) -> Pf:
        out = self.by_normalization(s, t)
        if out is None:
            raise SortMismatch(s, t)
        return out

    def rewrite(self, path, i, k, seg_eq: Pf, dom):
        """Rewrite ``path[i:i+k]`` using ``seg_eq``, a proof of ``seg = new``.

        Returns ``(new_path, Pf(path_term(path) = path_term(new_path)))``; the
        right side of ``seg_eq`` is normalized first.
        """
        pre, seg, post = path[:i], path[i : i + k], path[i + k :]
        whole = self.path_term(path, dom)
        post_t = self.path_term(post, dom)
        seg_dom = self.sort(post_t).cod
        seg_t = self.path_term(seg, seg_dom)
        assert seg_eq.concl.lhs == seg_t, (seg_eq.concl.lhs, seg_t)
        new_seg, norm_new = self.normalize(seg_eq.concl.rhs)
        seg_eq = self.trans(seg_eq, norm_new)
        pre_dom = self.sort(seg_t).cod
        pre_t = self.path_term(pre, pre_dom)
        framed = Comp(pre_t, Comp(seg_t, post_t))
        to_frame = self.reassoc(whole, framed)
        swapped = self.cong(self.refl(pre_t), self.cong(seg_eq, self.refl(post_t)))
        new_path = pre + new_seg + post
        from_frame = self.reassoc(swapped.concl.rhs, self.path_term(new_path, dom))
        return new_path, self.chain(to_frame, swapped, from_frame)


# --------------------------------------------------------------------------
# substitution property of equality


def derive_substitution(
    P: Formula,
    x: str,
    f,
    g,
    sig: Signature = EMPTY_SIGNATURE,
    ctx: Context = EMPTY_CONTEXT,
):
    """Proof of ``f = g => P[f/x] => P[g/x]`` by induction on ``P``.

    ``ctx`` declares the free variables of ``P`` (other than ``x``), ``f`` and
    ``g``.  Raises :class:`SortMismatch` unless ``f`` and ``g`` share a sort.
    """
    eqn = Eqn(sig, ctx)
    sf, sg = eqn.sort(f), eqn.sort(g)
    if sf != sg:
        raise SortMismatch(sf, sg)
    d = ctx.lookup(x)
    if d is not None and d.sort != sf:
        raise SortMismatch(d.sort, sf)
    return close(BareTheory(sig), ctx, substitution_pf(P, x, f, g, sig, ctx))


def substitution_pf(P, x, f, g, sig=EMPTY_SIGNATURE, ctx=EMPTY_CONTEXT) -> Pf:
    """Unresolved form of :func:`derive_substitution`, for embedding in larger proofs."""
    eqn = Eqn(sig, ctx)
    hyp = Eq(f, g)
    fwd = named(hyp)
    body = _subst_imp(eqn, P, x, f, g, fwd, eqn.sym(fwd), _avoid(sig, ctx, f, g))
    return Pf(K.ImpliesIntro(hyp, body.proof), Implies(hyp, body.concl))


def substitution_formula(P: Formula, x: str, f, g) -> Formula:
    return Implies(Eq(f, g), Implies(substitute(P, {x: f}), substitute(P, {x: g})))


def _avoid(sig, ctx, *terms):
    out = set(ctx.names()) | set(sig.object_names) | set(sig.arrow_names)
    for t in terms:
        out |= term_vars(t)
    return out


def _term_cong(eqn, t, x, fwd):
    match t:
        case ArrVar(n) if n == x:
            return fwd
        case Comp(a, b):
            return eqn.cong(_term_cong(eqn, a, x, fwd), _term_cong(eqn, b, x, fwd))
    return eqn.refl(t)


def _identity(phi) -> Pf:
    return Pf(K.ImpliesIntro(phi, K.Named(phi)), Implies(phi, phi))


def _subst_imp(eqn, P, x, f, g, fwd, bwd, avoid) -> Pf:
    """``P[f/x] => P[g/x]`` given proofs ``fwd: f = g`` and ``bwd: g = f``."""
    Pf_ = substitute(P, {x: f})
    Pg = substitute(P, {x: g})
    if isinstance(P, Top):
        return Pf(K.ImpliesIntro(TOP, K.TopIntro()), Implies(TOP, TOP))
    if x not in free_vars(P):
        return _identity(P)
    rec = lambda Q, fw=fwd, bw=bwd, e=eqn, av=avoid: _subst_imp(e, Q, x, f, g, fw, bw, av)  # noqa: E731
    match P:
        case Eq(l, r):
            cl = _term_cong(eqn, l, x, fwd)
            cr = _term_cong(eqn, r, x, fwd)
            chain = eqn.chain(eqn.sym(cl), named(Pf_), cr)
            return Pf(K.ImpliesIntro(Pf_, chain.proof), Implies(Pf_, Pg))
        case And(a, b):
            h = K.Named(Pf_)
            pa, pb = rec(a), rec(b)
            proof = K.AndIntro(K.ImpliesElim(pa.proof, K.AndElimL(h)), K.ImpliesElim(pb.proof, K.AndElimR(h)))
            return Pf(K.ImpliesIntro(Pf_, proof), Implies(Pf_, Pg))
        case Or(a, b):
            pa, pb = rec(a), rec(b)
            af, bf = pa.concl.left, pb.concl.left
            ag, bg = pa.concl.right, pb.concl.right
            proof = K.OrElim(
                K.Named(Pf_),
                K.OrIntroL(K.ImpliesElim(pa.proof, K.Named(af)), bg),
                K.OrIntroR(K.ImpliesElim(pb.proof, K.Named(bf)), ag),
            )
            return Pf(K.ImpliesIntro(Pf_, proof), Implies(Pf_, Pg))
        case Implies(a, b):
            back = _subst_imp(eqn, a, x, g, f, bwd, fwd, avoid)  # a[g] => a[f]
            pb = rec(b)
            ag = back.concl.left
            inner = K.ImpliesElim(pb.proof, K.ImpliesElim(K.Named(Pf_), K.ImpliesElim(back.proof, K.Named(ag))))
            return Pf(K.ImpliesIntro(Pf_, K.ImpliesIntro(ag, inner)), Implies(Pf_, Pg))
        case ForallObj(v, body) | ExistsObj(v, body) | ForallArr(v, _, body) | ExistsArr(v, _, body):
            is_obj = isinstance(P, (ForallObj, ExistsObj))
            v2 = fresh_name(v, avoid | free_vars(P))
            var = ObjVar(v2) if is_obj else ArrVar(v2)
            body2 = substitute(body, {v: var}) if v2 != v else body
            ctx2 = eqn.ctx.extend(v2) if is_obj else eqn.ctx.extend(v2, P.sort)
            sub = _subst_imp(eqn.under(ctx2), body2, x, f, g, fwd, bwd, avoid | {v2})
            bf, bg = sub.concl.left, sub.concl.right
            if isinstance(P, ForallObj):
                proof = K.ForallObjIntro(v2, K.ImpliesElim(sub.proof, K.ForallObjElim(K.Named(Pf_), var)))
            elif isinstance(P, ForallArr):
                proof = K.ForallArrIntro(v2, P.sort, K.ImpliesElim(sub.proof, K.ForallArrElim(K.Named(Pf_), var)))
            else:
                intro = K.ExistsObjIntro if is_obj else K.ExistsArrIntro
                proof = (K.ExistsObjElim if is_obj else K.ExistsArrElim)(
                    K.Named(Pf_), v2, intro(Pg, var, K.ImpliesElim(sub.proof, K.Named(bf)))
                )
            return Pf(K.ImpliesIntro(Pf_, proof), Implies(Pf_, Pg))
    if isinstance(P, Bot):
        return _identity(P)
    raise TypeError(P)
