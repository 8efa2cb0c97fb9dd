"""Theories, provability oracles, term categories, assignments and extensions."""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Callable, Optional

from . import kernel as K
from .ctxiso import expand_unique_exists
from .derive import Eqn, Pf, close
from .search import bounded_search
from .syntax import (
    EMPTY_CONTEXT,
    EMPTY_SIGNATURE,
    And,
    ArrConst,
    ArrowSort,
    ArrVar,
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
    MissingBinding,
    ObjConst,
    ObjVar,
    Or,
    Signature,
    SyntaxError_,
    alpha_eq,
    check_formula,
    free_vars,
    fresh_name,
    infer_sort,
    parse_formula,
    show,
    show_formula,
    subst_sort,
    substitute,
    term_vars,
)

# --------------------------------------------------------------------------
# oracle answers


@dataclass(frozen=True)
class Yes:
    proof: object

    def __bool__(self):
        return True


@dataclass(frozen=True)
class Unknown:
    reason: str = ""

    def __bool__(self):
        return False


class Oracle:
    """Provability oracle for one theory.

    ``query`` answers closed formulas with :class:`Yes` (carrying a proof the
    kernel accepts) or :class:`Unknown`.  When ``complete_for`` holds,
    ``Unknown`` means the formula is not provable.
    """

    theory: "Theory"

    def query(self, phi: Formula):
        raise NotImplementedError

    def complete_for(self, phi: Formula) -> bool:
        return False

    def _verified(self, phi, proof):
        K.check_proof(K.Judgement(self.theory, EMPTY_CONTEXT, (), phi), proof)
        return Yes(proof)


class NullOracle(Oracle):
    def __init__(self, theory):
        self.theory = theory

    def query(self, phi):
        return Unknown("no oracle")


# --------------------------------------------------------------------------
# theories


class Theory:
    """A signature, named closed axioms, and a provability oracle."""

    def __init__(self, name: str, signature: Signature, axioms=(), oracle: Optional[Callable] = None, check=True):
        self.name = name
        self.signature = signature
        items = axioms.items() if isinstance(axioms, dict) else axioms
        self.axioms: dict = {}
        for i, item in enumerate(items, 1):
            ax_id, phi = item if isinstance(item, tuple) else (f"ax{i}", item)
            if ax_id in self.axioms or ax_id in K.BUILTIN_AXIOMS:
                raise ValueError(f"duplicate axiom id {ax_id}")
            if check:
                check_formula(signature, EMPTY_CONTEXT, phi)
            self.axioms[ax_id] = phi
        self._make_oracle = oracle or NullOracle
        self._oracle = None
        self.metadata: dict = {}

    def axiom(self, ax_id):
        return self.axioms.get(ax_id)

    @property
    def oracle(self) -> Oracle:
        if self._oracle is None:
            self._oracle = self._make_oracle(self)
        return self._oracle

    def with_oracle(self, make: Callable) -> "Theory":
        out = Theory(self.name, self.signature, dict(self.axioms), make, check=False)
        out.metadata = dict(self.metadata)
        return out

    def with_axioms(self, extra, name=None, signature=None) -> "Theory":
        axioms = dict(self.axioms)
        for ax_id, phi in (extra.items() if isinstance(extra, dict) else extra):
            axioms[ax_id] = phi
        return Theory(name or self.name, signature or self.signature, axioms, self._make_oracle)

    def query(self, phi):
        return self.oracle.query(phi)

    def proves(self, phi) -> bool:
        return bool(self.query(phi))

    def __repr__(self):
        return f"Theory({self.name!r}, {len(self.signature.objects)} objects, {len(self.signature.arrows)} arrows, {len(self.axioms)} axioms)"


class TheoryFormatError(SyntaxError_):
    pass


_ITEM = re.compile(r"(?<![A-Za-z0-9_'])(object|arrow|axiom)(?![A-Za-z0-9_'])")


def parse_theory(text: str, oracle=None) -> Theory:
    """Read ``theory <name> { object A ... arrow f : A -> B ... axiom [id :] <formula> ... }``."""
    text = re.sub(r"#[^\n]*", "", text)
    m = re.match(r"\s*theory\s+([A-Za-z_][A-Za-z0-9_']*)\s*\{(.*)\}\s*$", text, re.S)
    if not m:
        raise TheoryFormatError("expected 'theory <name> { ... }'", 0, text)
    name, body = m.group(1), m.group(2)
    starts = [mm.start() for mm in _ITEM.finditer(body)]
    if body[: starts[0] if starts else len(body)].strip():
        raise TheoryFormatError("unexpected text before first item", m.start(2), text)
    items = [body[a:b].strip() for a, b in zip(starts, starts[1:] + [len(body)])]
    sig = EMPTY_SIGNATURE
    raw_axioms = []
    for item in items:
        kw, rest = item.split(None, 1) if " " in item or "\n" in item else (item, "")
        rest = rest.strip()
        if kw == "object":
            for o in rest.split():
                if not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_']*", o):
                    raise TheoryFormatError(f"bad object name {o!r}", 0, text)
                sig = sig.add_object(o)
        elif kw == "arrow":
            am = re.fullmatch(r"([A-Za-z_][A-Za-z0-9_']*)\s*:\s*(\w+)\s*->\s*(\w+)", rest)
            if not am:
                raise TheoryFormatError(f"bad arrow declaration {rest!r}", 0, text)
            sig = sig.add_arrow(am.group(1), ArrowSort(ObjConst(am.group(2)), ObjConst(am.group(3))))
        else:
            im = re.match(r"([A-Za-z_][A-Za-z0-9_.']*)\s*:(?!\s*\w+\s*->)", rest)
            if im and not re.match(r"(forall|exists)\b", rest):
                raw_axioms.append((im.group(1), rest[im.end():]))
            else:
                raw_axioms.append((None, rest))
    for n, s in sig.arrows:
        for o in (s.dom, s.cod):
            if o.name not in sig.object_names:
                raise TheoryFormatError(f"arrow {n} mentions undeclared object {o.name}", 0, text)
    axioms = []
    for i, (ax_id, src) in enumerate(raw_axioms, 1):
        axioms.append((ax_id or f"ax{i}", parse_formula(src, sig)))
    return Theory(name, sig, axioms, oracle)


def dump_theory(T: Theory) -> str:
    lines = [f"theory {T.name} {{"]
    if T.signature.objects:
        lines.append("  object " + " ".join(T.signature.objects))
    for n, s in T.signature.arrows:
        lines.append(f"  arrow {n} : {show(s)}")
    for ax_id, phi in T.axioms.items():
        lines.append(f"  axiom {ax_id} : {show_formula(phi)}")
    lines.append("}")
    return "\n".join(lines) + "\n"


# --------------------------------------------------------------------------
# term categories


def _len_lex(t):
    s = show(t)
    return (len(s), s)


@dataclass
class TermCategory:
    """Terms in a context, composed syntactically; not a category."""

    theory: Theory
    ctx: Context
    depth: int
    _homs: dict = field(default_factory=dict, repr=False)

    def objects(self) -> list:
        objs = [ObjConst(o) for o in self.theory.signature.objects] + [ObjVar(v) for v in self.ctx.object_vars()]
        return objs

    def identity(self, o):
        return Id(o)

    @staticmethod
    def compose(g, f):
        return Comp(g, f)

    def _atoms(self):
        sig = self.theory.signature
        out = [(ArrConst(n), s) for n, s in sig.arrows]
        out += [(ArrVar(d.var), d.sort) for d in self.ctx.arrow_decls()]
        out += [(Id(o), ArrowSort(o, o)) for o in self.objects()]
        return out

    def _by_depth(self):
        if self._homs:
            return self._homs
        levels = [self._atoms()]
        seen = {t for t, _ in levels[0]}
        for _ in range(self.depth):
            upto = [x for lvl in levels for x in lvl]
            last = set(t for t, _ in levels[-1])
            new = []
            for g, sg in upto:
                for f, sf in upto:
                    if sf.cod != sg.dom or (g not in last and f not in last):
                        continue
                    t = Comp(g, f)
                    if t not in seen:
                        seen.add(t)
                        new.append((t, ArrowSort(sf.dom, sg.cod)))
            levels.append(new)
        homs: dict = {}
        for lvl in levels:
            for t, s in lvl:
                homs.setdefault(s, []).append(t)
        self._homs = {s: sorted(ts, key=_len_lex) for s, ts in homs.items()}
        return self._homs

    def hom(self, a, b) -> list:
        return list(self._by_depth().get(ArrowSort(a, b), []))

    def arrows(self) -> list:
        return [t for s in sorted(self._by_depth(), key=show) for t in self._by_depth()[s]]

    def is_empty(self) -> bool:
        return not self.objects()


def term_category(T: Theory, ctx: Context = EMPTY_CONTEXT, depth: int = 1) -> TermCategory:
    return TermCategory(T, ctx, depth)


def term_depth(t) -> int:
    return 1 + max(term_depth(t.outer), term_depth(t.inner)) if isinstance(t, Comp) else 0


# --------------------------------------------------------------------------
# assignments


@dataclass(frozen=True)
class Assignment:
    """A map on object and arrow atoms (constants or variables), extended homomorphically.

    Keys are the atom terms themselves, e.g. ``ObjConst("A")`` or ``ArrVar("f")``.
    """

    base: tuple = ()  # sorted pairs (atom, image)

    @staticmethod
    def of(mapping: dict) -> "Assignment":
        return Assignment(tuple(sorted(mapping.items(), key=lambda kv: (type(kv[0]).__name__, kv[0].name))))

    @property
    def table(self) -> dict:
        return dict(self.base)

    def __call__(self, t):
        return apply_assignment(self, t)

    def then(self, other: "Assignment") -> "Assignment":
        """``other ∘ self``: first this assignment, then ``other``."""
        out = {k: apply_assignment(other, v, partial=True) for k, v in self.base}
        for k, v in other.base:
            out.setdefault(k, v)
        return Assignment.of(out)


IDENTITY = Assignment()


def _map_term(t, table, partial):
    match t:
        case ObjConst() | ObjVar() | ArrConst() | ArrVar():
            if t in table:
                return table[t]
            if partial:
                return t
            raise MissingBinding(t.name)
        case Id(o):
            return Id(_map_term(o, table, partial))
        case Comp(g, f):
            return Comp(_map_term(g, table, partial), _map_term(f, table, partial))
    raise TypeError(t)


def _const_placeholder(name):
    return "§" + name


def apply_assignment(sigma: Assignment, t, partial=False):
    """Apply ``sigma`` to a term, sort or formula.

    On formulas, bound variables are left alone and captures are avoided.
    With ``partial`` unmapped atoms are kept; otherwise they raise
    :class:`MissingBinding`.
    """
    table = sigma.table
    if isinstance(t, ArrowSort):
        return ArrowSort(_map_term(t.dom, table, partial), _map_term(t.cod, table, partial))
    if not isinstance(t, Formula):
        return _map_term(t, table, partial)
    # constants become placeholder variables, then one capture-avoiding substitution
    lifted = _lift_constants(t)
    sub = {}
    for k, v in table.items():
        key = _const_placeholder(k.name) if isinstance(k, (ObjConst, ArrConst)) else k.name
        sub[key] = v
    for name in free_vars(lifted):
        if name not in sub:
            if partial:
                continue
            raise MissingBinding(name.lstrip("§"))
    out = substitute(lifted, sub)
    return _lower_constants(out) if partial else out


def _lift_term(t):
    match t:
        case ObjConst(n):
            return ObjVar(_const_placeholder(n))
        case ArrConst(n):
            return ArrVar(_const_placeholder(n))
        case Id(o):
            return Id(_lift_term(o))
        case Comp(g, f):
            return Comp(_lift_term(g), _lift_term(f))
    return t


def _lower_term(t):
    match t:
        case ObjVar(n) if n.startswith("§"):
            return ObjConst(n[1:])
        case ArrVar(n) if n.startswith("§"):
            return ArrConst(n[1:])
        case Id(o):
            return Id(_lower_term(o))
        case Comp(g, f):
            return Comp(_lower_term(g), _lower_term(f))
    return t


def map_formula_terms(phi, fn):
    """Apply ``fn`` to every object and arrow term, including binder sorts."""
    match phi:
        case Eq(l, r):
            return Eq(fn(l), fn(r))
        case And(a, b) | Or(a, b) | Implies(a, b):
            return type(phi)(map_formula_terms(a, fn), map_formula_terms(b, fn))
        case ForallObj(v, b) | ExistsObj(v, b):
            return type(phi)(v, map_formula_terms(b, fn))
        case ForallArr(v, s, b) | ExistsArr(v, s, b):
            return type(phi)(v, ArrowSort(fn(s.dom), fn(s.cod)), map_formula_terms(b, fn))
    return phi


def _lift_constants(phi):
    return map_formula_terms(phi, _lift_term)


def _lower_constants(phi):
    return map_formula_terms(phi, _lower_term)


def translate(sigma: Assignment, phi: Formula) -> Formula:
    """Translate a closed formula along a constant map (unmapped constants stay)."""
    return apply_assignment(sigma, phi, partial=True)



def translate_proof(sigma: Assignment, p):
    """Carry a proof along a constant map; eigenvariables are left alone."""
    return K.map_proof(
        p,
        lambda t: apply_assignment(sigma, t, partial=True),
        lambda phi: translate(sigma, phi),
        lambda s: apply_assignment(sigma, s, partial=True),
    )

# --------------------------------------------------------------------------
# oracle realizations


class AxiomOracle(Oracle):
    """Answers exactly the axioms (up to renaming of bound variables)."""

    def __init__(self, theory):
        self.theory = theory

    def query(self, phi):
        for ax_id, ax in self.theory.axioms.items():
            if alpha_eq(ax, phi):
                return Yes(K.Axiom(ax_id))
        return Unknown("not an axiom")


class SearchOracle(Oracle):
    """Bounded proof search; never complete."""

    def __init__(self, theory, depth: int = 8):
        self.theory = theory
        self.depth = depth

    def query(self, phi):
        p = bounded_search(K.Judgement(self.theory, EMPTY_CONTEXT, (), phi), self.depth)
        return Yes(p) if p is not None else Unknown(f"no proof of size <= {self.depth}")


class CertificateOracle(Oracle):
    """Replays proof certificates stored in a directory, one file per formula digest.

    Certificates are checked against the theory before being trusted.
    """

    def __init__(self, theory, directory):
        import pathlib

        self.theory = theory
        self.directory = pathlib.Path(directory)

    def path_for(self, phi):
        return self.directory / f"{K.formula_digest(phi)}.proof"

    def query(self, phi):
        path = self.path_for(phi)
        if not path.is_file():
            return Unknown("no certificate")
        proof = K.load_proof(path.read_text(), self.theory.signature)
        return self._verified(phi, proof)

    def store(self, phi, proof):
        K.check_proof(K.Judgement(self.theory, EMPTY_CONTEXT, (), phi), proof)
        self.directory.mkdir(parents=True, exist_ok=True)
        self.path_for(phi).write_text(K.dump_proof(proof, phi))


class DefinitionOracle(Oracle):
    """Proves ``∃! f : A -> B . f = t`` for closed terms ``t``, by a fixed construction."""

    def __init__(self, theory):
        self.theory = theory

    def query(self, phi):
        match phi:
            case And(ExistsArr(v, s, Eq(ArrVar(x), t)), _) if x == v and not _mentions_var(t):
                delta = Context().extend(v, s)
                if alpha_eq(phi, expand_unique_exists(EMPTY_CONTEXT, delta, Eq(ArrVar(v), t))):
                    return self._verified(phi, definition_proof(self.theory.signature, s, t, phi))
        return Unknown("not a definition")


def _mentions_var(t) -> bool:
    return bool(term_vars(t))


def definition_proof(sig, s: ArrowSort, t, phi):
    """Kernel proof of the unique-existence expansion for ``f = t``."""
    exists_part, unique_part = phi.left, phi.right
    first = K.ExistsArrIntro(exists_part, t, K.EqRefl(t))
    # unique_part: forall f1 . forall f2 . (f1 = t /\ f2 = t) => (square /\ (top => top))
    f1, body1 = unique_part.var, unique_part.body
    f2, body2 = body1.var, body1.body
    hyp, goal = body2.left, body2.right
    square = goal.left
    ctx = Context().extend(f1, s).extend(f2, s)
    e = Eqn(sig, ctx)
    a1, a2 = ArrVar(f1), ArrVar(f2)
    h1 = K.AndElimL(K.Named(hyp))
    h2 = K.AndElimR(K.Named(hyp))
    chain = e.chain(
        e.sym(e.idr(a2)),
        Pf(h2, Eq(a2, t)),
        e.sym(Pf(h1, Eq(a1, t))),
        e.idl(a1),
    )
    assert chain.concl == square, (chain.concl, square)
    rest = goal.right
    body = K.ImpliesIntro(hyp, K.AndIntro(chain.proof, K.ImpliesIntro(rest.left, K.TopIntro())))
    second = K.ForallArrIntro(f1, s, K.ForallArrIntro(f2, s, body))
    return close(_BareSig(sig), EMPTY_CONTEXT, K.AndIntro(first, second))


@dataclass(frozen=True)
class _BareSig:
    signature: Signature

    def axiom(self, ax_id):
        return None


class ChainOracle(Oracle):
    """Tries several oracles in order; complete when any member is."""

    def __init__(self, theory, makers):
        self.theory = theory
        self.members = [m(theory) for m in makers]

    def query(self, phi):
        reasons = []
        for o in self.members:
            r = o.query(phi)
            if r:
                return r
            reasons.append(r.reason)
        return Unknown("; ".join(reasons))

    def complete_for(self, phi):
        return any(o.complete_for(phi) for o in self.members)


def standard_oracle(certs=None, depth: int = 6):
    """The default chain: axioms, definitions, congruence closure, certificates, search."""
    from .congruence import CongruenceOracle

    makers = [AxiomOracle, DefinitionOracle, CongruenceOracle]
    if certs is not None:
        makers.append(lambda T: CertificateOracle(T, certs))
    if depth > 0:
        makers.append(lambda T: SearchOracle(T, depth))
    return lambda T: ChainOracle(T, makers)


def oracle_from_spec(spec: str, certs=None):
    """``congruence``, ``certs``, ``search:<depth>`` or ``standard``."""
    from .congruence import CongruenceOracle

    if spec == "congruence":
        return CongruenceOracle
    if spec == "certs":
        if certs is None:
            raise ValueError("the certs oracle needs a certificate directory")
        return lambda T: CertificateOracle(T, certs)
    if spec.startswith("search"):
        depth = int(spec.split(":", 1)[1]) if ":" in spec else 8
        return lambda T: SearchOracle(T, depth)
    if spec == "standard":
        return standard_oracle(certs)
    raise ValueError(f"unknown oracle {spec!r}")


# --------------------------------------------------------------------------
# extensions


class NotProvablyUnique(Exception):
    def __init__(self, index, reason=""):
        super().__init__(f"NotProvablyUnique({index}){': ' + reason if reason else ''}")
        self.index = index


class OutOfBudget(Exception):
    def __init__(self, t):
        super().__init__(f"OutOfBudget({show(t)})")
        self.term = t


@dataclass
class Extension:
    """A theory map given by sending constants of ``source`` to terms of ``target``."""

    source: Theory
    target: Theory
    translation: Assignment
    metadata: dict = field(default_factory=dict)

    def __call__(self, x):
        return translate(self.translation, x) if isinstance(x, Formula) else apply_assignment(self.translation, x, partial=True)

    def then(self, other: "Extension") -> "Extension":
        meta = {**self.metadata, **other.metadata}
        return Extension(self.source, other.target, self.translation.then(other.translation), meta)

    def unverified_axioms(self) -> list:
        """Source axioms whose translation the target oracle does not certify."""
        return [a for a, phi in self.source.axioms.items() if not self.target.query(self(phi))]


def inclusion(T: Theory, target: Theory) -> Extension:
    table = {ObjConst(o): ObjConst(o) for o in T.signature.objects}
    table.update({ArrConst(n): ArrConst(n) for n, _ in T.signature.arrows})
    return Extension(T, target, Assignment.of(table))


def compose(e1: Extension, e2: Extension) -> Extension:
    return e1.then(e2)


def _constant_name(sig, base):
    taken = set(sig.object_names) | set(sig.arrow_names)
    return fresh_name(base, taken) if base in taken else base


def extend_by_constants(T: Theory, entries, prefix="c") -> Extension:
    """Add constants realizing each provably unique ``(Δ, P)`` entry, with axiom ``P(c)``."""
    sig = T.signature
    new_axioms = []
    for s, (delta, P) in enumerate(entries):
        claim = expand_unique_exists(EMPTY_CONTEXT, delta, P)
        answer = T.query(claim)
        if not answer:
            raise NotProvablyUnique(s, answer.reason)
        sub = {}
        for d in delta.decls:
            name = _constant_name(sig, f"{prefix}_{s}_{d.var}")
            if d.is_obj:
                sig = sig.add_object(name)
                sub[d.var] = ObjConst(name)
            else:
                sig = sig.add_arrow(name, subst_sort(d.sort, sub))
                sub[d.var] = ArrConst(name)
        new_axioms.append((_constant_name(sig, f"def_{prefix}_{s}"), substitute(P, sub)))
    if not entries:
        return inclusion(T, T)
    target = Theory(T.name, sig, list(T.axioms.items()) + new_axioms, T._make_oracle)
    return inclusion(T, target)


def leading_exists(phi):
    """Split ``∃Δ P`` into ``(Δ, P)``; ``None`` when ``phi`` is not existential."""
    decls = Context()
    while isinstance(phi, (ExistsObj, ExistsArr)):
        decls = decls.extend(phi.var) if isinstance(phi, ExistsObj) else decls.extend(phi.var, phi.sort)
        phi = phi.body
    return (decls, phi) if decls.decls else None


def _entry_key(entry):
    delta, P = entry
    s = f"{show(delta)} | {show_formula(P)}"
    return (len(s), s)


@dataclass
class ConstantCategory:
    """Composition and identities on canonical arrow constants, as far as certified."""

    objects: tuple
    homs: dict  # ArrowSort -> tuple of constant names
    table: dict  # (g, f) -> h
    identities: dict  # object name -> constant name
    sorts: dict  # constant name -> ArrowSort
    missing: tuple = ()

    def compose(self, g: str, f: str) -> str:
        return self.table[(g, f)]

    def identity(self, obj: str) -> str:
        return self.identities[obj]

    def retract(self, t) -> str:
        """The constant a closed arrow term evaluates to."""
        match t:
            case ArrConst(n):
                return n
            case Id(ObjConst(o)) if o in self.identities:
                return self.identities[o]
            case Comp(g, f):
                key = (self.retract(g), self.retract(f))
                if key in self.table:
                    return self.table[key]
        raise OutOfBudget(t)

    def hom(self, a: str, b: str) -> tuple:
        return self.homs.get(ArrowSort(ObjConst(a), ObjConst(b)), ())


def constant_category(T: Theory) -> ConstantCategory:
    """Tabulate composition of ``T``'s arrow constants using its oracle."""
    sig = T.signature
    homs: dict = {}
    sorts = {}
    for n, s in sig.arrows:
        homs.setdefault(s, []).append(n)
        sorts[n] = s
    homs = {s: tuple(v) for s, v in homs.items()}
    missing = []

    def find(t, s):
        for c in homs.get(s, ()):
            if T.query(Eq(t, ArrConst(c))):
                return c
        missing.append(show(t))
        return None

    identities = {}
    for o in sig.objects:
        c = find(Id(ObjConst(o)), ArrowSort(ObjConst(o), ObjConst(o)))
        if c is not None:
            identities[o] = c
    table = {}
    for g, sg in sorts.items():
        for f, sf in sorts.items():
            if sf.cod == sg.dom:
                c = find(Comp(ArrConst(g), ArrConst(f)), ArrowSort(sf.dom, sg.cod))
                if c is not None:
                    table[(g, f)] = c
    return ConstantCategory(tuple(sig.objects), homs, table, identities, sorts, tuple(missing))


def term_complete_extension(T: Theory, budget: int = 16, depth: int = 1) -> Extension:
    """Three stages: constants for unique existentials, definitional arrow constants, quotient.

    ``budget`` caps the number of candidate entries examined across the first
    two stages, taken in length-lexicographic order.  Stage-2 candidates are
    the composite and identity terms of depth at most ``depth``.
    """
    meta = {"stage1": [], "stage2": [], "skipped": [], "budget_left": budget}
    left = budget
    # stage 1
    candidates = sorted({leading_exists(phi) for phi in T.axioms.values()} - {None}, key=_entry_key)
    accepted = []
    for entry in candidates:
        if left <= 0:
            break
        left -= 1
        try:
            extend_by_constants(T, [entry])
            accepted.append(entry)
            meta["stage1"].append(_entry_key(entry)[1])
        except NotProvablyUnique:
            meta["skipped"].append(_entry_key(entry)[1])
    e1 = extend_by_constants(T, accepted, prefix="c") if accepted else inclusion(T, T)
    T1 = e1.target
    # stage 2
    tc = term_category(T1, EMPTY_CONTEXT, depth)
    defs = []
    for t in sorted(tc.arrows(), key=_len_lex):
        if isinstance(t, ArrConst):
            continue
        if left <= 0:
            break
        left -= 1
        s = infer_sort(T1.signature, EMPTY_CONTEXT, t)
        defs.append((Context().extend("f", s), Eq(ArrVar("f"), t)))
        meta["stage2"].append(show(t))
    e2 = extend_by_constants(T1, defs, prefix="d") if defs else inclusion(T1, T1)
    T2 = e2.target
    # stage 3: merge provably equal arrow constants, keep the least name
    stage = {n: 0 for n in T.signature.arrow_names}
    stage.update({n: 1 for n in T1.signature.arrow_names if n not in stage})
    e3 = quotient(T2, order=lambda n: (stage.get(n, 2), n))
    meta["budget_left"] = left
    out = e1.then(e2).then(e3)
    out.metadata.update(meta)
    out.metadata["constants"] = constant_category(e3.target)
    out.target.metadata["constants"] = out.metadata["constants"]
    return out


def quotient(T: Theory, order=None) -> Extension:
    """Merge provably equal arrow constants; each class keeps its least member under ``order``."""
    sig = T.signature
    order = order or (lambda n: n)
    by_sort: dict = {}
    for n, s in sig.arrows:
        by_sort.setdefault(s, []).append(n)
    rep = {}
    for s, names in by_sort.items():
        classes: list = []
        for n in sorted(names, key=order):
            for cls in classes:
                if T.query(Eq(ArrConst(cls[0]), ArrConst(n))):
                    cls.append(n)
                    break
            else:
                classes.append([n])
        for cls in classes:
            for n in cls:
                rep[n] = cls[0]
    keep = Signature(sig.objects, tuple((n, s) for n, s in sig.arrows if rep[n] == n))
    table = {ObjConst(o): ObjConst(o) for o in sig.objects}
    table.update({ArrConst(n): ArrConst(rep[n]) for n, _ in sig.arrows})
    sigma = Assignment.of(table)
    axioms = []
    for ax_id, phi in T.axioms.items():
        axioms.append((ax_id, translate(sigma, phi)))
    target = Theory(T.name + "_comp" if not T.name.endswith("_comp") else T.name, keep, axioms, T._make_oracle)
    merged = sorted((n, r) for n, r in rep.items() if n != r)
    return Extension(T, target, sigma, {"merged": merged})


def canonical_constant(E: Extension, t) -> ArrConst:
    """The constant of the term-complete target provably equal to ``t`` (given in source terms)."""
    cc: ConstantCategory = E.metadata.get("constants") or constant_category(E.target)
    image = E(t) if not isinstance(t, ArrConst) or t.name not in cc.sorts else t
    try:
        return ArrConst(cc.retract(image))
    except OutOfBudget:
        raise OutOfBudget(t) from None
