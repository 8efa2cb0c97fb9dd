"""Syntax of the dependently sorted language of categories with constants.

Terms, sorts, formulas and contexts are frozen dataclasses.  Binders keep
their printable names; alpha-equivalence is decided on a nameless key
(:func:`alpha_key`), which is what every consumer uses for syntactic identity.
"""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping, Union


class SyntaxError_(Exception):
    """Position-tagged parse error."""

    def __init__(self, message: str, pos: int, text: str = ""):
        line = text.count("\n", 0, pos) + 1
        col = pos - (text.rfind("\n", 0, pos) + 1) + 1
        super().__init__(f"{line}:{col}: {message}")
        self.pos = pos
        self.line = line
        self.col = col


class WellFormednessError(Exception):
    kind = "WellFormednessError"

    def __init__(self, *args):
        super().__init__(*args)
        self.args_ = args

    def __str__(self):
        return f"{self.kind}({', '.join(map(str, self.args_))})"


class DuplicateVariable(WellFormednessError):
    kind = "DuplicateVariable"


class UndeclaredSortDependency(WellFormednessError):
    kind = "UndeclaredSortDependency"


class UnboundName(WellFormednessError):
    kind = "UnboundName"


class EndpointMismatch(WellFormednessError):
    kind = "EndpointMismatch"


class SortMismatchInEq(WellFormednessError):
    kind = "SortMismatchInEq"


class IllFormedQuantifier(WellFormednessError):
    kind = "IllFormedQuantifier"


class MissingBinding(WellFormednessError):
    kind = "MissingBinding"


# --------------------------------------------------------------------------
# terms


@dataclass(frozen=True)
class ObjConst:
    name: str


@dataclass(frozen=True)
class ObjVar:
    name: str


ObjectTerm = Union[ObjConst, ObjVar]


@dataclass(frozen=True)
class ArrowSort:
    dom: ObjectTerm
    cod: ObjectTerm


@dataclass(frozen=True)
class ArrConst:
    name: str


@dataclass(frozen=True)
class ArrVar:
    name: str


@dataclass(frozen=True)
class Id:
    obj: ObjectTerm


@dataclass(frozen=True)
class Comp:
    outer: "ArrowTerm"
    inner: "ArrowTerm"


ArrowTerm = Union[ArrConst, ArrVar, Id, Comp]
Term = Union[ObjConst, ObjVar, ArrConst, ArrVar, Id, Comp]

OBJ = "Obj"  # marker for object declarations


def comp(*arrows: ArrowTerm) -> ArrowTerm:
    """``comp(h, g, f)`` builds ``h o (g o f)``."""
    out = arrows[-1]
    for a in reversed(arrows[:-1]):
        out = Comp(a, out)
    return out


# --------------------------------------------------------------------------
# formulas


@dataclass(frozen=True)
class Eq:
    lhs: ArrowTerm
    rhs: ArrowTerm


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Implies:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Top:
    pass


@dataclass(frozen=True)
class Bot:
    pass


@dataclass(frozen=True)
class ForallObj:
    var: str
    body: "Formula"


@dataclass(frozen=True)
class ExistsObj:
    var: str
    body: "Formula"


@dataclass(frozen=True)
class ForallArr:
    var: str
    sort: ArrowSort
    body: "Formula"


@dataclass(frozen=True)
class ExistsArr:
    var: str
    sort: ArrowSort
    body: "Formula"


Formula = Union[Eq, And, Or, Implies, Top, Bot, ForallObj, ExistsObj, ForallArr, ExistsArr]
TOP = Top()
BOT = Bot()

OBJ_BINDERS = (ForallObj, ExistsObj)
ARR_BINDERS = (ForallArr, ExistsArr)
BINDERS = OBJ_BINDERS + ARR_BINDERS
BINARY = (And, Or, Implies)


def Not(phi: Formula) -> Formula:
    return Implies(phi, BOT)


def Iff(a: Formula, b: Formula) -> Formula:
    return And(Implies(a, b), Implies(b, a))


def conj(parts: Iterable[Formula]) -> Formula:
    """Right-nested conjunction; the empty conjunction is ``top``."""
    parts = list(parts)
    if not parts:
        return TOP
    out = parts[-1]
    for p in reversed(parts[:-1]):
        out = And(p, out)
    return out


def disj(parts: Iterable[Formula]) -> Formula:
    parts = list(parts)
    if not parts:
        return BOT
    out = parts[-1]
    for p in reversed(parts[:-1]):
        out = Or(p, out)
    return out


# --------------------------------------------------------------------------
# contexts and signatures


@dataclass(frozen=True)
class Decl:
    var: str
    sort: Union[str, ArrowSort]  # OBJ or an arrow sort

    @property
    def is_obj(self) -> bool:
        return self.sort == OBJ


@dataclass(frozen=True)
class Context:
    decls: tuple = ()

    def __iter__(self):
        return iter(self.decls)

    def __len__(self):
        return len(self.decls)

    def __add__(self, other: "Context") -> "Context":
        return Context(self.decls + tuple(other.decls))

    def extend(self, var: str, sort=OBJ) -> "Context":
        return Context(self.decls + (Decl(var, sort),))

    def names(self) -> list:
        return [d.var for d in self.decls]

    def lookup(self, name: str):
        for d in reversed(self.decls):
            if d.var == name:
                return d
        return None

    def object_vars(self) -> list:
        return [d.var for d in self.decls if d.is_obj]

    def arrow_decls(self) -> list:
        return [d for d in self.decls if not d.is_obj]


EMPTY_CONTEXT = Context()


def ctx(*decls) -> Context:
    """Shorthand: ``ctx("A", ("f", ArrowSort(...)))``."""
    out = []
    for d in decls:
        if isinstance(d, str):
            out.append(Decl(d, OBJ))
        elif isinstance(d, Decl):
            out.append(d)
        else:
            out.append(Decl(d[0], d[1]))
    return Context(tuple(out))


@dataclass(frozen=True)
class Signature:
    objects: tuple = ()
    arrows: tuple = ()  # pairs (name, ArrowSort of ObjConst endpoints)

    def arrow_sort(self, name: str):
        return self._arrow_table.get(name)

    @cached_property
    def _arrow_table(self) -> dict:
        return dict(self.arrows)

    @cached_property
    def object_names(self) -> frozenset:
        return frozenset(self.objects)

    @cached_property
    def arrow_names(self) -> frozenset:
        return frozenset(n for n, _ in self.arrows)

    def add_object(self, name: str) -> "Signature":
        return Signature(self.objects + (name,), self.arrows)

    def add_arrow(self, name: str, sort: ArrowSort) -> "Signature":
        return Signature(self.objects, self.arrows + ((name, sort),))

    def __contains__(self, name) -> bool:
        return name in self.object_names or name in self.arrow_names


EMPTY_SIGNATURE = Signature()


# --------------------------------------------------------------------------
# free variables, alpha keys


def term_vars(t: Term) -> set:
    match t:
        case ObjVar(n) | ArrVar(n):
            return {n}
        case ObjConst() | ArrConst():
            return set()
        case Id(o):
            return term_vars(o)
        case Comp(g, f):
            return term_vars(g) | term_vars(f)
    raise TypeError(t)


def sort_vars(s: ArrowSort) -> set:
    return term_vars(s.dom) | term_vars(s.cod)


def free_vars(phi: Formula) -> set:
    """Free variable names, including object variables that occur in binder sorts."""
    match phi:
        case Eq(l, r):
            return term_vars(l) | term_vars(r)
        case And(a, b) | Or(a, b) | Implies(a, b):
            return free_vars(a) | free_vars(b)
        case Top() | Bot():
            return set()
        case ForallObj(v, b) | ExistsObj(v, b):
            return free_vars(b) - {v}
        case ForallArr(v, s, b) | ExistsArr(v, s, b):
            return sort_vars(s) | (free_vars(b) - {v})
    raise TypeError(phi)


def free_arrow_vars(phi: Formula) -> set:
    match phi:
        case Eq(l, r):
            return _arrow_vars(l) | _arrow_vars(r)
        case And(a, b) | Or(a, b) | Implies(a, b):
            return free_arrow_vars(a) | free_arrow_vars(b)
        case Top() | Bot():
            return set()
        case ForallObj(_, b) | ExistsObj(_, b):
            return free_arrow_vars(b)
        case ForallArr(v, _, b) | ExistsArr(v, _, b):
            return free_arrow_vars(b) - {v}
    raise TypeError(phi)


def _arrow_vars(t: ArrowTerm) -> set:
    match t:
        case ArrVar(n):
            return {n}
        case Comp(g, f):
            return _arrow_vars(g) | _arrow_vars(f)
    return set()


def constants_of(x) -> set:
    """Constant names occurring in a term, sort or formula."""
    match x:
        case ObjConst(n) | ArrConst(n):
            return {n}
        case ObjVar() | ArrVar():
            return set()
        case Id(o):
            return constants_of(o)
        case Comp(g, f):
            return constants_of(g) | constants_of(f)
        case ArrowSort(d, c):
            return constants_of(d) | constants_of(c)
        case Eq(l, r):
            return constants_of(l) | constants_of(r)
        case And(a, b) | Or(a, b) | Implies(a, b):
            return constants_of(a) | constants_of(b)
        case Top() | Bot():
            return set()
        case ForallObj(_, b) | ExistsObj(_, b):
            return constants_of(b)
        case ForallArr(_, s, b) | ExistsArr(_, s, b):
            return constants_of(s) | constants_of(b)
    raise TypeError(x)


def _term_key(t, env):
    match t:
        case ObjVar(n) | ArrVar(n):
            tag = "o" if isinstance(t, ObjVar) else "a"
            return ("b", env[n]) if n in env else (tag, n)
        case ObjConst(n):
            return ("O", n)
        case ArrConst(n):
            return ("A", n)
        case Id(o):
            return ("id", _term_key(o, env))
        case Comp(g, f):
            return ("comp", _term_key(g, env), _term_key(f, env))
    raise TypeError(t)


def alpha_key(phi: Formula, env=None, depth=0):
    """Nameless structural key: alpha-equivalent formulas have equal keys."""
    env = env or {}
    match phi:
        case Eq(l, r):
            return ("=", _term_key(l, env), _term_key(r, env))
        case And(a, b) | Or(a, b) | Implies(a, b):
            return (type(phi).__name__, alpha_key(a, env, depth), alpha_key(b, env, depth))
        case Top():
            return ("top",)
        case Bot():
            return ("bot",)
        case ForallObj(v, b) | ExistsObj(v, b):
            return (type(phi).__name__, alpha_key(b, {**env, v: depth}, depth + 1))
        case ForallArr(v, s, b) | ExistsArr(v, s, b):
            skey = (_term_key(s.dom, env), _term_key(s.cod, env))
            return (type(phi).__name__, skey, alpha_key(b, {**env, v: depth}, depth + 1))
    raise TypeError(phi)


def alpha_eq(a: Formula, b: Formula) -> bool:
    return a == b or alpha_key(a) == alpha_key(b)


# --------------------------------------------------------------------------
# fresh names and substitution


def fresh_name(base: str, avoid) -> str:
    if base not in avoid:
        return base
    stem = base.rstrip("'")
    for i in itertools.count(1):
        cand = f"{stem}_{i}"
        if cand not in avoid:
            return cand
    raise AssertionError


def subst_term(t: Term, sigma: Mapping) -> Term:
    match t:
        case ObjVar(n) | ArrVar(n):
            return sigma.get(n, t)
        case ObjConst() | ArrConst():
            return t
        case Id(o):
            return Id(subst_term(o, sigma))
        case Comp(g, f):
            return Comp(subst_term(g, sigma), subst_term(f, sigma))
    raise TypeError(t)


def subst_sort(s: ArrowSort, sigma: Mapping) -> ArrowSort:
    return ArrowSort(subst_term(s.dom, sigma), subst_term(s.cod, sigma))


def substitute(phi: Formula, sigma: Mapping, free=None) -> Formula:
    """Capture-avoiding simultaneous substitution of terms for free variables.

    ``sigma`` maps variable names to terms; variables not in ``sigma`` are left
    alone.  Use :func:`substitute_closed` when every free variable must be covered.
    """
    if not sigma:
        return phi
    if free is None:
        free = set()
        for t in sigma.values():
            free |= term_vars(t)
    return _subst(phi, dict(sigma), free)


def _subst(phi, sigma, free):
    match phi:
        case Eq(l, r):
            return Eq(subst_term(l, sigma), subst_term(r, sigma))
        case And(a, b) | Or(a, b) | Implies(a, b):
            return type(phi)(_subst(a, sigma, free), _subst(b, sigma, free))
        case Top() | Bot():
            return phi
        case ForallObj(v, b) | ExistsObj(v, b):
            v2, inner = _enter(v, b, sigma, free, True)
            return type(phi)(v2, _subst(b, inner, free))
        case ForallArr(v, s, b) | ExistsArr(v, s, b):
            s2 = subst_sort(s, sigma)
            v2, inner = _enter(v, b, sigma, free, False)
            return type(phi)(v2, s2, _subst(b, inner, free))
    raise TypeError(phi)


def _enter(v, body, sigma, free, obj):
    inner = {k: t for k, t in sigma.items() if k != v}
    if v in free:
        v2 = fresh_name(v, free | free_vars(body) | set(inner))
        inner[v] = ObjVar(v2) if obj else ArrVar(v2)
        return v2, inner
    return v, inner


def substitute_closed(phi: Formula, sigma: Mapping) -> Formula:
    """Substitution that requires ``sigma`` to cover every free variable."""
    missing = sorted(free_vars(phi) - set(sigma))
    if missing:
        raise MissingBinding(missing[0])
    return substitute(phi, sigma)


def instantiate(binder: Formula, t: Term) -> Formula:
    """Body of a quantified formula with its bound variable replaced by ``t``."""
    return substitute(binder.body, {binder.var: t})


# --------------------------------------------------------------------------
# well-formedness


def check_context(sig: Signature, context: Context, ambient: Context = EMPTY_CONTEXT) -> None:
    seen = set(ambient.names())
    objs = set(ambient.object_vars())
    for d in context:
        if d.var in seen:
            raise DuplicateVariable(d.var)
        if not d.is_obj:
            for end in (d.sort.dom, d.sort.cod):
                _check_obj_term(sig, objs, end, d.var)
        else:
            objs.add(d.var)
        seen.add(d.var)


def _check_obj_term(sig, objs, o, owner):
    match o:
        case ObjConst(n):
            if n not in sig.object_names:
                raise UndeclaredSortDependency(owner, n)
        case ObjVar(n):
            if n not in objs:
                raise UndeclaredSortDependency(owner, n)
        case _:
            raise UndeclaredSortDependency(owner, o)


def infer_sort(sig: Signature, context: Context, t: Term):
    """``OBJ`` for object terms, an :class:`ArrowSort` for arrow terms."""
    match t:
        case ObjConst(n):
            if n not in sig.object_names:
                raise UnboundName(n)
            return OBJ
        case ObjVar(n):
            d = context.lookup(n)
            if d is None or not d.is_obj:
                raise UnboundName(n)
            return OBJ
        case ArrConst(n):
            s = sig.arrow_sort(n)
            if s is None:
                raise UnboundName(n)
            return s
        case ArrVar(n):
            d = context.lookup(n)
            if d is None or d.is_obj:
                raise UnboundName(n)
            return d.sort
        case Id(o):
            infer_sort(sig, context, o)
            return ArrowSort(o, o)
        case Comp(g, f):
            sg = infer_sort(sig, context, g)
            sf = infer_sort(sig, context, f)
            if sf.cod != sg.dom:
                raise EndpointMismatch(show(sf.cod), show(sg.dom))
            return ArrowSort(sf.dom, sg.cod)
    raise TypeError(t)


def check_formula(sig: Signature, context: Context, phi: Formula) -> None:
    match phi:
        case Eq(l, r):
            sl = infer_sort(sig, context, l)
            sr = infer_sort(sig, context, r)
            if sl != sr:
                raise SortMismatchInEq(show(sl), show(sr))
        case And(a, b) | Or(a, b) | Implies(a, b):
            check_formula(sig, context, a)
            check_formula(sig, context, b)
        case Top() | Bot():
            pass
        case ForallObj(v, b) | ExistsObj(v, b):
            for f in sorted(free_arrow_vars(b)):
                d = context.lookup(f)
                if d is not None and not d.is_obj and v in sort_vars(d.sort):
                    raise IllFormedQuantifier(v, f)
            check_formula(sig, _shadow(context, v, OBJ), b)
        case ForallArr(v, s, b) | ExistsArr(v, s, b):
            for end in (s.dom, s.cod):
                infer_sort(sig, context, end)
            check_formula(sig, _shadow(context, v, s), b)
        case _:
            raise TypeError(phi)


def _shadow(context: Context, v: str, sort) -> Context:
    # shadowing keeps later lookups pointing at the innermost binder
    return Context(context.decls + (Decl(v, sort),))


def is_well_formed(sig: Signature, context: Context, phi: Formula) -> bool:
    try:
        check_formula(sig, context, phi)
    except WellFormednessError:
        return False
    return True


# --------------------------------------------------------------------------
# printing


def show(x) -> str:
    match x:
        case ObjConst(n) | ObjVar(n) | ArrConst(n) | ArrVar(n):
            return n
        case Id(o):
            return f"id {show(o)}"
        case Comp(g, f):
            return f"comp {_arg(g)} {_arg(f)}"
        case ArrowSort(d, c):
            return f"{show(d)} -> {show(c)}"
        case str():
            return x
        case Context():
            return ", ".join(_show_decl(d) for d in x)
        case Decl():
            return _show_decl(x)
    return show_formula(x)


def _arg(t) -> str:
    s = show(t)
    return f"({s})" if isinstance(t, (Id, Comp)) else s


def _show_decl(d: Decl) -> str:
    return f"{d.var} : Obj" if d.is_obj else f"{d.var} : {show(d.sort)}"


_PREC = {Implies: 1, Or: 2, And: 3}
_OPS = {Implies: "=>", Or: "\\/", And: "/\\"}


def show_formula(phi: Formula, prec: int = 0) -> str:
    match phi:
        case Eq(l, r):
            return f"{show(l)} = {show(r)}"
        case Top():
            return "top"
        case Bot():
            return "bot"
        case And(a, b) | Or(a, b) | Implies(a, b):
            p = _PREC[type(phi)]
            s = f"{_operand(a, p + 1)} {_OPS[type(phi)]} {_operand(b, p)}"
            return f"({s})" if p < prec else s
        case ForallObj(v, b) | ExistsObj(v, b):
            q = "forall" if isinstance(phi, ForallObj) else "exists"
            s = f"{q} {v} . {show_formula(b)}"
            return f"({s})" if prec else s
        case ForallArr(v, srt, b) | ExistsArr(v, srt, b):
            q = "forall" if isinstance(phi, ForallArr) else "exists"
            s = f"{q} {v} : {show(srt)} . {show_formula(b)}"
            return f"({s})" if prec else s
    raise TypeError(phi)


def _operand(phi, prec):
    if isinstance(phi, BINDERS):
        return f"({show_formula(phi)})"
    return show_formula(phi, prec)


# --------------------------------------------------------------------------
# parsing

_TOKEN = re.compile(
    r"\s+|#[^\n]*|(?P<tok>->|=>|/\\|\\/|[()=.,:;{}]|[A-Za-z_][A-Za-z0-9_']*|∘)"
)
KEYWORDS = {"id", "comp", "forall", "exists", "top", "bot", "Obj"}


def tokenize(text: str) -> list:
    toks, pos = [], 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise SyntaxError_(f"unexpected character {text[pos]!r}", pos, text)
        if m.group("tok"):
            toks.append((m.group("tok"), m.start()))
        pos = m.end()
    return toks


class Parser:
    """Recursive-descent parser over a token list.

    Identifiers resolve to constants when they name a signature constant and
    are not bound; everything else is a variable.
    """

    def __init__(self, text: str, sig: Signature = EMPTY_SIGNATURE, bound=()):
        self.text = text
        self.toks = tokenize(text)
        self.i = 0
        self.sig = sig
        self.bound = list(bound)

    # helpers
    def peek(self, k=0):
        j = self.i + k
        return self.toks[j][0] if j < len(self.toks) else None

    def pos(self):
        return self.toks[self.i][1] if self.i < len(self.toks) else len(self.text)

    def error(self, msg):
        raise SyntaxError_(msg, self.pos(), self.text)

    def expect(self, tok):
        if self.peek() != tok:
            self.error(f"expected {tok!r}, found {self.peek()!r}")
        self.i += 1

    def ident(self):
        t = self.peek()
        if t is None or not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_']*", t) or t in KEYWORDS:
            self.error(f"expected identifier, found {t!r}")
        self.i += 1
        return t

    def at_end(self):
        return self.i >= len(self.toks)

    def finish(self):
        if not self.at_end():
            self.error(f"unexpected trailing input {self.peek()!r}")

    # terms
    def obj_term(self) -> ObjectTerm:
        name = self.ident()
        if name not in self.bound and name in self.sig.object_names:
            return ObjConst(name)
        return ObjVar(name)

    def arrow_term(self) -> ArrowTerm:
        t = self.peek()
        if t == "(":
            self.i += 1
            out = self.arrow_term()
            self.expect(")")
            return out
        if t == "id":
            self.i += 1
            return Id(self.obj_term())
        if t == "comp":
            self.i += 1
            g = self.arrow_term()
            f = self.arrow_term()
            return Comp(g, f)
        name = self.ident()
        if name not in self.bound and name in self.sig.arrow_names:
            return ArrConst(name)
        return ArrVar(name)

    def arrow_sort(self) -> ArrowSort:
        d = self.obj_term()
        self.expect("->")
        c = self.obj_term()
        return ArrowSort(d, c)

    # formulas
    def formula(self) -> Formula:
        left = self.disjunction()
        if self.peek() == "=>":
            self.i += 1
            return Implies(left, self.formula())
        return left

    def disjunction(self):
        left = self.conjunction()
        if self.peek() == "\\/":
            self.i += 1
            return Or(left, self.disjunction())
        return left

    def conjunction(self):
        left = self.unary()
        if self.peek() == "/\\":
            self.i += 1
            return And(left, self.conjunction())
        return left

    def unary(self):
        t = self.peek()
        if t in ("forall", "exists"):
            self.i += 1
            v = self.ident()
            if self.peek() == ":":
                self.i += 1
                s = self.arrow_sort()
                self.expect(".")
                body = self._under(v, self.formula)
                return (ForallArr if t == "forall" else ExistsArr)(v, s, body)
            self.expect(".")
            body = self._under(v, self.formula)
            return (ForallObj if t == "forall" else ExistsObj)(v, body)
        if t == "top":
            self.i += 1
            return TOP
        if t == "bot":
            self.i += 1
            return BOT
        if t == "(":
            save = self.i
            self.i += 1
            try:
                inner = self.formula()
                self.expect(")")
                if self.peek() != "=":
                    return inner
            except SyntaxError_:
                pass
            self.i = save
        lhs = self.arrow_term()
        self.expect("=")
        rhs = self.arrow_term()
        return Eq(lhs, rhs)

    def _under(self, v, fn):
        self.bound.append(v)
        try:
            return fn()
        finally:
            self.bound.pop()

    # contexts
    def context(self) -> Context:
        decls = []
        if self.at_end():
            return Context()
        while True:
            v = self.ident()
            self.expect(":")
            if self.peek() == "Obj":
                self.i += 1
                decls.append(Decl(v, OBJ))
            else:
                decls.append(Decl(v, self.arrow_sort()))
            self.bound.append(v)
            if self.peek() != ",":
                break
            self.i += 1
        return Context(tuple(decls))


def parse_formula(text: str, sig: Signature = EMPTY_SIGNATURE, bound=()) -> Formula:
    p = Parser(text, sig, bound)
    out = p.formula()
    p.finish()
    return out


def parse_term(text: str, sig: Signature = EMPTY_SIGNATURE, bound=()) -> ArrowTerm:
    p = Parser(text, sig, bound)
    out = p.arrow_term()
    p.finish()
    return out


def parse_context(text: str, sig: Signature = EMPTY_SIGNATURE) -> Context:
    p = Parser(text, sig)
    out = p.context()
    p.finish()
    return out


def parse(text: str, sig: Signature = EMPTY_SIGNATURE):
    """Parse a term, a formula or a context, whichever the text is."""
    if re.match(r"\s*[A-Za-z_][A-Za-z0-9_']*\s*:", text) and not re.match(
        r"\s*(forall|exists)\b", text
    ):
        return parse_context(text, sig)
    try:
        return parse_term(text, sig)
    except SyntaxError_:
        return parse_formula(text, sig)
