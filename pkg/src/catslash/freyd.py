"""Finite categories, global sections, and the Freyd cover as a comma category.

The cover glues a small category of sets ``Tiny`` to the canonical constants
of a term-complete theory along the global-sections functor GS.  Its objects
are triples ``(X, S, f : X -> GS(S))`` and its arrows commuting pairs.
"""
from __future__ import annotations

import hashlib
import itertools
import re
from dataclasses import dataclass, field

from . import kernel as K
from .slash import Model
from .syntax import (
    ArrConst,
    ArrowSort,
    Formula,
    ObjConst,
    Signature,
    show_formula,
)
from .theoria import (
    Assignment,
    ConstantCategory,
    Oracle,
    OutOfBudget,
    Theory,
    Unknown,
    Yes,
    constant_category,
    translate,
)


class CategoryError(Exception):
    pass


class CategoryLawError(CategoryError):
    pass


class GsNotInTiny(CategoryError):
    def __init__(self, S):
        super().__init__(f"GsNotInTiny({S})")
        self.object = S


@dataclass
class FiniteCategory:
    objects: tuple
    arrows: dict  # name -> (dom, cod)
    table: dict  # (g, f) -> g∘f
    identities: dict  # object -> arrow
    name: str = "C"

    def dom(self, a):
        return self.arrows[a][0]

    def cod(self, a):
        return self.arrows[a][1]

    def compose(self, g, f):
        return self.table[(g, f)]

    def hom(self, x, y) -> list:
        return [a for a, (d, c) in self.arrows.items() if d == x and c == y]

    def validate(self) -> None:
        """Exhaustive identity and associativity check; also every composable pair must be tabulated."""
        for o in self.objects:
            i = self.identities.get(o)
            if i is None or self.arrows.get(i) != (o, o):
                raise CategoryLawError(f"no identity on {o}")
        for a, (d, c) in self.arrows.items():
            if d not in self.objects or c not in self.objects:
                raise CategoryLawError(f"{a} has an unknown endpoint")
        incoming: dict = {}
        for a, (d, c) in self.arrows.items():
            incoming.setdefault(c, []).append(a)
        for g, (dg, cg) in self.arrows.items():
            for f in incoming.get(dg, ()):
                h = self.table.get((g, f))
                if h is None:
                    raise CategoryLawError(f"missing composite {g} o {f}")
                if self.arrows.get(h) != (self.dom(f), cg):
                    raise CategoryLawError(f"{g} o {f} = {h} has the wrong sort")
        for f, (d, c) in self.arrows.items():
            if self.table[(self.identities[c], f)] != f or self.table[(f, self.identities[d])] != f:
                raise CategoryLawError(f"identity law fails at {f}")
        for g, (dg, _) in self.arrows.items():
            for f in incoming.get(dg, ()):
                gf = self.table[(g, f)]
                for e in incoming.get(self.dom(f), ()):
                    if self.table[(g, self.table[(f, e)])] != self.table[(gf, e)]:
                        raise CategoryLawError(f"associativity fails at {g}, {f}, {e}")


def sets_upto(n: int) -> FiniteCategory:
    """The skeleton of finite sets of size at most ``n``; arrows are value tuples."""
    objects = tuple(str(k) for k in range(n + 1))
    arrows, funcs = {}, {}
    for d in range(n + 1):
        for c in range(n + 1):
            for vals in itertools.product(range(c), repeat=d):
                name = f"s{d}{c}_" + "".join(map(str, vals))
                arrows[name] = (str(d), str(c))
                funcs[name] = vals
    by_vals = {(arrows[a], v): a for a, v in funcs.items()}
    table = {}
    for g, vg in funcs.items():
        for f, vf in funcs.items():
            if arrows[f][1] == arrows[g][0]:
                table[(g, f)] = by_vals[((arrows[f][0], arrows[g][1]), tuple(vg[i] for i in vf))]
    identities = {o: f"s{o}{o}_" + "".join(map(str, range(int(o)))) for o in objects}
    return FiniteCategory(objects, arrows, table, identities, name=f"sets_upto_{n}")


# file format:
#   category NAME
#   object X Y
#   arrow f : X -> Y
#   identity X idX
#   h o f = k          (also "h ∘ f = k")
_ROW = re.compile(r"^(\S+)\s*(?:o|∘)\s*(\S+)\s*=\s*(\S+)$")


def parse_category(text: str) -> FiniteCategory:
    name, objects, arrows, table, identities = "C", [], {}, {}, {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        words = line.split()
        try:
            if words[0] == "category":
                name = words[1]
            elif words[0] == "object":
                objects.extend(words[1:])
            elif words[0] == "arrow":
                m = re.fullmatch(r"arrow\s+(\S+)\s*:\s*(\S+)\s*->\s*(\S+)", line)
                arrows[m.group(1)] = (m.group(2), m.group(3))
            elif words[0] == "identity":
                identities[words[1]] = words[2]
            else:
                m = _ROW.match(line)
                table[(m.group(1), m.group(2))] = m.group(3)
        except (AttributeError, IndexError):
            raise CategoryError(f"line {lineno}: cannot read {raw!r}") from None
    C = FiniteCategory(tuple(objects), arrows, table, identities, name)
    C.validate()
    return C


def dump_category(C: FiniteCategory) -> str:
    lines = [f"category {C.name}", "object " + " ".join(C.objects)]
    lines += [f"arrow {a} : {d} -> {c}" for a, (d, c) in C.arrows.items()]
    lines += [f"identity {o} {C.identities[o]}" for o in C.objects]
    lines += [f"{g} o {f} = {h}" for (g, f), h in C.table.items()]
    return "\n".join(lines) + "\n"


# --------------------------------------------------------------------------
# global sections


@dataclass
class GlobalSections:
    theory: Theory
    constants: ConstantCategory
    terminal: str
    sets: dict  # object -> tuple of canonical constants One -> object
    maps: dict  # arrow constant -> {element: element}

    def __call__(self, x):
        return self.sets[x] if x in self.sets else self.maps[x]

    def check_functor(self) -> None:
        cc = self.constants
        for o, i in cc.identities.items():
            if any(self.maps[i][e] != e for e in self.sets[o]):
                raise CategoryLawError(f"GS does not preserve the identity on {o}")
        for (g, f), h in cc.table.items():
            dom = cc.sorts[f].dom.name
            for e in self.sets[dom]:
                if self.maps[g][self.maps[f][e]] != self.maps[h][e]:
                    raise CategoryLawError(f"GS does not preserve {g} o {f}")


def global_sections(T: Theory, terminal: str = "One") -> GlobalSections:
    """GS(A) = canonical constants ``terminal -> A``; GS(phi) = post-composition."""
    cc = T.metadata.get("constants") or constant_category(T)
    if terminal not in cc.objects:
        raise CategoryError(f"no object constant {terminal}")
    sets = {o: tuple(sorted(cc.hom(terminal, o))) for o in cc.objects}
    maps = {}
    for phi, s in cc.sorts.items():
        row = {}
        for e in sets[s.dom.name]:
            if (phi, e) not in cc.table:
                raise OutOfBudget(phi)
            row[e] = cc.table[(phi, e)]
        maps[phi] = row
    return GlobalSections(T, cc, terminal, sets, maps)


# --------------------------------------------------------------------------
# the comma category


@dataclass
class FreydCategory(FiniteCategory):
    tiny: FiniteCategory = None
    base: ConstantCategory = None
    obj_data: dict = field(default_factory=dict)  # F object -> (X, S, down)
    arr_data: dict = field(default_factory=dict)  # F arrow -> (h, phi)
    carrier: dict = field(default_factory=dict)  # base object -> Tiny object standing for GS(S)
    lift_obj: dict = field(default_factory=dict)  # base object -> F object (GS(S), S, id)
    lift_arr: dict = field(default_factory=dict)  # base arrow -> F arrow (GS(phi), phi)
    unit: str = None  # (terminal of Tiny, One, unique map)

    def plus(self, x):
        return self.obj_data[x][0] if x in self.obj_data else self.arr_data[x][0]

    def minus(self, x):
        return self.obj_data[x][1] if x in self.obj_data else self.arr_data[x][1]

    def down(self, x):
        return self.obj_data[x][2]

    def over(self, S) -> list:
        return [o for o, (_, s, _) in self.obj_data.items() if s == S]

    def check_projections(self) -> None:
        """plus and minus are functors and the defining squares commute."""
        Y, B = self.tiny, self.base
        for o, i in self.identities.items():
            if self.plus(i) != Y.identities[self.plus(o)] or self.minus(i) != B.identities[self.minus(o)]:
                raise CategoryLawError(f"projection loses the identity on {o}")
        for (g, f), h in self.table.items():
            if Y.compose(self.plus(g), self.plus(f)) != self.plus(h):
                raise CategoryLawError(f"plus does not preserve {g} o {f}")
            if B.compose(self.minus(g), self.minus(f)) != self.minus(h):
                raise CategoryLawError(f"minus does not preserve {g} o {f}")
        for a, (d, c) in self.arrows.items():
            h, phi = self.arr_data[a]
            gs_phi = self._gs_arrow[phi]
            if Y.compose(gs_phi, self.down(d)) != Y.compose(self.down(c), h):
                raise CategoryLawError(f"square for {a} does not commute")

    _gs_arrow: dict = field(default_factory=dict)


def _points(C: FiniteCategory, terminal: str, x: str) -> list:
    return sorted(C.hom(terminal, x))


def _tiny_terminal(C: FiniteCategory) -> str:
    for o in C.objects:
        if all(len(C.hom(x, o)) == 1 for x in C.objects):
            return o
    raise CategoryError(f"{C.name} has no terminal object")


def comma_glue(tiny: FiniteCategory, T: Theory, GS: GlobalSections) -> FreydCategory:
    """All triples (X, S, f: X -> GS(S)) and all commuting pairs (h, phi) between them."""
    B = GS.constants
    one = _tiny_terminal(tiny)
    carrier, point_of = {}, {}
    for S in B.objects:
        n = len(GS.sets[S])
        for X in tiny.objects:
            pts = _points(tiny, one, X)
            if len(pts) == n:
                carrier[S] = X
                # i-th global section of S is the i-th point of X, both in sorted order
                point_of[S] = dict(zip(GS.sets[S], pts))
                break
        else:
            raise GsNotInTiny(S)
    gs_arrow = {}
    for phi, s in B.sorts.items():
        S1, S2 = s.dom.name, s.cod.name
        want = {point_of[S1][e]: point_of[S2][GS.maps[phi][e]] for e in GS.sets[S1]}
        for h in tiny.hom(carrier[S1], carrier[S2]):
            if all(tiny.compose(h, p) == q for p, q in want.items()):
                gs_arrow[phi] = h
                break
        else:
            raise GsNotInTiny(S1)
    objs = []
    for S in B.objects:
        for X in tiny.objects:
            for f in sorted(tiny.hom(X, carrier[S])):
                objs.append((X, S, f))
    obj_name = {t: f"F_o{k}" for k, t in enumerate(objs)}
    arrs = []
    for o1 in objs:
        for o2 in objs:
            (X, S, f), (Y, S2, g) = o1, o2
            for phi in B.hom(S, S2):
                lhs = tiny.compose(gs_arrow[phi], f)
                for h in sorted(tiny.hom(X, Y)):
                    if lhs == tiny.compose(g, h):
                        arrs.append((obj_name[o1], obj_name[o2], h, phi))
    arrows, arr_data, index = {}, {}, {}
    for k, (d, c, h, phi) in enumerate(arrs):
        a = f"F_a{k}"
        arrows[a] = (d, c)
        arr_data[a] = (h, phi)
        index[(d, c, h, phi)] = a
    obj_data = {obj_name[t]: t for t in objs}
    table = {}
    by_cod: dict = {}
    for a, (d, c) in arrows.items():
        by_cod.setdefault(c, []).append(a)
    for g, (dg, cg) in arrows.items():
        hg, pg = arr_data[g]
        for f in by_cod.get(dg, ()):
            hf, pf = arr_data[f]
            table[(g, f)] = index[(arrows[f][0], cg, tiny.compose(hg, hf), B.compose(pg, pf))]
    identities = {}
    for o, (X, S, _) in obj_data.items():
        identities[o] = index[(o, o, tiny.identities[X], B.identities[S])]
    lift_obj = {S: obj_name[(carrier[S], S, tiny.identities[carrier[S]])] for S in B.objects}
    lift_arr = {}
    for phi, s in B.sorts.items():
        lift_arr[phi] = index[(lift_obj[s.dom.name], lift_obj[s.cod.name], gs_arrow[phi], phi)]
    unit_down = tiny.hom(one, carrier[GS.terminal])[0]
    F = FreydCategory(
        tuple(obj_data), arrows, table, identities, name=f"Freyd({tiny.name})",
        tiny=tiny, base=B, obj_data=obj_data, arr_data=arr_data, carrier=carrier,
        lift_obj=lift_obj, lift_arr=lift_arr, unit=obj_name[(one, GS.terminal, unit_down)],
    )
    F._gs_arrow = gs_arrow
    return F


# --------------------------------------------------------------------------
# the theory T* and its model


class StarOracle(Oracle):
    """Decides a sentence of T* by pushing it through ``minus`` into the base theory."""

    def __init__(self, theory):
        self.theory = theory

    def query(self, phi):
        base = self.theory.base
        psi = translate(self.theory.minus, phi)
        if base.query(psi):
            return Yes(self.theory.register(phi))
        return Unknown("base theory does not prove the image under minus")

    def complete_for(self, phi):
        return self.theory.base.oracle.complete_for(translate(self.theory.minus, phi))


class StarTheory(Theory):
    """Constants are the objects and arrows of the cover; provability is checked downstairs."""

    def __init__(self, F: FreydCategory, base: Theory):
        sig = Signature(
            tuple(F.objects),
            tuple((a, ArrowSort(ObjConst(d), ObjConst(c))) for a, (d, c) in F.arrows.items()),
        )
        lift = {ObjConst(S): ObjConst(o) for S, o in F.lift_obj.items()}
        lift.update({ArrConst(p): ArrConst(a) for p, a in F.lift_arr.items()})
        self.lift = Assignment.of(lift)
        minus = {ObjConst(o): ObjConst(F.minus(o)) for o in F.objects}
        minus.update({ArrConst(a): ArrConst(F.minus(a)) for a in F.arrows})
        self.minus = Assignment.of(minus)
        self.base = base
        self.cover = F
        self._registered: dict = {}
        axioms = [(ax_id, translate(self.lift, phi)) for ax_id, phi in base.axioms.items()]
        super().__init__(base.name + "_star", sig, axioms, StarOracle, check=False)
        self.metadata["constants"] = ConstantCategory(
            tuple(F.objects),
            {ArrowSort(ObjConst(d), ObjConst(c)): tuple(F.hom(d, c)) for d in F.objects for c in F.objects},
            dict(F.table),
            dict(F.identities),
            {a: ArrowSort(ObjConst(d), ObjConst(c)) for a, (d, c) in F.arrows.items()},
        )

    def register(self, phi: Formula):
        """Name a sentence whose image under minus the base theory proves."""
        ax = "minus:" + hashlib.sha256(show_formula(phi).encode()).hexdigest()[:16]
        self._registered[ax] = phi
        return K.Axiom(ax)

    def axiom(self, ax_id):
        return self.axioms.get(ax_id) or self._registered.get(ax_id)


def star_theory(F: FreydCategory, T: Theory) -> StarTheory:
    return StarTheory(F, T)


def freyd_model(F: FreydCategory, Tstar: StarTheory | None = None) -> Model:
    """Arrows are identified only when they are the same arrow of the cover."""
    if Tstar is None:
        raise ValueError("freyd_model needs the theory built by star_theory")
    return Model(Tstar, Tstar.metadata["constants"])


def hom_bijection(F: FreydCategory, O: str) -> dict:
    """hom(unit, O) -> points of O.plus, via the plus projection."""
    tiny = F.tiny
    one = _tiny_terminal(tiny)
    out = {}
    for a in F.hom(F.unit, O):
        h = F.plus(a)
        if tiny.dom(h) != one:
            raise CategoryError("unit does not sit over the terminal set")
        out[a] = h
    return out
