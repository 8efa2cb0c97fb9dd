"""Hypothesis strategies for well-formed formulas over a signature and a scope."""
from hypothesis import strategies as st

from catslash.syntax import (
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
    Id,
    Implies,
    ObjConst,
    ObjVar,
    Or,
    Top,
)

POSITIVE = ("eq", "top", "bot", "and", "or", "exists")
ALL = POSITIVE + ("implies", "forall")


def _atoms(sig, env, s):
    out = [ArrConst(n) for n, t in sig.arrows if t == s]
    out += [ArrVar(v) for v, t in env if t == s]
    if s.dom == s.cod:
        out.append(Id(s.dom))
    return out


@st.composite
def arrow_terms(draw, sig, objects, env, s, depth=2):
    """A term of sort ``s``; ``None`` when nothing of that sort is in scope."""
    atoms = _atoms(sig, env, s)
    if depth > 0 and draw(st.integers(0, 2)) == 0:
        mids = [m for m in objects if _atoms(sig, env, ArrowSort(s.dom, m)) and _atoms(sig, env, ArrowSort(m, s.cod))]
        if mids:
            m = draw(st.sampled_from(mids))
            g = draw(arrow_terms(sig, objects, env, ArrowSort(m, s.cod), depth - 1))
            f = draw(arrow_terms(sig, objects, env, ArrowSort(s.dom, m), depth - 1))
            return Comp(g, f)
    return draw(st.sampled_from(atoms)) if atoms else None


def _inhabited(sig, objects, env):
    return [ArrowSort(a, b) for a in objects for b in objects if _atoms(sig, env, ArrowSort(a, b))]


@st.composite
def formulas(draw, sig, objects, env=(), depth=3, kinds=ALL, object_binders=False):
    """A formula whose free names lie in ``objects`` and ``env`` (pairs of name and sort)."""
    kinds = [k for k in kinds if depth > 0 or k in ("eq", "top", "bot")]
    if not _inhabited(sig, objects, env):
        kinds = [k for k in kinds if k != "eq"]
    if object_binders and depth > 0 and ("forall" in kinds or "exists" in kinds):
        kinds = kinds + ["obj"]
    kind = draw(st.sampled_from(kinds))
    sub = lambda o=objects, e=env: formulas(sig, o, e, depth - 1, tuple(k for k in kinds if k != "obj"), object_binders)  # noqa: E731
    if kind == "eq":
        s = draw(st.sampled_from(_inhabited(sig, objects, env)))
        return Eq(draw(arrow_terms(sig, objects, env, s)), draw(arrow_terms(sig, objects, env, s)))
    if kind == "top":
        return Top()
    if kind == "bot":
        return Bot()
    if kind in ("and", "or", "implies"):
        cls = {"and": And, "or": Or, "implies": Implies}[kind]
        return cls(draw(sub()), draw(sub()))
    name = f"q{len(objects) + len(env)}"
    if kind == "obj":
        v = ObjVar("Q" + name)
        body = draw(sub(objects + (v,), env))
        cls = ForallObj if ("forall" in kinds and draw(st.booleans())) or "exists" not in kinds else ExistsObj
        return cls(v.name, body)
    s = ArrowSort(draw(st.sampled_from(objects)), draw(st.sampled_from(objects)))
    body = draw(sub(objects, env + ((name, s),)))
    return (ForallArr if kind == "forall" else ExistsArr)(name, s, body)


def object_terms(sig, ctx: Context):
    return tuple(ObjConst(o) for o in sig.objects) + tuple(ObjVar(v) for v in ctx.object_vars())


def arrow_env(ctx: Context):
    return tuple((d.var, d.sort) for d in ctx.arrow_decls())


@st.composite
def contexts(draw, sig, max_vars=3):
    """Contexts of at most ``max_vars`` declarations; arrow sorts use earlier objects or constants."""
    n = draw(st.integers(0, max_vars))
    ctx = Context()
    for i in range(n):
        objs = object_terms(sig, ctx)
        if not objs or draw(st.booleans()):
            ctx = ctx.extend(f"X{i}")
        else:
            ctx = ctx.extend(f"f{i}", ArrowSort(draw(st.sampled_from(objs)), draw(st.sampled_from(objs))))
    return ctx
