"""The shipped goal corpus for the demo theory, built from a handful of proof shapes.

Regenerate the files with ``python -m catslash.corpus DIR``.
"""
from __future__ import annotations

import sys
from pathlib import Path

from . import kernel as K
from .pipeline import dump_goal
from .syntax import ArrConst, ArrVar, parse_formula, parse_term, show
from .theoria import parse_theory


def goal_corpus(sig) -> list:
    """``(name, proof, formula)`` triples over a signature with ``a1, a2 : One -> A``."""
    F = lambda s: parse_formula(s, sig)  # noqa: E731
    a1, a2 = ArrConst("a1"), ArrConst("a2")
    terms = ["a1", "a2", "comp a1 i_One", "comp i_A a2", "comp (id A) a1", "comp a2 (id One)"]
    out = []
    for k, text in enumerate(terms):
        t = parse_term(text, sig)
        ts = show(t)
        cases = K.ForallArrElim(K.Axiom("hom_One_A"), t)

        ex = F(f"exists x : One -> A . x = {ts}")
        out.append((f"exists_intro_{k}", K.ExistsArrIntro(ex, t, K.EqRefl(t)), ex))

        ey = F(f"exists y : One -> A . y = {ts}")
        p = K.OrElim(cases, K.ExistsArrIntro(ey, a1, K.EqSym(K.Hyp(0))), K.ExistsArrIntro(ey, a2, K.EqSym(K.Hyp(0))))
        out.append((f"or_elim_exists_{k}", p, ey))

        out.append((f"cases_{k}", cases, F(f"{ts} = a1 \\/ {ts} = a2")))

        left, right = F(f"{ts} = a1"), F(f"{ts} = a2")
        swap = K.ImpliesIntro(
            F(f"{ts} = a1 \\/ {ts} = a2"),
            K.OrElim(K.Hyp(0), K.OrIntroR(K.Hyp(1), right), K.OrIntroL(K.Hyp(1), left)),
        )
        out.append((f"implies_elim_swap_{k}", K.ImpliesElim(swap, cases), F(f"{ts} = a2 \\/ {ts} = a1")))

    out.append(("or_intro_left", K.OrIntroL(K.EqRefl(a1), F("a1 = a2")), F("a1 = a1 \\/ a1 = a2")))
    out.append(("or_intro_right", K.OrIntroR(K.EqRefl(a2), F("a2 = a1")), F("a2 = a1 \\/ a2 = a2")))
    ez = F("exists z : One -> A . z = a2 /\\ z = z")
    v = ArrVar("v")
    p = K.ExistsArrElim(K.Axiom("pick"), "v", K.ExistsArrIntro(ez, v, K.AndIntro(K.Hyp(0), K.EqRefl(v))))
    out.append(("exists_elim_pick", p, ez))
    two = F("exists x : One -> A . exists y : One -> A . x = a1 /\\ y = a2")
    inner = F("exists y : One -> A . a1 = a1 /\\ y = a2")
    p = K.ExistsArrIntro(two, a1, K.ExistsArrIntro(inner, a2, K.AndIntro(K.EqRefl(a1), K.EqRefl(a2))))
    out.append(("exists_intro_pair", p, two))
    mp = F("(a1 = a1 => a2 = a2 \\/ a2 = a1) => a2 = a2 \\/ a2 = a1")
    p = K.ImpliesIntro(F("a1 = a1 => a2 = a2 \\/ a2 = a1"), K.ImpliesElim(K.Hyp(0), K.EqRefl(a1)))
    out.append(("modus_ponens_lemma", p, mp))
    return out


def write_corpus(sig, directory) -> list:
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    paths = []
    for i, (name, p, phi) in enumerate(goal_corpus(sig)):
        path = d / f"{i:02d}_{name}.proof"
        path.write_text(dump_goal(p, phi))
        paths.append(path)
    return paths


if __name__ == "__main__":
    here = Path(__file__).parent / "fixtures" / "demo"
    T = parse_theory((here / "demo.theory").read_text())
    for path in write_corpus(T.signature, sys.argv[1] if len(sys.argv) > 1 else here / "goals"):
        print(path)
