"""Command line front end: ``catslash check|prove|slash|extract|glue|pipeline``."""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import kernel as K
from .extractor import ExtractionError, certify_axioms, extract
from .freyd import (
    CategoryError,
    comma_glue,
    dump_category,
    global_sections,
    parse_category,
    sets_upto,
)
from .pipeline import PipelineError, load_goal, report_bytes, run_pipeline
from .search import bounded_search
from .slash import (
    ModelError,
    OracleIncomplete,
    discrete_model,
    fp_eval,
    parse_model,
    validate_model,
)
from .syntax import (
    EMPTY_CONTEXT,
    EMPTY_SIGNATURE,
    SyntaxError_,
    WellFormednessError,
    check_formula,
    parse_formula,
)
from .theoria import (
    TheoryFormatError,
    oracle_from_spec,
    parse_theory,
    standard_oracle,
    term_complete_extension,
)


class UsageError(Exception):
    pass


def _oracle(args):
    if args.oracle == "standard":
        return standard_oracle(args.certs, args.depth)
    return oracle_from_spec(args.oracle, args.certs)


def _theory(args, required=True):
    if args.theory is None:
        if required:
            raise UsageError("--theory is required")
        return None
    return parse_theory(Path(args.theory).read_text(), _oracle(args))


def _category(spec: str):
    if spec.startswith("sets:"):
        return sets_upto(int(spec.split(":", 1)[1]))
    return parse_category(Path(spec).read_text())


def _formula_arg(text: str, sig):
    path = Path(text)
    if path.suffix == ".formula" and path.exists():
        text = path.read_text().strip()
    return parse_formula(text, sig)


def _emit(args, text: str):
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


# --------------------------------------------------------------------------
# commands


def cmd_check(args) -> int:
    """Parse and check every input file; one diagnostic line per problem."""
    failures = 0
    T = None
    if args.theory:
        try:
            T = _theory(args)
        except (TheoryFormatError, SyntaxError_, WellFormednessError, ValueError) as e:
            print(f"{args.theory}: {type(e).__name__}: {e}")
            return 1
    sig = T.signature if T else EMPTY_SIGNATURE
    for name in args.files:
        path = Path(name)
        try:
            text = path.read_text()
            if path.suffix == ".theory":
                parse_theory(text)
            elif path.suffix == ".model":
                if T is None:
                    raise UsageError("checking a model needs --theory")
                validate_model(T, parse_model(text, T))
            elif path.suffix in (".cat", ".category"):
                parse_category(text)
            elif path.suffix == ".proof":
                if T is None:
                    raise UsageError("checking a proof needs --theory")
                p, phi = load_goal(text, sig)
                K.check_proof(K.Judgement(T, EMPTY_CONTEXT, (), phi), p)
            else:
                bad = 0
                for lineno, line in enumerate(text.splitlines(), 1):
                    line = line.split("#", 1)[0].strip()
                    if not line:
                        continue
                    try:
                        check_formula(sig, EMPTY_CONTEXT, parse_formula(line, sig))
                    except (SyntaxError_, WellFormednessError) as e:
                        print(f"{path}:{lineno}: {type(e).__name__}: {e}")
                        bad += 1
                if bad:
                    failures += bad
                    continue
            print(f"{path}: ok")
        except (OSError, TheoryFormatError, SyntaxError_, WellFormednessError, ValueError,
                ModelError, CategoryError, K.ProofError, UsageError) as e:
            print(f"{path}: {type(e).__name__}: {e}")
            failures += 1
    return 1 if failures else 0


def cmd_prove(args) -> int:
    T = _theory(args)
    phi = _formula_arg(args.formula, T.signature)
    p = bounded_search(K.Judgement(T, EMPTY_CONTEXT, (), phi), args.depth)
    if p is None:
        ans = T.query(phi)
        if not ans:
            print(f"no proof found ({ans.reason})")
            return 1
        p = ans.proof
        K.check_proof(K.Judgement(T, EMPTY_CONTEXT, (), phi), p)
    _emit(args, K.dump_proof(p, phi))
    return 0


def _model(args, T):
    return parse_model(Path(args.model).read_text(), T) if args.model else discrete_model(T)


def cmd_slash(args) -> int:
    T = _theory(args)
    M = _model(args, T)
    validate_model(T, M)
    cert = fp_eval(T, M, _formula_arg(args.formula, T.signature))
    _emit(args, cert.dumps() + "\n")
    return 0 if cert.verdict else 1


def cmd_extract(args) -> int:
    T = _theory(args)
    M = _model(args, T)
    validate_model(T, M)
    certs = certify_axioms(T, M)
    p, phi = load_goal(Path(args.proof).read_text(), T.signature)
    res = extract(T, M, certs, p, phi)
    doc = {"formula": args.proof, "payload": str(res.payload), "certificate": res.certificate.to_json()}
    _emit(args, json.dumps(doc, sort_keys=True, indent=1) + "\n")
    return 0


def cmd_glue(args) -> int:
    T = _theory(args)
    Tc = term_complete_extension(T, budget=args.budget).target
    F = comma_glue(_category(args.category), Tc, global_sections(Tc))
    F.validate()
    F.check_projections()
    lines = [f"objects: {len(F.objects)}", f"arrows: {len(F.arrows)}"]
    for S in Tc.signature.objects:
        lines.append(f"over {S}: {len(F.over(S))}")
    for o in F.objects:
        X, S, f = F.obj_data[o]
        lines.append(f"{o} = ({X}, {S}, {f})")
    text = "\n".join(lines) + "\n"
    if args.out:
        Path(args.out).write_text(dump_category(F))
    sys.stdout.write(text)
    return 0


def cmd_pipeline(args) -> int:
    T = _theory(args)
    goals = []
    if args.goals:
        for path in sorted(Path(args.goals).glob("*.proof")):
            goals.append(load_goal(path.read_text(), T.signature))
    result = run_pipeline(T, _category(args.category), goals, budget=args.budget, depth=args.term_depth)
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "report.json").write_bytes(report_bytes(result))
        (out / "report.txt").write_text(result.to_text())
    sys.stdout.write(result.to_text())
    return 0 if result.report.consistent else 1


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="catslash", description=__doc__)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--theory", help="theory file")
    common.add_argument("--oracle", default="congruence", help="congruence | standard | certs | search:N")
    common.add_argument("--certs", help="certificate directory for the certs oracle")
    common.add_argument("--depth", type=int, default=8, help="proof search bound")
    common.add_argument("--budget", type=int, default=16, help="term-complete extension budget")
    common.add_argument("--out", help="output file (directory for pipeline)")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", parents=[common], help="parse and check input files")
    p.add_argument("files", nargs="*")
    p.set_defaults(run=cmd_check)

    p = sub.add_parser("prove", parents=[common], help="search for a proof of a sentence")
    p.add_argument("formula", help="sentence text or a .formula file")
    p.set_defaults(run=cmd_prove)

    p = sub.add_parser("slash", parents=[common], help="evaluate FP in a model")
    p.add_argument("formula")
    p.add_argument("--model", help="model file (default: discrete)")
    p.set_defaults(run=cmd_slash)

    p = sub.add_parser("extract", parents=[common], help="extract a witness or disjunct from a proof")
    p.add_argument("proof")
    p.add_argument("--model")
    p.set_defaults(run=cmd_extract)

    p = sub.add_parser("glue", parents=[common], help="build the Freyd cover")
    p.add_argument("--category", default="sets:2", help="category file or sets:N")
    p.set_defaults(run=cmd_glue)

    p = sub.add_parser("pipeline", parents=[common], help="run the whole chain and write reports")
    p.add_argument("--category", default="sets:2")
    p.add_argument("--goals", help="directory of .proof files")
    p.add_argument("--term-depth", type=int, default=1, help="depth of stage-2 terms")
    p.set_defaults(run=cmd_pipeline)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.budget < 0 or args.depth < 0:
        print("error: budgets must be nonnegative", file=sys.stderr)
        return 2
    try:
        return args.run(args)
    except (UsageError, OSError, TheoryFormatError, SyntaxError_, WellFormednessError, ModelError,
            CategoryError, K.ProofError, ExtractionError, OracleIncomplete, PipelineError, ValueError) as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
