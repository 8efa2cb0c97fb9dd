"""The whole chain: term-complete extension, Freyd cover, T* and M, certification, extraction."""
from __future__ import annotations

import json
from dataclasses import dataclass, field

from . import kernel as K
from .extractor import AxiomNotCertified, Report, certify_axioms, run_criterion
from .freyd import comma_glue, freyd_model, global_sections, star_theory
from .slash import OracleIncomplete, validate_model
from .syntax import Formula, parse_formula, show_formula
from .theoria import term_complete_extension, translate, translate_proof


class PipelineError(Exception):
    def __init__(self, stage, detail):
        super().__init__(f"{stage}: {detail}")
        self.stage = stage
        self.detail = str(detail)


def load_goal(text: str, sig):
    """A proof file whose ``# conclusion:`` header names the goal."""
    phi = None
    for line in text.splitlines():
        if line.startswith("# conclusion:"):
            phi = parse_formula(line.split(":", 1)[1].strip(), sig)
            break
    if phi is None:
        raise ValueError("proof file has no '# conclusion:' line")
    return K.load_proof(text, sig), phi


def dump_goal(p, phi: Formula) -> str:
    return K.dump_proof(p, phi)


@dataclass
class PipelineResult:
    report: Report
    stages: dict = field(default_factory=dict)

    def dumps(self) -> str:
        return self.report.dumps()

    def to_text(self) -> str:
        return self.report.to_text()


def run_pipeline(base, tiny, goals=(), budget: int = 16, depth: int = 1, terminal: str = "One") -> PipelineResult:
    """Run every stage; the first failure aborts with its stage name.

    ``goals`` are ``(proof, formula)`` pairs in the language of ``base``; they
    are carried into T* along the extension and the canonical lift.
    """
    stages = {}
    try:
        E = term_complete_extension(base, budget=budget, depth=depth)
    except Exception as e:  # noqa: BLE001
        raise PipelineError("term_complete_extension", e) from e
    Tc = E.target
    stages["extension"] = E
    try:
        GS = global_sections(Tc, terminal)
        GS.check_functor()
        F = comma_glue(tiny, Tc, GS)
        F.validate()
        F.check_projections()
    except Exception as e:  # noqa: BLE001
        raise PipelineError("freyd_cover", e) from e
    Ts = star_theory(F, Tc)
    M = freyd_model(F, Ts)
    stages.update(gs=GS, cover=F, star=Ts, model=M)
    try:
        validate_model(Ts, M)
    except Exception as e:  # noqa: BLE001
        raise PipelineError("freyd_model", e) from e
    try:
        certs = certify_axioms(Ts, M)
    except (AxiomNotCertified, OracleIncomplete) as e:
        raise PipelineError("certification", e) from e
    stages["certs"] = certs
    lifted = []
    for p, phi in goals:
        sigma = E.translation.then(Ts.lift)
        lifted.append((translate_proof(sigma, p), translate(sigma, phi)))
    meta = {
        "theory": base.name,
        "stage1": len(E.metadata["stage1"]),
        "stage2": len(E.metadata["stage2"]),
        "skipped": len(E.metadata["skipped"]),
        "merged": len(E.metadata.get("merged", ())),
        "base_arrows": len(Tc.signature.arrows),
        "cover_objects": len(F.objects),
        "cover_arrows": len(F.arrows),
        "certified_axioms": len(certs),
        "goals": len(lifted),
    }
    try:
        report = run_criterion(Ts, M, certs, lifted, metadata=meta)
    except OracleIncomplete as e:
        raise PipelineError("extraction", e) from e
    for rec, (_, phi) in zip(report.records, goals):
        rec["source"] = show_formula(phi)
    return PipelineResult(report, stages)


def report_bytes(result: PipelineResult) -> bytes:
    return json.dumps(result.report.to_json(), sort_keys=True, indent=1).encode() + b"\n"
