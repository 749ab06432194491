"""Full audit of one model response: map soundness, equation correctness,
step recomputation, error tags, and the x/y scoreboard."""

from __future__ import annotations

import json
from dataclasses import dataclass

from absint.audit.parsing import parse_response
from absint.audit.soundness import (
    SOUND_STATUSES,
    FuzzConfig,
    LocationVerdict,
    check_map_soundness,
)
from absint.audit.steps import check_steps, classify_errors
from absint.compositional import run_compositional
from absint.domain import AbstractState, Interval
from absint.lang.annotate import AnnotatedProgram
from absint.lang.render import render_guard
from absint.transitional import (
    Filter,
    Interpret,
    Join,
    Ref,
    TopEntry,
    normalize_fpe,
    run_transitional,
)
from absint.compositional import render_stmt

STRATEGIES = ("compositional", "transitional")


@dataclass
class AuditReport:
    strategy: str
    n_locations: int
    map_present: bool
    per_location: dict  # location -> LocationVerdict ({} when no map returned)
    fpe_per_location: dict  # location -> {"status", "diff"}; None for compositional
    step_verdicts: list
    steps: list
    error_tags: tuple
    tag_evidence: dict
    scores: dict  # {"im_sound": "x/y" or "-", "fpe_correct": ...}
    diagnostics: list


# --- fixpoint equation comparison -------------------------------------------


def _kind(term) -> str:
    return {
        TopEntry: "entry constant",
        Ref: "location reference",
        Interpret: "Interpret",
        Filter: "Filter",
        Join: "Join",
    }[type(term)]


def term_diff(got, want):
    """First structural difference between two normalized terms, or None."""
    if type(got) is not type(want):
        return f"{_kind(got)} where {_kind(want)} belongs"
    if isinstance(got, Ref):
        if got.location != want.location:
            return f"location reference {{P{got.location}}} where {{P{want.location}}} belongs"
        return None
    if isinstance(got, Interpret):
        if got.stmt != want.stmt:
            return f"statement {render_stmt(got.stmt)!r} where {render_stmt(want.stmt)!r} belongs"
        return term_diff(got.arg, want.arg)
    if isinstance(got, Filter):
        if got.guard != want.guard:
            return f"guard {render_guard(got.guard)!r} where {render_guard(want.guard)!r} belongs"
        return term_diff(got.arg, want.arg)
    if isinstance(got, Join):
        return term_diff(got.arg1, want.arg1) or term_diff(got.arg2, want.arg2)
    return None


def check_fpes(llm_fpes, ref_fpes) -> dict:
    """Per-location equation verdicts, compared after normalization."""
    got = {eq.location: normalize_fpe(eq) for eq in llm_fpes}
    out = {}
    for ref in ref_fpes:
        want = normalize_fpe(ref)
        mine = got.get(ref.location)
        if mine is None:
            out[ref.location] = {"status": "missing", "diff": None}
        elif mine == want:
            out[ref.location] = {"status": "correct", "diff": None}
        else:
            diff = term_diff(mine.rhs, want.rhs) or "terms differ"
            out[ref.location] = {"status": "incorrect", "diff": diff}
    return out


# --- scoring ----------------------------------------------------------------


def fraction(x: int, y: int) -> str:
    return f"{x}/{y}"


def score_map(per_location: dict, n_locations: int, map_present: bool) -> str:
    if not map_present:
        return "-"
    sound = sum(1 for v in per_location.values() if v.status in SOUND_STATUSES)
    return fraction(sound, n_locations)


def score_fpes(fpe_per_location: dict, n_locations: int) -> str:
    correct = sum(1 for v in fpe_per_location.values() if v["status"] == "correct")
    return fraction(correct, n_locations)


def coerce_claimed_map(final_map: dict, prog: AnnotatedProgram) -> dict:
    claimed = {}
    for loc, state in (final_map or {}).items():
        if not 0 <= loc < prog.n_locations:
            continue
        env = dict(state.env)
        claimed[loc] = AbstractState.make(
            prog.variables, {v: env.get(v, Interval.top()) for v in prog.variables}
        )
    return claimed


# --- top-level audit ---------------------------------------------------------


def reference_analysis(prog: AnnotatedProgram, strategy: str):
    """Reference invariant map (and equation system for transitional)."""
    if strategy == "compositional":
        return run_compositional(prog).invariant_map, None
    system, ref_map, _ = run_transitional(prog)
    return ref_map, system


def audit_response(
    prog: AnnotatedProgram,
    response_text: str,
    strategy: str,
    finish_reason: str = None,
    fuzz: FuzzConfig = None,
) -> AuditReport:
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown strategy {strategy!r}")
    parsed = parse_response(response_text, strategy)
    ref_map, system = reference_analysis(prog, strategy)

    map_present = parsed.final_map is not None
    if map_present:
        claimed = coerce_claimed_map(parsed.final_map, prog)
        per_location = check_map_soundness(prog, claimed, ref_map, fuzz)
    else:
        per_location = {}

    fpe_per_location = None
    if strategy == "transitional":
        fpe_per_location = check_fpes(parsed.fpes, system.equations)

    verdicts = check_steps(parsed.steps, system)
    tags, evidence = classify_errors(
        parsed,
        verdicts,
        prog=prog,
        fpe_results=fpe_per_location,
        finish_reason=finish_reason,
    )

    scores = {"im_sound": score_map(per_location, prog.n_locations, map_present)}
    if fpe_per_location is not None:
        scores["fpe_correct"] = score_fpes(fpe_per_location, prog.n_locations)
    else:
        scores["fpe_correct"] = "-"

    return AuditReport(
        strategy=strategy,
        n_locations=prog.n_locations,
        map_present=map_present,
        per_location=per_location,
        fpe_per_location=fpe_per_location,
        step_verdicts=verdicts,
        steps=parsed.steps,
        error_tags=tuple(sorted(tags)),
        tag_evidence={k: list(v) for k, v in sorted(evidence.items())},
        scores=scores,
        diagnostics=list(parsed.diagnostics),
    )


# --- serialization ----------------------------------------------------------


def report_to_dict(report: AuditReport) -> dict:
    def verdict_dict(v: LocationVerdict):
        out = {"status": v.status}
        if v.witness is not None:
            out["witness"] = {
                "store": dict(sorted(v.witness.store.items())),
                "run_index": v.witness.run_index,
                "reads": list(v.witness.reads),
                "max_loop_iters": v.witness.max_loop_iters,
            }
        return out

    doc = {
        "strategy": report.strategy,
        "locations": report.n_locations,
        "map_present": report.map_present,
        "scores": dict(report.scores),
        "per_location": {
            f"P{loc}": verdict_dict(v) for loc, v in sorted(report.per_location.items())
        },
        "tags": list(report.error_tags),
        "tag_evidence": report.tag_evidence,
        "steps": [
            {
                "index": v.index,
                "op": v.op,
                "match": v.match,
                "recomputed": v.recomputed.render() if v.recomputed is not None else None,
                "note": v.note,
                "claim": report.steps[v.index].raw,
            }
            for v in report.step_verdicts
        ],
        "diagnostics": list(report.diagnostics),
        "fpe_per_location": None
        if report.fpe_per_location is None
        else {f"P{loc}": dict(entry) for loc, entry in sorted(report.fpe_per_location.items())},
    }
    return doc


def report_json(report: AuditReport) -> str:
    return json.dumps(report_to_dict(report), indent=2, sort_keys=True) + "\n"


def report_table(report: AuditReport) -> str:
    lines = [
        f"strategy            {report.strategy}",
        f"invariant map       {report.scores['im_sound']}",
        f"fixpoint equations  {report.scores['fpe_correct']}",
    ]
    checked = [v for v in report.step_verdicts if v.match is not None]
    mismatched = [v for v in checked if v.match is False]
    unscorable = [v for v in report.step_verdicts if v.match is None]
    lines.append(
        f"steps               {len(checked)} checked, {len(mismatched)} mismatched,"
        f" {len(unscorable)} unscorable"
    )
    lines.append(
        "error tags          " + (", ".join(report.error_tags) if report.error_tags else "none")
    )
    if report.per_location:
        lines.append("")
        lines.append("location  verdict")
        for loc, v in sorted(report.per_location.items()):
            extra = ""
            if v.witness is not None:
                store = ", ".join(f"{k}={val}" for k, val in sorted(v.witness.store.items()))
                extra = f"  counterexample: {store}"
            lines.append(f"P{loc:<8} {v.status}{extra}")
    if report.fpe_per_location:
        lines.append("")
        lines.append("location  equation")
        for loc, entry in sorted(report.fpe_per_location.items()):
            extra = f"  ({entry['diff']})" if entry["diff"] else ""
            lines.append(f"P{loc:<8} {entry['status']}{extra}")
    return "\n".join(lines) + "\n"
