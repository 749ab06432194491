"""Recompute every claimed reasoning step and classify what went wrong.

Each parsed step is re-executed with the reference domain operations on
the *claimed* inputs, so one slip does not condemn every later step.
Worklist updates are recomputed against the reference equation system
under the model's own running map.  The error classifier works purely
from the model's claims plus the reference program; tags:

  control_flow   a state was consumed under the wrong location, or an
                 equation pulls from the wrong location
  fixpoint       a fixpoint was declared between states that are not
                 actually equal, or a loop-head update skipped widening
  operation      a domain operation (filter/join/widen/arithmetic) was
                 computed wrong
  short_circuit  a conclusion jumped over intermediate locations and is
                 not derivable by any single domain operation (heuristic)
  truncation     the response was cut off by the token limit
"""

from __future__ import annotations

from dataclasses import dataclass

from absint.domain import AbstractState, eval_expr, filter_state, state_join, state_meet, state_widen
from absint.lang.annotate import AnnotatedProgram, LIf, LWhile
from absint.lang.syntax import Skip, negate
from absint.transitional import EquationSystem, eval_term


@dataclass
class StepVerdict:
    index: int
    op: str
    match: object  # True | False | None (unscorable)
    recomputed: object  # AbstractState or None
    note: str = ""


def _same_universe(*states) -> bool:
    universes = {s.universe for s in states}
    return len(universes) == 1


def _apply_stmt(stmt, state: AbstractState) -> AbstractState:
    if isinstance(stmt, Skip):
        return state
    if stmt.target not in state.universe:
        raise KeyError(stmt.target)
    return state.set(stmt.target, eval_expr(state, stmt.rhs))


def check_steps(steps, system: EquationSystem = None) -> list:
    """Verdict per scorable step; map reads and record claims are not
    scored (they feed the control-flow detector instead)."""
    verdicts = []
    claimed_m = None
    if system is not None:
        claimed_m = {
            loc: AbstractState.bottom(system.variables) for loc in range(system.n_locations)
        }

    for index, step in enumerate(steps):
        if step.op == "interpret":
            state_in = step.inputs[0][1]
            try:
                out = _apply_stmt(step.stmt, state_in)
            except KeyError as exc:
                verdicts.append(
                    StepVerdict(index, step.op, None, None, f"unknown variable {exc}")
                )
                continue
            match = _states_agree(out, step.output)
            verdicts.append(StepVerdict(index, step.op, match, out))
        elif step.op == "filter":
            if not step.inputs or step.guard is None:
                verdicts.append(StepVerdict(index, step.op, None, None, "operands unparsed"))
                continue
            state_in = step.inputs[0][1]
            try:
                out = filter_state(state_in, step.guard)
            except KeyError as exc:
                verdicts.append(
                    StepVerdict(index, step.op, None, None, f"unknown variable {exc}")
                )
                continue
            verdicts.append(StepVerdict(index, step.op, _states_agree(out, step.output), out))
        elif step.op in ("join", "meet", "widen"):
            a, b = step.inputs[0][1], step.inputs[1][1]
            if not _same_universe(a, b):
                verdicts.append(StepVerdict(index, step.op, None, None, "operand universes differ"))
                continue
            fn = {"join": state_join, "meet": state_meet, "widen": state_widen}[step.op]
            out = fn(a, b)
            verdicts.append(StepVerdict(index, step.op, _states_agree(out, step.output), out))
        elif step.op == "fixpoint_claim":
            prev, result = step.inputs[0][1], step.inputs[1][1]
            effective = result
            note = ""
            if step.linked_step is not None:
                widen_verdict = next(
                    (v for v in verdicts if v.index == step.linked_step), None
                )
                if (
                    widen_verdict is not None
                    and widen_verdict.match is False
                    and steps[step.linked_step].output == result
                ):
                    effective = widen_verdict.recomputed
                    note = "iteration result recomputed from the widening step"
            match = _states_agree(prev, effective)
            verdicts.append(StepVerdict(index, step.op, match, effective, note))
        elif step.op == "worklist_update":
            if claimed_m is None or step.location >= system.n_locations:
                verdicts.append(
                    StepVerdict(index, step.op, None, None, "no equation system to check against")
                )
                continue
            loc = step.location
            eq = system.equations[loc]
            computed = eval_term(eq.rhs, claimed_m, system.variables)
            old = claimed_m[loc]
            expected = state_widen(old, computed) if loc in system.loop_heads else computed
            claimed = _coerce(step.output, system.variables)
            if claimed == expected:
                verdicts.append(StepVerdict(index, step.op, True, expected))
            elif loc in system.loop_heads and claimed == computed and computed != expected:
                verdicts.append(
                    StepVerdict(index, step.op, False, expected, "missing widening at loop head")
                )
            else:
                verdicts.append(StepVerdict(index, step.op, False, expected))
            claimed_m[loc] = claimed  # later steps are judged on the model's own map
        # map reads and other bookkeeping claims are not scored

    return verdicts


def _coerce(state: AbstractState, universe) -> AbstractState:
    if state.universe == tuple(universe):
        return state
    env = dict(state.env)
    from absint.domain import Interval

    return AbstractState.make(tuple(universe), {v: env.get(v, Interval.top()) for v in universe})


def _states_agree(recomputed: AbstractState, claimed: AbstractState) -> bool:
    if claimed is None:
        return False
    if recomputed.universe == claimed.universe:
        return recomputed == claimed
    shared = [v for v in recomputed.universe if v in claimed.universe]
    if not shared:
        return False
    if recomputed.is_bottom or claimed.is_bottom:
        return recomputed.is_bottom == claimed.is_bottom
    return all(recomputed.get(v) == claimed.get(v) for v in shared)


# --- error classification ---------------------------------------------------

SCORED_OPS = ("interpret", "filter", "join", "meet", "widen")


def _loop_internal_locations(prog: AnnotatedProgram) -> set:
    """Locations that live inside some while body (the head included);
    anything else is recorded at most once per analysis."""
    internal = set()

    def walk(stmts, inside: bool):
        for ls in stmts:
            if isinstance(ls, LWhile):
                internal.add(ls.head)
                walk(ls.body, True)
                if inside:
                    internal.add(ls.after)
            elif isinstance(ls, LIf):
                if inside:
                    internal.update((ls.then_entry, ls.else_entry, ls.end))
                walk(ls.then, inside)
                walk(ls.orelse, inside)
            elif inside:
                internal.add(ls.after)

    walk(prog.body, False)
    return internal


def _single_op_candidates(prog: AnnotatedProgram, base: AbstractState, others):
    """Everything one reference operation away from ``base``."""
    from absint.lang.annotate import located_items

    for ls in located_items(prog):
        if hasattr(ls, "stmt"):
            try:
                yield _apply_stmt(ls.stmt, base)
            except KeyError:
                pass
        guard = getattr(ls, "guard", None)
        if guard is not None:
            yield filter_state(base, guard)
            yield filter_state(base, negate(guard))
    for other in others:
        if other.universe == base.universe:
            yield state_join(base, other)
            yield state_widen(base, other)
            yield state_meet(base, other)


def classify_errors(
    parsed,
    verdicts,
    prog: AnnotatedProgram = None,
    fpe_results: dict = None,
    finish_reason: str = None,
) -> tuple:
    """Returns (tags, evidence) where evidence maps each tag to the raw
    claims that justify it."""
    tags = set()
    evidence = {}

    def tag(name, why):
        tags.add(name)
        evidence.setdefault(name, []).append(why)

    by_index = {v.index: v for v in verdicts}
    for v in verdicts:
        if v.op in SCORED_OPS and v.match is False:
            tag("operation", parsed.steps[v.index].raw)
        if v.op == "fixpoint_claim" and v.match is False:
            tag("fixpoint", parsed.steps[v.index].raw)
        if v.op == "worklist_update" and v.note == "missing widening at loop head":
            tag("fixpoint", parsed.steps[v.index].raw)

    # wrong-location consumption: inputs must match the model's own latest
    # claim for the location they are attributed to
    claimed_at = {}
    claim_events = []
    for step in parsed.steps:
        for loc, state in step.inputs:
            if loc is not None and loc in claimed_at and state != claimed_at[loc]:
                tag("control_flow", step.raw)
        if step.op == "worklist_update":
            claimed_at[step.location] = step.output
    # the two claim-shape detectors below read the sequential narration of
    # a denotational run; worklist logs legitimately revisit locations in
    # any order, so they stay out of scope there
    narrative = parsed.strategy == "compositional"
    if prog is not None and narrative:
        internal = _loop_internal_locations(prog)
        last_claim = {}
        for claim in parsed.location_claims:
            previous = last_claim.get(claim.location)
            if (
                previous is not None
                and claim.location not in internal
                and claim.state != previous
            ):
                tag("control_flow", claim.raw)
            last_claim[claim.location] = claim.state

    if fpe_results:
        for loc, entry in sorted(fpe_results.items()):
            if entry.get("status") == "incorrect" and "location" in entry.get("diff", ""):
                tag("control_flow", f"equation for {{P{loc}}}: {entry['diff']}")

    # short-circuiting: a forward jump over locations whose claimed state
    # is not one domain operation away from the previous claim
    if prog is not None and narrative and parsed.location_claims:
        seen_states = []
        prev = None
        for claim in parsed.location_claims:
            if prev is not None and claim.location > prev.location + 1:
                if claim.state.universe == prev.state.universe:
                    candidates = _single_op_candidates(prog, prev.state, seen_states)
                    if not any(c == claim.state for c in candidates):
                        tag("short_circuit", claim.raw)
            seen_states.append(claim.state)
            prev = claim
    if finish_reason in ("length", "max_tokens", "truncated"):
        tag("truncation", f"finish_reason={finish_reason}")

    return tags, evidence
