"""Denotational interval analysis: each statement is a function between
abstract states, applied inductively over the program structure.

Program locations are not part of the state transformer itself; the
state at a location is recorded as a side effect while the statement
preceding it is interpreted.  Loops run a fixpoint iteration: filter the
accumulated state by the guard (recording the loop head), interpret the
body, widen the accumulated state by the body's result, and stop once
the accumulated state no longer changes.  Widening is applied from the
very first iteration.  No narrowing pass follows.  The final map keeps
the most recent state recorded at each location.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from absint.domain import AbstractState, eval_expr, filter_state, state_join, state_widen
from absint.lang.annotate import AnnotatedProgram, LAssign, LIf, LSkip, LWhile, annotate
from absint.lang.render import render_expr, render_guard
from absint.lang.syntax import Assign, Cmd, Skip, negate


class IterationBudgetError(RuntimeError):
    """A loop failed to stabilize within the iteration cap.  Widening
    makes this unreachable; hitting it means a widening bug."""


@dataclass(frozen=True)
class TraceEvent:
    kind: str  # interpret_stmt | filter | join_branches | widen | fixpoint_check | record_location
    inputs: tuple
    output: str
    location: object = None
    loop_depth: int = 0


@dataclass
class CompositionalResult:
    invariant_map: dict
    trace: list
    iterations_per_loop: dict


def render_stmt(stmt: Cmd) -> str:
    if isinstance(stmt, Skip):
        return "skip"
    if isinstance(stmt, Assign):
        return f"{stmt.target} := {render_expr(stmt.rhs)}"
    raise TypeError(f"not an atomic statement: {stmt!r}")


class _Recorder:
    def __init__(self):
        self.map = {}
        self.trace = []
        self.loop_depth = 0
        self.iterations = {}

    def event(self, kind, inputs, output, location=None):
        self.trace.append(
            TraceEvent(kind, tuple(inputs), output, location, self.loop_depth)
        )

    def record(self, location: int, state: AbstractState):
        self.map[location] = state
        self.event("record_location", (state.render(),), state.render(), location)


def _interpret_atom(stmt, state: AbstractState) -> AbstractState:
    if isinstance(stmt, Skip):
        return state
    return state.set(stmt.target, eval_expr(state, stmt.rhs))


def _interpret_stmts(stmts, state, rec, max_iters):
    for ls in stmts:
        if isinstance(ls, (LAssign, LSkip)):
            out = _interpret_atom(ls.stmt, state)
            rec.event("interpret_stmt", (render_stmt(ls.stmt), state.render()), out.render())
            rec.record(ls.after, out)
            state = out
        elif isinstance(ls, LIf):
            then_in = filter_state(state, ls.guard)
            rec.event("filter", (state.render(), render_guard(ls.guard)), then_in.render())
            rec.record(ls.then_entry, then_in)
            then_out = _interpret_stmts(ls.then, then_in, rec, max_iters)

            neg = negate(ls.guard)
            else_in = filter_state(state, neg)
            rec.event("filter", (state.render(), render_guard(neg)), else_in.render())
            rec.record(ls.else_entry, else_in)
            else_out = _interpret_stmts(ls.orelse, else_in, rec, max_iters)

            joined = state_join(then_out, else_out)
            rec.event("join_branches", (then_out.render(), else_out.render()), joined.render())
            rec.record(ls.end, joined)
            state = joined
        elif isinstance(ls, LWhile):
            state = _interpret_loop(ls, state, rec, max_iters)
        else:
            raise TypeError(f"not a located statement: {ls!r}")
    return state


def _interpret_loop(ls: LWhile, state, rec, max_iters):
    rec.loop_depth += 1
    acc = state
    iterations = 0
    while True:
        iterations += 1
        if iterations > max_iters:
            raise IterationBudgetError(
                f"loop at {{P{ls.head}}} exceeded {max_iters} iterations"
            )
        head = filter_state(acc, ls.guard)
        rec.event("filter", (acc.render(), render_guard(ls.guard)), head.render())
        rec.record(ls.head, head)
        body_out = _interpret_stmts(ls.body, head, rec, max_iters)
        widened = state_widen(acc, body_out)
        rec.event("widen", (acc.render(), body_out.render()), widened.render())
        stable = widened == acc
        rec.event(
            "fixpoint_check",
            (acc.render(), widened.render()),
            "same" if stable else "different",
        )
        if stable:
            break
        acc = widened
    rec.iterations[ls.head] = iterations
    rec.loop_depth -= 1

    neg = negate(ls.guard)
    out = filter_state(acc, neg)
    rec.event("filter", (acc.render(), render_guard(neg)), out.render())
    rec.record(ls.after, out)
    return out


def run_compositional(prog: AnnotatedProgram, max_iters: int = 1000) -> CompositionalResult:
    """Analyze a whole program.  Entry maps every variable to any integer."""
    rec = _Recorder()
    entry = AbstractState.top(prog.variables)
    rec.record(0, entry)
    _interpret_stmts(prog.body, entry, rec, max_iters)
    invariant_map = {
        loc: rec.map.get(loc, AbstractState.bottom(prog.variables))
        for loc in prog.locations
    }
    return CompositionalResult(invariant_map, rec.trace, rec.iterations)


def interpret(prog, state: AbstractState, sink=None, max_iters: int = 1000) -> AbstractState:
    """Interpret a command or annotated program on an input state.

    ``sink(location, state)`` receives every location recording.
    """
    if not isinstance(prog, AnnotatedProgram):
        prog = annotate(prog)
    rec = _Recorder()
    out = _interpret_stmts(prog.body, state, rec, max_iters)
    if sink is not None:
        for loc in sorted(rec.map):
            sink(loc, rec.map[loc])
    return out


# --- serialization ----------------------------------------------------------


def trace_lines(result: CompositionalResult, final_block: bool = True) -> list:
    """Line-oriented narration of the analysis, one event per line."""
    lines = []
    for ev in result.trace:
        pad = "  " * ev.loop_depth
        if ev.kind == "record_location":
            lines.append(
                f"{pad}As a side-effect, the abstract state at {{P{ev.location}}} is {ev.output}."
            )
        elif ev.kind == "interpret_stmt":
            stmt, state = ev.inputs
            lines.append(f"{pad}Interpreting {stmt} on {state} results in {ev.output}.")
        elif ev.kind == "filter":
            state, guard = ev.inputs
            lines.append(f"{pad}Filtering {state} by {guard} results in {ev.output}.")
        elif ev.kind == "join_branches":
            a, b = ev.inputs
            lines.append(f"{pad}Joining {a} and {b} results in {ev.output}.")
        elif ev.kind == "widen":
            a, b = ev.inputs
            lines.append(f"{pad}{a} nabla {b} results in {ev.output}.")
        elif ev.kind == "fixpoint_check":
            before, after = ev.inputs
            lines.append(f"{pad}The result of this iteration is {after}.")
            if ev.output == "same":
                lines.append(
                    f"{pad}We are at a fixed point. "
                    "The result of this iteration was the same as the previous one."
                )
    if final_block:
        lines.append("There are no more statements to interpret, and the answer is")
        for loc in sorted(result.invariant_map):
            lines.append(f"{{P{loc}}} -> {result.invariant_map[loc].render()}")
    return lines


def trace_text(result: CompositionalResult) -> str:
    return "\n".join(trace_lines(result)) + "\n"


def trace_json(result: CompositionalResult) -> str:
    doc = {
        "strategy": "compositional",
        "events": [
            {
                "kind": ev.kind,
                "inputs": list(ev.inputs),
                "output": ev.output,
                "location": ev.location,
                "loop_depth": ev.loop_depth,
            }
            for ev in result.trace
        ],
        "map": {
            f"P{loc}": state.render() for loc, state in sorted(result.invariant_map.items())
        },
        "iterations_per_loop": {f"P{k}": v for k, v in sorted(result.iterations_per_loop.items())},
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"
