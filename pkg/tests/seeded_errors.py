"""Mutation corpus: plant each known failure pattern into a correct
reference trace and hand the result to the auditor.

Every mutator takes reference artifacts and returns the mutated response
text (or None when the trace has no eligible site), together with the
error tag the auditor is expected to raise:

  back_propagation   a later location's state is re-claimed for an
                     earlier, loop-external location   -> control_flow
  wrong_join_operand an equation joins in the wrong location
                                                        -> control_flow
  false_fixpoint     a widening result is understated and a fixed point
                     declared on its strength   -> operation + fixpoint
  filter_inflation   a filter output widens an interval for no reason
                                                        -> operation
  skipped_steps      a run of intermediate locations vanishes and the
                     conclusion is not one operation away
                                                        -> short_circuit
"""

from __future__ import annotations

import re

from absint.audit.parsing import parse_state_text
from absint.audit.steps import _loop_internal_locations, _single_op_candidates
from absint.domain import AbstractState, Interval

RECORD = re.compile(r"the abstract state at \{P(\d+)\} is (\{[^{}]*\})")
WIDEN = re.compile(r"^(\s*)(\{[^{}]*\}) nabla (\{[^{}]*\}) results in (\{[^{}]*\})\.$")
FILTER = re.compile(r"^(\s*)Filtering (\{[^{}]*\}) by (.+?) results in (\{[^{}]*\})\.$")


def back_propagation(trace_text: str, prog):
    """After some external location's record, re-claim an earlier
    external location with that (different) state."""
    internal = _loop_internal_locations(prog)
    lines = trace_text.splitlines()
    seen = {}
    for i, line in enumerate(lines):
        m = RECORD.search(line)
        if not m:
            continue
        loc, state = int(m.group(1)), m.group(2)
        for earlier, (_, earlier_state) in seen.items():
            if earlier < loc and earlier not in internal and earlier_state != state:
                bogus = f"As a side-effect, the abstract state at {{P{earlier}}} is {state}."
                mutated = lines[: i + 1] + [bogus] + lines[i + 1 :]
                return "\n".join(mutated)
        if loc not in seen:
            seen[loc] = (i, state)
    return None


def wrong_join_operand(step_log_text: str, prog):
    """Shift the second source of a loop equation's join one location
    forward (the classic off-by-one into the wrong block)."""
    lines = step_log_text.splitlines()
    eq = re.compile(
        r"^(M\(\{P\d+\}\) = Filter\(.*?, M\(\{P(\d+)\}\) ⊔ M\(\{P)(\d+)(\}\)\))$"
    )
    for i, line in enumerate(lines):
        m = eq.match(line)
        if m:
            wrong = int(m.group(3)) + 1
            if wrong >= prog.n_locations:
                continue
            lines[i] = f"{m.group(1)}{wrong}{m.group(4)}"
            return "\n".join(lines)
    return None


def false_fixpoint(trace_text: str, prog=None):
    """Replace a growing widening's result with its left operand and
    declare convergence."""
    lines = trace_text.splitlines()
    for i, line in enumerate(lines):
        m = WIDEN.match(line)
        if not m:
            continue
        pad, left, right, out = m.groups()
        if out == left:
            continue  # already stable; not a growing site
        mutated = lines[:i]
        mutated.append(f"{pad}{left} nabla {right} results in {left}.")
        mutated.append(f"{pad}The result of this iteration is {left}.")
        mutated.append(
            f"{pad}We are at a fixed point. "
            "The result of this iteration was the same as the previous one."
        )
        mutated.extend(lines[i + 1 :])
        return "\n".join(mutated)
    return None


def _inflate(state_text: str) -> str:
    state = parse_state_text(state_text)
    env = dict(state.env)
    for var, ival in env.items():
        if not ival.is_bottom and ival.hi != float("inf"):
            env[var] = Interval(ival.lo, ival.hi + 9)
            return AbstractState(tuple(env.items())).render()
    return None


def filter_inflation(trace_text: str, prog=None):
    """Overshoot a filter output on purpose."""
    lines = trace_text.splitlines()
    for i, line in enumerate(lines):
        m = FILTER.match(line)
        if not m:
            continue
        pad, state_in, guard, out = m.groups()
        inflated = _inflate(out)
        if inflated is None or inflated == out:
            continue
        lines[i] = f"{pad}Filtering {state_in} by {guard} results in {inflated}."
        return "\n".join(lines)
    return None


def skipped_steps(trace_text: str, prog):
    """Cut everything between two records at least two locations apart,
    leaving a conclusion that no single operation explains."""
    lines = trace_text.splitlines()
    records = []
    for i, line in enumerate(lines):
        m = RECORD.search(line)
        if m:
            records.append((i, int(m.group(1)), parse_state_text(m.group(2))))
    for a in range(len(records)):
        ia, loc_a, state_a = records[a]
        prior = [state for _, _, state in records[: a + 1]]
        for b in range(a + 1, len(records)):
            ib, loc_b, state_b = records[b]
            if loc_b < loc_a + 2 or state_b == state_a:
                continue
            if state_b.universe != state_a.universe:
                continue
            # the pattern requires the landing state to be underivable
            if any(c == state_b for c in _single_op_candidates(prog, state_a, prior)):
                continue
            return "\n".join(lines[: ia + 1] + lines[ib:])
    return None


COMPOSITIONAL_MUTATIONS = (
    ("back_propagation", back_propagation, "control_flow"),
    ("false_fixpoint", false_fixpoint, "fixpoint"),
    ("filter_inflation", filter_inflation, "operation"),
    ("skipped_steps", skipped_steps, "short_circuit"),
)

TRANSITIONAL_MUTATIONS = (
    ("wrong_join_operand", wrong_join_operand, "control_flow"),
)
