"""Equation-based interval analysis: one fixpoint equation per program
location, solved by chaotic iteration over a worklist.

Each location's equation is built from the control-flow directives: the
location after an assignment or skip interprets that statement on the
preceding location; branch entries filter the state before the
conditional by the guard or its negation; the location after the
conditional joins the two branch ends; the loop head and the location
after the loop filter the join of the state before the loop and the
loop body's end by the guard and its negation respectively.

The solver keeps a map M, initially all-bottom, and a worklist seeded
with every location.  Values computed at loop heads (the location right
after a [while_true] directive) are widened by the location's previous
value; everywhere else the computed value is taken directly.  When a
location's value changes, the locations whose equations reference it
re-enter the worklist.  Locations are picked lowest-index first by
default; FIFO and LIFO disciplines are available (their final maps may
differ, widening being order-sensitive, but all are sound).
"""

from __future__ import annotations

import json
import re
from collections import deque
from dataclasses import dataclass

from absint.compositional import render_stmt
from absint.domain import AbstractState, eval_expr, filter_state, state_join, state_widen
from absint.lang.annotate import AnnotatedProgram, LAssign, LIf, LSkip, LWhile
from absint.lang.render import render_guard
from absint.lang.syntax import And, BoolExpr, Cmp, IntLit, Not, Or, Paren, Skip, negate

JOIN_SYM = "⊔"  # the join square-cup


class StepBudgetError(RuntimeError):
    """The worklist failed to drain within the step cap; with widening at
    loop heads this is unreachable."""


# --- equation terms ---------------------------------------------------------


class Term:
    pass


@dataclass(frozen=True)
class TopEntry(Term):
    """The constant entry state: every variable is any integer."""


@dataclass(frozen=True)
class Ref(Term):
    location: int


@dataclass(frozen=True)
class Interpret(Term):
    stmt: object  # Assign or Skip
    arg: Term


@dataclass(frozen=True)
class Filter(Term):
    guard: BoolExpr
    arg: Term


@dataclass(frozen=True)
class Join(Term):
    arg1: Term
    arg2: Term


@dataclass(frozen=True)
class FixpointEquation:
    location: int
    rhs: Term


@dataclass
class EquationSystem:
    equations: list
    deps: dict  # location -> set of locations whose equations reference it
    loop_heads: frozenset
    variables: tuple
    n_locations: int

    def equation_for(self, loc: int) -> FixpointEquation:
        return self.equations[loc]


def term_refs(term: Term):
    if isinstance(term, Ref):
        yield term.location
    elif isinstance(term, (Interpret, Filter)):
        yield from term_refs(term.arg)
    elif isinstance(term, Join):
        yield from term_refs(term.arg1)
        yield from term_refs(term.arg2)


def derive_fpes(prog: AnnotatedProgram) -> EquationSystem:
    equations = {0: FixpointEquation(0, TopEntry())}

    def walk(stmts, prev: int) -> int:
        for ls in stmts:
            if isinstance(ls, (LAssign, LSkip)):
                equations[ls.after] = FixpointEquation(ls.after, Interpret(ls.stmt, Ref(prev)))
                prev = ls.after
            elif isinstance(ls, LIf):
                equations[ls.then_entry] = FixpointEquation(
                    ls.then_entry, Filter(ls.guard, Ref(prev))
                )
                then_end = walk(ls.then, ls.then_entry)
                equations[ls.else_entry] = FixpointEquation(
                    ls.else_entry, Filter(negate(ls.guard), Ref(prev))
                )
                else_end = walk(ls.orelse, ls.else_entry)
                equations[ls.end] = FixpointEquation(
                    ls.end, Join(Ref(then_end), Ref(else_end))
                )
                prev = ls.end
            elif isinstance(ls, LWhile):
                body_end = walk(ls.body, ls.head)
                equations[ls.head] = FixpointEquation(
                    ls.head, Filter(ls.guard, Join(Ref(prev), Ref(body_end)))
                )
                equations[ls.after] = FixpointEquation(
                    ls.after, Filter(negate(ls.guard), Join(Ref(prev), Ref(body_end)))
                )
                prev = ls.after
            else:
                raise TypeError(f"not a located statement: {ls!r}")
        return prev

    walk(prog.body, 0)
    ordered = [equations[loc] for loc in range(prog.n_locations)]
    deps = {loc: set() for loc in range(prog.n_locations)}
    for eq in ordered:
        for target in term_refs(eq.rhs):
            deps[target].add(eq.location)
    return EquationSystem(
        equations=ordered,
        deps=deps,
        loop_heads=frozenset(prog.loop_heads),
        variables=prog.variables,
        n_locations=prog.n_locations,
    )


# --- normalization ----------------------------------------------------------


def _normalize_guard(b: BoolExpr) -> BoolExpr:
    flip = {"<": ">", "<=": ">=", ">": "<", ">=": "<=", "==": "=="}
    if isinstance(b, Paren):
        return _normalize_guard(b.inner)
    if isinstance(b, Not):
        inner = _normalize_guard(b.inner)
        if isinstance(inner, Not):
            return inner.inner
        if isinstance(inner, Cmp) and inner.op != "==":
            return _normalize_guard(negate(inner))
        return Not(inner)
    if isinstance(b, And):
        return And(_normalize_guard(b.lhs), _normalize_guard(b.rhs))
    if isinstance(b, Or):
        return Or(_normalize_guard(b.lhs), _normalize_guard(b.rhs))
    if isinstance(b, Cmp) and isinstance(b.lhs, IntLit) and not isinstance(b.rhs, IntLit):
        return Cmp(flip[b.op], b.rhs, b.lhs)
    return b


def _term_key(term: Term):
    if isinstance(term, Ref):
        return (0, term.location, "")
    return (1, 0, render_term(term))


def _normalize_term(term: Term) -> Term:
    if isinstance(term, Interpret):
        return Interpret(term.stmt, _normalize_term(term.arg))
    if isinstance(term, Filter):
        return Filter(_normalize_guard(term.guard), _normalize_term(term.arg))
    if isinstance(term, Join):
        a = _normalize_term(term.arg1)
        b = _normalize_term(term.arg2)
        if _term_key(b) < _term_key(a):
            a, b = b, a
        return Join(a, b)
    return term


def normalize_fpe(eq: FixpointEquation) -> FixpointEquation:
    """Canonical form: join arguments ordered by location, double
    negations gone, comparisons oriented variable-first.  Idempotent."""
    return FixpointEquation(eq.location, _normalize_term(eq.rhs))


# --- rendering --------------------------------------------------------------


def render_term(term: Term, variables=None) -> str:
    if isinstance(term, TopEntry):
        if variables:
            inner = ", ".join(f"{v} : [-inf, inf]" for v in variables)
            return "{" + inner + "}"
        return "{entry}"
    if isinstance(term, Ref):
        return f"M({{P{term.location}}})"
    if isinstance(term, Interpret):
        return f"Interpret({render_stmt(term.stmt)}, {render_term(term.arg, variables)})"
    if isinstance(term, Filter):
        return f"Filter({render_guard(term.guard)}, {render_term(term.arg, variables)})"
    if isinstance(term, Join):
        return f"{render_term(term.arg1, variables)} {JOIN_SYM} {render_term(term.arg2, variables)}"
    raise TypeError(f"not a term: {term!r}")


def render_equation(eq: FixpointEquation, variables=None) -> str:
    return f"M({{P{eq.location}}}) = {render_term(eq.rhs, variables)}"


def render_system(sys: EquationSystem) -> str:
    return "\n".join(render_equation(eq, sys.variables) for eq in sys.equations)


# --- equation text parsing --------------------------------------------------


class EquationParseError(ValueError):
    pass


_LHS_RE = re.compile(
    r"^\s*(?:F_?(?P<fidx>\d+)\s*\(\s*M\s*\)|M\s*\(\s*\{?P_?(?P<midx>\d+)\}?\s*\)|\{P_?(?P<bidx>\d+)\})\s*$"
)
_REF_RE = re.compile(
    r"^\s*(?:M\s*\(\s*\{?P_?(\d+)\}?\s*\)|P_?(\d+)\s*\(\s*[A-Za-z_]\w*\s*\)|\{P_?(\d+)\})\s*$"
)
_STATE_LIT_RE = re.compile(
    r"^\s*\{\s*[A-Za-z_]\w*\s*:\s*(?:\[[^\]]*\]|bot)"
    r"(?:\s*,\s*[A-Za-z_]\w*\s*:\s*(?:\[[^\]]*\]|bot))*\s*\}\s*$"
)
_TOP_STATE_RE = re.compile(
    r"^\s*\{\s*[A-Za-z_]\w*\s*:\s*\[\s*-inf\s*,\s*inf\s*\]"
    r"(?:\s*,\s*[A-Za-z_]\w*\s*:\s*\[\s*-inf\s*,\s*inf\s*\])*\s*\}\s*$"
)


def _split_top_level(text: str, sep: str) -> list:
    parts = []
    depth = 0
    cur = []
    for ch in text:
        if ch in "({[":
            depth += 1
        elif ch in ")}]":
            depth -= 1
        if ch == sep and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    parts.append("".join(cur))
    return parts


def _split_joins(text: str) -> list:
    parts = _split_top_level(text, JOIN_SYM)
    if len(parts) > 1:
        return parts
    # the ASCII spelling: a standalone U between terms
    out = []
    depth = 0
    cur = []
    i = 0
    while i < len(text):
        ch = text[i]
        if ch in "({[":
            depth += 1
        elif ch in ")}]":
            depth -= 1
        if (
            depth == 0
            and ch == "U"
            and (i == 0 or not (text[i - 1].isalnum() or text[i - 1] == "_"))
            and (i + 1 >= len(text) or not (text[i + 1].isalnum() or text[i + 1] == "_"))
        ):
            out.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
        i += 1
    out.append("".join(cur))
    return out if len(out) > 1 else [text]


def parse_term_text(text: str) -> Term:
    from absint.lang.parser import parse_atomic_stmt_text, parse_guard_text

    text = text.strip()
    joins = _split_joins(text)
    if len(joins) > 1:
        out = parse_term_text(joins[0])
        for part in joins[1:]:
            out = Join(out, parse_term_text(part))
        return out
    if text.startswith("{") and text.endswith("}") and not _STATE_LIT_RE.match(text):
        # per-variable brace form, e.g. {a : M({P3}) [join] M({P5})}
        entries = _split_top_level(text[1:-1], ",")
        exprs = []
        for entry in entries:
            _, _, rhs = entry.partition(":")
            exprs.append(rhs.strip())
        unique = {re.sub(r"\(\s*[A-Za-z_]\w*\s*\)", "(_)", e) for e in exprs}
        if len(unique) != 1:
            raise EquationParseError(f"per-variable terms disagree: {text!r}")
        return parse_term_text(exprs[0])
    if _STATE_LIT_RE.match(text):
        if _TOP_STATE_RE.match(text):
            return TopEntry()
        raise EquationParseError(f"unsupported constant state in equation: {text!r}")
    m = re.match(r"^(Filter|Interpret|Join)\s*\((.*)\)\s*$", text, re.DOTALL)
    if m:
        head, body = m.group(1), m.group(2)
        parts = _split_top_level(body, ",")
        if head == "Join":
            if len(parts) != 2:
                raise EquationParseError(f"Join needs two arguments: {text!r}")
            return Join(parse_term_text(parts[0]), parse_term_text(parts[1]))
        first, rest = parts[0], ",".join(parts[1:])
        if not rest.strip():
            raise EquationParseError(f"{head} needs two arguments: {text!r}")
        if head == "Filter":
            return Filter(parse_guard_text(first), parse_term_text(rest))
        return Interpret(parse_atomic_stmt_text(first), parse_term_text(rest))
    ref = _REF_RE.match(text)
    if ref:
        idx = next(g for g in ref.groups() if g is not None)
        return Ref(int(idx))
    raise EquationParseError(f"cannot parse equation term: {text!r}")


def parse_equation_text(line: str) -> FixpointEquation:
    """One equation in the rendered format or close variants
    (``F3(M) = ...``, ``M({P3}) = ...``, refs like ``P6(a)``, U for the
    join symbol)."""
    lhs, sep, rhs = line.partition("=")
    if not sep:
        raise EquationParseError(f"no '=' in equation: {line!r}")
    m = _LHS_RE.match(lhs)
    if not m:
        raise EquationParseError(f"cannot parse equation left side: {lhs!r}")
    idx = int(next(g for g in m.groups() if g is not None))
    return FixpointEquation(idx, parse_term_text(rhs))


# --- term evaluation and the worklist solver --------------------------------


def eval_term(term: Term, m: dict, variables) -> AbstractState:
    if isinstance(term, TopEntry):
        return AbstractState.top(variables)
    if isinstance(term, Ref):
        return m[term.location]
    if isinstance(term, Interpret):
        arg = eval_term(term.arg, m, variables)
        if isinstance(term.stmt, Skip):
            return arg
        return arg.set(term.stmt.target, eval_expr(arg, term.stmt.rhs))
    if isinstance(term, Filter):
        return filter_state(eval_term(term.arg, m, variables), term.guard)
    if isinstance(term, Join):
        return state_join(
            eval_term(term.arg1, m, variables), eval_term(term.arg2, m, variables)
        )
    raise TypeError(f"not a term: {term!r}")


@dataclass(frozen=True)
class WorklistStep:
    location: int
    old: AbstractState
    computed: AbstractState
    widened: bool
    new: AbstractState
    changed: bool
    added: tuple
    worklist_after: tuple
    ref_values: tuple  # (location, state at read time) per Ref in the rhs


def solve_worklist(sys: EquationSystem, order: str = "ascending", max_steps: int = 100_000):
    """Solve the system; returns (invariant map, step log)."""
    variables = sys.variables
    m = {loc: AbstractState.bottom(variables) for loc in range(sys.n_locations)}
    pending = set(range(sys.n_locations))
    queue = deque(sorted(pending))
    log = []
    steps = 0
    while pending:
        steps += 1
        if steps > max_steps:
            raise StepBudgetError(f"worklist did not drain within {max_steps} steps")
        if order == "ascending":
            loc = min(pending)
            queue.remove(loc)
        elif order == "fifo":
            loc = queue.popleft()
        elif order == "lifo":
            loc = queue.pop()
        else:
            raise ValueError(f"unknown worklist order {order!r}")
        pending.discard(loc)
        eq = sys.equations[loc]
        ref_values = tuple((r, m[r]) for r in term_refs(eq.rhs))
        old = m[loc]
        computed = eval_term(eq.rhs, m, variables)
        is_head = loc in sys.loop_heads
        new = state_widen(old, computed) if is_head else computed
        changed = new != old
        m[loc] = new
        added = []
        if changed:
            for dep in sorted(sys.deps[loc]):
                if dep not in pending:
                    pending.add(dep)
                    queue.append(dep)
                    added.append(dep)
        log.append(
            WorklistStep(
                location=loc,
                old=old,
                computed=computed,
                widened=is_head,
                new=new,
                changed=changed,
                added=tuple(added),
                worklist_after=tuple(sorted(pending)),
                ref_values=ref_values,
            )
        )
    return m, log


def run_transitional(prog: AnnotatedProgram, order: str = "ascending", max_steps: int = 100_000):
    sys = derive_fpes(prog)
    m, log = solve_worklist(sys, order=order, max_steps=max_steps)
    return sys, m, log


# --- step log serialization -------------------------------------------------


def _wl(locs) -> str:
    return "{" + ", ".join(f"{{P{loc}}}" for loc in locs) + "}"


def _evaluation_lines(eq: FixpointEquation, step: WorklistStep) -> list:
    """Narrate how the right-hand side was computed, attributing every
    consumed state to the location it was read from."""
    lines = []
    values = dict(step.ref_values)
    rhs = eq.rhs
    inner = rhs.arg if isinstance(rhs, Filter) else rhs
    join_text = None
    if isinstance(inner, Join) and isinstance(inner.arg1, Ref) and isinstance(inner.arg2, Ref):
        a, b = inner.arg1.location, inner.arg2.location
        sa, sb = values[a], values[b]
        joined = state_join(sa, sb)
        lines.append(
            f"M({{P{a}}}) {JOIN_SYM} M({{P{b}}}) = {sa.render()} {JOIN_SYM} {sb.render()}"
            f" = {joined.render()}."
        )
        join_text = joined.render()
    if isinstance(rhs, TopEntry):
        lines.append(f"Computing the constant entry state results in {step.computed.render()}.")
    elif isinstance(rhs, Interpret) and isinstance(rhs.arg, Ref):
        src = rhs.arg.location
        lines.append(
            f"Interpreting {render_stmt(rhs.stmt)} on M({{P{src}}}) = {values[src].render()}"
            f" results in {step.computed.render()}."
        )
    elif isinstance(rhs, Filter):
        guard = render_guard(rhs.guard)
        if join_text is not None:
            lines.append(f"Filtering {join_text} by {guard} results in {step.computed.render()}.")
        elif isinstance(rhs.arg, Ref):
            src = rhs.arg.location
            lines.append(
                f"Filtering M({{P{src}}}) = {values[src].render()} by {guard}"
                f" results in {step.computed.render()}."
            )
        else:
            lines.append(f"Filtering by {guard} results in {step.computed.render()}.")
    elif join_text is not None:
        pass  # the bare join line above already shows the computation
    return lines


def step_log_lines(sys: EquationSystem, m: dict, log) -> list:
    lines = ["The system of fixed point equations is"]
    for eq in sys.equations:
        lines.append(render_equation(eq, sys.variables))
    lines.append("Initially, every location maps every variable to bot.")
    lines.append(f"The worklist W is {_wl(range(sys.n_locations))}.")
    for step in log:
        loc = step.location
        lines.append(f"Pick {{P{loc}}} from W.")
        lines.append(f"M({{P{loc}}}) is {step.old.render()}.")
        lines.extend(_evaluation_lines(sys.equations[loc], step))
        if step.widened:
            lines.append(
                f"Because {{P{loc}}} corresponds to a loop head, we widen: "
                f"{step.old.render()} nabla {step.computed.render()} results in {step.new.render()}."
            )
        lines.append(f"Update M({{P{loc}}}) to {step.new.render()}.")
        if step.changed:
            if step.added:
                adds = " and ".join(f"{{P{d}}}" for d in step.added)
                lines.append(f"M({{P{loc}}}) has changed, so add {adds} to W.")
            elif sys.deps.get(loc):
                lines.append(
                    f"M({{P{loc}}}) has changed, but every dependent location is already in W."
                )
            else:
                lines.append(
                    f"M({{P{loc}}}) has changed, but no fixed point equation depends on it."
                )
        else:
            lines.append(f"M({{P{loc}}}) has not changed, so nothing is added to W.")
        lines.append(f"W is now {_wl(step.worklist_after)}.")
    lines.append("The worklist is empty, meaning we've finished the analysis and M is")
    for loc in sorted(m):
        lines.append(f"M({{P{loc}}}) = {m[loc].render()}")
    return lines


def step_log_text(sys: EquationSystem, m: dict, log) -> str:
    return "\n".join(step_log_lines(sys, m, log)) + "\n"


def step_log_json(sys: EquationSystem, m: dict, log) -> str:
    doc = {
        "strategy": "transitional",
        "equations": [render_equation(eq, sys.variables) for eq in sys.equations],
        "loop_heads": sorted(sys.loop_heads),
        "steps": [
            {
                "location": step.location,
                "old": step.old.render(),
                "computed": step.computed.render(),
                "widened": step.widened,
                "new": step.new.render(),
                "changed": step.changed,
                "added": list(step.added),
                "worklist_after": list(step.worklist_after),
            }
            for step in log
        ],
        "map": {f"P{loc}": state.render() for loc, state in sorted(m.items())},
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"
