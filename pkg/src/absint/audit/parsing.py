"""Tolerant extraction of abstract states, reasoning steps, equations and
final invariant maps from free-form model responses.

Parsing is total: anything unrecognized becomes a diagnostic, never an
exception.  Responses often restate their final map; the last well-formed
answer block wins.  Notation is normalized up front (math symbols, TeX
leftovers, subscripted location names), so the same patterns handle our
own serialized traces and typical model output.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from absint.domain import NEG_INF, POS_INF, AbstractState, Interval
from absint.lang.parser import ImpSyntaxError, parse_atomic_stmt_text, parse_guard_text
from absint.transitional import EquationParseError, parse_equation_text

_REPLACEMENTS = [
    ("\u22a5", "bot"),  # bottom
    ("\u2207", "nabla"),
    ("\u2294", "U"),  # join
    ("\u2293", "^"),  # meet
    ("\u2264", "<="),
    ("\u2265", ">="),
    ("\u21a6", "->"),  # maps-to arrow
    ("\u2192", "->"),
    ("\u2212", "-"),  # minus sign
    ("\u221e", "inf"),
    ("\\bot", "bot"),
    ("\\nabla", "nabla"),
    ("\\sqcup", "U"),
    ("\\sqcap", "^"),
    ("\\leq", "<="),
    ("\\geq", ">="),
    ("\\neq", "!="),
    ("\\mapsto", "->"),
    ("\\infty", "inf"),
    ("\\inf", "inf"),
    ("\\{", "{"),
    ("\\}", "}"),
]


def normalize_response_text(text: str) -> str:
    for old, new in _REPLACEMENTS:
        text = text.replace(old, new)
    text = re.sub(r"\\(?:mathtt|texttt|text|mathrm)\{([^{}]*)\}", r"\1", text)
    text = text.replace("$", "")
    text = re.sub(r"\{\s*P[_ ]?(\d+)\s*\}", r"{P\1}", text)
    text = re.sub(r"\bP_(\d+)", r"P\1", text)
    text = re.sub(r"\bF_(\d+)", r"F\1", text)
    # side-effect recordings often share a sentence with the step that
    # produced them; give them their own line
    text = re.sub(r"\.\s+(As a side[- ]effect)", r".\n\1", text)
    lines = []
    for line in text.splitlines():
        line = re.sub(r"^[\s*>•·-]+", "", line)  # bullet/indent trims
        line = re.sub(r"\s+", " ", line).strip()
        lines.append(line)
    return "\n".join(lines)


# --- states -----------------------------------------------------------------

_STATE = r"\{[^{}]*?:[^{}]*?\}"
_IVAL = r"(?:\[\s*[^,\[\]]+\s*,\s*[^,\[\]]+\s*\]|bot)"


class StateParseError(ValueError):
    pass


def parse_bound_text(text: str):
    text = text.strip().rstrip(".")
    if text in ("-inf", "-oo"):
        return NEG_INF
    if text in ("inf", "+inf", "oo", "+oo"):
        return POS_INF
    if re.fullmatch(r"[+-]?\d+", text):
        return int(text)
    raise StateParseError(f"not a bound: {text!r}")


def parse_interval_text(text: str) -> Interval:
    text = text.strip()
    if text in ("bot", "empty"):
        return Interval.bottom()
    m = re.fullmatch(r"\[\s*([^,\]]+)\s*,\s*([^,\]]+)\s*\]", text)
    if not m:
        raise StateParseError(f"not an interval: {text!r}")
    lo = parse_bound_text(m.group(1))
    hi = parse_bound_text(m.group(2))
    if lo == POS_INF or hi == NEG_INF or (lo != NEG_INF and hi != POS_INF and lo > hi):
        raise StateParseError(f"degenerate interval: {text!r}")
    return Interval(lo, hi)


def parse_state_text(text: str, universe=None) -> AbstractState:
    """``{x : [1, 4], y : bot}`` and close variants.  With a universe,
    missing variables default to any-integer and extras are dropped."""
    text = text.strip()
    if not (text.startswith("{") and text.endswith("}")):
        raise StateParseError(f"not a state: {text!r}")
    env = {}
    inner = text[1:-1].strip()
    if inner:
        binding = re.compile(r"([A-Za-z_]\w*)\s*:\s*(" + _IVAL + ")")
        pos = 0
        while pos < len(inner):
            m = binding.match(inner, pos)
            if not m:
                raise StateParseError(f"not a binding at {inner[pos:pos+20]!r}")
            env[m.group(1)] = parse_interval_text(m.group(2))
            pos = m.end()
            rest = re.match(r"\s*,\s*", inner[pos:])
            if rest:
                pos += rest.end()
            elif inner[pos:].strip():
                raise StateParseError(f"junk in state: {inner[pos:pos+20]!r}")
            else:
                break
    if universe is None:
        if not env:
            raise StateParseError("empty state")
        return AbstractState.make(tuple(env), env)
    coerced = {v: env.get(v, Interval.top()) for v in universe}
    return AbstractState.make(tuple(universe), coerced)


# --- claimed steps ----------------------------------------------------------


@dataclass
class ClaimedStep:
    op: str  # interpret | filter | join | widen | meet | fixpoint_claim | worklist_update
    inputs: tuple = ()  # (location or None, state) pairs for state operands
    output: object = None  # AbstractState or None
    guard: object = None
    stmt: object = None
    location: object = None  # target location for worklist_update
    span: tuple = (0, 0)
    raw: str = ""
    linked_step: object = None  # index of the widen a fixpoint_claim rests on


@dataclass
class LocationClaim:
    location: int
    state: AbstractState
    span: tuple
    raw: str


@dataclass
class ParsedResponse:
    strategy: str
    final_map: object  # dict location -> AbstractState, or None
    fpes: list
    steps: list
    location_claims: list
    diagnostics: list = field(default_factory=list)


_LOC_STATE = re.compile(r"the abstract state at \{P(\d+)\} is(?: set to)? (" + _STATE + ")")
_INTERPRET = re.compile(
    r"Interpreting (.+?) on (?:M\(\{P(\d+)\}\) = )?(" + _STATE + r") results in (" + _STATE + ")"
)
_FILTER = re.compile(
    r"Filtering (?:the fixed point(?: for the \w+ while loop)? |the (?:input )?state |the abstract state )?"
    r"(?:M\(\{P(\d+)\}\) = )?(" + _STATE + r")? ?by (.+?)"
    r" results in (?:the abstract state )?(" + _STATE + ")"
)
_WIDEN = re.compile(
    "(" + _STATE + r") nabla (" + _STATE + r") (?:results in|=) (" + _STATE + ")"
)
_WIDEN_HEAD = re.compile(
    r"we widen: (" + _STATE + r") nabla (" + _STATE + r") results in (" + _STATE + ")"
)
_JOIN_LOCATED = re.compile(
    r"M\(\{P(\d+)\}\) U M\(\{P(\d+)\}\) = (" + _STATE + r") U (" + _STATE + r") = (" + _STATE + ")"
)
_JOIN_WORDY = re.compile(
    r"(?:Joining|The result of joining) (" + _STATE + r") (?:and|with) (" + _STATE + r") (?:results in|is) (" + _STATE + ")"
)
_JOIN_INFIX = re.compile("(" + _STATE + r") U (" + _STATE + r") = (" + _STATE + ")")
_MEET_WORDY = re.compile(
    r"Intersecting (" + _STATE + r") (?:and|with) (" + _STATE + r") (?:results in|is) (" + _STATE + ")"
)
_MEET_INFIX = re.compile("(" + _STATE + r") \^ (" + _STATE + r") = (" + _STATE + ")")
_UPDATE = re.compile(
    r"(?:Update M\(\{P(\d+)\}\) to(?: be)?|update the value of M\(\{P(\d+)\}\),? resulting in M\(\{P\d+\}\) =)"
    r" (" + _STATE + ")"
)
_M_IS = re.compile(r"M\(\{P(\d+)\}\) is (" + _STATE + ")")
_ITER_INPUT = re.compile(r"input abstract state(?: to this iteration)? is (" + _STATE + ")")
_ITER_RESULT = re.compile(
    r"result of (?:this|the) iteration(?: for the \w+ while loop)? (?:is|was) (" + _STATE + ")"
)
_RESULTING = re.compile(r"The resulting abstract state is (" + _STATE + ")")
_INTERPRET_HEADER = re.compile(r"^(?:\d+\. )?Interpret ([A-Za-z_]\w* := .+?|skip);?$")
_FIXPOINT = re.compile(r"(?:we are at a fixed point|we've reached a fixed point)", re.IGNORECASE)
_MAP_LINE = re.compile(
    r"^(?:M\(\{P(\d+)\}\)|\{P(\d+)\})\s*(?:->|\|->|=|:|maps to)\s*(" + _STATE + r")\.?$"
)
_ANSWER_HEAD = re.compile(r"(the answer is|M is)\s*:?\s*$", re.IGNORECASE)


def _try_state(text, universe, diagnostics, context):
    try:
        return parse_state_text(text, universe)
    except StateParseError as exc:
        diagnostics.append(f"{context}: {exc}")
        return None


def _guard_or_none(text, diagnostics):
    text = text.strip().rstrip(",.")
    # narration sometimes names the guard: "the negation of the loop guard, i > 5"
    m = re.search(r"(?:negation of the loop guard,|loop guard,|guard,)\s*(.+)$", text)
    if m:
        text = m.group(1).strip()
    try:
        return parse_guard_text(text)
    except ImpSyntaxError as exc:
        diagnostics.append(f"unparseable guard {text!r}: {exc}")
        return None


def _stmt_or_none(text, diagnostics):
    try:
        return parse_atomic_stmt_text(text.strip().rstrip(".;"))
    except ImpSyntaxError as exc:
        diagnostics.append(f"unparseable statement {text!r}: {exc}")
        return None


def _extract_final_map(lines, start_offsets, text, universe, diagnostics):
    """Last answer block wins; returns dict or None."""
    best = None
    for i, line in enumerate(lines):
        if _ANSWER_HEAD.search(line):
            block = {}
            for j in range(i + 1, len(lines)):
                m = _MAP_LINE.match(lines[j])
                if not m:
                    if lines[j].strip():
                        break
                    continue
                loc = int(m.group(1) or m.group(2))
                state = _try_state(m.group(3), universe, diagnostics, f"final map {{P{loc}}}")
                if state is not None:
                    block[loc] = state
            if block:
                best = block
    return best


def _extract_fpes(lines, diagnostics):
    """Equation block: from a 'fixed point equations' header up to the
    worklist/solving part; the last block with real equations wins."""
    from absint.transitional import TopEntry

    looks_like_equation = re.compile(r"^\s*(?:F\d+\s*\(\s*M\s*\)|M\s*\(\s*\{?P\d+\}?\s*\))\s*=")
    blocks = []
    i = 0
    while i < len(lines):
        if re.search(r"fixed[- ]?point equations", lines[i], re.IGNORECASE):
            eqs = {}
            j = i + 1
            while j < len(lines):
                line = lines[j]
                if re.search(r"worklist|initially|^2\.|solve the", line, re.IGNORECASE):
                    break
                if "=" in line:
                    candidate = line.strip().rstrip(".")
                    try:
                        eq = parse_equation_text(candidate)
                        eqs[eq.location] = eq
                    except (EquationParseError, ImpSyntaxError) as exc:
                        if looks_like_equation.match(candidate):
                            diagnostics.append(f"unparseable equation {candidate!r}: {exc}")
                j += 1
            # a genuine system transforms something; a block of constant
            # states is a restated map, not equations
            if eqs and any(not isinstance(eq.rhs, TopEntry) for eq in eqs.values()):
                blocks.append(eqs)
            i = j + 1
        else:
            i += 1
    return list(blocks[-1].values()) if blocks else []


def parse_response(text: str, strategy: str) -> ParsedResponse:
    """Extract whatever is recognizable from a response; never raises."""
    diagnostics = []
    norm = normalize_response_text(text)
    lines = norm.splitlines()
    offsets = []
    pos = 0
    for line in lines:
        offsets.append(pos)
        pos += len(line) + 1

    universe = None  # states keep their own variables; comparisons coerce later
    steps = []
    location_claims = []
    pending_stmt = None
    pending_input = None
    current_state = None
    iter_input = None
    iter_result = None
    last_widen_index = None

    def add_step(step):
        steps.append(step)

    for i, line in enumerate(lines):
        span = (offsets[i], offsets[i] + len(line))

        m = _INTERPRET_HEADER.match(line)
        if m:
            pending_stmt = _stmt_or_none(m.group(1), diagnostics)
            pending_input = None
            continue

        m = _ITER_INPUT.search(line)
        if m and "to this iteration" in line:
            state = _try_state(m.group(1), universe, diagnostics, "iteration input")
            if state is not None:
                iter_input = state
                current_state = state
            continue
        if m and pending_stmt is not None:
            state = _try_state(m.group(1), universe, diagnostics, "interpret input")
            pending_input = state
            continue
        if m:
            state = _try_state(m.group(1), universe, diagnostics, "input state")
            if state is not None:
                current_state = state
            continue

        m = _RESULTING.search(line)
        if m and pending_stmt is not None:
            out = _try_state(m.group(1), universe, diagnostics, "interpret output")
            if out is not None and pending_input is not None:
                add_step(
                    ClaimedStep(
                        op="interpret",
                        inputs=((None, pending_input),),
                        output=out,
                        stmt=pending_stmt,
                        span=span,
                        raw=line,
                    )
                )
                current_state = out
            pending_stmt = None
            pending_input = None
            continue

        m = _INTERPRET.search(line)
        if m:
            stmt = _stmt_or_none(m.group(1), diagnostics)
            loc = int(m.group(2)) if m.group(2) else None
            state_in = _try_state(m.group(3), universe, diagnostics, "interpret input")
            out = _try_state(m.group(4), universe, diagnostics, "interpret output")
            if stmt is not None and state_in is not None and out is not None:
                add_step(
                    ClaimedStep(
                        op="interpret",
                        inputs=((loc, state_in),),
                        output=out,
                        stmt=stmt,
                        span=span,
                        raw=line,
                    )
                )
                current_state = out
            continue

        m = _JOIN_LOCATED.search(line)
        if m:
            la, lb = int(m.group(1)), int(m.group(2))
            sa = _try_state(m.group(3), universe, diagnostics, "join input")
            sb = _try_state(m.group(4), universe, diagnostics, "join input")
            out = _try_state(m.group(5), universe, diagnostics, "join output")
            if sa is not None and sb is not None and out is not None:
                add_step(
                    ClaimedStep(
                        op="join",
                        inputs=((la, sa), (lb, sb)),
                        output=out,
                        span=span,
                        raw=line,
                    )
                )
                current_state = out
            continue

        m = _WIDEN_HEAD.search(line) or _WIDEN.search(line)
        if m:
            sa = _try_state(m.group(1), universe, diagnostics, "widen input")
            sb = _try_state(m.group(2), universe, diagnostics, "widen input")
            out = _try_state(m.group(3), universe, diagnostics, "widen output")
            if sa is not None and sb is not None and out is not None:
                last_widen_index = len(steps)
                add_step(
                    ClaimedStep(
                        op="widen",
                        inputs=((None, sa), (None, sb)),
                        output=out,
                        span=span,
                        raw=line,
                    )
                )
                current_state = out
            continue

        m = _FILTER.search(line)
        if m:
            loc = int(m.group(1)) if m.group(1) else None
            state_in = (
                _try_state(m.group(2), universe, diagnostics, "filter input")
                if m.group(2)
                else current_state
            )
            guard = _guard_or_none(m.group(3), diagnostics)
            out = _try_state(m.group(4), universe, diagnostics, "filter output")
            if state_in is not None and guard is not None and out is not None:
                add_step(
                    ClaimedStep(
                        op="filter",
                        inputs=((loc, state_in),),
                        output=out,
                        guard=guard,
                        span=span,
                        raw=line,
                    )
                )
                current_state = out
            elif out is not None and guard is None:
                add_step(
                    ClaimedStep(op="filter", inputs=(), output=out, span=span, raw=line)
                )
            continue

        m = _JOIN_WORDY.search(line) or _JOIN_INFIX.search(line)
        if m:
            sa = _try_state(m.group(1), universe, diagnostics, "join input")
            sb = _try_state(m.group(2), universe, diagnostics, "join input")
            out = _try_state(m.group(3), universe, diagnostics, "join output")
            if sa is not None and sb is not None and out is not None:
                add_step(
                    ClaimedStep(
                        op="join",
                        inputs=((None, sa), (None, sb)),
                        output=out,
                        span=span,
                        raw=line,
                    )
                )
                current_state = out
            continue

        m = _MEET_WORDY.search(line) or _MEET_INFIX.search(line)
        if m:
            sa = _try_state(m.group(1), universe, diagnostics, "meet input")
            sb = _try_state(m.group(2), universe, diagnostics, "meet input")
            out = _try_state(m.group(3), universe, diagnostics, "meet output")
            if sa is not None and sb is not None and out is not None:
                add_step(
                    ClaimedStep(
                        op="meet",
                        inputs=((None, sa), (None, sb)),
                        output=out,
                        span=span,
                        raw=line,
                    )
                )
            continue

        m = _UPDATE.search(line)
        if m:
            loc = int(m.group(1) or m.group(2))
            out = _try_state(m.group(3), universe, diagnostics, "update state")
            if out is not None:
                add_step(
                    ClaimedStep(
                        op="worklist_update",
                        output=out,
                        location=loc,
                        span=span,
                        raw=line,
                    )
                )
                location_claims.append(LocationClaim(loc, out, span, line))
            continue

        m = _M_IS.search(line)
        if m:
            loc = int(m.group(1))
            state = _try_state(m.group(2), universe, diagnostics, "map read")
            if state is not None:
                add_step(
                    ClaimedStep(
                        op="map_read",
                        inputs=((loc, state),),
                        span=span,
                        raw=line,
                    )
                )
            continue

        m = _LOC_STATE.search(line)
        if m:
            loc = int(m.group(1))
            state = _try_state(m.group(2), universe, diagnostics, f"state at {{P{loc}}}")
            if state is not None:
                location_claims.append(LocationClaim(loc, state, span, line))
                current_state = state
            continue

        m = _ITER_RESULT.search(line)
        if m:
            state = _try_state(m.group(1), universe, diagnostics, "iteration result")
            if state is not None:
                iter_result = state
                current_state = state
            continue

        if _FIXPOINT.search(line):
            prev, result = iter_input, iter_result
            if last_widen_index is not None:
                widen_step = steps[last_widen_index]
                if prev is None:
                    prev = widen_step.inputs[0][1]
                if result is None or result == widen_step.output:
                    result = widen_step.output
            if prev is not None and result is not None:
                add_step(
                    ClaimedStep(
                        op="fixpoint_claim",
                        inputs=((None, prev), (None, result)),
                        span=span,
                        raw=line,
                        linked_step=last_widen_index,
                    )
                )
            iter_input = iter_result = None
            continue

    final_map = _extract_final_map(lines, offsets, norm, universe, diagnostics)
    fpes = _extract_fpes(lines, diagnostics) if strategy == "transitional" else []
    return ParsedResponse(
        strategy=strategy,
        final_map=final_map,
        fpes=fpes,
        steps=steps,
        location_claims=location_claims,
        diagnostics=diagnostics,
    )
