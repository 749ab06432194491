"""Concrete execution of annotated programs.

Used as the refutation oracle for claimed invariant maps: a program is
run on sampled inputs and every store observed at a location must lie
inside the claimed abstract state there.  Statements are compiled to
closures once per program so fuzzing stays cheap.

Integer semantics match the abstract domain: unbounded ints, division
truncates toward zero, division by zero aborts the run (no store reaches
the following location).  Guards short-circuit; each read() consumes one
value from the input stream, so runs are replayable from the recorded
stream.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from absint.lang.annotate import AnnotatedProgram, LAssign, LIf, LSkip, LWhile
from absint.lang.syntax import (
    And,
    BinOp,
    Cmp,
    IntLit,
    Not,
    Or,
    Paren,
    Read,
    TrueLit,
    Var,
    cmd_constants,
)


class Trap(Exception):
    """Run aborted: division by zero."""


class _LoopBudget(Exception):
    pass


@dataclass
class RunOutcome:
    completed: bool
    diagnostics: list = field(default_factory=list)
    reads: list = field(default_factory=list)


# --- input sampling ---------------------------------------------------------

_BOUNDARY_BASES = (2**31, -(2**31))


class InputSource:
    """Seeded read() stream: mostly small ints, with boundary magnitudes
    and values adjacent to the program's own constants mixed in."""

    def __init__(self, rng: random.Random, constants=()):
        self.rng = rng
        self.constants = tuple(constants)
        self.consumed = []

    def next(self) -> int:
        r = self.rng.random()
        if 0.55 <= r < 0.70:
            value = self.rng.choice(_BOUNDARY_BASES) + self.rng.randint(-2, 2)
        elif r >= 0.70 and self.constants:
            value = self.rng.choice(self.constants) + self.rng.randint(-1, 1)
        else:
            value = self.rng.randint(-16, 16)
        self.consumed.append(value)
        return value


class ReplaySource:
    """Replays a recorded read() stream exactly."""

    def __init__(self, values):
        self.values = list(values)
        self.i = 0
        self.consumed = []

    def next(self) -> int:
        if self.i >= len(self.values):
            raise RuntimeError("replay stream exhausted")
        value = self.values[self.i]
        self.i += 1
        self.consumed.append(value)
        return value


# --- closure compilation ----------------------------------------------------


def _compile_expr(e):
    if isinstance(e, IntLit):
        n = e.value
        return lambda store, ctx: n
    if isinstance(e, Var):
        name = e.name
        return lambda store, ctx: store[name]
    if isinstance(e, Read):
        return lambda store, ctx: ctx.source.next()
    if isinstance(e, BinOp):
        lhs = _compile_expr(e.lhs)
        rhs = _compile_expr(e.rhs)
        op = e.op
        if op == "+":
            return lambda store, ctx: lhs(store, ctx) + rhs(store, ctx)
        if op == "-":
            return lambda store, ctx: lhs(store, ctx) - rhs(store, ctx)
        if op == "*":
            return lambda store, ctx: lhs(store, ctx) * rhs(store, ctx)

        def div(store, ctx):
            x = lhs(store, ctx)
            y = rhs(store, ctx)
            if y == 0:
                raise Trap("division by zero")
            q = abs(x) // abs(y)
            return q if (x >= 0) == (y >= 0) else -q

        return div
    raise TypeError(f"not an expression: {e!r}")


_CMP_FNS = {
    "<": lambda a, b: a < b,
    "<=": lambda a, b: a <= b,
    "==": lambda a, b: a == b,
    ">": lambda a, b: a > b,
    ">=": lambda a, b: a >= b,
}


def _compile_guard(b):
    if isinstance(b, TrueLit):
        return lambda store, ctx: True
    if isinstance(b, Paren):
        return _compile_guard(b.inner)
    if isinstance(b, Not):
        inner = _compile_guard(b.inner)
        return lambda store, ctx: not inner(store, ctx)
    if isinstance(b, And):
        lhs = _compile_guard(b.lhs)
        rhs = _compile_guard(b.rhs)
        return lambda store, ctx: lhs(store, ctx) and rhs(store, ctx)
    if isinstance(b, Or):
        lhs = _compile_guard(b.lhs)
        rhs = _compile_guard(b.rhs)
        return lambda store, ctx: lhs(store, ctx) or rhs(store, ctx)
    if isinstance(b, Cmp):
        lhs = _compile_expr(b.lhs)
        rhs = _compile_expr(b.rhs)
        fn = _CMP_FNS[b.op]
        return lambda store, ctx: fn(lhs(store, ctx), rhs(store, ctx))
    raise TypeError(f"not a guard: {b!r}")


class _Ctx:
    __slots__ = ("source", "observe", "iters_left")

    def __init__(self, source, observe, max_loop_iters):
        self.source = source
        self.observe = observe
        self.iters_left = max_loop_iters


def _compile_stmts(stmts):
    fns = []
    for ls in stmts:
        if isinstance(ls, LAssign):
            target = ls.stmt.target
            rhs = _compile_expr(ls.stmt.rhs)
            after = ls.after

            def assign(store, ctx, target=target, rhs=rhs, after=after):
                store[target] = rhs(store, ctx)
                ctx.observe(after, store)

            fns.append(assign)
        elif isinstance(ls, LSkip):
            after = ls.after

            def do_skip(store, ctx, after=after):
                ctx.observe(after, store)

            fns.append(do_skip)
        elif isinstance(ls, LIf):
            guard = _compile_guard(ls.guard)
            then_fn = _compile_stmts(ls.then)
            else_fn = _compile_stmts(ls.orelse)
            te, ee, end = ls.then_entry, ls.else_entry, ls.end

            def branch(store, ctx, guard=guard, then_fn=then_fn, else_fn=else_fn, te=te, ee=ee, end=end):
                if guard(store, ctx):
                    ctx.observe(te, store)
                    then_fn(store, ctx)
                else:
                    ctx.observe(ee, store)
                    else_fn(store, ctx)
                ctx.observe(end, store)

            fns.append(branch)
        elif isinstance(ls, LWhile):
            guard = _compile_guard(ls.guard)
            body_fn = _compile_stmts(ls.body)
            head, after = ls.head, ls.after

            def loop(store, ctx, guard=guard, body_fn=body_fn, head=head, after=after):
                while guard(store, ctx):
                    if ctx.iters_left <= 0:
                        raise _LoopBudget()
                    ctx.iters_left -= 1
                    ctx.observe(head, store)
                    body_fn(store, ctx)
                ctx.observe(after, store)

            fns.append(loop)
        else:
            raise TypeError(f"not a located statement: {ls!r}")

    def run_all(store, ctx):
        for fn in fns:
            fn(store, ctx)

    return run_all


class CompiledProgram:
    def __init__(self, prog: AnnotatedProgram):
        self.prog = prog
        self.variables = prog.variables
        self.constants = sorted(set(cmd_constants(prog.root)))
        self._body = _compile_stmts(prog.body)

    def run(self, source, observe, max_loop_iters: int, init_store: dict = None) -> RunOutcome:
        """One concrete run; the initial store is drawn from ``source``
        unless given (entry values are arbitrary integers)."""
        if init_store is None:
            store = {v: source.next() for v in self.variables}
        else:
            store = dict(init_store)
        ctx = _Ctx(source, observe, max_loop_iters)
        outcome = RunOutcome(completed=True)
        ctx.observe(0, store)
        try:
            self._body(store, ctx)
        except Trap as exc:
            outcome.completed = False
            outcome.diagnostics.append(f"run aborted: {exc}")
        except _LoopBudget:
            outcome.completed = False
            outcome.diagnostics.append("loop iteration budget exhausted")
        outcome.reads = list(source.consumed)
        return outcome


def compile_program(prog: AnnotatedProgram) -> CompiledProgram:
    return CompiledProgram(prog)


def run_seed(seed, run_index: int) -> random.Random:
    return random.Random(f"{seed}:{run_index}")


def trace_run(prog, reads=None, seed=0, run_index=0, max_loop_iters=10_000, init_store=None):
    """Full (location, store) trace of a single run.

    With an explicit ``reads`` stream the initial store defaults to all
    zeros (the stream covers only the program's own read() calls); with a
    seeded source, initial values are drawn from the stream like any
    other input.
    """
    compiled = prog if isinstance(prog, CompiledProgram) else compile_program(prog)
    if reads is None:
        source = InputSource(run_seed(seed, run_index), compiled.constants)
    else:
        source = ReplaySource(reads)
        if init_store is None:
            init_store = {v: 0 for v in compiled.variables}
    observations = []
    outcome = compiled.run(
        source,
        lambda loc, store: observations.append((loc, dict(store))),
        max_loop_iters,
        init_store=init_store,
    )
    return observations, outcome
