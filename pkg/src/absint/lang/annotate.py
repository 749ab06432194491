"""Canonical program locations and control-flow directives.

Location {P0} marks program entry.  Every assignment and skip gets a
location after it.  An if-statement gets locations at the entry of both
branches and after the whole statement; a while-loop gets one just
before its body (the loop head) and one after the loop.  Indices are
contiguous and follow textual order, so the labeling is a pure function
of the AST.

Directives mark where the analysis joins, filters and widens:
[if_then]/[if_else] at branch entries, [endif] after the conditional,
[while_true] at the loop head, [while_false] after the loop.
"""

from __future__ import annotations

from dataclasses import dataclass

from absint.lang import render as _render
from absint.lang.syntax import (
    Assign,
    BoolExpr,
    Cmd,
    If,
    Skip,
    While,
    normalize_seq,
    seq,
    seq_items,
    variable_universe,
)

DIRECTIVE_KINDS = ("if_then", "if_else", "endif", "while_true", "while_false")


@dataclass(frozen=True)
class Directive:
    kind: str
    location: int  # the location the directive introduces or precedes


@dataclass(frozen=True)
class LAssign:
    stmt: Assign
    after: int


@dataclass(frozen=True)
class LSkip:
    stmt: Skip
    after: int


@dataclass(frozen=True)
class LIf:
    guard: BoolExpr
    then: tuple
    orelse: tuple
    then_entry: int
    else_entry: int
    end: int


@dataclass(frozen=True)
class LWhile:
    guard: BoolExpr
    body: tuple
    head: int
    after: int


@dataclass(frozen=True)
class AnnotatedProgram:
    root: Cmd
    body: tuple  # located statements
    variables: tuple
    n_locations: int
    entry: int = 0

    @property
    def locations(self) -> tuple:
        return tuple(range(self.n_locations))

    @property
    def directives(self) -> tuple:
        out = []

        def walk(stmts):
            for ls in stmts:
                if isinstance(ls, LIf):
                    out.append(Directive("if_then", ls.then_entry))
                    walk(ls.then)
                    out.append(Directive("if_else", ls.else_entry))
                    walk(ls.orelse)
                    out.append(Directive("endif", ls.end))
                elif isinstance(ls, LWhile):
                    out.append(Directive("while_true", ls.head))
                    walk(ls.body)
                    out.append(Directive("while_false", ls.after))

        walk(self.body)
        return tuple(out)

    @property
    def loop_heads(self) -> tuple:
        return tuple(d.location for d in self.directives if d.kind == "while_true")

    def render(self) -> str:
        return _render.render_program(self)


def annotate(root: Cmd, variables=None) -> AnnotatedProgram:
    """Attach the canonical labeling to a command tree.

    ``variables`` defaults to identifiers in first-occurrence order; a
    caller may pass a wider universe (e.g. declared-but-unused names).
    """
    root = normalize_seq(root)
    occurring = variable_universe(root)
    if variables is None:
        variables = occurring
    else:
        variables = tuple(variables)
        missing = [v for v in occurring if v not in variables]
        if missing:
            raise ValueError(f"universe omits program variables: {missing}")

    counter = [1]  # 0 is the entry location

    def fresh() -> int:
        idx = counter[0]
        counter[0] += 1
        return idx

    def locate(cmd: Cmd):
        out = []
        for stmt in seq_items(cmd):
            if isinstance(stmt, Assign):
                out.append(LAssign(stmt, fresh()))
            elif isinstance(stmt, Skip):
                out.append(LSkip(stmt, fresh()))
            elif isinstance(stmt, If):
                then_entry = fresh()
                then = locate(stmt.then)
                else_entry = fresh()
                orelse = locate(stmt.orelse)
                end = fresh()
                out.append(LIf(stmt.guard, tuple(then), tuple(orelse), then_entry, else_entry, end))
            elif isinstance(stmt, While):
                head = fresh()
                body = locate(stmt.body)
                after = fresh()
                out.append(LWhile(stmt.guard, tuple(body), head, after))
            else:
                raise TypeError(f"not a statement: {stmt!r}")
        return out

    body = tuple(locate(root))
    return AnnotatedProgram(root=root, body=body, variables=variables, n_locations=counter[0])


def located_items(prog: AnnotatedProgram):
    """All located statements, preorder."""

    def walk(stmts):
        for ls in stmts:
            yield ls
            if isinstance(ls, LIf):
                yield from walk(ls.then)
                yield from walk(ls.orelse)
            elif isinstance(ls, LWhile):
                yield from walk(ls.body)

    yield from walk(prog.body)


def strip(prog: AnnotatedProgram) -> Cmd:
    """The bare command tree, canonical Seq form."""
    return prog.root


def with_universe(prog: AnnotatedProgram, variables) -> AnnotatedProgram:
    return annotate(prog.root, variables=variables)


def rebuild_cmd(stmts) -> Cmd:
    """Inverse of locate: located statements back to a command tree."""
    plain = []
    for ls in stmts:
        if isinstance(ls, (LAssign, LSkip)):
            plain.append(ls.stmt)
        elif isinstance(ls, LIf):
            plain.append(If(ls.guard, rebuild_cmd(ls.then), rebuild_cmd(ls.orelse)))
        else:
            plain.append(While(ls.guard, rebuild_cmd(ls.body)))
    return seq(plain)
