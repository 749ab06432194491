"""Text rendering for expressions, guards and annotated programs."""

from __future__ import annotations

from absint.lang.syntax import (
    And,
    Assign,
    BinOp,
    BoolExpr,
    Cmp,
    Expr,
    IntLit,
    Not,
    Or,
    Paren,
    Read,
    Skip,
    TrueLit,
    Var,
)

_PREC = {"+": 1, "-": 1, "*": 2, "/": 2}


def render_expr(e: Expr, _ctx: int = 0, _right: bool = False) -> str:
    if isinstance(e, IntLit):
        return str(e.value)
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Read):
        return "read()"
    if isinstance(e, BinOp):
        p = _PREC[e.op]
        text = "{} {} {}".format(
            render_expr(e.lhs, p, False), e.op, render_expr(e.rhs, p, True)
        )
        # parenthesize when reparsing under left-associative precedence
        # would regroup: lower precedence than context, or equal precedence
        # on the right of -, / and mixed chains
        if p < _ctx or (_right and p == _ctx):
            return f"({text})"
        return text
    raise TypeError(f"not an expression: {e!r}")


def render_guard(b: BoolExpr, _ctx: int = 0) -> str:
    # precedence: || (1) < && (2) < ! (3); comparisons are atomic
    if isinstance(b, TrueLit):
        return "true"
    if isinstance(b, Cmp):
        return f"{render_expr(b.lhs)} {b.op} {render_expr(b.rhs)}"
    if isinstance(b, Paren):
        return f"({render_guard(b.inner, 0)})"
    if isinstance(b, Not):
        if isinstance(b.inner, TrueLit):
            return "false"
        return f"!({render_guard(b.inner, 0)})"
    if isinstance(b, And):
        text = f"{render_guard(b.lhs, 2)} && {render_guard(b.rhs, 2)}"
        return f"({text})" if _ctx > 2 else text
    if isinstance(b, Or):
        text = f"{render_guard(b.lhs, 1)} || {render_guard(b.rhs, 1)}"
        return f"({text})" if _ctx > 1 else text
    raise TypeError(f"not a guard: {b!r}")


def render_program(prog) -> str:
    """Annotated program text: one location/directive per line, bodies
    indented four spaces, statements terminated with semicolons."""
    lines = [f"{{P{prog.entry}}}"]

    def emit(stmts, depth):
        pad = "    " * depth
        for ls in stmts:
            stmt = ls.stmt if hasattr(ls, "stmt") else None
            if isinstance(stmt, Assign):
                lines.append(f"{pad}{stmt.target} := {render_expr(stmt.rhs)};")
                lines.append(f"{pad}{{P{ls.after}}}")
            elif isinstance(stmt, Skip):
                lines.append(f"{pad}skip;")
                lines.append(f"{pad}{{P{ls.after}}}")
            elif hasattr(ls, "then_entry"):
                lines.append(f"{pad}if ({render_guard(ls.guard)}) then")
                lines.append(f"{pad}    [if_then]")
                lines.append(f"{pad}    {{P{ls.then_entry}}}")
                emit(ls.then, depth + 1)
                lines.append(f"{pad}else")
                lines.append(f"{pad}    [if_else]")
                lines.append(f"{pad}    {{P{ls.else_entry}}}")
                emit(ls.orelse, depth + 1)
                lines.append(f"{pad}end [endif]")
                lines.append(f"{pad}{{P{ls.end}}}")
            else:
                lines.append(f"{pad}while ({render_guard(ls.guard)}) do")
                lines.append(f"{pad}    [while_true]")
                lines.append(f"{pad}    {{P{ls.head}}}")
                emit(ls.body, depth + 1)
                lines.append(f"{pad}end [while_false]")
                lines.append(f"{pad}{{P{ls.after}}}")

    emit(prog.body, 0)
    return "\n".join(lines)
