"""AST for the small imperative language the analyzers work on.

Expressions are integer-valued (unbounded ints, no wraparound); read()
is a nondeterministic input.  Guards are comparisons between atoms
(variables, literals, read()) combined with &&, ||, ! and parentheses,
plus the literal true as a whole loop guard.  All nodes are immutable.
"""

from __future__ import annotations

from dataclasses import dataclass

ARITH_OPS = ("+", "-", "*", "/")
CMP_OPS = ("<", "<=", "==", ">", ">=")


# --- expressions -----------------------------------------------------------


class Expr:
    pass


@dataclass(frozen=True)
class IntLit(Expr):
    value: int


@dataclass(frozen=True)
class Var(Expr):
    name: str

    def __post_init__(self):
        if not self.name:
            raise ValueError("empty identifier")


@dataclass(frozen=True)
class Read(Expr):
    pass


@dataclass(frozen=True)
class BinOp(Expr):
    op: str
    lhs: Expr
    rhs: Expr

    def __post_init__(self):
        if self.op not in ARITH_OPS:
            raise ValueError(f"bad arithmetic operator {self.op!r}")


# --- guards ----------------------------------------------------------------


class BoolExpr:
    pass


@dataclass(frozen=True)
class Cmp(BoolExpr):
    op: str
    lhs: Expr
    rhs: Expr

    def __post_init__(self):
        if self.op not in CMP_OPS:
            raise ValueError(f"bad comparison operator {self.op!r}")
        for side in (self.lhs, self.rhs):
            if not isinstance(side, (Var, IntLit, Read)):
                raise ValueError("comparison operands must be atoms")


@dataclass(frozen=True)
class And(BoolExpr):
    lhs: BoolExpr
    rhs: BoolExpr


@dataclass(frozen=True)
class Or(BoolExpr):
    lhs: BoolExpr
    rhs: BoolExpr


@dataclass(frozen=True)
class Not(BoolExpr):
    inner: BoolExpr


@dataclass(frozen=True)
class Paren(BoolExpr):
    inner: BoolExpr


@dataclass(frozen=True)
class TrueLit(BoolExpr):
    pass


# --- commands --------------------------------------------------------------


class Cmd:
    pass


@dataclass(frozen=True)
class Skip(Cmd):
    pass


@dataclass(frozen=True)
class Assign(Cmd):
    target: str
    rhs: Expr


@dataclass(frozen=True)
class Seq(Cmd):
    first: Cmd
    second: Cmd


@dataclass(frozen=True)
class If(Cmd):
    guard: BoolExpr
    then: Cmd
    orelse: Cmd


@dataclass(frozen=True)
class While(Cmd):
    guard: BoolExpr
    body: Cmd


def seq(stmts) -> Cmd:
    """Right-associated sequence of one or more statements."""
    stmts = list(stmts)
    if not stmts:
        raise ValueError("empty statement list")
    out = stmts[-1]
    for s in reversed(stmts[:-1]):
        out = Seq(s, out)
    return out


def seq_items(cmd: Cmd) -> list:
    """Flatten a (right-associated) Seq spine into its statements."""
    items = []
    while isinstance(cmd, Seq):
        items.append(cmd.first)
        cmd = cmd.second
    items.append(cmd)
    return items


def normalize_seq(cmd: Cmd) -> Cmd:
    """Canonical form: every Seq spine right-associated, recursively."""
    if isinstance(cmd, Seq):
        flat = []
        stack = [cmd]
        while stack:
            node = stack.pop()
            if isinstance(node, Seq):
                stack.append(node.second)
                stack.append(node.first)
            else:
                flat.append(normalize_seq(node))
        return seq(flat)
    if isinstance(cmd, If):
        return If(cmd.guard, normalize_seq(cmd.then), normalize_seq(cmd.orelse))
    if isinstance(cmd, While):
        return While(cmd.guard, normalize_seq(cmd.body))
    return cmd


def negate(b: BoolExpr) -> BoolExpr:
    """Negation of a guard, pushed into comparisons where one exists.

    The comparison set has no !=, so a negated equality stays wrapped in
    Not; negated true stays Not(true) and renders as false.
    """
    flipped = {"<": ">=", "<=": ">", ">": "<=", ">=": "<"}
    if isinstance(b, Paren):
        return negate(b.inner)
    if isinstance(b, Not):
        return b.inner
    if isinstance(b, Cmp) and b.op in flipped:
        return Cmp(flipped[b.op], b.lhs, b.rhs)
    return Not(b)


def expr_vars(e: Expr):
    if isinstance(e, Var):
        yield e.name
    elif isinstance(e, BinOp):
        yield from expr_vars(e.lhs)
        yield from expr_vars(e.rhs)


def guard_vars(b: BoolExpr):
    if isinstance(b, Cmp):
        yield from expr_vars(b.lhs)
        yield from expr_vars(b.rhs)
    elif isinstance(b, (And, Or)):
        yield from guard_vars(b.lhs)
        yield from guard_vars(b.rhs)
    elif isinstance(b, (Not, Paren)):
        yield from guard_vars(b.inner)


def cmd_vars(cmd: Cmd):
    """Identifiers in first-occurrence order over the rendered text."""
    if isinstance(cmd, Assign):
        yield cmd.target
        yield from expr_vars(cmd.rhs)
    elif isinstance(cmd, Seq):
        yield from cmd_vars(cmd.first)
        yield from cmd_vars(cmd.second)
    elif isinstance(cmd, If):
        yield from guard_vars(cmd.guard)
        yield from cmd_vars(cmd.then)
        yield from cmd_vars(cmd.orelse)
    elif isinstance(cmd, While):
        yield from guard_vars(cmd.guard)
        yield from cmd_vars(cmd.body)


def variable_universe(cmd: Cmd) -> tuple:
    seen = []
    for v in cmd_vars(cmd):
        if v not in seen:
            seen.append(v)
    return tuple(seen)


def expr_constants(e: Expr):
    if isinstance(e, IntLit):
        yield e.value
    elif isinstance(e, BinOp):
        yield from expr_constants(e.lhs)
        yield from expr_constants(e.rhs)


def guard_constants(b: BoolExpr):
    if isinstance(b, Cmp):
        yield from expr_constants(b.lhs)
        yield from expr_constants(b.rhs)
    elif isinstance(b, (And, Or)):
        yield from guard_constants(b.lhs)
        yield from guard_constants(b.rhs)
    elif isinstance(b, (Not, Paren)):
        yield from guard_constants(b.inner)


def cmd_constants(cmd: Cmd):
    if isinstance(cmd, Assign):
        yield from expr_constants(cmd.rhs)
    elif isinstance(cmd, Seq):
        yield from cmd_constants(cmd.first)
        yield from cmd_constants(cmd.second)
    elif isinstance(cmd, If):
        yield from guard_constants(cmd.guard)
        yield from cmd_constants(cmd.then)
        yield from cmd_constants(cmd.orelse)
    elif isinstance(cmd, While):
        yield from guard_constants(cmd.guard)
        yield from cmd_constants(cmd.body)
