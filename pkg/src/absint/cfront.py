"""Frontend for the benchmark C subset.

Accepted: a single ``int main`` over int-typed scalars, assignments,
if/else, while, for (desugared to while), ``__VERIFIER_nondet_int()``
as the nondeterministic input, and assert calls (dropped, with a
diagnostic).  Everything else — other types, arrays, pointers, extra
functions — is rejected with the offending construct and line.

Translation emits one IMP assignment per arithmetic operator: compound
right-hand sides are flattened left-to-right through fresh temporaries,
which preserves the order nondeterministic reads are consumed in.  The
locations that correspond to C statement boundaries (as opposed to
synthesized temporaries) are tracked so concrete runs of the original C
and of the translated program can be compared store-for-store.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from absint.concrete import Trap, _LoopBudget
from absint.lang.annotate import AnnotatedProgram, annotate
from absint.lang.syntax import (
    And,
    Assign,
    BinOp,
    Cmp,
    If,
    IntLit,
    Not,
    Or,
    Read,
    Skip,
    TrueLit,
    Var,
    While,
    seq,
)

NONDET = "__VERIFIER_nondet_int"
ASSERT_NAMES = ("assert", "__VERIFIER_assert", "sassert")
REJECTED_TYPES = (
    "unsigned", "float", "double", "char", "long", "short", "signed", "bool", "_Bool"
)
REJECTED_STMTS = ("goto", "switch", "do", "break", "continue")


class CTranslationError(ValueError):
    def __init__(self, construct: str, line: int):
        super().__init__(f"line {line}: unsupported construct: {construct}")
        self.construct = construct
        self.line = line


# --- C-side AST --------------------------------------------------------------


@dataclass(frozen=True)
class CDecl:
    name: str
    init: object  # expression or None
    line: int


@dataclass(frozen=True)
class CAssign:
    name: str
    expr: object
    line: int


@dataclass(frozen=True)
class CIf:
    cond: object
    then: tuple
    orelse: object  # tuple or None when the else branch is absent
    line: int


@dataclass(frozen=True)
class CWhile:
    cond: object
    body: tuple
    line: int


@dataclass(frozen=True)
class CFor:
    init: object  # CAssign or CDecl or None
    cond: object  # condition or None (None means true)
    step: object  # CAssign or None
    body: tuple
    line: int


@dataclass
class CSubsetProgram:
    declarations: list  # variable names in declaration order
    body: tuple
    diagnostics: list = field(default_factory=list)


# --- lexer -------------------------------------------------------------------

_C_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<int>\d+)
  | (?P<id>[A-Za-z_]\w*)
  | (?P<op>\+\+|--|\+=|-=|\*=|/=|==|!=|<=|>=|&&|\|\||[-+*/%<>=!();,{}\[\]&:?])
    """,
    re.VERBOSE,
)


def _strip_preprocessor_and_comments(text: str) -> str:
    text = re.sub(r"/\*.*?\*/", lambda m: "\n" * m.group(0).count("\n"), text, flags=re.DOTALL)
    text = re.sub(r"//[^\n]*", "", text)
    text = re.sub(r"^[ \t]*#[^\n]*$", "", text, flags=re.MULTILINE)
    return text


def _clex(text: str):
    tokens = []
    line = 1
    pos = 0
    text = _strip_preprocessor_and_comments(text)
    while pos < len(text):
        m = _C_TOKEN.match(text, pos)
        if not m:
            raise CTranslationError(f"character {text[pos]!r}", line)
        lexeme = m.group(0)
        if m.group("int"):
            tokens.append(("INT", int(lexeme), line))
        elif m.group("id"):
            tokens.append(("ID", lexeme, line))
        elif m.group("op"):
            tokens.append(("OP", lexeme, line))
        line += lexeme.count("\n")
        pos = m.end()
    tokens.append(("EOF", None, line))
    return tokens


# --- parser ------------------------------------------------------------------


class _CParser:
    def __init__(self, tokens):
        self.tokens = tokens
        self.i = 0

    def peek(self, ahead=0):
        return self.tokens[min(self.i + ahead, len(self.tokens) - 1)]

    def advance(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def at(self, kind, value=None, ahead=0):
        tok = self.peek(ahead)
        return tok[0] == kind and (value is None or tok[1] == value)

    def expect(self, kind, value=None):
        tok = self.peek()
        if not self.at(kind, value):
            raise CTranslationError(f"expected {value or kind}, found {tok[1]!r}", tok[2])
        return self.advance()

    def line(self):
        return self.peek()[2]

    # -- top level --------------------------------------------------------

    def parse_unit(self) -> CSubsetProgram:
        body = None
        while not self.at("EOF"):
            if self.at("ID", "extern"):
                self._skip_to_semicolon()
                continue
            if self.at("ID", "void") and self.at("ID", ahead=1) and self.peek(1)[1] != "main":
                self._skip_to_semicolon()  # intrinsic prototypes
                continue
            if self.at("ID", "int") and self.at("ID", "main", ahead=1):
                self.advance()
                self.advance()
                self.expect("OP", "(")
                if self.at("ID", "void"):
                    self.advance()
                self.expect("OP", ")")
                if body is not None:
                    raise CTranslationError("multiple definitions of main", self.line())
                body = self.parse_block()
                continue
            if self.at("ID", "int") and self.at("ID", ahead=1) and self.at("OP", "(", ahead=2):
                raise CTranslationError(f"function {self.peek(1)[1]!r}", self.line())
            raise CTranslationError(f"top-level {self.peek()[1]!r}", self.line())
        if body is None:
            raise CTranslationError("no main function", self.tokens[-1][2])
        return CSubsetProgram(declarations=[], body=tuple(body))

    def _skip_to_semicolon(self):
        while not self.at("EOF") and not self.at("OP", ";"):
            self.advance()
        if self.at("OP", ";"):
            self.advance()

    def parse_block(self):
        self.expect("OP", "{")
        stmts = []
        while not self.at("OP", "}"):
            if self.at("EOF"):
                raise CTranslationError("unterminated block", self.line())
            stmts.extend(self.parse_stmt())
        self.advance()
        return stmts

    def parse_body(self):
        """A statement or a braced block, as a list."""
        if self.at("OP", "{"):
            return self.parse_block()
        return self.parse_stmt()

    def parse_stmt(self):
        tok = self.peek()
        line = tok[2]
        if self.at("OP", ";"):
            self.advance()
            return []
        if self.at("OP", "{"):
            return self.parse_block()
        if tok[0] == "ID" and tok[1] in REJECTED_TYPES:
            raise CTranslationError(f"type {tok[1]!r}", line)
        if tok[0] == "ID" and tok[1] in REJECTED_STMTS:
            raise CTranslationError(f"{tok[1]!r} statement", line)
        if self.at("ID", "int"):
            return self.parse_decl()
        if self.at("ID", "return"):
            self.advance()
            while not self.at("OP", ";"):
                if self.at("EOF"):
                    raise CTranslationError("unterminated return", line)
                self.advance()
            self.advance()
            return []
        if self.at("ID", "if"):
            self.advance()
            self.expect("OP", "(")
            cond = self.parse_cond()
            self.expect("OP", ")")
            then = self.parse_body()
            orelse = None
            if self.at("ID", "else"):
                self.advance()
                orelse = tuple(self.parse_body())
            return [CIf(cond, tuple(then), orelse, line)]
        if self.at("ID", "while"):
            self.advance()
            self.expect("OP", "(")
            cond = self.parse_cond()
            self.expect("OP", ")")
            body = self.parse_body()
            return [CWhile(cond, tuple(body), line)]
        if self.at("ID", "for"):
            self.advance()
            self.expect("OP", "(")
            init = None
            if not self.at("OP", ";"):
                init_stmts = self.parse_decl() if self.at("ID", "int") else [self.parse_assignment()]
                if self.at("OP", ";"):
                    self.advance()
                if len(init_stmts) != 1:
                    raise CTranslationError("multi-declarator for-init", line)
                init = init_stmts[0]
            else:
                self.advance()
            cond = None
            if not self.at("OP", ";"):
                cond = self.parse_cond()
            self.expect("OP", ";")
            step = None
            if not self.at("OP", ")"):
                step = self.parse_assignment()
            self.expect("OP", ")")
            body = self.parse_body()
            return [CFor(init, cond, step, tuple(body), line)]
        if tok[0] == "ID" and tok[1] in ASSERT_NAMES:
            self.advance()
            self.expect("OP", "(")
            depth = 1
            while depth:
                nxt = self.advance()
                if nxt[0] == "EOF":
                    raise CTranslationError("unterminated assert", line)
                if nxt == ("OP", "(", nxt[2]):
                    pass
                if nxt[0] == "OP" and nxt[1] == "(":
                    depth += 1
                elif nxt[0] == "OP" and nxt[1] == ")":
                    depth -= 1
            if self.at("OP", ";"):
                self.advance()
            return [("assert_dropped", line)]
        if tok[0] == "ID":
            stmt = self.parse_assignment()
            self.expect("OP", ";")
            return [stmt]
        raise CTranslationError(f"statement starting with {tok[1]!r}", line)

    def parse_decl(self):
        line = self.line()
        self.expect("ID", "int")
        out = []
        while True:
            name_tok = self.expect("ID")
            name = name_tok[1]
            if self.at("OP", "[") or self.at("OP", "*") or self.at("OP", "&"):
                raise CTranslationError("array or pointer declarator", self.line())
            init = None
            if self.at("OP", "="):
                self.advance()
                init = self.parse_expr()
            out.append(CDecl(name, init, line))
            if self.at("OP", ","):
                self.advance()
                continue
            break
        if self.at("OP", ";"):
            self.advance()
        return out

    def parse_assignment(self):
        line = self.line()
        name = self.expect("ID")[1]
        if self.at("OP", "++"):
            self.advance()
            return CAssign(name, BinOp("+", Var(name), IntLit(1)), line)
        if self.at("OP", "--"):
            self.advance()
            return CAssign(name, BinOp("-", Var(name), IntLit(1)), line)
        for op in ("+=", "-=", "*=", "/="):
            if self.at("OP", op):
                self.advance()
                return CAssign(name, BinOp(op[0], Var(name), self.parse_expr()), line)
        self.expect("OP", "=")
        return CAssign(name, self.parse_expr(), line)

    # -- expressions -------------------------------------------------------

    def parse_expr(self):
        e = self.parse_term()
        while self.at("OP", "+") or self.at("OP", "-"):
            op = self.advance()[1]
            e = BinOp(op, e, self.parse_term())
        return e

    def parse_term(self):
        e = self.parse_unary()
        while self.at("OP", "*") or self.at("OP", "/") or self.at("OP", "%"):
            op = self.advance()[1]
            if op == "%":
                raise CTranslationError("modulo operator", self.line())
            e = BinOp(op, e, self.parse_unary())
        return e

    def parse_unary(self):
        if self.at("OP", "-"):
            line = self.line()
            self.advance()
            inner = self.parse_unary()
            if isinstance(inner, IntLit):
                return IntLit(-inner.value)
            return BinOp("-", IntLit(0), inner)
        if self.at("OP", "("):
            self.advance()
            e = self.parse_expr()
            self.expect("OP", ")")
            return e
        tok = self.peek()
        if tok[0] == "INT":
            self.advance()
            return IntLit(tok[1])
        if tok[0] == "ID":
            name = self.advance()[1]
            if self.at("OP", "("):
                self.advance()
                self.expect("OP", ")")
                if name == NONDET:
                    return Read()
                raise CTranslationError(f"call to {name!r}", tok[2])
            return Var(name)
        raise CTranslationError(f"expression at {tok[1]!r}", tok[2])

    # -- conditions ---------------------------------------------------------

    def parse_cond(self):
        e = self.parse_cond_and()
        while self.at("OP", "||"):
            self.advance()
            e = Or(e, self.parse_cond_and())
        return e

    def parse_cond_and(self):
        e = self.parse_cond_unary()
        while self.at("OP", "&&"):
            self.advance()
            e = And(e, self.parse_cond_unary())
        return e

    def parse_cond_unary(self):
        line = self.line()
        if self.at("OP", "!"):
            self.advance()
            return Not(self.parse_cond_unary())
        if self.at("OP", "("):
            self.advance()
            inner = self.parse_cond()
            self.expect("OP", ")")
            return inner
        lhs = self.parse_expr()
        for op in ("<=", ">=", "==", "!=", "<", ">"):
            if self.at("OP", op):
                self.advance()
                rhs = self.parse_expr()
                return self._relation(op, lhs, rhs, line)
        # truthiness: a bare value used as a condition
        if isinstance(lhs, IntLit):
            return TrueLit() if lhs.value != 0 else Not(TrueLit())
        if isinstance(lhs, (Var, Read)):
            return Not(Cmp("==", lhs, IntLit(0)))
        raise CTranslationError("arithmetic used as a condition", line)

    def _relation(self, op, lhs, rhs, line):
        for side in (lhs, rhs):
            if not isinstance(side, (Var, IntLit, Read)):
                raise CTranslationError("arithmetic inside a comparison", line)
        if op == "!=":
            return Not(Cmp("==", lhs, rhs))
        return Cmp(op, lhs, rhs)


def parse_c(text: str) -> CSubsetProgram:
    parser = _CParser(_clex(text))
    prog = parser.parse_unit()
    body = []
    declared = []
    diagnostics = []

    def collect(stmts):
        out = []
        for stmt in stmts:
            if isinstance(stmt, tuple) and stmt and stmt[0] == "assert_dropped":
                diagnostics.append(f"line {stmt[1]}: assert call dropped")
                continue
            if isinstance(stmt, CDecl):
                declared.append(stmt.name)
                out.append(stmt)
            elif isinstance(stmt, CIf):
                out.append(
                    CIf(
                        stmt.cond,
                        tuple(collect(stmt.then)),
                        tuple(collect(stmt.orelse)) if stmt.orelse is not None else None,
                        stmt.line,
                    )
                )
            elif isinstance(stmt, CWhile):
                out.append(CWhile(stmt.cond, tuple(collect(stmt.body)), stmt.line))
            elif isinstance(stmt, CFor):
                init = stmt.init
                if isinstance(init, CDecl):
                    declared.append(init.name)
                out.append(CFor(init, stmt.cond, stmt.step, tuple(collect(stmt.body)), stmt.line))
            else:
                out.append(stmt)
        return out

    prog.body = tuple(collect(body + list(prog.body)))
    prog.declarations = declared
    prog.diagnostics = diagnostics
    return prog


# --- translation to the analysis language ------------------------------------


def _count_ops(e) -> int:
    if isinstance(e, BinOp):
        return 1 + _count_ops(e.lhs) + _count_ops(e.rhs)
    return 0


class _TempNamer:
    def __init__(self, taken):
        self.taken = set(taken)
        self.counter = 0

    def fresh(self) -> str:
        while True:
            name = f"t{self.counter}"
            self.counter += 1
            if name not in self.taken:
                self.taken.add(name)
                return name


@dataclass
class TranslationResult:
    program: AnnotatedProgram
    c_program: CSubsetProgram
    boundary_locations: frozenset  # IMP locations that are C statement boundaries
    diagnostics: list


def _all_names(stmts, acc):
    for stmt in stmts:
        if isinstance(stmt, (CDecl, CAssign)):
            acc.add(stmt.name)
        elif isinstance(stmt, CIf):
            _all_names(stmt.then, acc)
            if stmt.orelse is not None:
                _all_names(stmt.orelse, acc)
        elif isinstance(stmt, CWhile):
            _all_names(stmt.body, acc)
        elif isinstance(stmt, CFor):
            if stmt.init is not None:
                _all_names([stmt.init], acc)
            if stmt.step is not None:
                _all_names([stmt.step], acc)
            _all_names(stmt.body, acc)


def translate_c_full(text: str) -> TranslationResult:
    cprog = parse_c(text)
    names = set(cprog.declarations)
    _all_names(cprog.body, names)
    namer = _TempNamer(names)
    counter = [1]  # location 0 is program entry
    boundaries = {0}

    def fresh_loc(boundary: bool) -> int:
        loc = counter[0]
        counter[0] += 1
        if boundary:
            boundaries.add(loc)
        return loc

    def flatten(e, out):
        """Left-to-right flattening; returns an atom, appending temp
        assignments to ``out`` (each takes one internal location)."""
        if not isinstance(e, BinOp):
            return e
        lhs = flatten(e.lhs, out)
        rhs = flatten(e.rhs, out)
        name = namer.fresh()
        out.append(Assign(name, BinOp(e.op, lhs, rhs)))
        fresh_loc(boundary=False)
        return Var(name)

    def emit_assign(name, expr, out):
        temps = []
        if _count_ops(expr) > 1:
            lhs = flatten(expr.lhs, temps)
            rhs = flatten(expr.rhs, temps)
            expr = BinOp(expr.op, lhs, rhs)
        out.extend(temps)
        out.append(Assign(name, expr))
        fresh_loc(boundary=True)

    def walk(stmts):
        out = []
        for stmt in stmts:
            if isinstance(stmt, CDecl):
                if stmt.init is not None:
                    emit_assign(stmt.name, stmt.init, out)
            elif isinstance(stmt, CAssign):
                emit_assign(stmt.name, stmt.expr, out)
            elif isinstance(stmt, CIf):
                fresh_loc(boundary=True)  # then entry
                then = walk(stmt.then)
                if not then:
                    then = [Skip()]
                    fresh_loc(boundary=True)
                fresh_loc(boundary=True)  # else entry
                orelse = walk(stmt.orelse) if stmt.orelse else []
                if not orelse:
                    orelse = [Skip()]
                    fresh_loc(boundary=True)
                fresh_loc(boundary=True)  # end of conditional
                out.append(If(stmt.cond, seq(then), seq(orelse)))
            elif isinstance(stmt, CWhile):
                fresh_loc(boundary=True)  # loop head
                body = walk(stmt.body)
                if not body:
                    body = [Skip()]
                    fresh_loc(boundary=True)
                fresh_loc(boundary=True)  # after the loop
                out.append(While(stmt.cond, seq(body)))
            elif isinstance(stmt, CFor):
                if stmt.init is not None:
                    if isinstance(stmt.init, CDecl):
                        if stmt.init.init is not None:
                            emit_assign(stmt.init.name, stmt.init.init, out)
                    else:
                        emit_assign(stmt.init.name, stmt.init.expr, out)
                cond = stmt.cond if stmt.cond is not None else TrueLit()
                fresh_loc(boundary=True)  # loop head
                body = walk(stmt.body)
                if stmt.step is not None:
                    emit_assign(stmt.step.name, stmt.step.expr, body)
                if not body:
                    body = [Skip()]
                    fresh_loc(boundary=True)
                fresh_loc(boundary=True)  # after the loop
                out.append(While(cond, seq(body)))
            else:
                raise TypeError(f"unexpected C statement {stmt!r}")
        return out

    body = walk(cprog.body)
    if not body:
        body = [Skip()]
        fresh_loc(boundary=True)
    root = seq(body)

    # declared-but-unused variables still belong to the universe
    from absint.lang.syntax import variable_universe

    occurring = list(variable_universe(root))
    universe = []
    for name in occurring + [d for d in cprog.declarations if d not in occurring]:
        if name not in universe:
            universe.append(name)
    prog = annotate(root, variables=tuple(universe))
    if prog.n_locations != counter[0]:
        raise AssertionError("location bookkeeping out of sync with annotation")
    return TranslationResult(
        program=prog,
        c_program=cprog,
        boundary_locations=frozenset(boundaries),
        diagnostics=list(cprog.diagnostics),
    )


def translate_c(text: str) -> AnnotatedProgram:
    return translate_c_full(text).program


# --- direct evaluation of the C subset ---------------------------------------


def _c_eval_expr(e, store, source):
    if isinstance(e, IntLit):
        return e.value
    if isinstance(e, Var):
        return store[e.name]
    if isinstance(e, Read):
        return source.next()
    if isinstance(e, BinOp):
        x = _c_eval_expr(e.lhs, store, source)
        y = _c_eval_expr(e.rhs, store, source)
        if e.op == "+":
            return x + y
        if e.op == "-":
            return x - y
        if e.op == "*":
            return x * y
        if y == 0:
            raise Trap("division by zero")
        q = abs(x) // abs(y)
        return q if (x >= 0) == (y >= 0) else -q
    raise TypeError(f"not a C expression: {e!r}")


def _c_eval_cond(c, store, source):
    if isinstance(c, TrueLit):
        return True
    if isinstance(c, Not):
        return not _c_eval_cond(c.inner, store, source)
    if isinstance(c, And):
        return _c_eval_cond(c.lhs, store, source) and _c_eval_cond(c.rhs, store, source)
    if isinstance(c, Or):
        return _c_eval_cond(c.lhs, store, source) or _c_eval_cond(c.rhs, store, source)
    if isinstance(c, Cmp):
        x = _c_eval_expr(c.lhs, store, source)
        y = _c_eval_expr(c.rhs, store, source)
        return {"<": x < y, "<=": x <= y, "==": x == y, ">": x > y, ">=": x >= y}[c.op]
    raise TypeError(f"not a C condition: {c!r}")


def run_c_direct(cprog: CSubsetProgram, source, observe, max_loop_iters: int, init_store=None):
    """Execute the C program directly, emitting store snapshots at the
    same indices the translated program records its locations at."""
    if init_store is None:
        store = {name: source.next() for name in cprog.declarations}
    else:
        store = dict(init_store)
    counter = [1]
    iters_left = [max_loop_iters]

    def advance(n):
        counter[0] += n

    def snapshot():
        observe(counter[0], store)
        counter[0] += 1

    def assign(name, expr):
        temps = _count_ops(expr)
        value = _c_eval_expr(expr, store, source)
        store[name] = value
        advance(temps - 1 if temps > 1 else 0)
        snapshot()

    def run(stmts):
        for stmt in stmts:
            if isinstance(stmt, CDecl):
                if stmt.init is not None:
                    assign(stmt.name, stmt.init)
            elif isinstance(stmt, CAssign):
                assign(stmt.name, stmt.expr)
            elif isinstance(stmt, CIf):
                taken = _c_eval_cond(stmt.cond, store, source)
                then_locs = _imp_location_count(stmt.then) or 1
                else_stmts = stmt.orelse if stmt.orelse else None
                else_locs = (_imp_location_count(else_stmts) or 1) if else_stmts else 1
                if taken:
                    snapshot()  # then entry
                    run(stmt.then)
                    if _imp_location_count(stmt.then) == 0:
                        snapshot()  # the synthesized skip
                    advance(1 + else_locs)  # jump over the untaken else side
                else:
                    advance(1 + then_locs)  # jump over the untaken then side
                    snapshot()  # else entry
                    if else_stmts and _imp_location_count(else_stmts) > 0:
                        run(else_stmts)
                    else:
                        if else_stmts:
                            run(else_stmts)
                        snapshot()  # the synthesized skip
                snapshot()  # after the conditional
            elif isinstance(stmt, CWhile):
                _loop(stmt.cond, stmt.body, None)
            elif isinstance(stmt, CFor):
                if isinstance(stmt.init, CDecl):
                    if stmt.init.init is not None:
                        assign(stmt.init.name, stmt.init.init)
                elif isinstance(stmt.init, CAssign):
                    assign(stmt.init.name, stmt.init.expr)
                cond = stmt.cond if stmt.cond is not None else TrueLit()
                _loop(cond, stmt.body, stmt.step)
            else:
                raise TypeError(f"unexpected C statement {stmt!r}")

    def _loop(cond, body, step):
        head = counter[0]
        inner_locs = _imp_location_count(body, step)
        after = head + 1 + (inner_locs or 1)
        while _c_eval_cond(cond, store, source):
            if iters_left[0] <= 0:
                raise _LoopBudget()
            iters_left[0] -= 1
            counter[0] = head
            snapshot()  # loop head
            run(body)
            if step is not None:
                assign(step.name, step.expr)
            if inner_locs == 0:
                snapshot()  # the synthesized skip
        counter[0] = after
        snapshot()  # after the loop

    diagnostics = []
    observe(0, store)
    completed = True
    try:
        run(cprog.body)
        if not cprog.body:
            snapshot()
    except Trap as exc:
        completed = False
        diagnostics.append(f"run aborted: {exc}")
    except _LoopBudget:
        completed = False
        diagnostics.append("loop iteration budget exhausted")
    return completed, diagnostics


def _imp_location_count(stmts, extra_step=None) -> int:
    """How many locations a C statement list expands to."""
    total = 0
    for stmt in stmts or ():
        if isinstance(stmt, CDecl):
            if stmt.init is not None:
                ops = _count_ops(stmt.init)
                total += (ops - 1 if ops > 1 else 0) + 1
        elif isinstance(stmt, CAssign):
            ops = _count_ops(stmt.expr)
            total += (ops - 1 if ops > 1 else 0) + 1
        elif isinstance(stmt, CIf):
            then_locs = _imp_location_count(stmt.then) or 1
            else_locs = _imp_location_count(stmt.orelse) if stmt.orelse else 1
            total += 3 + then_locs + else_locs
        elif isinstance(stmt, CWhile):
            total += 2 + (_imp_location_count(stmt.body) or 1)
        elif isinstance(stmt, CFor):
            if stmt.init is not None:
                total += _imp_location_count([stmt.init])
            inner = _imp_location_count(stmt.body, stmt.step)
            total += 2 + (inner or 1)
    if extra_step is not None:
        ops = _count_ops(extra_step.expr)
        total += (ops - 1 if ops > 1 else 0) + 1
    return total
