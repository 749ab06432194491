"""Parser for the annotated program text format.

Location markers ``{Pk}`` and directives like ``[while_true]`` may be
present or absent; when present they are checked against the canonical
labeling while parsing (the numbering is a pure function of the program
structure, so embedded labels are either redundant or wrong).
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from absint.lang.annotate import AnnotatedProgram, annotate
from absint.lang.syntax import (
    And,
    Assign,
    BinOp,
    Cmp,
    IntLit,
    If,
    Not,
    Or,
    Paren,
    Read,
    Skip,
    TrueLit,
    Var,
    While,
    seq,
)


class ImpSyntaxError(ValueError):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{line}:{col}: {message}")
        self.line = line
        self.col = col


class LabelMismatchError(ImpSyntaxError):
    """An embedded location or directive contradicts canonical placement."""


@dataclass(frozen=True)
class Token:
    kind: str  # LOC, DIR, ID, INT, KW, OP, EOF
    value: object
    line: int
    col: int


_KEYWORDS = {"skip", "if", "then", "else", "end", "while", "do", "read", "true", "false"}

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<loc>\{P(?P<locidx>\d+)\})
  | (?P<dir>\[(?P<dirkind>if_then|if_else|endif|while_true|while_false)\])
  | (?P<int>\d+)
  | (?P<id>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>:=|<=|>=|==|&&|\|\||[-+*/<>!();{}])
    """,
    re.VERBOSE,
)


def tokenize(text: str) -> list:
    tokens = []
    line, col = 1, 1
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise ImpSyntaxError(f"unexpected character {text[pos]!r}", line, col)
        lexeme = m.group(0)
        if m.lastgroup != "ws" or True:
            if m.group("ws"):
                pass
            elif m.group("loc"):
                tokens.append(Token("LOC", int(m.group("locidx")), line, col))
            elif m.group("dir"):
                tokens.append(Token("DIR", m.group("dirkind"), line, col))
            elif m.group("int"):
                tokens.append(Token("INT", int(lexeme), line, col))
            elif m.group("id"):
                kind = "KW" if lexeme in _KEYWORDS else "ID"
                tokens.append(Token(kind, lexeme, line, col))
            else:
                tokens.append(Token("OP", lexeme, line, col))
        newlines = lexeme.count("\n")
        if newlines:
            line += newlines
            col = len(lexeme) - lexeme.rfind("\n")
        else:
            col += len(lexeme)
        pos = m.end()
    tokens.append(Token("EOF", None, line, col))
    return tokens


class _Parser:
    def __init__(self, tokens):
        self.tokens = tokens
        self.i = 0
        self.next_location = 0
        self.saw_annotations = False

    # -- token plumbing ------------------------------------------------

    def peek(self) -> Token:
        return self.tokens[self.i]

    def advance(self) -> Token:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def fail(self, message: str, tok: Token = None):
        tok = tok or self.peek()
        if tok.kind == "LOC":
            raise LabelMismatchError(
                f"location {{P{tok.value}}} not at a canonical location slot", tok.line, tok.col
            )
        if tok.kind == "DIR":
            raise LabelMismatchError(
                f"[{tok.value}] not at a canonical directive slot", tok.line, tok.col
            )
        raise ImpSyntaxError(message, tok.line, tok.col)

    def expect_op(self, op: str) -> Token:
        tok = self.peek()
        if tok.kind != "OP" or tok.value != op:
            self.fail(f"expected {op!r}, found {self._describe(tok)}")
        return self.advance()

    def expect_kw(self, kw: str) -> Token:
        tok = self.peek()
        if tok.kind != "KW" or tok.value != kw:
            self.fail(f"expected {kw!r}, found {self._describe(tok)}")
        return self.advance()

    @staticmethod
    def _describe(tok: Token) -> str:
        if tok.kind == "EOF":
            return "end of input"
        return repr(tok.value)

    # -- annotation slots ----------------------------------------------

    def take_location(self):
        """Consume an optional {Pk} marker and check it against the
        canonical index for this slot."""
        expected = self.next_location
        self.next_location += 1
        tok = self.peek()
        if tok.kind == "LOC":
            self.saw_annotations = True
            self.advance()
            if tok.value != expected:
                raise LabelMismatchError(
                    f"location {{P{tok.value}}} where canonical labeling has {{P{expected}}}",
                    tok.line,
                    tok.col,
                )

    def take_directive(self, expected_kind: str):
        tok = self.peek()
        if tok.kind == "DIR":
            self.saw_annotations = True
            self.advance()
            if tok.value != expected_kind:
                raise LabelMismatchError(
                    f"[{tok.value}] where [{expected_kind}] belongs", tok.line, tok.col
                )

    def reject_stray_annotation(self):
        tok = self.peek()
        if tok.kind == "LOC":
            raise LabelMismatchError(
                f"location {{P{tok.value}}} not at a canonical location slot",
                tok.line,
                tok.col,
            )
        if tok.kind == "DIR":
            raise LabelMismatchError(
                f"[{tok.value}] not at a canonical directive slot", tok.line, tok.col
            )

    # -- grammar ---------------------------------------------------------

    def parse_program(self):
        self.take_location()  # entry
        body = self.parse_stmts(terminators=())
        if self.peek().kind != "EOF":
            self.fail(f"trailing input: {self._describe(self.peek())}")
        return seq(body)

    def parse_stmts(self, terminators):
        stmts = [self.parse_stmt()]
        while True:
            tok = self.peek()
            if tok.kind == "EOF":
                break
            if tok.kind == "KW" and tok.value in terminators:
                break
            self.reject_stray_annotation()
            stmts.append(self.parse_stmt())
        return stmts

    def parse_stmt(self):
        self.reject_stray_annotation()
        tok = self.peek()
        if tok.kind == "KW" and tok.value == "skip":
            self.advance()
            self.expect_op(";")
            self.take_location()
            return Skip()
        if tok.kind == "ID":
            name = self.advance().value
            self.expect_op(":=")
            rhs = self.parse_expr()
            self.expect_op(";")
            self.take_location()
            return Assign(name, rhs)
        if tok.kind == "KW" and tok.value == "if":
            self.advance()
            self.expect_op("(")
            guard = self.parse_guard()
            self.expect_op(")")
            self.expect_kw("then")
            self.take_directive("if_then")
            self.take_location()
            then = self.parse_stmts(terminators=("else",))
            self.expect_kw("else")
            self.take_directive("if_else")
            self.take_location()
            orelse = self.parse_stmts(terminators=("end",))
            self.expect_kw("end")
            self.take_directive("endif")
            self.take_location()
            return If(guard, seq(then), seq(orelse))
        if tok.kind == "KW" and tok.value == "while":
            self.advance()
            self.expect_op("(")
            guard = self.parse_guard()
            self.expect_op(")")
            self.expect_kw("do")
            self.take_directive("while_true")
            self.take_location()
            body = self.parse_stmts(terminators=("end",))
            self.expect_kw("end")
            self.take_directive("while_false")
            self.take_location()
            return While(guard, seq(body))
        self.fail(f"expected a statement, found {self._describe(tok)}")

    # expressions: + - over * /, left-associative

    def parse_expr(self):
        e = self.parse_term()
        while self.peek().kind == "OP" and self.peek().value in ("+", "-"):
            op = self.advance().value
            e = BinOp(op, e, self.parse_term())
        return e

    def parse_term(self):
        e = self.parse_factor()
        while self.peek().kind == "OP" and self.peek().value in ("*", "/"):
            op = self.advance().value
            e = BinOp(op, e, self.parse_factor())
        return e

    def parse_factor(self):
        tok = self.peek()
        if tok.kind == "OP" and tok.value == "(":
            self.advance()
            e = self.parse_expr()
            self.expect_op(")")
            return e
        return self.parse_atom()

    def parse_atom(self):
        tok = self.peek()
        if tok.kind == "INT":
            self.advance()
            return IntLit(tok.value)
        if tok.kind == "OP" and tok.value == "-":
            self.advance()
            num = self.peek()
            if num.kind != "INT":
                self.fail("expected an integer after unary '-'")
            self.advance()
            return IntLit(-num.value)
        if tok.kind == "ID":
            self.advance()
            return Var(tok.value)
        if tok.kind == "KW" and tok.value == "read":
            self.advance()
            self.expect_op("(")
            self.expect_op(")")
            return Read()
        self.fail(f"expected a value, found {self._describe(tok)}")

    # guards: || over &&, ! binds tightest and takes a parenthesized guard

    def parse_guard(self):
        e = self.parse_guard_and()
        while self.peek().kind == "OP" and self.peek().value == "||":
            self.advance()
            e = Or(e, self.parse_guard_and())
        return e

    def parse_guard_and(self):
        e = self.parse_guard_prim()
        while self.peek().kind == "OP" and self.peek().value == "&&":
            self.advance()
            e = And(e, self.parse_guard_prim())
        return e

    def parse_guard_prim(self):
        tok = self.peek()
        if tok.kind == "OP" and tok.value == "!":
            self.advance()
            self.expect_op("(")
            inner = self.parse_guard()
            self.expect_op(")")
            return Not(inner)
        if tok.kind == "OP" and tok.value == "(":
            self.advance()
            inner = self.parse_guard()
            self.expect_op(")")
            return Paren(inner)
        if tok.kind == "KW" and tok.value == "true":
            self.advance()
            return TrueLit()
        if tok.kind == "KW" and tok.value == "false":
            self.advance()
            return Not(TrueLit())
        lhs = self.parse_atom()
        op_tok = self.peek()
        if op_tok.kind != "OP" or op_tok.value not in ("<", "<=", "==", ">", ">="):
            self.fail(f"expected a comparison operator, found {self._describe(op_tok)}")
        self.advance()
        rhs = self.parse_atom()
        return Cmp(op_tok.value, lhs, rhs)


def parse_imp(text: str) -> AnnotatedProgram:
    """Parse annotated (or bare) program text into an annotated program."""
    parser = _Parser(tokenize(text))
    root = parser.parse_program()
    return annotate(root)


def parse_guard_text(text: str):
    """A guard on its own, e.g. ``a < 6`` or ``!(read() == 0)``."""
    parser = _Parser(tokenize(text))
    guard = parser.parse_guard()
    if parser.peek().kind != "EOF":
        parser.fail(f"trailing input after guard: {parser._describe(parser.peek())}")
    return guard


def parse_atomic_stmt_text(text: str):
    """A single assignment or skip, with or without the semicolon;
    a bare ``read`` right-hand side is taken as ``read()``."""
    text = re.sub(r"\bread\b(?!\s*\()", "read()", text.strip())
    parser = _Parser(tokenize(text))
    tok = parser.peek()
    if tok.kind == "KW" and tok.value == "skip":
        parser.advance()
        stmt = Skip()
    elif tok.kind == "ID":
        name = parser.advance().value
        parser.expect_op(":=")
        stmt = Assign(name, parser.parse_expr())
    else:
        parser.fail(f"expected an assignment or skip, found {parser._describe(tok)}")
    if parser.peek().kind == "OP" and parser.peek().value == ";":
        parser.advance()
    if parser.peek().kind != "EOF":
        parser.fail(f"trailing input after statement: {parser._describe(parser.peek())}")
    return stmt
