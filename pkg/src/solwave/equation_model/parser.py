"""Recursive-descent parser for the equation DSL.

Grammar (LL(1), whitespace-insensitive, ``#`` starts a comment)::

    program := { stmt (';' | NEWLINE) }
    stmt    := 'param' decl { ',' decl } | expr '=' expr
    decl    := NAME [ '=' ['-'] INT [ '/' INT ] ]
    expr    := term { ('+' | '-') term }
    term    := unary { ('*' | '/') unary }
    unary   := ('+' | '-') unary | power
    power   := postfix [ '^' unary ]
    postfix := primary { "'" }
    primary := INT | NAME | NAME '(' expr ')' | '(' expr ')'

``dx(...)``/``dt(...)`` differentiate in space/time and nest for higher
orders. The letter ``c`` is the unit wave constant and is replaced by 1.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

from ..errors import EquationSyntaxError, NonPolynomialInput, UndeclaredSymbol
from .expression import (
    HYPERBOLIC_KINDS,
    Const,
    Deriv,
    Expr,
    Func,
    IntPow,
    Symbol,
    SymbolKind,
    expand,
    is_field_atom,
    normalize,
    substitute,
    to_text,
)

_TOKEN = re.compile(
    r"""
    (?P<ws>[ \t\r]+)
  | (?P<comment>\#[^\n]*)
  | (?P<newline>\n)
  | (?P<float>\d+\.\d*|\.\d+)
  | (?P<int>\d+)
  | (?P<name>[^\W\d]\w*)
  | (?P<op>[-+*/^()=;,'])
  | (?P<bad>.)
    """,
    re.VERBOSE,
)

_TRANSCENDENTAL = {"sin", "cos", "tan", "log", "ln", "sqrt", "abs", "asin", "acos", "atan", "sec", "csc", "cot"}
_ANSATZ_NAME = re.compile(r"^[UVC]\d+$")


def symbol_for_name(name: str) -> Symbol:
    """Symbol with the kind implied by the naming convention."""
    if name == "u":
        return Symbol(name, SymbolKind.FIELD)
    if name in ("x", "t", "xi"):
        return Symbol(name, SymbolKind.INDEPENDENT_VAR)
    if name == "v":
        return Symbol(name, SymbolKind.WAVE_SPEED)
    if name == "C":
        return Symbol(name, SymbolKind.INTEGRATION_CONSTANT)
    if name == "x0":
        return Symbol(name, SymbolKind.PHASE_SHIFT)
    if _ANSATZ_NAME.match(name):
        return Symbol(name, SymbolKind.ANSATZ_UNKNOWN)
    return Symbol(name, SymbolKind.PARAMETER)


def is_reserved(name: str) -> bool:
    if name in ("c", "param", "dx", "dt", "dxi") or name in HYPERBOLIC_KINDS or name in _TRANSCENDENTAL:
        return True
    return symbol_for_name(name).kind is not SymbolKind.PARAMETER


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    col: int


def tokenize(text: str) -> list[Token]:
    tokens = []
    line, line_start, depth = 1, 0, 0
    for m in _TOKEN.finditer(text):
        kind = m.lastgroup
        col = m.start() - line_start + 1
        s = m.group()
        if kind == "newline":
            if depth == 0:
                tokens.append(Token("sep", "\n", line, col))
            line += 1
            line_start = m.end()
            continue
        if kind in ("ws", "comment"):
            continue
        if kind == "float":
            raise EquationSyntaxError(f"floating-point literal {s!r} is not allowed; use a rational", line, col, text)
        if kind == "bad":
            raise EquationSyntaxError(f"unexpected character {s!r}", line, col, text)
        if kind == "op":
            if s == "(":
                depth += 1
            elif s == ")":
                depth = max(depth - 1, 0)
            if s == ";":
                kind = "sep"
        tokens.append(Token(kind, s, line, col))
    tokens.append(Token("eof", "", line, len(text) - line_start + 1))
    return tokens


@dataclass(frozen=True)
class PdeEquation:
    """``lhs = 0`` for a single scalar field ``u(x, t)``."""

    lhs: Expr
    field: Symbol
    space_var: Symbol
    time_var: Symbol
    parameters: tuple = ()
    values: Mapping = field(default_factory=dict)
    source: str = ""

    def bound(self) -> "PdeEquation":
        """Copy with declared parameter values substituted exactly."""
        if not self.values:
            return self
        lhs = substitute(self.lhs, {p: Const(self.values[p.name]) for p in self.parameters if p.name in self.values})
        params = tuple(p for p in self.parameters if p.name not in self.values)
        return PdeEquation(lhs, self.field, self.space_var, self.time_var, params, {}, self.source)

    def to_text(self) -> str:
        decls = []
        for p in self.parameters:
            if p.name in self.values:
                decls.append(f"param {p.name} = {self.values[p.name]};")
            else:
                decls.append(f"param {p.name};")
        return "\n".join(decls + [f"{to_text(self.lhs)} = 0"])


class _Parser:
    def __init__(self, text: str, mode: str, symbols: dict | None = None):
        self.text = text
        self.tokens = tokenize(text)
        self.pos = 0
        self.mode = mode  # "equation" or "profile"
        self.symbols: dict[str, Symbol] = dict(symbols or {})
        self.values: dict[str, Fraction] = {}
        self.declared: list[Symbol] = []

    # token helpers
    @property
    def tok(self) -> Token:
        return self.tokens[self.pos]

    def error(self, msg, tok=None, cls=EquationSyntaxError):
        tok = tok or self.tok
        return cls(msg, tok.line, tok.col, self.text)

    def advance(self) -> Token:
        t = self.tok
        self.pos += 1
        return t

    def accept(self, text) -> bool:
        if self.tok.kind == "op" and self.tok.text == text:
            self.pos += 1
            return True
        return False

    def expect(self, text) -> Token:
        if self.tok.kind == "op" and self.tok.text == text:
            return self.advance()
        found = self.tok.text or "end of input"
        raise self.error(f"expected {text!r}, found {found!r}")

    def skip_separators(self):
        while self.tok.kind == "sep":
            self.pos += 1

    # statements
    def program(self) -> list:
        equations = []
        self.skip_separators()
        while self.tok.kind != "eof":
            if self.tok.kind == "name" and self.tok.text == "param":
                self.advance()
                self.declaration()
                while self.accept(","):
                    self.declaration()
            else:
                start = self.tok
                lhs = self.expr()
                self.expect("=")
                rhs = self.expr()
                equations.append((lhs - rhs, start))
            if self.tok.kind not in ("sep", "eof"):
                raise self.error(f"unexpected {self.tok.text!r}")
            self.skip_separators()
        return equations

    def declaration(self):
        tok = self.tok
        if tok.kind != "name":
            raise self.error("expected parameter name")
        self.advance()
        name = tok.text
        if is_reserved(name):
            raise self.error(f"{name!r} is reserved and cannot be declared as a parameter", tok)
        if name in self.symbols:
            raise self.error(f"parameter {name!r} declared twice", tok)
        sym = Symbol(name, SymbolKind.PARAMETER)
        self.symbols[name] = sym
        self.declared.append(sym)
        if self.accept("="):
            neg = self.accept("-")
            if self.tok.kind != "int":
                raise self.error("parameter value must be a rational literal")
            val = Fraction(int(self.advance().text))
            if self.accept("/"):
                if self.tok.kind != "int":
                    raise self.error("expected denominator")
                den = int(self.advance().text)
                if den == 0:
                    raise self.error("zero denominator")
                val /= den
            self.values[name] = -val if neg else val

    # expressions
    def expr(self) -> Expr:
        node = self.term()
        while True:
            if self.accept("+"):
                node = node + self.term()
            elif self.accept("-"):
                node = node - self.term()
            else:
                return node

    def term(self) -> Expr:
        node = self.unary()
        while True:
            if self.accept("*"):
                node = node * self.unary()
            elif self.tok.kind == "op" and self.tok.text == "/":
                tok = self.advance()
                den = self.unary()
                if normalize(den) == Const(0):
                    raise self.error("division by zero", tok)
                node = node / den
            else:
                return node

    def unary(self) -> Expr:
        if self.accept("-"):
            return -self.unary()
        if self.accept("+"):
            return self.unary()
        return self.power()

    def power(self) -> Expr:
        base = self.postfix()
        if self.tok.kind == "op" and self.tok.text == "^":
            tok = self.advance()
            ex = normalize(self.unary())
            if not isinstance(ex, Const) or ex.value.denominator != 1:
                raise self.error("exponent must be an integer constant", tok, NonPolynomialInput)
            n = int(ex.value)
            if n < 0 and normalize(base) == Const(0):
                raise self.error("negative power of zero", tok)
            return IntPow(base, n)
        return base

    def postfix(self) -> Expr:
        tok = self.tok
        node = self.primary()
        primes = 0
        while self.accept("'"):
            primes += 1
        if primes:
            if not (isinstance(node, Symbol) and node.kind is SymbolKind.FIELD):
                raise self.error("prime notation applies to the field only", tok)
            node = Deriv(node, self.resolve_name("xi", tok), primes)
        return node

    def primary(self) -> Expr:
        tok = self.tok
        if tok.kind == "int":
            self.advance()
            return Const(int(tok.text))
        if self.accept("("):
            node = self.expr()
            self.expect(")")
            return node
        if tok.kind == "name":
            self.advance()
            if self.tok.kind == "op" and self.tok.text == "(":
                return self.call(tok)
            return self.resolve_name(tok.text, tok)
        found = tok.text or "end of input"
        raise self.error(f"unexpected {found!r}")

    def call(self, name_tok: Token) -> Expr:
        name = name_tok.text
        self.expect("(")
        arg = self.expr()
        self.expect(")")
        if name.startswith("d") and name[1:] in ("x", "t", "xi"):
            if name == "dxi" and self.mode == "equation":
                raise self.error("dxi(...) is only available for profiles", name_tok)
            return Deriv(arg, self.resolve_name(name[1:], name_tok), 1)
        if name in HYPERBOLIC_KINDS:
            if self.mode == "equation":
                raise self.error(f"{name}(...) is not polynomial input", name_tok, NonPolynomialInput)
            return Func(name, arg)
        if name in _TRANSCENDENTAL:
            raise self.error(f"unsupported function {name}(...)", name_tok, NonPolynomialInput)
        raise self.error(f"unknown function {name!r}", name_tok)

    def resolve_name(self, name: str, tok: Token) -> Expr:
        if name == "c":
            return Const(1)
        if name in self.symbols:
            return self.symbols[name]
        if self.mode == "equation":
            if name in ("u", "x", "t"):
                sym = symbol_for_name(name)
                self.symbols[name] = sym
                return sym
            raise self.error(f"undeclared symbol {name!r}", tok, UndeclaredSymbol)
        sym = symbol_for_name(name)
        self.symbols[name] = sym
        return sym


def _check_polynomial(lhs: Expr, parser: _Parser, tok: Token) -> None:
    for m in expand(lhs).terms:
        for atom, e in m:
            if is_field_atom(atom):
                if e < 0:
                    raise parser.error("negative power of the field is not polynomial input", tok, NonPolynomialInput)
            elif isinstance(atom, Symbol):
                if atom.kind is SymbolKind.INDEPENDENT_VAR and e < 0:
                    raise parser.error("negative power of an independent variable", tok, NonPolynomialInput)
            elif isinstance(atom, Func):
                raise parser.error("transcendental functions are not polynomial input", tok, NonPolynomialInput)
            else:
                from .expression import free_symbols

                if any(s.kind is SymbolKind.FIELD for s in free_symbols(atom)):
                    raise parser.error("division by an expression in the field", tok, NonPolynomialInput)


def parse_equation(text: str) -> PdeEquation:
    """Parse a DSL program holding parameter declarations and one equation."""
    parser = _Parser(text, "equation")
    equations = parser.program()
    if not equations:
        raise EquationSyntaxError("no equation found", parser.tok.line, parser.tok.col, text)
    if len(equations) > 1:
        tok = equations[1][1]
        raise EquationSyntaxError("only one equation per program is supported", tok.line, tok.col, text)
    raw, tok = equations[0]
    _check_polynomial(raw, parser, tok)
    lhs = normalize(raw)
    return PdeEquation(
        lhs=lhs,
        field=symbol_for_name("u"),
        space_var=symbol_for_name("x"),
        time_var=symbol_for_name("t"),
        parameters=tuple(parser.declared),
        values=dict(parser.values),
        source=text,
    )


def parse_expression(text: str, symbols: Mapping[str, Symbol] | None = None) -> Expr:
    """Parse a profile expression; unknown names follow :func:`symbol_for_name`."""
    parser = _Parser(text, "profile", dict(symbols or {}))
    parser.skip_separators()
    node = parser.expr()
    parser.skip_separators()
    if parser.tok.kind != "eof":
        raise parser.error(f"unexpected {parser.tok.text!r}")
    return normalize(node)
