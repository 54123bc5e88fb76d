"""Expression mini-language for closed-form solutions and CLI input.

Grammar (left associative, usual precedence):

    expr   := ['-'] term (('+'|'-') term)*
    term   := factor (('*'|'/') factor)*
    factor := base ('^' unsigned-int)?
    base   := number | identifier | '(' expr ')' | func '(' expr ')'
    func   := exp | sin | cos | g

Integers and integer ratios stay exact; decimal literals become floats and
are rejected on symbolic paths, as are sin, cos and the free profile symbol
g. Identifiers resolve against a chart: the coordinate p3 also answers to q3
or r3 (any chart) via its trailing label.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction as Q

import numpy as np

from .errors import (
    ExpressionSyntaxError,
    TranscendentalInSymbolicContext,
    UnknownIdentifier,
)
from .expr import Expr, Parameter, atom_exp

FUNCS = ("exp", "sin", "cos", "g")


@dataclass(frozen=True)
class Num:
    value: object  # Fraction or float


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Bin:
    op: str
    left: object
    right: object


@dataclass(frozen=True)
class Pow:
    base: object
    exponent: int


@dataclass(frozen=True)
class Call:
    func: str
    arg: object


class _Lexer:
    def __init__(self, text):
        self.text = text
        self.pos = 0
        self.line = 1
        self.col = 1
        self.tokens = []
        self._run()

    def _error(self, msg):
        raise ExpressionSyntaxError(msg, self.line, self.col)

    def _advance(self, n=1):
        for _ in range(n):
            if self.pos < len(self.text) and self.text[self.pos] == "\n":
                self.line += 1
                self.col = 1
            else:
                self.col += 1
            self.pos += 1

    def _run(self):
        text = self.text
        while self.pos < len(text):
            ch = text[self.pos]
            if ch.isspace():
                self._advance()
                continue
            start = (self.line, self.col)
            if ch.isdigit() or (ch == "." and self.pos + 1 < len(text)
                                and text[self.pos + 1].isdigit()):
                j = self.pos
                seen_dot = False
                seen_exp = False
                while j < len(text):
                    c = text[j]
                    if c.isdigit():
                        j += 1
                    elif c == "." and not seen_dot and not seen_exp:
                        seen_dot = True
                        j += 1
                    elif c in "eE" and j + 1 < len(text) and not seen_exp \
                            and (text[j + 1].isdigit() or text[j + 1] in "+-"):
                        seen_exp = True
                        j += 1
                        if text[j] in "+-":
                            j += 1
                    else:
                        break
                lit = text[self.pos:j]
                self._advance(j - self.pos)
                if seen_dot or seen_exp:
                    self.tokens.append(("num", float(lit), start))
                else:
                    self.tokens.append(("num", Q(int(lit)), start))
            elif ch.isalpha() or ch == "_":
                j = self.pos
                while j < len(text) and (text[j].isalnum() or text[j] == "_"):
                    j += 1
                name = text[self.pos:j]
                self._advance(j - self.pos)
                self.tokens.append(("ident", name, start))
            elif ch in "+-*/^(),":
                self._advance()
                self.tokens.append((ch, ch, start))
            else:
                self._error(f"unexpected character {ch!r}")
        self.tokens.append(("end", None, (self.line, self.col)))


class _Parser:
    def __init__(self, text):
        self.tokens = _Lexer(text).tokens
        self.i = 0

    def _peek(self):
        return self.tokens[self.i]

    def _next(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def _error(self, msg, tok=None):
        tok = tok or self._peek()
        raise ExpressionSyntaxError(msg, tok[2][0], tok[2][1])

    def _expect(self, kind):
        tok = self._next()
        if tok[0] != kind:
            self._error(f"expected {kind!r}, found {tok[1]!r}", tok)
        return tok

    def parse(self):
        ast = self.expr()
        if self._peek()[0] != "end":
            self._error(f"trailing input {self._peek()[1]!r}")
        return ast

    def expr(self):
        negate = False
        if self._peek()[0] == "-":
            self._next()
            negate = True
        node = self.term()
        if negate:
            node = Bin("-", Num(Q(0)), node)
        while self._peek()[0] in ("+", "-"):
            op = self._next()[0]
            node = Bin(op, node, self.term())
        return node

    def term(self):
        node = self.factor()
        while self._peek()[0] in ("*", "/"):
            op = self._next()[0]
            node = Bin(op, node, self.factor())
        return node

    def factor(self):
        node = self.base()
        if self._peek()[0] == "^":
            self._next()
            tok = self._expect("num")
            if not isinstance(tok[1], Q) or tok[1].denominator != 1 or tok[1] < 0:
                self._error("exponent must be an unsigned integer", tok)
            node = Pow(node, int(tok[1]))
        return node

    def base(self):
        tok = self._next()
        if tok[0] == "num":
            return Num(tok[1])
        if tok[0] == "(":
            node = self.expr()
            self._expect(")")
            return node
        if tok[0] == "ident":
            if tok[1] in FUNCS and self._peek()[0] == "(":
                self._next()
                arg = self.expr()
                self._expect(")")
                return Call(tok[1], arg)
            return Var(tok[1])
        self._error(f"unexpected token {tok[1]!r}", tok)


def parse(text):
    """Parse to an AST; raises ExpressionSyntaxError with position."""
    return _Parser(text).parse()


def render(ast):
    """Canonical text of an AST; parse(render(x)) == x."""
    if isinstance(ast, Num):
        return str(ast.value)
    if isinstance(ast, Var):
        return ast.name
    if isinstance(ast, Bin):
        return f"({render(ast.left)} {ast.op} {render(ast.right)})"
    if isinstance(ast, Pow):
        return f"{render(ast.base)}^{ast.exponent}"
    if isinstance(ast, Call):
        return f"{ast.func}({render(ast.arg)})"
    raise TypeError(ast)


# --- symbolic conversion ---------------------------------------------------


def _resolve_coordinate(chart, name):
    for i, c in enumerate(chart.coords):
        if c.name == name:
            return chart.coord_expr(i)
    # alias: any of p3/q3/r3 addresses the axis labelled "3"
    if len(name) >= 2 and name[0] in "pqrxyz":
        label = name[1:]
        if label in chart.labels:
            return chart.coord_expr(chart.labels.index(label))
    return None


def to_symbolic(ast, chart, parameters=()):
    """AST -> exact expression on a chart.

    Rejects sin/cos/g and float literals; unknown identifiers resolve first
    as chart coordinates (with prefix aliasing), then as declared parameters.
    """
    params = {p.name: p for p in parameters}

    def conv(node):
        if isinstance(node, Num):
            if not isinstance(node.value, Q):
                raise TranscendentalInSymbolicContext(
                    f"float literal {node.value!r} requires a numeric context"
                )
            return Expr.from_value(node.value)
        if isinstance(node, Var):
            c = _resolve_coordinate(chart, node.name)
            if c is not None:
                return c
            if node.name in params:
                return Expr.from_value(params[node.name])
            raise UnknownIdentifier(
                f"{node.name!r} is neither a coordinate of {chart} nor a "
                "declared parameter"
            )
        if isinstance(node, Bin):
            l, r = conv(node.left), conv(node.right)
            if node.op == "+":
                return l + r
            if node.op == "-":
                return l - r
            if node.op == "*":
                return l * r
            return l / r
        if isinstance(node, Pow):
            return conv(node.base) ** node.exponent
        if isinstance(node, Call):
            if node.func == "exp":
                return atom_exp(conv(node.arg))
            raise TranscendentalInSymbolicContext(
                f"{node.func} is not admitted in symbolic input"
            )
        raise TypeError(node)

    return conv(ast)


# --- numeric evaluation and differentiation ---------------------------------

_NUMERIC_FUNCS = {
    "exp": np.exp,
    "sin": np.sin,
    "cos": np.cos,
}


def eval_numeric(ast, env, profile=None):
    """Evaluate over numpy arrays/floats; g defers to the bound profile."""
    if isinstance(ast, Num):
        return float(ast.value)
    if isinstance(ast, Var):
        try:
            return env[ast.name]
        except KeyError:
            raise UnknownIdentifier(ast.name) from None
    if isinstance(ast, Bin):
        l = eval_numeric(ast.left, env, profile)
        r = eval_numeric(ast.right, env, profile)
        if ast.op == "+":
            return l + r
        if ast.op == "-":
            return l - r
        if ast.op == "*":
            return l * r
        return l / r
    if isinstance(ast, Pow):
        return eval_numeric(ast.base, env, profile) ** ast.exponent
    if isinstance(ast, Call):
        arg = eval_numeric(ast.arg, env, profile)
        if ast.func == "g":
            if profile is None:
                raise UnknownIdentifier("profile symbol g is unbound")
            return _NUMERIC_FUNCS[profile](arg) if isinstance(profile, str) \
                else profile(arg)
        return _NUMERIC_FUNCS[ast.func](arg)
    raise TypeError(ast)


_DERIVATIVES = {
    "sin": lambda arg: Call("cos", arg),
    "cos": lambda arg: Bin("-", Num(Q(0)), Call("sin", arg)),
    "exp": lambda arg: Call("exp", arg),
    "g": None,  # resolved through the profile before differentiation
}

PROFILE_SUBSTITUTION = {"sin", "cos", "exp"}


def bind_profile(ast, profile):
    """Replace g(...) by the named profile so derivatives stay analytic."""
    if isinstance(ast, Call):
        inner = bind_profile(ast.arg, profile)
        if ast.func == "g":
            if profile not in PROFILE_SUBSTITUTION:
                raise UnknownIdentifier(
                    f"profile {profile!r} has no analytic binding"
                )
            return Call(profile, inner)
        return Call(ast.func, inner)
    if isinstance(ast, Bin):
        return Bin(ast.op, bind_profile(ast.left, profile),
                   bind_profile(ast.right, profile))
    if isinstance(ast, Pow):
        return Pow(bind_profile(ast.base, profile), ast.exponent)
    return ast


def diff_ast(ast, name):
    """Analytic derivative of an AST with respect to one variable."""
    if isinstance(ast, Num):
        return Num(Q(0))
    if isinstance(ast, Var):
        return Num(Q(1)) if ast.name == name else Num(Q(0))
    if isinstance(ast, Bin):
        dl, dr = diff_ast(ast.left, name), diff_ast(ast.right, name)
        if ast.op in "+-":
            return Bin(ast.op, dl, dr)
        if ast.op == "*":
            return Bin("+", Bin("*", dl, ast.right), Bin("*", ast.left, dr))
        num = Bin("-", Bin("*", dl, ast.right), Bin("*", ast.left, dr))
        return Bin("/", num, Pow(ast.right, 2))
    if isinstance(ast, Pow):
        if ast.exponent == 0:
            return Num(Q(0))
        inner = diff_ast(ast.base, name)
        scaled = Bin("*", Num(Q(ast.exponent)), Pow(ast.base, ast.exponent - 1))
        return Bin("*", scaled, inner)
    if isinstance(ast, Call):
        rule = _DERIVATIVES.get(ast.func)
        if rule is None:
            raise UnknownIdentifier(
                f"cannot differentiate unbound profile {ast.func!r}"
            )
        return Bin("*", rule(ast.arg), diff_ast(ast.arg, name))
    raise TypeError(ast)


def simplify_pow0(ast):
    """Pow(x, 0) -> 1 so rendered derivatives stay readable."""
    if isinstance(ast, Pow):
        base = simplify_pow0(ast.base)
        if ast.exponent == 0:
            return Num(Q(1))
        return Pow(base, ast.exponent)
    if isinstance(ast, Bin):
        return Bin(ast.op, simplify_pow0(ast.left), simplify_pow0(ast.right))
    if isinstance(ast, Call):
        return Call(ast.func, simplify_pow0(ast.arg))
    return ast
