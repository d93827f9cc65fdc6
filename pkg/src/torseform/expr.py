"""Arithmetic expression language used by scene files.

Grammar, loosest to tightest binding::

    expr   := term (("+" | "-") term)*
    term   := unary (("*" | "/") unary)*
    unary  := "-" unary | power
    power  := atom ("^" unary)?        right-associative, binds above unary minus
    atom   := NUMBER | IDENT | IDENT "(" expr ("," expr)* ")" | "(" expr ")"

so "-x1^2" parses as -(x1^2) and "2^3^2" as 2^(3^2).  Whitespace is
insignificant.  When a variable set is supplied, identifiers outside it are
rejected at parse time with their position.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, Union

from .errors import DomainEvalError, JetDomainError, ParseError

#: supported call names -> arity
FUNCTIONS = {
    "sin": 1, "cos": 1, "tan": 1,
    "sinh": 1, "cosh": 1, "tanh": 1,
    "asinh": 1, "atanh": 1, "atan": 1,
    "sqrt": 1, "exp": 1, "log": 1, "abs": 1,
    "pow": 2,
}


# ---------------------------------------------------------------------------
# AST
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Neg:
    arg: "Expr"


@dataclass(frozen=True)
class BinOp:
    op: str  # one of + - * / ^
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Call:
    func: str
    args: tuple


Expr = Union[Num, Var, Neg, BinOp, Call]


def free_variables(expr: Expr) -> frozenset:
    """Names of all variables occurring in the expression."""
    if isinstance(expr, Num):
        return frozenset()
    if isinstance(expr, Var):
        return frozenset((expr.name,))
    if isinstance(expr, Neg):
        return free_variables(expr.arg)
    if isinstance(expr, BinOp):
        return free_variables(expr.left) | free_variables(expr.right)
    return frozenset().union(*(free_variables(a) for a in expr.args)) if expr.args else frozenset()


# ---------------------------------------------------------------------------
# Tokenizer
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Token:
    kind: str  # "num" | "ident" | "op" | "eof"
    text: str
    line: int
    col: int


_TOKEN_RE = re.compile(
    r"""(?P<num>\d+\.\d*(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?|\d+(?:[eE][+-]?\d+)?)
      | (?P<ident>[A-Za-z_][A-Za-z_0-9]*)
      | (?P<op>[-+*/^(),])
      | (?P<ws>[ \t\r\n]+)
      | (?P<bad>.)""",
    re.VERBOSE,
)


def tokenize(text: str) -> list:
    tokens = []
    line, col = 1, 1
    for m in _TOKEN_RE.finditer(text):
        kind = m.lastgroup
        chunk = m.group()
        if kind == "ws":
            nl = chunk.count("\n")
            if nl:
                line += nl
                col = len(chunk) - chunk.rfind("\n")
            else:
                col += len(chunk)
            continue
        if kind == "bad":
            raise ParseError(f"unexpected character {chunk!r}", line, col)
        tokens.append(Token(kind, chunk, line, col))
        col += len(chunk)
    tokens.append(Token("eof", "<end>", line, col))
    return tokens


# ---------------------------------------------------------------------------
# Parser (recursive descent)
# ---------------------------------------------------------------------------

class _Parser:
    def __init__(self, tokens, variables):
        self.tokens = tokens
        self.pos = 0
        self.variables = None if variables is None else frozenset(variables)

    def peek(self) -> Token:
        return self.tokens[self.pos]

    def advance(self) -> Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def error(self, expected: str):
        tok = self.peek()
        raise ParseError(f"expected {expected}, found {tok.text!r}", tok.line, tok.col)

    def expect_op(self, text: str):
        tok = self.peek()
        if tok.kind == "op" and tok.text == text:
            return self.advance()
        self.error(f"'{text}'")

    def at_op(self, *texts) -> bool:
        tok = self.peek()
        return tok.kind == "op" and tok.text in texts

    def expression(self) -> Expr:
        node = self.term()
        while self.at_op("+", "-"):
            op = self.advance().text
            node = BinOp(op, node, self.term())
        return node

    def term(self) -> Expr:
        node = self.unary()
        while self.at_op("*", "/"):
            op = self.advance().text
            node = BinOp(op, node, self.unary())
        return node

    def unary(self) -> Expr:
        if self.at_op("-"):
            self.advance()
            return Neg(self.unary())
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        if self.at_op("^"):
            self.advance()
            return BinOp("^", base, self.unary())
        return base

    def atom(self) -> Expr:
        tok = self.peek()
        if tok.kind == "num":
            self.advance()
            return Num(float(tok.text))
        if tok.kind == "ident":
            self.advance()
            if self.at_op("("):
                if tok.text not in FUNCTIONS:
                    raise ParseError(f"unknown function '{tok.text}'", tok.line, tok.col)
                self.advance()
                args = [self.expression()]
                while self.at_op(","):
                    self.advance()
                    args.append(self.expression())
                self.expect_op(")")
                arity = FUNCTIONS[tok.text]
                if len(args) != arity:
                    raise ParseError(
                        f"'{tok.text}' takes {arity} argument(s), got {len(args)}",
                        tok.line, tok.col)
                return Call(tok.text, tuple(args))
            if tok.text in FUNCTIONS:
                raise ParseError(f"function '{tok.text}' used without arguments",
                                 tok.line, tok.col)
            if self.variables is not None and tok.text not in self.variables:
                raise ParseError(f"unknown identifier '{tok.text}'", tok.line, tok.col)
            return Var(tok.text)
        if self.at_op("("):
            self.advance()
            node = self.expression()
            self.expect_op(")")
            return node
        self.error("a number, identifier or '('")


def parse(text: str, variables: Iterable[str] | None = None) -> Expr:
    """Parse an expression; when `variables` is given, any identifier outside
    that set is a ParseError at its position."""
    parser = _Parser(tokenize(text), variables)
    node = parser.expression()
    tok = parser.peek()
    if tok.kind != "eof":
        raise ParseError(f"unexpected trailing input {tok.text!r}", tok.line, tok.col)
    return node


# ---------------------------------------------------------------------------
# Printer (minimal parentheses; print -> parse is the identity on parsed ASTs)
# ---------------------------------------------------------------------------

_PREC_ADD, _PREC_MUL, _PREC_UNARY, _PREC_POW, _PREC_ATOM = 1, 2, 3, 4, 5


def _prec(e: Expr) -> int:
    if isinstance(e, (Var, Call)):
        return _PREC_ATOM
    if isinstance(e, Num):
        return _PREC_ATOM if e.value >= 0 else _PREC_UNARY
    if isinstance(e, Neg):
        return _PREC_UNARY
    return {"+": _PREC_ADD, "-": _PREC_ADD,
            "*": _PREC_MUL, "/": _PREC_MUL,
            "^": _PREC_POW}[e.op]


def _num_text(value: float) -> str:
    if value == int(value) and abs(value) < 1e16:
        return str(int(value))
    return repr(value)


def to_source(e: Expr) -> str:
    """Render the AST back to expression syntax."""
    def render(node: Expr, slot: int) -> str:
        text = _render(node)
        return f"({text})" if _prec(node) < slot else text

    def _render(node: Expr) -> str:
        if isinstance(node, Num):
            if node.value < 0:
                return "-" + _num_text(-node.value)
            return _num_text(node.value)
        if isinstance(node, Var):
            return node.name
        if isinstance(node, Neg):
            return "-" + render(node.arg, _PREC_UNARY)
        if isinstance(node, Call):
            return node.func + "(" + ", ".join(render(a, _PREC_ADD) for a in node.args) + ")"
        if node.op in "+-":
            return render(node.left, _PREC_ADD) + node.op + render(node.right, _PREC_MUL)
        if node.op in "*/":
            return render(node.left, _PREC_MUL) + node.op + render(node.right, _PREC_UNARY)
        # '^': base must be an atom, exponent may be a unary chain
        return render(node.left, _PREC_ATOM) + "^" + render(node.right, _PREC_UNARY)

    return _render(e)


# ---------------------------------------------------------------------------
# Evaluation (generic walker; the jet module supplies its own call table)
# ---------------------------------------------------------------------------

def evaluate(expr: Expr, env: Mapping, *, calls: Mapping[str, Callable],
             pow_fn: Callable, lift: Callable):
    """Evaluate `expr` with variable bindings from `env`.

    `lift` converts literal constants into the value domain, `calls` maps
    function names to implementations and `pow_fn` implements '^'/'pow'.
    Domain failures are reported with the offending subexpression.
    """
    def ev(node):
        if isinstance(node, Num):
            return lift(node.value)
        if isinstance(node, Var):
            try:
                return env[node.name]
            except KeyError:
                raise DomainEvalError(f"unbound variable '{node.name}'", node.name) from None
        if isinstance(node, Neg):
            return -ev(node.arg)
        if isinstance(node, BinOp):
            left = ev(node.left)
            right = ev(node.right)
            try:
                if node.op == "+":
                    return left + right
                if node.op == "-":
                    return left - right
                if node.op == "*":
                    return left * right
                if node.op == "/":
                    return left / right
                return pow_fn(left, right)
            except (JetDomainError, ZeroDivisionError, ValueError, OverflowError) as exc:
                raise DomainEvalError(str(exc) or type(exc).__name__, to_source(node)) from exc
        # Call
        args = [ev(a) for a in node.args]
        try:
            if node.func == "pow":
                return pow_fn(args[0], args[1])
            return calls[node.func](args[0])
        except (JetDomainError, ZeroDivisionError, ValueError, OverflowError) as exc:
            raise DomainEvalError(str(exc) or type(exc).__name__, to_source(node)) from exc

    return ev(expr)


def _float_pow(base: float, exponent: float) -> float:
    return math.pow(base, exponent)


_MATH_CALLS = {
    "sin": math.sin, "cos": math.cos, "tan": math.tan,
    "sinh": math.sinh, "cosh": math.cosh, "tanh": math.tanh,
    "asinh": math.asinh, "atanh": math.atanh, "atan": math.atan,
    "sqrt": math.sqrt, "exp": math.exp, "log": math.log, "abs": abs,
}


def eval_float(expr: Expr, env: Mapping[str, float]) -> float:
    """Plain floating-point evaluation."""
    return evaluate(expr, env, calls=_MATH_CALLS, pow_fn=_float_pow, lift=float)


def ensure_expr(e, variables=None) -> Expr:
    """Accept an AST, a source string, or a bare number."""
    if isinstance(e, (Num, Var, Neg, BinOp, Call)):
        return e
    if isinstance(e, str):
        return parse(e, variables)
    return Num(float(e))
