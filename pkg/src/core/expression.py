"""Small closed expression grammar shared by operator coefficients and function parameters.

    expr    :: term [ ('+' | '-') term ]*
    term    :: unary [ ('*' | '/') unary ]*
    unary   :: ('+' | '-') unary | power
    power   :: atom [ '^' exponent ]
    atom    :: fn '(' expr ')' | imag | number | name | '(' expr ')'

Exponents are signed numeric literals; a grammar may restrict them to integers.
"""

from __future__ import annotations

import functools
import math
from collections.abc import Callable, Mapping
from dataclasses import dataclass

import numpy as np
import pyparsing as pp

from src.core.exceptions import SpecSyntaxError


@dataclass(frozen=True)
class Num:
    value: float | complex


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Neg:
    operand: Node


@dataclass(frozen=True)
class BinOp:
    op: str
    left: Node
    right: Node


@dataclass(frozen=True)
class Call:
    name: str
    arg: Node


Node = Num | Var | Neg | BinOp | Call

_NUMBER = r"(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?"

_PRECEDENCE = {"+": 1, "-": 1, "*": 2, "/": 2, "^": 4}


class ExpressionGrammar:
    def __init__(
        self,
        variables: set[str],
        constants: Mapping[str, float | complex],
        functions: Mapping[str, Callable],
        integer_powers: bool,
    ):
        self.variables = frozenset(variables)
        self.constants = dict(constants)
        self.functions = dict(functions)
        self.integer_powers = integer_powers
        self._parser = self._build()

    def _build(self) -> pp.ParserElement:
        expr = pp.Forward()
        lpar, rpar = pp.Suppress("("), pp.Suppress(")")
        identifier = pp.Word(pp.alphas, pp.alphanums + "_")

        imag = pp.Regex(_NUMBER + r"i(?![A-Za-z0-9_])").set_parse_action(
            lambda toks: Num(complex(0.0, float(toks[0][:-1])))
        )
        number = pp.Regex(_NUMBER).set_parse_action(lambda toks: Num(float(toks[0])))
        call = (identifier.copy() + lpar + expr + rpar).set_parse_action(self._make_call)
        name = identifier.copy().set_parse_action(self._make_name)
        atom = call | imag | number | name | (lpar + expr + rpar)

        signed = pp.Regex(r"[+-]?" + _NUMBER)
        exponent = signed | (lpar + signed + rpar)
        power = (atom + pp.Optional(pp.Suppress("^") + exponent)).set_parse_action(
            self._make_power
        )

        unary = pp.Forward()
        unary <<= (pp.one_of("+ -") + unary).set_parse_action(_make_unary) | power
        term = (unary + pp.ZeroOrMore(pp.one_of("* /") + unary)).set_parse_action(_fold)
        expr <<= (term + pp.ZeroOrMore(pp.one_of("+ -") + term)).set_parse_action(_fold)
        return expr

    def _make_call(self, s: str, loc: int, toks: pp.ParseResults) -> Call:
        if toks[0] not in self.functions:
            raise pp.ParseFatalException(s, loc, f"unknown function {toks[0]!r}")
        return Call(toks[0], toks[1])

    def _make_name(self, s: str, loc: int, toks: pp.ParseResults) -> Var:
        if toks[0] not in self.variables and toks[0] not in self.constants:
            raise pp.ParseFatalException(s, loc, f"unknown name {toks[0]!r}")
        return Var(toks[0])

    def _make_power(self, s: str, loc: int, toks: pp.ParseResults) -> Node:
        if len(toks) == 1:
            return toks[0]
        exponent = float(toks[1])
        if self.integer_powers and not exponent.is_integer():
            raise pp.ParseFatalException(s, loc, f"integer power required, got {toks[1]}")
        return BinOp("^", toks[0], Num(exponent))

    def parse(self, text: str) -> Node:
        try:
            return self._parser.parse_string(text, parse_all=True)[0]
        except pp.ParseBaseException as exc:
            raise SpecSyntaxError(
                f"invalid expression {text!r}: {exc.msg}", line=exc.lineno, column=exc.col
            ) from exc

    def evaluate(self, node: Node, env: Mapping[str, object]):
        scope = {**self.constants, **{k: np.asarray(v, dtype=float) for k, v in env.items()}}
        with np.errstate(all="ignore"):
            return _evaluate(node, scope, self.functions)


def _make_unary(toks: pp.ParseResults) -> Node:
    return Neg(toks[1]) if toks[0] == "-" else toks[1]


def _fold(toks: pp.ParseResults) -> Node:
    node = toks[0]
    for i in range(1, len(toks), 2):
        node = BinOp(toks[i], node, toks[i + 1])
    return node


def _evaluate(node: Node, scope: Mapping[str, object], functions: Mapping[str, Callable]):
    match node:
        case Num(value):
            return value
        case Var(name):
            return scope[name]
        case Neg(operand):
            return -_evaluate(operand, scope, functions)
        case Call(name, arg):
            return functions[name](_evaluate(arg, scope, functions))
        case BinOp("^", base, Num(exponent)):
            power = int(exponent) if float(exponent).is_integer() else exponent
            return np.power(_evaluate(base, scope, functions), power)
        case BinOp(op, left, right):
            lhs = _evaluate(left, scope, functions)
            rhs = _evaluate(right, scope, functions)
            match op:
                case "+":
                    return np.add(lhs, rhs)
                case "-":
                    return np.subtract(lhs, rhs)
                case "*":
                    return np.multiply(lhs, rhs)
                case "/":
                    return np.true_divide(lhs, rhs)
    raise TypeError(f"unsupported node {node!r}")


def to_text(node: Node, parent: int = 0) -> str:
    """Canonical text form; parsing it gives back an equal tree."""
    match node:
        case Num(value) if isinstance(value, complex):
            return f"{value.imag!r}i"
        case Num(value):
            text = repr(float(value))
            return f"({text})" if value < 0 else text
        case Var(name):
            return name
        case Call(name, arg):
            return f"{name}({to_text(arg)})"
        case Neg(operand):
            text = "-" + to_text(operand, 3)
            return f"({text})" if parent > 3 else text
        case BinOp("^", base, Num(exponent)):
            exp_text = repr(float(exponent))
            if exponent < 0:
                exp_text = f"({exp_text})"
            return f"{to_text(base, 5)}^{exp_text}"
        case BinOp(op, left, right):
            prec = _PRECEDENCE[op]
            text = f"{to_text(left, prec)} {op} {to_text(right, prec + 1)}"
            return f"({text})" if prec < parent else text
    raise TypeError(f"unsupported node {node!r}")


@functools.lru_cache
def coefficient_grammar(n: int) -> ExpressionGrammar:
    """Grammar for operator coefficients a(x, t): complex literals, x1..xn, t."""
    return ExpressionGrammar(
        variables={f"x{i}" for i in range(1, n + 1)} | {"t"},
        constants={"i": 1j, "pi": math.pi},
        functions={"sin": np.sin, "cos": np.cos, "exp": np.exp},
        integer_powers=True,
    )


phi_grammar = ExpressionGrammar(
    variables={"r"},
    constants={"e": math.e, "pi": math.pi},
    functions={"ln": np.log, "log": np.log},
    integer_powers=False,
)
