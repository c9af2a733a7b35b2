"""
Expression Service
Parses embedding formulas and evaluates them as truncated Taylor jets
"""

from dataclasses import dataclass
import math
import re
from typing import Dict, List, Optional, Sequence, Union

from services.jet_service import Jet, get_space
from utils.errors import DomainError, ExpressionSyntaxError, UnknownIdentifier

FUNCTIONS = ('sin', 'cos', 'tan', 'sinh', 'cosh', 'tanh', 'exp', 'log', 'sqrt')
CONSTANTS = {'pi': math.pi, 'e': math.e}
MAX_ORDER = 3


@dataclass(frozen=True)
class Constant:
    value: float


@dataclass(frozen=True)
class Variable:
    name: str
    index: int


@dataclass(frozen=True)
class Unary:
    op: str
    child: 'ExpressionAst'


@dataclass(frozen=True)
class Binary:
    op: str
    left: 'ExpressionAst'
    right: 'ExpressionAst'


ExpressionAst = Union[Constant, Variable, Unary, Binary]


@dataclass(frozen=True)
class Token:
    kind: str  # number | name | op | end
    text: str
    position: int


_TOKEN = re.compile(r'\s*(?:(\d+\.?\d*(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?)|([A-Za-z_][A-Za-z_0-9]*)|(\*\*|[-+*/^()]))')


def tokenize(text: str) -> List[Token]:
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == '':
            break
        match = _TOKEN.match(text, pos)
        if not match or match.end() == pos:
            start = pos + len(text[pos:]) - len(text[pos:].lstrip())
            raise ExpressionSyntaxError(start + 1, 'number, name or operator', text)
        number, name, op = match.groups()
        start = match.start(match.lastindex)
        if number is not None:
            tokens.append(Token('number', number, start + 1))
        elif name is not None:
            tokens.append(Token('name', name, start + 1))
        else:
            tokens.append(Token('op', '^' if op == '**' else op, start + 1))
        pos = match.end()
    tokens.append(Token('end', '', len(text) + 1))
    return tokens


# Binding powers: + - < * / < unary minus < ^
_BINARY_POWER = {'+': 10, '-': 10, '*': 20, '/': 20, '^': 30}
_UNARY_POWER = 25


class ExpressionParser:
    """Pratt parser over a fixed list of chart parameters"""

    def __init__(self, text: str, params: Sequence[str]):
        self.text = text
        self.params = {name: i for i, name in enumerate(params)}
        self.tokens = tokenize(text)
        self.pos = 0

    @property
    def token(self) -> Token:
        return self.tokens[self.pos]

    def advance(self) -> Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, text: str) -> Token:
        if self.token.text != text or self.token.kind == 'end':
            raise ExpressionSyntaxError(self.token.position, f"'{text}'", self.text)
        return self.advance()

    def parse(self) -> ExpressionAst:
        if self.token.kind == 'end':
            raise ExpressionSyntaxError(1, 'expression', self.text)
        node = self.expression(0)
        if self.token.kind != 'end':
            raise ExpressionSyntaxError(self.token.position, 'operator or end of input', self.text)
        return node

    def expression(self, rbp: int) -> ExpressionAst:
        left = self.nud(self.advance())
        while self.token.kind == 'op' and rbp < _BINARY_POWER.get(self.token.text, 0):
            left = self.led(self.advance(), left)
        return left

    def nud(self, tok: Token) -> ExpressionAst:
        if tok.kind == 'number':
            return Constant(float(tok.text))
        if tok.kind == 'name':
            return self._name(tok)
        if tok.text == '(':
            node = self.expression(0)
            self.expect(')')
            return node
        if tok.text == '-':
            return Unary('neg', self.expression(_UNARY_POWER))
        if tok.text == '+':
            return self.expression(_UNARY_POWER)
        raise ExpressionSyntaxError(tok.position, 'expression', self.text)

    def _name(self, tok: Token) -> ExpressionAst:
        name = tok.text
        if name in FUNCTIONS:
            self.expect('(')
            child = self.expression(0)
            self.expect(')')
            return Unary(name, child)
        if name in self.params:
            return Variable(name, self.params[name])
        if name in CONSTANTS:
            return Constant(CONSTANTS[name])
        raise UnknownIdentifier(name, tok.position)

    def led(self, tok: Token, left: ExpressionAst) -> ExpressionAst:
        start = self.token.position
        right = self.expression(_BINARY_POWER[tok.text])
        if tok.text == '^' and not is_constant(right):
            raise ExpressionSyntaxError(start, 'constant exponent', self.text)
        return Binary(tok.text, left, right)


def parse_expression(text: str, params: Sequence[str]) -> ExpressionAst:
    """
    Parse a formula in the chart parameters

    Args:
        text: formula such as "cos(u)*sin(v)"
        params: declared parameter names, in chart order

    Returns:
        Immutable expression tree
    """
    return ExpressionParser(text, params).parse()


def is_constant(node: ExpressionAst) -> bool:
    if isinstance(node, Constant):
        return True
    if isinstance(node, Variable):
        return False
    if isinstance(node, Unary):
        return is_constant(node.child)
    return is_constant(node.left) and is_constant(node.right)


def variables_of(node: ExpressionAst) -> set:
    if isinstance(node, Variable):
        return {node.name}
    if isinstance(node, Constant):
        return set()
    if isinstance(node, Unary):
        return variables_of(node.child)
    return variables_of(node.left) | variables_of(node.right)


def evaluate_jets(node: ExpressionAst, variables: Sequence[Jet]) -> Jet:
    """Evaluate with the chart variables already expressed as jets"""
    if isinstance(node, Constant):
        return Jet.constant(node.value)
    if isinstance(node, Variable):
        return variables[node.index]
    if isinstance(node, Unary):
        child = evaluate_jets(node.child, variables)
        if node.op == 'neg':
            return -child
        return child.apply(node.op)
    left = evaluate_jets(node.left, variables)
    if node.op == '^':
        return left ** evaluate_jets(node.right, variables).value
    right = evaluate_jets(node.right, variables)
    if node.op == '+':
        return left + right
    if node.op == '-':
        return left - right
    if node.op == '*':
        return left * right
    if node.op == '/':
        if right.value == 0.0:
            raise DomainError("division by zero value")
        return left / right
    raise ValueError(f"Unknown operator {node.op}")


def check_order(order: int) -> int:
    if order < 0 or order > MAX_ORDER:
        raise ValueError(f"Jet order must be 0..{MAX_ORDER}, got {order}")
    return order


def chart_variables(point: Sequence[float], order: int) -> List[Jet]:
    check_order(order)
    space = get_space(len(point), order)
    return [Jet.variable(space, i, float(x)) for i, x in enumerate(point)]


def eval_jet(node: ExpressionAst, point: Sequence[float], order: int) -> Jet:
    """Taylor jet of the expression at `point`, truncated at total degree `order`"""
    return evaluate_jets(node, chart_variables(point, order))


def evaluate(node: ExpressionAst, point: Sequence[float]) -> float:
    return eval_jet(node, point, 0).value


def constant_value(text: str) -> float:
    """Evaluate a parameter-free formula (interval bounds, scalars)"""
    return evaluate(parse_expression(text, []), [])
