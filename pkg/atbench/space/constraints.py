# Parsing and vectorised evaluation of search space constraints.
#
# Grammar (lowest to highest precedence):
#     expr   := and { ("||" | "or") and }
#     and    := cmp { ("&&" | "and") cmp }
#     cmp    := sum [ ("==" | "!=" | "<=" | "<" | ">=" | ">") sum ]
#     sum    := term { ("+" | "-") term }
#     term   := factor { ("*" | "/" | "%") factor }
#     factor := number | string | boolean | identifier | "(" expr ")" | ("!" | "not") factor | "-" factor
import operator
import re
from dataclasses import dataclass
from typing import Any, List, Sequence

import numpy as np
from pyparsing import Forward, Keyword, Literal, MatchFirst, Optional, ParseBaseException, QuotedString, Regex, \
    Suppress, Word, ZeroOrMore, alphanums, alphas, one_of

from atbench.exceptions import ConstraintSyntaxException, ConstraintTypeException, UnknownParameterException

NUMERIC_TYPES = {"int", "real"}
ARITHMETIC_OPERATORS = {"+", "-", "*", "/", "%"}
ORDERING_OPERATORS = {"<", "<=", ">", ">="}
EQUALITY_OPERATORS = {"==", "!="}
LOGICAL_OPERATORS = {"and", "or"}


class Node:
    type: str = None

    def evaluate(self, columns):
        raise NotImplementedError


class Constant(Node):
    def __init__(self, value, type_):
        self.value = value
        self.type = type_

    def evaluate(self, columns):
        if self.type in NUMERIC_TYPES:
            return float(self.value)
        return self.value

    def __repr__(self):
        return f"Constant({self.value!r})"


class Name(Node):
    def __init__(self, name):
        self.name = name
        self.index = None

    def evaluate(self, columns):
        return columns[self.index]

    def __repr__(self):
        return f"Name({self.name})"


class Unary(Node):
    def __init__(self, op, operand):
        self.op = op
        self.operand = operand

    def evaluate(self, columns):
        value = self.operand.evaluate(columns)
        if self.op == "!":
            return np.logical_not(truth(value))
        return np.negative(value)

    def __repr__(self):
        return f"Unary({self.op}, {self.operand!r})"


class Binary(Node):
    FUNCTIONS = {
        "+": np.add,
        "-": np.subtract,
        "*": np.multiply,
        "/": np.true_divide,
        "%": np.mod,
        "<": np.less,
        "<=": np.less_equal,
        ">": np.greater,
        ">=": np.greater_equal,
        "==": operator.eq,
        "!=": operator.ne,
    }

    def __init__(self, op, left, right):
        self.op = op
        self.left = left
        self.right = right
        # set when the operands of == or != can never be equal (string against number)
        self.disjoint = False

    def evaluate(self, columns):
        left = self.left.evaluate(columns)
        right = self.right.evaluate(columns)
        if self.op == "and":
            return np.logical_and(truth(left), truth(right))
        if self.op == "or":
            return np.logical_or(truth(left), truth(right))
        if self.disjoint:
            unequal = np.zeros(np.broadcast(np.asarray(left), np.asarray(right)).shape, dtype=bool)
            return unequal if self.op == "==" else ~unequal
        with np.errstate(divide="ignore", invalid="ignore"):
            result = self.FUNCTIONS[self.op](left, right)
        if self.op in ("/", "%"):
            # a zero divisor makes the value undefined
            return np.where(np.asarray(right) == 0, np.nan, result)
        if self.op in ORDERING_OPERATORS or self.op in EQUALITY_OPERATORS:
            # every comparison with an undefined operand fails, != included
            return np.logical_and(result, ~np.logical_or(undefined(left), undefined(right)))
        return result

    def __repr__(self):
        return f"Binary({self.op}, {self.left!r}, {self.right!r})"


def undefined(value):
    """Mask of NaN elements, all False for operands that are not floats"""
    value = np.asarray(value)
    if value.dtype.kind == "f":
        return np.isnan(value)
    return np.zeros(value.shape, dtype=bool)


def truth(value):
    """Truth value of an evaluated operand. Numbers are true when non-zero and not NaN."""
    value = np.asarray(value)
    if value.dtype == bool:
        return value
    if value.dtype.kind in "fc":
        return np.logical_and(value != 0, ~np.isnan(value))
    if value.dtype.kind in "iu":
        return value != 0
    return value.astype(bool)


def _number(tokens):
    text = tokens[0]
    if re.search(r"[.eE]", text):
        return Constant(float(text), "real")
    return Constant(int(text), "int")


def _fold_binary(tokens):
    tokens = list(tokens)
    node = tokens[0]
    for i in range(1, len(tokens), 2):
        op = {"&&": "and", "||": "or"}.get(tokens[i], tokens[i])
        node = Binary(op, node, tokens[i + 1])
    return node


def _unary(tokens):
    op = "!" if tokens[0] in ("!", "not") else "-"
    return Unary(op, tokens[1])


def _build_grammar():
    keywords = MatchFirst([Keyword(k) for k in ("and", "or", "not", "true", "false", "True", "False")])

    number = Regex(r"\d+\.\d*(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?|\d+[eE][+-]?\d+|\d+")
    number.set_parse_action(_number)
    string = QuotedString('"', esc_char="\\") | QuotedString("'", esc_char="\\")
    string.set_parse_action(lambda t: Constant(t[0], "str"))
    true = Keyword("true") | Keyword("True")
    true.set_parse_action(lambda t: Constant(True, "bool"))
    false = Keyword("false") | Keyword("False")
    false.set_parse_action(lambda t: Constant(False, "bool"))
    identifier = ~keywords + Word(alphas + "_", alphanums + "_")
    identifier.set_parse_action(lambda t: Name(t[0]))

    expr = Forward()
    factor = Forward()
    atom = number | string | true | false | identifier | (Suppress("(") + expr + Suppress(")"))
    negation = (Literal("!") | Keyword("not")) + factor
    negation.set_parse_action(_unary)
    minus = Literal("-") + factor
    minus.set_parse_action(_unary)
    factor <<= negation | minus | atom

    term = factor + ZeroOrMore(one_of("* / %") + factor)
    term.set_parse_action(_fold_binary)
    sum_ = term + ZeroOrMore(one_of("+ -") + term)
    sum_.set_parse_action(_fold_binary)
    comparison = sum_ + Optional(one_of("== != <= < >= >") + sum_)
    comparison.set_parse_action(_fold_binary)
    conjunction = comparison + ZeroOrMore((Literal("&&") | Keyword("and")) + comparison)
    conjunction.set_parse_action(_fold_binary)
    disjunction = conjunction + ZeroOrMore((Literal("||") | Keyword("or")) + conjunction)
    disjunction.set_parse_action(_fold_binary)
    expr <<= disjunction
    return expr


GRAMMAR = _build_grammar()


@dataclass(frozen=True)
class ConstraintExpr:
    source: str
    ast: Node

    def evaluate(self, columns: Sequence[Any]):
        """Evaluate against per-parameter values, either one scalar per parameter or one array per parameter
        (all of the same length). Returns a boolean or an array of booleans."""
        return truth(self.ast.evaluate(columns))

    def __str__(self):
        return self.source


def parse_constraint(source: str, domains) -> ConstraintExpr:
    """Parse a constraint expression over the parameters of a search space.

    Arguments:
        source: the expression text, e.g. ``"block_size_x * block_size_y <= 1024"``
        domains: the ordered list of :class:`atbench.space.ParamDomain` the expression may refer to
    Returns:
        A :class:`ConstraintExpr` that can be evaluated on configurations of the space.
    Raises:
        ConstraintSyntaxException: the text does not conform to the grammar
        UnknownParameterException: an identifier is not a declared parameter
        ConstraintTypeException: a string operand is used under arithmetic or an ordering operator
    """
    try:
        ast = GRAMMAR.parse_string(source, parse_all=True)[0]
    except ParseBaseException as e:
        raise ConstraintSyntaxException(source, str(e))
    positions = {d.name: (i, d.value_type) for i, d in enumerate(domains)}
    _check(ast, positions, source)
    return ConstraintExpr(source=source, ast=ast)


def _check(node: Node, positions, source) -> str:
    """Resolve names and compute the static type of a node"""
    if isinstance(node, Constant):
        return node.type
    if isinstance(node, Name):
        if node.name not in positions:
            raise UnknownParameterException(node.name, source)
        node.index, node.type = positions[node.name]
        return node.type
    if isinstance(node, Unary):
        operand = _check(node.operand, positions, source)
        if node.op == "!":
            if operand in ("str", "mixed"):
                raise ConstraintTypeException("!", operand, source)
            node.type = "bool"
        else:
            if operand not in NUMERIC_TYPES:
                raise ConstraintTypeException("-", operand, source)
            node.type = operand
        return node.type

    left = _check(node.left, positions, source)
    right = _check(node.right, positions, source)
    op = node.op
    if op in EQUALITY_OPERATORS:
        scalar_kinds = {left, right}
        node.disjoint = "str" in scalar_kinds and bool(scalar_kinds & (NUMERIC_TYPES | {"bool"}))
        node.type = "bool"
    elif op in LOGICAL_OPERATORS:
        for operand in (left, right):
            if operand in ("str", "mixed"):
                raise ConstraintTypeException(op, operand, source)
        node.type = "bool"
    elif op in ORDERING_OPERATORS:
        for operand in (left, right):
            if operand not in NUMERIC_TYPES:
                raise ConstraintTypeException(op, operand, source)
        node.type = "bool"
    elif op == "%":
        for operand in (left, right):
            if operand != "int":
                raise ConstraintTypeException(op, operand, source)
        node.type = "int"
    elif op in ARITHMETIC_OPERATORS:
        for operand in (left, right):
            if operand not in NUMERIC_TYPES:
                raise ConstraintTypeException(op, operand, source)
        node.type = "int" if left == right == "int" and op != "/" else "real"
    else:
        raise ConstraintSyntaxException(source, f"unknown operator {op}")
    return node.type


def evaluate_all(constraints: List[ConstraintExpr], columns):
    """Conjunction of all constraints, True for an empty list"""
    result = True
    for constraint in constraints:
        result = np.logical_and(result, constraint.evaluate(columns))
    return result
