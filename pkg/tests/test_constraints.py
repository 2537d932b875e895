import numpy as np
import pytest

from atbench.exceptions import ConstraintSyntaxException, ConstraintTypeException, UnknownParameterException
from atbench.space import ParamDomain, enumerate_valid, parse_constraint
from atbench.space.constraints import Binary
from tests import AtbenchTestCase

XY = [ParamDomain("x", [1, 2, 4]), ParamDomain("y", [1, 2, 4])]
MIXED = [ParamDomain("block", [32, 64, 128]), ParamDomain("mode", ["fast", "safe"]),
         ParamDomain("unroll", [True, False]), ParamDomain("ratio", [0.5, 1.5])]


class TestParseConstraint(AtbenchTestCase):

    def test_comparison(self):
        expr = parse_constraint("x*y <= 4", XY)
        assert isinstance(expr.ast, Binary)
        assert expr.ast.op == "<="
        assert expr.source == "x*y <= 4"

    def test_evaluate_scalars(self):
        expr = parse_constraint("x*y <= 4", XY)
        assert expr.evaluate([4.0, 1.0])
        assert not expr.evaluate([4.0, 2.0])

    def test_evaluate_columns(self):
        expr = parse_constraint("x*y <= 4", XY)
        result = expr.evaluate([np.array([1.0, 2.0, 4.0]), np.array([4.0, 4.0, 1.0])])
        np.testing.assert_array_equal(result, [True, False, True])

    def test_syntax_error(self):
        with pytest.raises(ConstraintSyntaxException):
            parse_constraint("x <", XY)
        with pytest.raises(ConstraintSyntaxException):
            parse_constraint("(x + y", XY)
        with pytest.raises(ConstraintSyntaxException):
            parse_constraint("", XY)

    def test_unknown_parameter(self):
        with pytest.raises(UnknownParameterException) as e:
            parse_constraint("z == 1", XY)
        assert "z" in str(e.value)

    def test_string_under_arithmetic(self):
        with pytest.raises(ConstraintTypeException):
            parse_constraint("mode + 1 == 2", MIXED)
        with pytest.raises(ConstraintTypeException):
            parse_constraint("mode < 'safe'", MIXED)

    def test_modulo_needs_integers(self):
        parse_constraint("block % 32 == 0", MIXED)
        with pytest.raises(ConstraintTypeException):
            parse_constraint("ratio % 2 == 0", MIXED)
        with pytest.raises(ConstraintTypeException):
            parse_constraint("block % 2.0 == 0", MIXED)


class TestEvaluateConstraint(AtbenchTestCase):

    def evaluate(self, source, values):
        columns = [float(v) if isinstance(v, int) and not isinstance(v, bool) else v for v in values]
        return bool(parse_constraint(source, MIXED).evaluate(columns))

    def test_precedence(self):
        # * binds tighter than +, comparisons tighter than and, and tighter than or
        assert self.evaluate("block + 2 * 16 == 96", [64, "fast", True, 0.5])
        assert self.evaluate("block == 32 or block == 64 and mode == 'safe'", [32, "fast", True, 0.5])
        assert not self.evaluate("(block == 32 or block == 64) and mode == 'safe'", [32, "fast", True, 0.5])

    def test_alternative_operators(self):
        assert self.evaluate("block == 64 && mode == \"fast\"", [64, "fast", True, 0.5])
        assert self.evaluate("block == 32 || unroll", [64, "fast", True, 0.5])
        assert self.evaluate("!unroll || block > 100", [128, "fast", True, 0.5])
        assert self.evaluate("not unroll", [128, "fast", False, 0.5])

    def test_booleans(self):
        assert self.evaluate("unroll == true", [32, "safe", True, 1.5])
        assert self.evaluate("unroll == False", [32, "safe", False, 1.5])

    def test_string_equality(self):
        assert self.evaluate("mode != 'fast'", [32, "safe", True, 1.5])
        # a string is never equal to a number
        assert not self.evaluate("mode == 1", [32, "safe", True, 1.5])
        assert self.evaluate("mode != 1", [32, "safe", True, 1.5])

    def test_real_arithmetic(self):
        assert self.evaluate("block * ratio == 96", [64, "fast", True, 1.5])
        assert self.evaluate("block / 64 == 0.5", [32, "fast", True, 1.5])
        assert self.evaluate("-block < -100", [128, "fast", True, 1.5])

    def test_division_by_zero_is_invalid(self):
        domains = [ParamDomain("a", [0, 1, 2]), ParamDomain("b", [0, 2])]
        modulo = parse_constraint("a % b == 0", domains)
        assert not modulo.evaluate([1.0, 0.0])
        assert modulo.evaluate([2.0, 2.0])
        division = parse_constraint("a / b < 10", domains)
        assert not division.evaluate([1.0, 0.0])
        assert division.evaluate([1.0, 2.0])
        for source in ("a / b > 0", "a / b >= 1", "a / b != 3", "a % b != 3", "a % b >= 0", "-(a / b) < 0"):
            expr = parse_constraint(source, domains)
            assert not expr.evaluate([1.0, 0.0]), source
            assert expr.evaluate([2.0, 2.0]), source
        columns = [np.array([1.0, 2.0, 2.0]), np.array([0.0, 0.0, 2.0])]
        result = parse_constraint("a / b != 3", domains).evaluate(columns)
        np.testing.assert_array_equal(result, [False, False, True])

    def test_zero_divisor_excluded_from_space(self):
        space = enumerate_valid({"a": [1, 2], "b": [0, 1]}, ["a / b > 10 or b == 1"])
        assert [space.values_of(c) for c in space.valid_set] == [(1, 1), (2, 1)]
        space = enumerate_valid({"a": [1, 2], "b": [0, 1]}, ["a % b != 3"])
        assert [space.values_of(c) for c in space.valid_set] == [(1, 1), (2, 1)]
