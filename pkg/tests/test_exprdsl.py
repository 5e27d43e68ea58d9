import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from curvlab import exprdsl
from curvlab.errors import InputError, ParseError, SingularEvaluationError
from curvlab.exprdsl import BinOp, Call, EvalEnv, Neg, Num, Sym, eval_float, eval_jet, parse, to_text


class TestParse:
    def test_precedence(self):
        assert parse("1-2*M/r") == BinOp("-", Num(1.0), BinOp("/", BinOp("*", Num(2.0), Sym("M")), Sym("r")))

    def test_power_right_associative(self):
        assert parse("x^2^3") == BinOp("^", Sym("x"), BinOp("^", Num(2.0), Num(3.0)))

    def test_unary_minus(self):
        inner = BinOp("-", Num(1.0), BinOp("/", BinOp("*", Num(2.0), Sym("M")), Sym("r")))
        assert parse("-(1-2*M/r)") == Neg(inner)

    def test_power_binds_tighter_than_negation(self):
        assert parse("-x^2") == Neg(BinOp("^", Sym("x"), Num(2.0)))
        assert parse("2^-3") == BinOp("^", Num(2.0), Neg(Num(3.0)))

    def test_calls_and_literals(self):
        assert parse(" sin( th ) * 1.5e-3 ") == BinOp("*", Call("sin", Sym("th")), Num(1.5e-3))
        assert parse(".5") == Num(0.5)
        assert parse("x_1 + _y2") == BinOp("+", Sym("x_1"), Sym("_y2"))

    @pytest.mark.parametrize(
        "text, offset",
        [
            ("(1+x", 4),     # unbalanced
            ("x)", 1),
            ("1+", 2),       # trailing operator
            ("x*", 2),
            ("sin()", 4),    # empty call
            ("2x", 1),       # no implicit multiplication
            ("x**2", 2),
        ],
    )
    def test_syntax_errors_carry_offset(self, text, offset):
        with pytest.raises(ParseError) as info:
            parse(text)
        assert info.value.offset == offset
        assert info.value.expected

    def test_unknown_function(self):
        with pytest.raises(ParseError, match="unknown function 'erf'"):
            parse("1 + erf(x)")

    def test_offset_counts_bytes(self):
        with pytest.raises(ParseError) as info:
            parse("θ+")
        assert info.value.offset == 0  # the non-ASCII name itself is rejected at byte 0
        with pytest.raises(ParseError) as info:
            parse("x + θ")
        assert info.value.offset == 4

    @pytest.mark.parametrize("text", ["", "   "])
    def test_empty(self, text):
        with pytest.raises(InputError):
            parse(text)

    def test_symbols(self):
        assert exprdsl.symbols(parse("r^2*sin(th)^2 + M")) == {"r", "th", "M"}


class TestEval:
    def test_square(self):
        j = eval_jet(parse("r^2"), EvalEnv.at_point(("r",), [3.0], 3))
        assert [j.partial((k,)) for k in range(4)] == [9.0, 6.0, 2.0, 0.0]

    def test_schwarzschild_factor(self):
        j = eval_jet(parse("1-2*M/r"), EvalEnv.at_point(("r",), [4.0], 1, {"M": 1.0}))
        assert j.value == pytest.approx(0.5)
        assert j.partial((1,)) == pytest.approx(0.125)

    def test_sin_squared(self):
        j = eval_jet(parse("sin(th)*sin(th)"), EvalEnv.at_point(("th",), [math.pi / 2], 2))
        np.testing.assert_allclose([j.partial((k,)) for k in range(3)], [1.0, 0.0, -2.0], atol=1e-15)

    def test_integer_power_of_negative_base(self):
        j = eval_jet(parse("x^3"), EvalEnv.at_point(("x",), [-2.0], 2))
        assert [j.partial((k,)) for k in range(3)] == [-8.0, 12.0, -12.0]

    def test_variable_exponent(self):
        # x^y = exp(y log x); d/dy at (2, 3) = 8 log 2
        j = eval_jet(parse("x^y"), EvalEnv.at_point(("x", "y"), [2.0, 3.0], 1))
        assert j.value == pytest.approx(8.0)
        assert j.partial((0, 1)) == pytest.approx(8 * math.log(2))
        assert j.partial((1, 0)) == pytest.approx(12.0)

    def test_unbound_symbol(self):
        with pytest.raises(InputError, match="unbound symbol 'q'"):
            eval_jet(parse("x + q"), EvalEnv.at_point(("x",), [1.0], 1))

    def test_domain_error_names_expression(self):
        with pytest.raises(SingularEvaluationError, match="log"):
            eval_jet(parse("log(x - 1)"), EvalEnv.at_point(("x",), [1.0], 1))
        with pytest.raises(SingularEvaluationError):
            eval_jet(parse("x^y"), EvalEnv.at_point(("x", "y"), [-1.0, 0.5], 1))

    def test_name_clash(self):
        with pytest.raises(InputError):
            EvalEnv.at_point(("x",), [1.0], 1, {"x": 2.0})

    def test_eval_float_vectorised(self):
        x = np.linspace(1, 2, 5)
        np.testing.assert_allclose(eval_float(parse("1-2*M/x"), {"x": x}, {"M": 1.0}), 1 - 2 / x)


# -- random ASTs -------------------------------------------------------------

names = st.sampled_from(["x", "y", "z"])
literals = st.floats(0.1, 3.0, allow_nan=False).map(Num)
leaves = st.one_of(names.map(Sym), literals)


def _extend(children):
    return st.one_of(
        st.builds(Neg, children),
        st.builds(Call, st.sampled_from(["sin", "cos", "tanh"]), children),
        st.builds(BinOp, st.sampled_from(["+", "-", "*"]), children, children),
        st.builds(lambda a, b: BinOp("/", a, BinOp("+", Num(2.0), Call("sin", b))), children, children),
        st.builds(lambda a, k: BinOp("^", a, Num(float(k))), children, st.integers(0, 3)),
    )


asts = st.recursive(leaves, _extend, max_leaves=12)
points = st.lists(st.floats(-1.0, 1.0, allow_nan=False), min_size=3, max_size=3)


class TestRoundTrip:
    @given(asts)
    def test_print_parse_identity(self, ast):
        assert parse(to_text(ast)) == ast

    @given(asts, points)
    def test_round_trip_evaluates_bit_for_bit(self, ast, point):
        env = EvalEnv.at_point(("x", "y", "z"), point, 2)
        again = parse(to_text(ast))
        assert np.array_equal(eval_jet(ast, env).coeffs, eval_jet(again, env).coeffs)

    def test_negative_literal_round_trip(self):
        ast = BinOp("^", Num(-2.0), Num(2.0))
        env = EvalEnv.at_point(("x",), [0.0], 1)
        assert eval_jet(parse(to_text(ast)), env).value == eval_jet(ast, env).value == 4.0


def test_jet_value_equals_float_evaluation():
    rng = np.random.default_rng(7)
    strategy_examples = []

    @settings(max_examples=1000, database=None, derandomize=True)
    @given(asts)
    def collect(ast):
        strategy_examples.append(ast)

    collect()
    assert len(strategy_examples) >= 500
    for ast in strategy_examples:
        point = rng.uniform(-1, 1, 3)
        jet = eval_jet(ast, EvalEnv.at_point(("x", "y", "z"), point, 1))
        ref = eval_float(ast, dict(zip(("x", "y", "z"), point)))
        assert jet.value == pytest.approx(float(ref), rel=1e-13, abs=1e-13)
