import numpy as np
import pytest

import spherewalk as sw
from spherewalk.expr import (
    Abs,
    Bin,
    Coord,
    ExprError,
    MinMax,
    Neg,
    Norm1,
    Norm2Sq,
    Num,
    Pow,
    evaluate,
    expr_field,
    max_coord,
    parse_expr,
    to_string,
)


def ev(src, point):
    return float(evaluate(parse_expr(src), np.asarray(point, float)[None, :])[0])


def test_arithmetic_examples():
    assert ev("x1^2 - x2^2", [0.5, 0.2]) == pytest.approx(0.21)
    # exact quadratic for d = 4: x1^2+x2^2-x3^2-x4^2-x1^2 at (1,1,0,0) -> 1
    assert ev("x1^2+x2^2-x3^2-x4^2-x1^2", [1.0, 1.0, 0.0, 0.0]) == pytest.approx(1.0)
    assert ev("2*3+4", [0.0]) == 10.0
    assert ev("2+3*4", [0.0]) == 14.0
    assert ev("2^3^2", [0.0]) == 64.0  # left-assoc: (2^3)^2
    assert ev("-2^2", [0.0]) == -4.0  # ^ binds tighter than unary minus
    assert ev("8/4/2", [0.0]) == 1.0
    assert ev("abs(-3.5)", [0.0]) == 3.5
    assert ev("min(1, 2, -1)", [0.0]) == -1.0
    assert ev("max(x1, x2)", [0.3, 0.7]) == 0.7
    assert ev("norm1", [-1.0, 2.0]) == 3.0
    assert ev("norm2sq", [3.0, 4.0]) == 25.0


def test_matches_hypercube_distance():
    dom = sw.Domain.hypercube(1.0, 2)
    fld = expr_field("min(1-abs(x1), 1-abs(x2))", 2)
    X = np.random.default_rng(0).uniform(-1, 1, (200, 2))
    assert np.allclose(fld(X), dom.distance_many(X))


def test_error_offsets():
    with pytest.raises(ExprError) as e:
        parse_expr("x1 + $")
    assert e.value.offset == 5
    with pytest.raises(ExprError) as e:
        parse_expr("x1 + foo")
    assert e.value.offset == 5
    with pytest.raises(ExprError):
        parse_expr("x1 ^ x2")  # exponent must be an integer literal
    with pytest.raises(ExprError):
        parse_expr("x1 ^ 2.5")
    with pytest.raises(ExprError):
        parse_expr("min(x1)")  # arity
    with pytest.raises(ExprError):
        parse_expr("abs(x1, x2)")
    with pytest.raises(ExprError):
        parse_expr("x1 +")
    with pytest.raises(ExprError):
        parse_expr("(x1")
    with pytest.raises(ExprError):
        parse_expr("x0")


def test_dimension_validation():
    with pytest.raises(ExprError):
        expr_field("x5", 3)
    fld = expr_field("x3", 3)
    assert fld.at(np.array([0.0, 0.0, 2.0])) == 2.0
    assert max_coord(parse_expr("min(x2, x7+1)")) == 7


def random_ast(rng, depth=0):
    # number literals are nonnegative in the grammar (negation is a node)
    roll = rng.integers(0, 10 if depth < 4 else 4)
    if roll < 2:
        return Num(round(float(rng.uniform(0, 5)), 3))
    if roll < 3:
        return Coord(int(rng.integers(0, 4)))
    if roll == 3:
        return rng.choice([Norm1(), Norm2Sq()])
    if roll == 4:
        return Neg(random_ast(rng, depth + 1))
    if roll == 5:
        return Abs(random_ast(rng, depth + 1))
    if roll == 6:
        return Pow(random_ast(rng, depth + 1), int(rng.integers(0, 4)))
    if roll == 7:
        k = int(rng.integers(2, 4))
        return MinMax(
            "min" if rng.random() < 0.5 else "max",
            tuple(random_ast(rng, depth + 1) for _ in range(k)),
        )
    op = "+-*/"[int(rng.integers(0, 4))]
    return Bin(op, random_ast(rng, depth + 1), random_ast(rng, depth + 1))


def test_round_trip_random_asts():
    rng = np.random.default_rng(1)
    for _ in range(1000):
        ast = random_ast(rng)
        assert parse_expr(to_string(ast)) == ast
