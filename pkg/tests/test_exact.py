from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from leibniz_lab.exact import (
    Inconsistent,
    LinearSystem,
    Matrix,
    QuadraticSurd,
    SingularMatrix,
    as_scalar,
    format_scalar,
    parse_scalar,
    rational_sqrt,
    rref,
    solve_homogeneous,
)

sympy = pytest.importorskip("sympy")

fractions = st.fractions(min_value=-20, max_value=20, max_denominator=7)


def dense(rows, cols):
    return st.lists(st.lists(fractions, min_size=cols, max_size=cols), min_size=rows, max_size=rows)


def test_parse_and_format_round_trip():
    assert parse_scalar("6/4") == Fraction(3, 2)
    assert parse_scalar(" -7 ") == -7
    assert format_scalar(Fraction(-6, 4)) == "-3/2"
    assert format_scalar(5) == "5"
    assert parse_scalar(format_scalar(Fraction(22, 7))) == Fraction(22, 7)


@pytest.mark.parametrize("bad", [0.5, "0.5", "1e3", "", True])
def test_inexact_input_rejected(bad):
    with pytest.raises((TypeError, ValueError)):
        parse_scalar(bad)


def test_rational_sqrt():
    assert rational_sqrt(Fraction(9, 4)) == Fraction(3, 2)
    assert rational_sqrt(2) is None
    assert rational_sqrt(-4) is None


def test_surd_arithmetic_collapses_to_rational():
    r2 = QuadraticSurd.sqrt(2)
    assert isinstance(r2, QuadraticSurd)
    assert as_scalar(r2 * r2) == 2
    assert isinstance(as_scalar(r2 * r2), Fraction)
    x = 3 + r2
    assert as_scalar(x * (1 / x)) == 1
    assert (x - r2) == 3
    assert QuadraticSurd.sqrt(Fraction(4, 9)) == Fraction(2, 3)
    with pytest.raises(ValueError):
        r2 + QuadraticSurd.sqrt(3)


def test_matrix_inverse_with_surd_entries():
    r5 = QuadraticSurd.sqrt(5)
    M = Matrix.from_dense([[1, r5], [r5, 2]])
    assert M @ M.inverse() == Matrix.identity(2)


def test_singular_matrix():
    with pytest.raises(SingularMatrix):
        Matrix.from_dense([[1, 2], [2, 4]]).inverse()


@given(dense(4, 5))
def test_rref_idempotent_and_matches_sympy(data):
    M = Matrix.from_dense(data)
    R, piv = rref(M)
    R2, piv2 = rref(R)
    assert R2 == R and piv2 == piv
    S, spiv = sympy.Matrix(data).rref()
    assert list(spiv) == piv
    assert R.to_dense() == [[Fraction(int(v.p), int(v.q)) for v in S.row(i)] for i in range(S.rows)]


@given(dense(4, 4))
def test_rank_and_inverse_against_sympy(data):
    M = Matrix.from_dense(data)
    S = sympy.Matrix(data)
    assert M.rank() == S.rank()
    if M.rank() == 4:
        assert M @ M.inverse() == Matrix.identity(4)
        Si = S.inv()
        assert M.inverse().to_dense() == [[Fraction(int(v.p), int(v.q)) for v in Si.row(i)] for i in range(4)]


@given(dense(3, 6))
def test_solution_space_is_kernel(data):
    names = [f"v{i}" for i in range(6)]
    system = LinearSystem(names)
    for row in data:
        system.add_row(dict(zip(names, row)))
    sol = solve_homogeneous(system)
    assert sol.rank + len(sol.free) == 6
    for vec in sol.basis():
        assert all(r == 0 for r in system.residual(vec))
    assert len(sol.basis()) == 6 - sympy.Matrix(data).rank()


def test_inconsistent_system():
    system = LinearSystem(["a", "b"])
    system.add_row({"a": 1, "b": 1}, 1)
    system.add_row({"a": 2, "b": 2}, 3)
    with pytest.raises(Inconsistent):
        solve_homogeneous(system)


def test_last_declared_variables_are_free():
    system = LinearSystem(["a", "b", "c"])
    system.add_row({"a": 1, "b": 2, "c": 3})
    sol = solve_homogeneous(system)
    assert sol.free == ["b", "c"]
    assert sol.evaluate({"b": 1, "c": 1})["a"] == -5


def test_undeclared_variable():
    with pytest.raises(KeyError):
        LinearSystem(["a"]).add_row({"b": 1})
