import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_invertible
from leibniz_lab.algebra import (
    Algebra,
    NotAnIdeal,
    OutOfWindow,
    Subspace,
    UnknownLabel,
    algebra_from_json,
    bracket,
    change_of_basis,
    dumps_algebra,
    fingerprint,
    ideal_generated,
    is_ideal,
    leibniz_check,
    loads_algebra,
    lower_central_series,
    quotient,
    squares_ideal,
    squares_span,
)
from leibniz_lab.exact import Matrix
from leibniz_lab.fock import build_hfl, materialize
from leibniz_lab.heisenberg import make_heisenberg
from leibniz_lab.minrep import ParamFamilyM1, build_L


def dense_residuals(A):
    """Independent oracle: dense structure-constant tensor, residual per triple."""
    n = A.dim
    c = [[[Fraction(0)] * n for _ in range(n)] for _ in range(n)]
    for (a, b), vec in A.products.items():
        for k, v in vec.items():
            c[A.index[a]][A.index[b]][A.index[k]] = v
    bad = []
    for a in range(n):
        for b in range(n):
            for d in range(n):
                res = []
                for t in range(n):
                    s = Fraction(0)
                    for k in range(n):
                        s += c[a][b][k] * c[k][d][t] - c[a][d][k] * c[k][b][t] - c[b][d][k] * c[a][k][t]
                    res.append(s)
                if any(res):
                    bad.append((A.basis[a], A.basis[b], A.basis[d]))
    return bad


@st.composite
def small_tables(draw, dim=4):
    basis = [f"b{i}" for i in range(dim)]
    prods = {}
    for a in basis:
        for b in basis:
            if draw(st.booleans()):
                k = draw(st.sampled_from(basis))
                prods[(a, b)] = {k: draw(st.fractions(-3, 3, max_denominator=3))}
    return Algebra(basis, prods, name="random")


def test_heisenberg_three_passes():
    rep = leibniz_check(make_heisenberg(3))
    assert rep.ok and rep.checked == 27 and rep.summary() == "pass, 27 triples"
    assert rep.policy == "full"


def test_non_leibniz_table_reports_failing_triple():
    # [a, a] = b, [b, a] = a: the triple (a, b, a) leaves -b
    A = Algebra(["a", "b"], {("a", "a"): {"b": 1}, ("b", "a"): {"a": 1}})
    rep = leibniz_check(A)
    assert not rep.ok
    assert [f[:3] for f in rep.failures] == dense_residuals(A)


@given(small_tables())
def test_check_agrees_with_dense_oracle(A):
    rep = leibniz_check(A)
    assert [f[:3] for f in rep.failures] == dense_residuals(A)


def test_parallel_matches_serial():
    A = materialize(build_hfl(5), 5)
    assert leibniz_check(A, workers=2) == leibniz_check(A, workers=1)
    bad = Algebra(["a", "b"] + [f"c{i}" for i in range(30)], {("a", "a"): {"b": 1}, ("b", "a"): {"a": 1}})
    s, p = leibniz_check(bad, workers=1), leibniz_check(bad, workers=3)
    assert s.failures == p.failures and s.checked == p.checked


def test_out_of_window_products_raise_and_are_skipped():
    A = materialize(build_hfl(3), 2)
    with pytest.raises(OutOfWindow):
        A.product("x1^2", "X1")
    rep = leibniz_check(A)
    assert rep.ok and rep.skipped > 0 and rep.policy == "in-window"
    assert rep.checked + rep.skipped == A.dim**3


def test_unknown_label():
    with pytest.raises(UnknownLabel):
        Algebra(["a"], {("a", "b"): {"a": 1}})
    with pytest.raises(UnknownLabel):
        bracket(make_heisenberg(3), "X9", "one")


def test_bracket_is_bilinear():
    H = make_heisenberg(3)
    assert bracket(H, {"X1": 2, "D1": 1}, {"D1": 3, "X1": 5}) == {"one": Fraction(1)}


def test_squares_and_quotient_of_fock_algebra():
    A = materialize(build_hfl(3), 4)
    J = squares_ideal(A)
    # [p, one] = p for every monomial, so the squares generate all of F[x] in the window
    assert J.dim == 5
    assert set(J.pivots) == {"1", "x1", "x1^2", "x1^3", "x1^4"}
    Q = quotient(A, J, name="Q")
    assert Q.basis == ("one", "X1", "D1") and Q.products == make_heisenberg(3).products


def test_quotient_requires_ideal():
    H = make_heisenberg(3)
    with pytest.raises(NotAnIdeal):
        quotient(H, Subspace(H.basis, [{"X1": 1}]))
    assert is_ideal(H, Subspace(H.basis, [{"one": 1}]))
    assert ideal_generated(H, [{"X1": 1}]).dim == 2


def test_squares_span_uses_polarization():
    # squares of basis vectors vanish but [a,b] + [b,a] does not
    A = Algebra(["a", "b", "c"], {("a", "b"): {"c": 1}})
    assert squares_span(A).dim == 1


def test_lower_central_series():
    assert [s.dim for s in lower_central_series(make_heisenberg(5))] == [5, 1, 0]


def _random_change(n, seed):
    return random_invertible(n, random.Random(seed))


@settings(max_examples=15)
@given(st.integers(0, 10**6))
def test_fingerprint_invariant_under_change_of_basis(seed):
    A = build_L(ParamFamilyM1.of(1, 2, 0, 3, 0, 1, 0, 2, 1))
    g = _random_change(6, seed)
    B = change_of_basis(A, g)
    assert fingerprint(B) == fingerprint(A)
    assert leibniz_check(B).ok


@given(st.integers(0, 10**6))
def test_change_of_basis_composes(seed):
    rng = random.Random(seed)
    A = make_heisenberg(5)
    g1, g2 = random_invertible(5, rng), random_invertible(5, rng)
    assert change_of_basis(change_of_basis(A, g1), g2) == change_of_basis(A, g1 @ g2)
    assert change_of_basis(change_of_basis(A, g1), g1.inverse()) == A


def test_change_of_basis_columns_are_new_vectors():
    H = make_heisenberg(3)
    # one' = 2 one, X1' = X1, D1' = 2 D1  gives [X1', D1'] = 2 one = one'
    g = Matrix.from_dense([[2, 0, 0], [0, 1, 0], [0, 0, 2]])
    assert change_of_basis(H, g) == H


@given(small_tables())
def test_json_round_trip_is_byte_stable(A):
    text = dumps_algebra(A)
    B = loads_algebra(text)
    assert B == A and dumps_algebra(B) == text


def test_json_keeps_window_flags_and_order():
    A = materialize(build_hfl(3), 3)
    doc = __import__("json").loads(dumps_algebra(A))
    assert doc["basis"] == list(A.basis)
    assert algebra_from_json(doc).out_of_window == A.out_of_window
    keys = [(A.index[p["left"]], A.index[p["right"]]) for p in doc["products"]]
    assert keys == sorted(keys)


def test_fingerprint_separates_symmetric_part():
    # same squares span, different symmetric radical
    a = fingerprint(build_L(ParamFamilyM1.of(0, 1, 0, 0, 0, 0, 0, 0, 0)))
    b = fingerprint(build_L(ParamFamilyM1.of(0, 0, 0, 0, 0, 0, 0, 0, 0)))
    assert a.squares_span == b.squares_span == 2
    assert (a.symmetric_radical, b.symmetric_radical) == (3, 4)
