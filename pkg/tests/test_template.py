import json
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from leibniz_lab.algebra import bracket, change_of_basis, leibniz_check
from leibniz_lab.exact import Matrix, rref_rows
from leibniz_lab.minrep import GeneralFamilyParams, build_L, build_general_family, normalize_y1x1
from leibniz_lab.template import (
    M1_FREE,
    M1_UNKNOWNS,
    Affine,
    NonlinearTemplate,
    TemplateAlgebra,
    TemplateError,
    expand_constraints,
    general_template,
    hfl_degree_report,
    hfl_row_report,
    hfl_template,
    hfl_unknown_group,
    instantiate,
    m1_agreement_report,
    m1_reference_family,
    m1_template,
    solve_template,
    template_from_json,
    template_to_json,
)


def test_affine_arithmetic():
    a = Affine.sym("s") + 2
    b = Affine.sym("t", 3)
    assert (a - a) == Affine()
    assert (a * 2).evaluate({"s": 1}) == 6
    assert (a + b).substitute({"s": Affine.sym("t")}) == Affine(2, {"t": 4})
    with pytest.raises(NonlinearTemplate):
        a * b
    assert Affine.from_json(a.to_json()) == a


def test_template_rejects_unknowns_outside_the_ideal():
    with pytest.raises(NonlinearTemplate):
        TemplateAlgebra(["a", "e"], {("a", "a"): {"a": Affine.sym("s")}}, ["s"], ["e"])
    with pytest.raises(TemplateError):
        TemplateAlgebra(["a", "e"], {("e", "e"): {"e": 1}}, [], ["e"])
    with pytest.raises(TemplateError):
        TemplateAlgebra(["a", "e"], {("a", "a"): {"e": Affine.sym("s")}}, [], ["e"])


def test_template_json_round_trip():
    T = hfl_template(1, 2)
    doc = template_to_json(T)
    U = template_from_json(json.loads(json.dumps(doc)))
    assert template_to_json(U) == doc
    assert U.unknowns == T.unknowns


# -- the m = 1 template ---------------------------------------------------


@pytest.fixture(scope="module")
def m1_family():
    return solve_template(m1_template(), prefer_free=M1_FREE, samples=20, seed=7)


def test_m1_has_nine_free_parameters(m1_family):
    F = m1_family
    assert len(F.template.unknowns) == 24
    assert F.free == list(M1_FREE) and F.rank == 15


def test_m1_equation_counts(m1_family):
    # frozen from the expansion: nonzero residual coefficients, then deduplicated
    assert m1_family.stats.triples == 216
    assert (m1_family.stats.raw_equations, m1_family.stats.equations) == (42, 18)


def test_m1_solution_matches_printed_family(m1_family):
    ref = m1_reference_family()
    assert {u: m1_family.assignments[u] for u in M1_UNKNOWNS} == ref
    assert m1_family.assignments["tau2"] == Affine.sym("alpha3", -2)


def test_m1_agreement_report_flags_one_printed_row(m1_family):
    rep = m1_agreement_report(m1_family)
    assert rep["all_coefficients_agree"] and rep["printed_family_in_solution_set"]
    assert rep["rows_failing"] == ["1*alpha3 + -1*eta2 = 1*tau2"]
    assert sum(r["implied_by_triple"] for r in rep["rows"]) == len(rep["rows"]) - 1


@given(st.lists(st.fractions(-6, 6, max_denominator=5), min_size=9, max_size=9))
def test_m1_instances_are_exactly_the_nine_parameter_family(m1_family, vals):
    A = instantiate(m1_family, dict(zip(M1_FREE, vals)))
    assert leibniz_check(A).ok
    assert A == build_L(vals).relabel({}, name=A.name)


@given(st.integers(0, 23), st.fractions(-3, 3, max_denominator=3).filter(bool))
def test_m1_linear_system_and_identity_agree_off_the_family(m1_family, k, eps):
    """Moving one coefficient: the identity holds iff the expanded linear system does."""
    T = m1_family.template
    vals = dict(m1_family.values({f: Fraction(1, 2) for f in M1_FREE}))
    vals[M1_UNKNOWNS[k]] += eps
    system = expand_constraints(T)
    satisfied = all(r == 0 for r in system.residual(vals))
    assert leibniz_check(T.instantiate(vals)).ok == satisfied
    # only the free slots nobody depends on can move alone
    assert satisfied == (M1_UNKNOWNS[k] in {"alpha1", "alpha2", "beta1", "delta1"})


# -- the Heisenberg-Fock template -----------------------------------------


@pytest.mark.parametrize("k,d", [(1, 6), (2, 4)])
def test_hfl_template_forces_every_unknown_to_zero(k, d):
    T = hfl_template(k, d)
    F = solve_template(T, samples=1)
    assert F.free == [] and set(F.forced_zero()) == set(T.unknowns)


def test_hfl_every_printed_row_reproduced_by_its_own_triple():
    rows = hfl_row_report(2, 4)
    assert len(rows) == 20
    assert all(r["forced_zero"] for r in rows)
    groups = {hfl_unknown_group(u) for u in hfl_template(2, 4).unknowns}
    assert {r["group"] for r in rows} == groups


def test_hfl_degree_independence():
    rep = hfl_degree_report(1, 5, samples=1)
    assert rep["degree_independent"]
    assert rep["forced_zero"] == rep["unknowns"] and rep["forced_zero_next_degree"] == rep["unknowns_next_degree"]


# -- the m >= 2 template ----------------------------------------------------


def _vector(T, A):
    out = {}
    for u in T.unknowns:
        pair, s = u.rsplit("_", 1)
        a, b = pair[1:-1].split(",")
        out[u] = bracket(A, a, b).get(f"e{s}", Fraction(0))
    return out


def _inside(F, v):
    fv = {f: v[f] for f in F.free}
    return all(F.assignments[u].evaluate(fv) == v[u] for u in F.template.unknowns)


@pytest.fixture(scope="module")
def m2_family():
    return solve_template(general_template(2), samples=3)


def test_general_template_counts(m2_family):
    assert len(m2_family.template.unknowns) == 96
    assert (len(m2_family.free), m2_family.rank) == (31, 65)


def test_printed_family_plus_module_shifts_fill_the_solution_set(m2_family):
    F, T = m2_family, m2_family.template
    idx = {u: i for i, u in enumerate(T.unknowns)}
    rng = random.Random(11)
    fam, shifted = [], []
    for _ in range(50):
        A = build_general_family(GeneralFamilyParams.random(2, rng))
        v = _vector(T, A)
        assert _inside(F, v)
        fam.append({idx[u]: c for u, c in v.items() if c})
        # x_i, y_i -> x_i + (module vector), then restore [y1, x1] = z
        n = A.dim
        ent = {(i, i): 1 for i in range(n)}
        for g in ("x1", "x2", "y1", "y2"):
            for e in ("e1", "e2", "e3", "e4"):
                ent[(A.index[e], A.index[g])] = rng.randint(-3, 3)
        B = change_of_basis(A, Matrix(n, n, ent))
        C = change_of_basis(B, normalize_y1x1(B, 2))
        w = _vector(T, C)
        assert _inside(F, w)
        shifted.append({idx[u]: c for u, c in w.items() if c})
    assert len(rref_rows(fam)[1]) == 26
    assert len(rref_rows(fam + shifted)[1]) == len(F.free)


@settings(max_examples=10)
@given(st.integers(0, 10**6))
def test_printed_family_m3_lies_in_solution_set(seed):
    A = build_general_family(GeneralFamilyParams.random(3, random.Random(seed)))
    assert leibniz_check(A).ok


def test_expansion_restricted_to_triples():
    T = m1_template()
    sub = expand_constraints(T, triples=[("x", "x", "z")])
    # alpha3 = eta2 is all this triple says
    assert len(sub.rows) == 1
    (co, k), = sub.rows
    assert k == 0 and set(co) == {"alpha3", "eta2"} and co["alpha3"] == -co["eta2"]
