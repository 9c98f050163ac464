"""Leibniz algebras over the minimal faithful module of H_{2m+1}.

Basis of H_{2m+1}: x_i, y_i, z with [y_i, x_i] = z = -[x_i, y_i].  The module
I = span(e_1 .. e_{m+2}) carries the right action

    e_{i+1} . x_i = e_1,   e_{m+2} . y_i = e_{i+1},   e_{m+2} . z = e_1,

realized by the matrices x_i -> E_{1,i+1}, y_i -> E_{i+1,m+2}, z -> E_{1,m+2}
acting on column vectors, so that phi([u,v]) = phi(v) phi(u) - phi(u) phi(v).

For m = 1 the Leibniz algebras form the nine-parameter family
``L(a1, a2, a3, b1, b2, d1, d2, h1, t1)`` on the basis x, y, z, e1, e2, e3;
this module transports parameters along the admissible changes of basis
and reduces any member to a normal form.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from itertools import product as iproduct
from typing import Dict, List, NamedTuple, Optional, Sequence, Tuple

from .algebra import Algebra, bracket, change_of_basis, matrix_from_vectors
from .exact import (
    Fraction,
    Inconsistent,
    LinearSystem,
    Matrix,
    QuadraticSurd,
    as_scalar,
    format_scalar,
    parse_scalar,
    solve_homogeneous,
)
from .heisenberg import BadDimension

__all__ = [
    "AdmissibleChange",
    "GeneralFamilyParams",
    "InadmissibleChange",
    "MinFaithfulModule",
    "NormalForm",
    "NotInFamily",
    "NullityPattern",
    "ParamFamilyM1",
    "SymmetryViolation",
    "UnlistedCase",
    "build_L",
    "build_general_family",
    "build_min_rep",
    "case2_prenormalize",
    "classify_list",
    "lambda_rigidity",
    "normalize_m1",
    "normalize_y1x1",
    "nullity_pattern",
    "read_params",
    "transform_params_case1",
    "transform_params_case2",
]


class SymmetryViolation(ValueError):
    pass


class InadmissibleChange(ValueError):
    pass


class NotInFamily(ValueError):
    pass


class UnlistedCase(ValueError):
    """The parameters cannot be brought to any entry of the classification list."""


# ---------------------------------------------------------------------------
# the module and its matrices
# ---------------------------------------------------------------------------


def _labels(m: int):
    xs = [f"x{i}" for i in range(1, m + 1)]
    ys = [f"y{i}" for i in range(1, m + 1)]
    es = [f"e{i}" for i in range(1, m + 3)]
    return xs, ys, "z", es


def _elementary(n: int, i: int, j: int) -> Matrix:
    """E_{i,j}, 1-based."""
    return Matrix(n, n, {(i - 1, j - 1): 1})


@dataclass
class MinFaithfulModule:
    m: int
    generators: List[str]
    module_basis: List[str]
    action: Dict[Tuple[str, str], str]
    matrices: Dict[str, Matrix]

    def h_bracket(self, u: str, v: str) -> Dict[str, Fraction]:
        """[u, v] in H_{2m+1} on generator labels."""
        if u[0] == "y" and v[0] == "x" and u[1:] == v[1:]:
            return {"z": Fraction(1)}
        if u[0] == "x" and v[0] == "y" and u[1:] == v[1:]:
            return {"z": Fraction(-1)}
        return {}

    def phi(self, vec: Dict[str, Fraction]) -> Matrix:
        n = self.m + 2
        out = Matrix(n, n)
        for g, c in vec.items():
            out = out + self.matrices[g].scale(c)
        return out

    def matrix_law_failures(self) -> List[Tuple[str, str]]:
        """Pairs (u, v) with phi([u,v]) != phi(v) phi(u) - phi(u) phi(v)."""
        bad = []
        for u in self.generators:
            for v in self.generators:
                pu, pv = self.matrices[u], self.matrices[v]
                if self.phi(self.h_bracket(u, v)) != pv @ pu - pu @ pv:
                    bad.append((u, v))
        return bad

    def action_matches_matrices(self) -> bool:
        n = self.m + 2
        for g in self.generators:
            for j, e in enumerate(self.module_basis):
                col = self.matrices[g].column(j)
                want = self.action.get((e, g))
                got = {self.module_basis[i]: c for i, c in col.items()}
                if got != ({want: 1} if want else {}):
                    return False
        return True

    def algebra(self) -> Algebra:
        """H_{2m+1} + I with the module action and nothing else."""
        prods: Dict[Tuple[str, str], Dict[str, Fraction]] = {}
        for (e, g), out in self.action.items():
            prods[(e, g)] = {out: Fraction(1)}
        for u in self.generators:
            for v in self.generators:
                hb = self.h_bracket(u, v)
                if hb:
                    prods[(u, v)] = hb
        name = "L(0,0,0,0,0,0,0,0,0)" if self.m == 1 else f"minrep{2 * self.m + 1}"
        basis = self.generators + self.module_basis
        if self.m == 1:
            ren = {"x1": "x", "y1": "y"}
            basis = [ren.get(b, b) for b in basis]
            prods = {(ren.get(a, a), ren.get(b, b)): v for (a, b), v in prods.items()}
        return Algebra(basis, prods, name=name)


def build_min_rep(m: int) -> MinFaithfulModule:
    if m < 1:
        raise BadDimension(f"need m >= 1, got {m}")
    xs, ys, z, es = _labels(m)
    n = m + 2
    action = {}
    mats = {}
    for i in range(1, m + 1):
        action[(es[i], xs[i - 1])] = es[0]
        action[(es[m + 1], ys[i - 1])] = es[i]
        mats[xs[i - 1]] = _elementary(n, 1, i + 1)
        mats[ys[i - 1]] = _elementary(n, i + 1, n)
    action[(es[m + 1], z)] = es[0]
    mats[z] = _elementary(n, 1, n)
    return MinFaithfulModule(m, xs + ys + [z], es, action, mats)


# ---------------------------------------------------------------------------
# general family, m >= 2
# ---------------------------------------------------------------------------


@dataclass
class GeneralFamilyParams:
    """Coefficients of the m >= 2 family; absent keys are zero.

    alpha[(i, j, s)]  coefficient of e_s in [x_i, x_j], s <= m+1
    gamma[(i, j)]     [x_i, y_j] = gamma e_1 (i != j)
    delta[i]          e_1 part of [x_i, y_i]
    tau               [z, x_1] = tau e_1
    nu[(i, j, s)]     coefficient of e_s in [y_i, x_j] (i != j), s <= m+1
    beta[(i, j)]      [y_i, y_j] = beta e_1
    eps[i]            e_{i+1} part of [y_i, x_i] (i >= 2)
    """

    m: int
    alpha: Dict[Tuple[int, int, int], Fraction] = field(default_factory=dict)
    gamma: Dict[Tuple[int, int], Fraction] = field(default_factory=dict)
    delta: Dict[int, Fraction] = field(default_factory=dict)
    tau: Fraction = Fraction(0)
    nu: Dict[Tuple[int, int, int], Fraction] = field(default_factory=dict)
    beta: Dict[Tuple[int, int], Fraction] = field(default_factory=dict)
    eps: Dict[int, Fraction] = field(default_factory=dict)

    def a(self, i, j, s):
        return as_scalar(self.alpha.get((i, j, s), 0))

    def n(self, i, j, s):
        return as_scalar(self.nu.get((i, j, s), 0))

    def check_symmetry(self) -> None:
        m = self.m
        for i, j, k in iproduct(range(1, m + 1), repeat=3):
            if self.a(i, j, k + 1) != self.a(i, k, j + 1):
                raise SymmetryViolation(f"alpha^{k + 1}_{i},{j} != alpha^{j + 1}_{i},{k}")
            if j != i and k != i and self.n(i, j, k + 1) != self.n(i, k, j + 1):
                raise SymmetryViolation(f"nu^{k + 1}_{i},{j} != nu^{j + 1}_{i},{k}")

    @classmethod
    def random(cls, m: int, rng: random.Random, lo: int = -5, hi: int = 5) -> "GeneralFamilyParams":
        def r():
            return Fraction(rng.randint(lo * 3, hi * 3), rng.randint(1, 3))

        p = cls(m)
        rng_ij = range(1, m + 1)
        # symmetric index pairs share one value
        for i in rng_ij:
            for j in rng_ij:
                p.alpha[(i, j, 1)] = r()
                for k in rng_ij:
                    key = (i, min(j, k), max(j, k) + 1)
                    mirror = (i, max(j, k), min(j, k) + 1)
                    if key not in p.alpha:
                        p.alpha[key] = r()
                    p.alpha[mirror] = p.alpha[key]
        for i in rng_ij:
            for j in rng_ij:
                if i == j:
                    continue
                p.gamma[(i, j)] = r()
                p.nu[(i, j, 1)] = r()
                for k in rng_ij:
                    if k == i:
                        p.nu[(i, j, k + 1)] = r()
                        continue
                    key = (i, min(j, k), max(j, k) + 1)
                    mirror = (i, max(j, k), min(j, k) + 1)
                    if key not in p.nu:
                        p.nu[key] = r()
                    p.nu[mirror] = p.nu[key]
        for i in rng_ij:
            p.delta[i] = r()
            for j in rng_ij:
                p.beta[(i, j)] = r()
            if i >= 2:
                p.eps[i] = r()
        p.tau = r()
        p.check_symmetry()
        return p


def build_general_family(p: GeneralFamilyParams) -> Algebra:
    m = p.m
    if m == 1:
        raise BadDimension("m = 1 is the nine-parameter family; use build_L")
    if m < 1:
        raise BadDimension(f"need m >= 2, got {m}")
    p.check_symmetry()
    xs, ys, z, es = _labels(m)

    def e(s):
        return es[s - 1]

    prods: Dict[Tuple[str, str], Dict[str, Fraction]] = {}

    def put(a, b, vec):
        vec = {k: as_scalar(v) for k, v in vec.items()}
        vec = {k: v for k, v in vec.items() if v}
        if vec:
            prods[(a, b)] = vec

    def add(vec, k, v):
        vec[k] = vec.get(k, 0) + v

    for i in range(1, m + 1):
        put(e(i + 1), xs[i - 1], {e(1): 1})
        put(e(m + 2), ys[i - 1], {e(i + 1): 1})
    put(e(m + 2), z, {e(1): 1})
    for i in range(1, m + 1):
        for j in range(1, m + 1):
            put(xs[i - 1], xs[j - 1], {e(s): p.a(i, j, s) for s in range(1, m + 2)})
            put(ys[i - 1], ys[j - 1], {e(1): p.beta.get((i, j), 0)})
            if i != j:
                put(xs[i - 1], ys[j - 1], {e(1): p.gamma.get((i, j), 0)})
                put(ys[i - 1], xs[j - 1], {e(s): p.n(i, j, s) for s in range(1, m + 2)})
    for i in range(1, m + 1):
        v = {z: -1, e(1): p.delta.get(i, 0), e(2): p.tau}
        for s in range(2, m + 1):
            add(v, e(s + 1), p.n(1, s, 2))
        put(xs[i - 1], ys[i - 1], v)
    put(ys[0], xs[0], {z: 1})
    for i in range(2, m + 1):
        v = {z: 1, e(2): p.n(i, 1, i + 1) - p.tau}
        add(v, e(i + 1), p.eps.get(i, 0))
        for s in range(2, m + 1):
            if s != i:
                add(v, e(s + 1), p.n(i, s, i + 1) - p.n(1, s, 2))
        put(ys[i - 1], xs[i - 1], v)
    put(z, xs[0], {e(1): p.tau})
    for i in range(2, m + 1):
        put(z, xs[i - 1], {e(1): p.n(1, i, 2)})
    return Algebra(xs + ys + [z] + es, prods, name=f"general-family[m={m}]")


def normalize_y1x1(A: Algebra, m: int) -> Matrix:
    """Change of basis z' = [y1, x1], everything else fixed.

    If [y1, x1] = z + (module part), the new table has [y1, x1] = z exactly.
    """
    xs, ys, z, es = _labels(m)
    w = bracket(A, ys[0], xs[0])
    if w.get(z) != 1 or any(k not in es and k != z for k in w):
        raise NotInFamily(f"[y1, x1] = {w} is not z plus a module vector")
    cols = [{b: Fraction(1)} if b != z else w for b in A.basis]
    return matrix_from_vectors(A, cols)


# ---------------------------------------------------------------------------
# m = 1: the nine-parameter family
# ---------------------------------------------------------------------------

M1_BASIS = ("x", "y", "z", "e1", "e2", "e3")
PARAM_NAMES = ("alpha1", "alpha2", "alpha3", "beta1", "beta2", "delta1", "delta2", "eta1", "theta1")


class ParamFamilyM1(NamedTuple):
    alpha1: Fraction
    alpha2: Fraction
    alpha3: Fraction
    beta1: Fraction
    beta2: Fraction
    delta1: Fraction
    delta2: Fraction
    eta1: Fraction
    theta1: Fraction

    @classmethod
    def of(cls, *vals) -> "ParamFamilyM1":
        if len(vals) == 1 and not isinstance(vals[0], (int, Fraction, str, QuadraticSurd)):
            vals = tuple(vals[0])
        if len(vals) != 9:
            raise ValueError(f"need 9 parameters, got {len(vals)}")
        return cls(*(as_scalar(v) for v in vals))

    @classmethod
    def parse(cls, csv: str) -> "ParamFamilyM1":
        parts = [s.strip() for s in csv.split(",")]
        return cls.of(*(parse_scalar(s) for s in parts))

    @classmethod
    def random(cls, rng: random.Random, lo: int = -5, hi: int = 5) -> "ParamFamilyM1":
        return cls.of(*(Fraction(rng.randint(lo * 3, hi * 3), rng.randint(1, 3)) for _ in range(9)))

    def name(self) -> str:
        return "L(" + ",".join(format_scalar(v) for v in self) + ")"


def build_L(p: ParamFamilyM1) -> Algebra:
    a1, a2, a3, b1, b2, d1, d2, h1, t1 = ParamFamilyM1.of(p)
    prods = {
        ("e2", "x"): {"e1": 1},
        ("e3", "y"): {"e2": 1},
        ("e3", "z"): {"e1": 1},
        ("x", "x"): {"e1": a1, "e2": a2, "e3": a3},
        ("x", "y"): {"z": -1, "e1": d1, "e2": d2},
        ("x", "z"): {"e1": h1, "e2": a3},
        ("y", "y"): {"e1": b1, "e2": b2},
        ("y", "x"): {"z": 1},
        ("y", "z"): {"e1": t1},
        ("z", "x"): {"e1": d2 - h1, "e2": -2 * a3},
        ("z", "y"): {"e1": b2 - t1},
    }
    return Algebra(M1_BASIS, prods, name=ParamFamilyM1.of(p).name())


def read_params(A: Algebra) -> ParamFamilyM1:
    """Recover the nine parameters; raises NotInFamily if A is not exactly build_L(p)."""
    if tuple(A.basis) != M1_BASIS:
        raise NotInFamily(f"basis {A.basis} is not {M1_BASIS}")
    xx = bracket(A, "x", "x")
    xy = bracket(A, "x", "y")
    yy = bracket(A, "y", "y")
    p = ParamFamilyM1.of(
        xx.get("e1", 0),
        xx.get("e2", 0),
        xx.get("e3", 0),
        yy.get("e1", 0),
        yy.get("e2", 0),
        xy.get("e1", 0),
        xy.get("e2", 0),
        bracket(A, "x", "z").get("e1", 0),
        bracket(A, "y", "z").get("e1", 0),
    )
    if build_L(p) != A:
        raise NotInFamily("table does not have the shape of the nine-parameter family")
    return p


@dataclass
class AdmissibleChange:
    """Change of basis of the nine-parameter family.

    x' = A1 x + A2 y + A3 z + sum P_i e_i,  y' = B1 x + B2 y + B3 z + sum Q_i e_i,
    z' = [y', x'],  e2' = [e3', y'],  e1' = [e2', x'].

    In case 1, e3' = C1 x + C2 y + C3 z + sum R_i e_i; in case 2, e3' = [x', x'].
    Admissibility: A2 = B1 = C_i = 0, A1 B2 != 0, and in case 1 R3 != 0 and
    R2 = -A3 R3 / A1 (R2 is derived when not given).
    """

    case: int
    A1: object = 1
    A3: object = 0
    B2: object = 1
    B3: object = 0
    P: Tuple = (0, 0, 0)
    Q: Tuple = (0, 0, 0)
    R: Tuple = (0, None, 1)
    A2: object = 0
    B1: object = 0
    C: Tuple = (0, 0, 0)

    def __post_init__(self):
        if self.case not in (1, 2):
            raise InadmissibleChange(f"case must be 1 or 2, got {self.case}")
        for k in ("A1", "A3", "B2", "B3", "A2", "B1"):
            setattr(self, k, as_scalar(getattr(self, k)))
        self.P = tuple(as_scalar(v) for v in self.P)
        self.Q = tuple(as_scalar(v) for v in self.Q)
        self.C = tuple(as_scalar(v) for v in self.C)
        if self.A2 or self.B1 or any(self.C):
            raise InadmissibleChange("need A2 = B1 = C1 = C2 = C3 = 0")
        if not self.A1 or not self.B2:
            raise InadmissibleChange("need A1 * B2 != 0")
        if self.case == 1:
            r1, r2, r3 = self.R
            r3 = as_scalar(r3)
            if not r3:
                raise InadmissibleChange("need R3 != 0")
            want = -self.A3 * r3 / self.A1
            if r2 is None:
                r2 = want
            elif as_scalar(r2) != want:
                raise InadmissibleChange("need R2 = -A3 R3 / A1")
            self.R = (as_scalar(r1), as_scalar(r2), r3)

    @property
    def R1(self):
        return self.R[0]

    @property
    def R2(self):
        return self.R[1]

    @property
    def R3(self):
        return self.R[2]

    def vectors(self, p: ParamFamilyM1):
        A = build_L(p)
        x = {"x": self.A1, "z": self.A3, "e1": self.P[0], "e2": self.P[1], "e3": self.P[2]}
        y = {"y": self.B2, "z": self.B3, "e1": self.Q[0], "e2": self.Q[1], "e3": self.Q[2]}
        z = bracket(A, y, x)
        if self.case == 1:
            e3 = {"e1": self.R[0], "e2": self.R[1], "e3": self.R[2]}
        else:
            e3 = bracket(A, x, x)
        e2 = bracket(A, e3, y)
        e1 = bracket(A, e2, x)
        return [x, y, z, e1, e2, e3]

    def matrix(self, p: ParamFamilyM1) -> Matrix:
        """6x6 matrix whose columns are x', y', z', e1', e2', e3' in the old basis."""
        return matrix_from_vectors(build_L(p), self.vectors(p))

    @classmethod
    def random(cls, case: int, rng: random.Random, lo: int = -5, hi: int = 5) -> "AdmissibleChange":
        def r():
            return Fraction(rng.randint(lo, hi))

        def nz():
            v = 0
            while not v:
                v = r()
            return v

        kw = dict(A1=nz(), A3=r(), B2=nz(), B3=r(), P=(r(), r(), r()), Q=(r(), r(), r()))
        if case == 1:
            kw["R"] = (r(), None, nz())
        return cls(case, **kw)


def transform_params_case1(p: ParamFamilyM1, g: AdmissibleChange) -> ParamFamilyM1:
    a1, a2, a3, b1, b2, d1, d2, h1, t1 = ParamFamilyM1.of(p)
    if a3:
        raise InadmissibleChange("case 1 needs alpha3 = 0")
    if g.case != 1:
        raise InadmissibleChange("not a case 1 change")
    A1, A3, B2, B3, R3 = g.A1, g.A3, g.B2, g.B3, g.R3
    _, P2, P3 = g.P
    _, Q2, Q3 = g.Q
    return ParamFamilyM1.of(
        (a1 * A1 * A1 * B2 - a2 * A1 * A1 * B3 + d2 * A1 * A3 * B2 + A1 * B2 * P2 + A3 * B2 * P3)
        / (A1 * B2 * B2 * R3),
        a2 * A1 * A1 / (B2 * R3),
        0,
        b1 * B2 / (A1 * R3),
        (b2 * B2 + Q3) / R3,
        (b2 * A3 * B2 + d1 * A1 * B2 + A1 * Q2 + A3 * Q3) / (A1 * B2 * R3),
        (d2 * A1 + P3) / R3,
        (h1 * A1 + P3) / R3,
        (t1 * B2 + Q3) / R3,
    )


def transform_params_case2(p: ParamFamilyM1, g: AdmissibleChange) -> ParamFamilyM1:
    a1, a2, a3, b1, b2, d1, d2, h1, t1 = ParamFamilyM1.of(p)
    if (a1, a2, a3) != (0, 0, 1):
        raise InadmissibleChange("case 2 formulas need (alpha1, alpha2, alpha3) = (0, 0, 1)")
    if g.case != 2:
        raise InadmissibleChange("not a case 2 change")
    A1, A3, B2, B3 = g.A1, g.A3, g.B2, g.B3
    _, P2, P3 = g.P
    _, Q2, Q3 = g.Q
    return ParamFamilyM1.of(
        0,
        0,
        1,
        b1 * B2 / A1**3,
        (b2 * B2 + Q3) / (A1 * A1),
        (b2 * A3 * B2 * B2 + A1 * B3 * B3 + d1 * A1 * B2 * B2 + A1 * B2 * Q2 + A3 * B2 * Q3)
        / (A1**3 * B2 * B2),
        (-A1 * B3 + d2 * A1 * B2 + B2 * P3) / (A1 * A1 * B2),
        (-A1 * B3 + h1 * A1 * B2 + B2 * P3) / (A1 * A1 * B2),
        (t1 * B2 + Q3) / (A1 * A1),
    )


def case2_prenormalize(p: ParamFamilyM1) -> Tuple[ParamFamilyM1, Matrix]:
    """e3' = a1 e1 + a2 e2 + a3 e3, e2' = a3 e2, e1' = a3 e1 (x, y, z fixed).

    This lands in the family only when alpha2 = 0: otherwise [e3', x] = alpha2 e1
    and the module action is no longer the standard one.
    """
    a1, a2, a3 = p.alpha1, p.alpha2, p.alpha3
    if not a3:
        raise InadmissibleChange("needs alpha3 != 0")
    if a2:
        raise UnlistedCase(
            "alpha3 != 0 and alpha2 != 0: alpha2' = alpha2 A1^2/(B2 R3) under every admissible "
            "change, so (alpha1, alpha2, alpha3) = (0, 0, 1) is unreachable"
        )
    A = build_L(p)
    cols = [{"x": 1}, {"y": 1}, {"z": 1}, {"e1": a3}, {"e2": a3}, {"e1": a1, "e2": a2, "e3": a3}]
    g = matrix_from_vectors(A, cols)
    q = ParamFamilyM1.of(0, 0, 1, *(v / a3 for v in p[3:]))
    return q, g


# ---------------------------------------------------------------------------
# invariants and classification
# ---------------------------------------------------------------------------


class NullityPattern(NamedTuple):
    case: int
    flags: Tuple[bool, ...]  # case 1: (a2, b1, h1-d2, t1-b2); case 2: (b1, h1-d2, t1-b2)
    alpha2_nonzero: bool = False  # case 2 only; outside the classification list if True


def nullity_pattern(p: ParamFamilyM1) -> NullityPattern:
    p = ParamFamilyM1.of(p)
    eta = p.eta1 - p.delta2
    theta = p.theta1 - p.beta2
    if not p.alpha3:
        return NullityPattern(1, (p.alpha2 != 0, p.beta1 != 0, eta != 0, theta != 0))
    return NullityPattern(2, (p.beta1 != 0, eta != 0, theta != 0), p.alpha2 != 0)


@dataclass(frozen=True)
class ListEntry:
    index: int
    case: int
    params: Tuple  # nine entries; the string "lambda" marks the free slot
    pattern: Tuple[Optional[bool], ...]  # None = either (absorbed by lambda)

    @property
    def has_lambda(self) -> bool:
        return "lambda" in self.params

    @property
    def name(self) -> str:
        return "L(" + ",".join("λ" if v == "lambda" else str(v) for v in self.params) + ")"

    def at(self, lam=0) -> ParamFamilyM1:
        return ParamFamilyM1.of(*(lam if v == "lambda" else v for v in self.params))


def _entries() -> List[ListEntry]:
    L = "lambda"
    c1 = [
        ((0, 1, 0, 1, 0, 0, 0, 1, L), (True, True, True, None)),
        ((0, 1, 0, 1, 0, 0, 0, 0, 1), (True, True, False, True)),
        ((0, 1, 0, 1, 0, 0, 0, 0, 0), (True, True, False, False)),
        ((0, 1, 0, 0, 0, 0, 0, 1, L), (True, False, True, None)),
        ((0, 1, 0, 0, 0, 0, 0, 0, 1), (True, False, False, True)),
        ((0, 1, 0, 0, 0, 0, 0, 0, 0), (True, False, False, False)),
    ]
    for b in (True, False):
        for h in (True, False):
            for t in (True, False):
                c1.append(((0, 0, 0, int(b), 0, 0, 0, int(h), int(t)), (False, b, h, t)))
    c2 = [
        ((0, 0, 1, 1, 0, 0, 0, 1, L), (True, True, None)),
        ((0, 0, 1, 1, 0, 0, 0, 0, 1), (True, False, True)),
        ((0, 0, 1, 1, 0, 0, 0, 0, 0), (True, False, False)),
        ((0, 0, 1, 0, 0, 0, 0, 1, 1), (False, True, True)),
        ((0, 0, 1, 0, 0, 0, 0, 1, 0), (False, True, False)),
        ((0, 0, 1, 0, 0, 0, 0, 0, 1), (False, False, True)),
        ((0, 0, 1, 0, 0, 0, 0, 0, 0), (False, False, False)),
    ]
    out = []
    for params, pat in c1:
        out.append(ListEntry(len(out), 1, params, pat))
    for params, pat in c2:
        out.append(ListEntry(len(out), 2, params, pat))
    return out


_LIST = _entries()


def classify_list() -> List[ListEntry]:
    """The 21 normal forms, in the order of the classification theorem's case tables."""
    return list(_LIST)


def _match(pattern: NullityPattern) -> ListEntry:
    for e in _LIST:
        if e.case != pattern.case:
            continue
        if all(w is None or w == f for w, f in zip(e.pattern, pattern.flags)):
            return e
    raise AssertionError(f"no entry for {pattern}")  # the table covers every pattern


@dataclass
class NormalForm:
    entry: ListEntry
    lam: Optional[Fraction]
    params: ParamFamilyM1
    matrix: Matrix  # columns: normal-form basis in the input's coordinates
    uses_sqrt: bool = False

    @property
    def name(self) -> str:
        return self.entry.name

    def as_dict(self) -> dict:
        d = {"entry": self.entry.name, "index": self.entry.index, "case": self.entry.case,
             "params": [format_scalar(v) for v in self.params]}
        if self.lam is not None:
            d["lambda"] = format_scalar(self.lam)
        if self.uses_sqrt:
            d["uses_sqrt"] = True
        return d


def _sqrt(q) -> object:
    return QuadraticSurd.sqrt(as_scalar(q))


def _case1_scaling(a2, b1, h, t):
    """(A1, B2, R3, lambda) reaching the listed case 1 representative."""
    if a2 and b1 and h:
        A1 = a2 * b1 / (h * h)
        R3 = h * A1
        B2 = A1 * R3 / b1
        return A1, B2, R3, a2 * t / (h * h)
    if a2 and b1 and t:
        A1 = b1 / t
        B2 = A1 * _sqrt(a2 / t)
        return A1, B2, t * B2, None
    if a2 and b1:
        A1 = 1 / (a2 * b1)
        return A1, A1 / b1, Fraction(1), None
    if a2 and h:
        A1 = Fraction(1)
        return A1, a2 / h, h, a2 * t / (h * h)
    if a2 and t:
        A1 = _sqrt(t / a2)
        return A1, Fraction(1), t, None
    if a2:
        return Fraction(1), a2, Fraction(1), None
    # alpha2 = 0: alpha2' stays 0, scale the remaining nonzero slots to 1
    if b1 and h and t:
        A1 = b1 / t
        R3 = h * A1
        return A1, R3 / t, R3, None
    if b1 and h:
        A1 = Fraction(1)
        R3 = h
        return A1, R3 / b1, R3, None
    if b1 and t:
        # b1 B2 = A1 R3, t B2 = R3  =>  A1 = b1 / t
        return b1 / t, Fraction(1), t, None
    if b1:
        return Fraction(1), 1 / b1, Fraction(1), None
    if h and t:
        return Fraction(1), h / t, h, None
    if h:
        return Fraction(1), Fraction(1), h, None
    if t:
        return Fraction(1), Fraction(1), t, None
    return Fraction(1), Fraction(1), Fraction(1), None


def _case2_scaling(b1, h, t):
    """(A1, B2, lambda) for the case 2 representative."""
    if b1 and h:
        return h, h**3 / b1, t * h / b1
    if b1 and t:
        A1 = b1 / t
        return A1, A1 * A1 / t, None
    if b1:
        return Fraction(1), 1 / b1, None
    if h and t:
        return h, h * h / t, None
    if h:
        return h, Fraction(1), None
    if t:
        return Fraction(1), 1 / t, None
    return Fraction(1), Fraction(1), None


def normalize_m1(p: ParamFamilyM1) -> NormalForm:
    """Reduce a family member to its listed normal form.

    Raises :class:`UnlistedCase` when alpha3 != 0 and alpha2 != 0.
    """
    p = ParamFamilyM1.of(p)
    G = Matrix.identity(6)
    if not p.alpha3:
        g1 = AdmissibleChange(1, P=(0, -p.alpha1, -p.delta2), Q=(0, -p.delta1, -p.beta2))
        G = G @ g1.matrix(p)
        q = transform_params_case1(p, g1)
        A1, B2, R3, lam = _case1_scaling(q.alpha2, q.beta1, q.eta1, q.theta1)
        g2 = AdmissibleChange(1, A1=A1, B2=B2, R=(0, None, R3))
        G = G @ g2.matrix(q)
        r = transform_params_case1(q, g2)
        entry = _match(nullity_pattern(q))
        sqrt_used = any(isinstance(v, QuadraticSurd) for v in (A1, B2, R3))
    else:
        q0, g0 = case2_prenormalize(p)
        G = G @ g0
        g1 = AdmissibleChange(2, P=(0, 0, -q0.delta2), Q=(0, -q0.delta1, -q0.beta2))
        G = G @ g1.matrix(q0)
        q = transform_params_case2(q0, g1)
        A1, B2, lam = _case2_scaling(q.beta1, q.eta1, q.theta1)
        g2 = AdmissibleChange(2, A1=A1, B2=B2)
        G = G @ g2.matrix(q)
        r = transform_params_case2(q, g2)
        entry = _match(nullity_pattern(q))
        sqrt_used = False
    expected = entry.at(lam if lam is not None else 0)
    if r != expected:
        raise AssertionError(f"normalization reached {r.name()}, expected {expected.name()}")
    return NormalForm(entry, lam, r, G, sqrt_used)


def lambda_rigidity(entry: ListEntry) -> Tuple[bool, Dict[str, int]]:
    """Is the lambda slot fixed by every scaling that preserves the other slots?

    Scalings act on each slot by a character (exponent vector in A1, B2, R3
    for case 1; A1, B2 for case 2).  Preserving the slots that equal 1 means
    the torus element is killed by those characters; lambda is then fixed
    iff the lambda character lies in the integer lattice they span.  Returns
    the verdict and the integer combination found.
    """
    if not entry.has_lambda:
        raise ValueError(f"{entry.name} has no lambda slot")
    if entry.case == 1:
        chars = {"alpha2": (2, -1, -1), "beta1": (-1, 1, -1), "eta1": (1, 0, -1)}
        lam_char = (0, 1, -1)
    else:
        chars = {"beta1": (-3, 1), "eta1": (-1, 0)}
        lam_char = (-2, 1)
    fixed = [k for k in chars if entry.params[PARAM_NAMES.index(k)] == 1]
    comb = _integer_combination([chars[k] for k in fixed], lam_char)
    if comb is None:
        return False, {}
    return True, dict(zip(fixed, comb))


def _integer_combination(vectors: Sequence[Sequence[int]], target: Sequence[int]) -> Optional[List[int]]:
    """Integers c with sum c_i v_i = target, for linearly independent v_i."""
    names = [f"c{i}" for i in range(len(vectors))]
    sys_ = LinearSystem(names)
    for k, t in enumerate(target):
        sys_.add_row({n: v[k] for n, v in zip(names, vectors)}, t)
    try:
        sol = solve_homogeneous(sys_)
    except Inconsistent:
        return None
    if sol.free:
        raise ValueError("characters are linearly dependent")
    vals = sol.evaluate({})
    out = []
    for n in names:
        v = vals[n]
        if v.denominator != 1:
            return None
        out.append(int(v))
    return out
