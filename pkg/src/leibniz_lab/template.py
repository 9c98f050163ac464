"""Product tables with unknown coefficients and their Leibniz constraints.

A :class:`TemplateAlgebra` is a table in which some structure constants are
affine expressions in unknown symbols.  Unknowns may only multiply basis
vectors of a declared abelian ideal whose own products are fully known; then
every residual ``[[a,b],c] - [[a,c],b] - [a,[b,c]]`` is affine in the
unknowns and the identity becomes a linear system.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from itertools import product as iproduct
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from .algebra import Algebra, OutOfWindow, leibniz_check
from .exact import (
    Fraction,
    LinearSystem,
    SolutionSpace,
    as_scalar,
    format_scalar,
    parse_scalar,
    solve_homogeneous,
)
from .fock import format_monomial, monomials_upto
from .heisenberg import heisenberg_labels

__all__ = [
    "Affine",
    "ExpansionStats",
    "MissingParameter",
    "NonlinearTemplate",
    "SolvedFamily",
    "TemplateAlgebra",
    "TemplateError",
    "expand_constraints",
    "general_template",
    "hfl_degree_report",
    "hfl_row_report",
    "hfl_template",
    "instantiate",
    "m1_agreement_report",
    "m1_reference_family",
    "m1_template",
    "solve_template",
    "template_from_json",
    "template_to_json",
]


class TemplateError(ValueError):
    pass


class NonlinearTemplate(TemplateError):
    pass


class MissingParameter(KeyError):
    pass


class Affine:
    """``const + sum(coef * symbol)`` with exact coefficients."""

    __slots__ = ("const", "syms")

    def __init__(self, const=0, syms: Optional[Mapping[str, object]] = None):
        self.const = as_scalar(const)
        self.syms: Dict[str, Fraction] = {}
        for s, c in (syms or {}).items():
            c = as_scalar(c)
            if c:
                self.syms[s] = c

    @classmethod
    def sym(cls, name: str, coeff=1) -> "Affine":
        return cls(0, {name: coeff})

    @classmethod
    def lift(cls, x) -> "Affine":
        return x if isinstance(x, Affine) else cls(x)

    def is_const(self) -> bool:
        return not self.syms

    def __bool__(self):
        return bool(self.const) or bool(self.syms)

    def __eq__(self, other):
        other = Affine.lift(other) if not isinstance(other, Affine) else other
        return self.const == other.const and self.syms == other.syms

    def __hash__(self):
        return hash((self.const, tuple(sorted(self.syms.items()))))

    def __repr__(self):
        parts = [format_scalar(self.const)] if self.const or not self.syms else []
        parts += [f"{format_scalar(c)}*{s}" for s, c in self.syms.items()]
        return " + ".join(parts)

    def __add__(self, other):
        other = Affine.lift(other)
        syms = dict(self.syms)
        for s, c in other.syms.items():
            syms[s] = syms.get(s, 0) + c
        return Affine(self.const + other.const, syms)

    __radd__ = __add__

    def __neg__(self):
        return Affine(-self.const, {s: -c for s, c in self.syms.items()})

    def __sub__(self, other):
        return self + (-Affine.lift(other))

    def scale(self, k) -> "Affine":
        return Affine(self.const * k, {s: c * k for s, c in self.syms.items()})

    def __mul__(self, other):
        other = Affine.lift(other)
        if self.syms and other.syms:
            raise NonlinearTemplate(f"({self}) * ({other})")
        if not other.syms:
            return self.scale(other.const)
        return other.scale(self.const)

    __rmul__ = __mul__

    def evaluate(self, values: Mapping[str, object]) -> Fraction:
        out = self.const
        for s, c in self.syms.items():
            if s not in values:
                raise MissingParameter(s)
            out += c * as_scalar(values[s])
        return out

    def substitute(self, exprs: Mapping[str, "Affine"]) -> "Affine":
        out = Affine(self.const)
        for s, c in self.syms.items():
            out = out + (exprs[s].scale(c) if s in exprs else Affine.sym(s, c))
        return out

    def to_json(self):
        if not self.syms:
            return format_scalar(self.const)
        return {"const": format_scalar(self.const), "sym": {s: format_scalar(c) for s, c in self.syms.items()}}

    @classmethod
    def from_json(cls, doc) -> "Affine":
        if isinstance(doc, dict):
            return cls(parse_scalar(doc.get("const", "0")), {s: parse_scalar(c) for s, c in doc.get("sym", {}).items()})
        return cls(parse_scalar(doc))


AffVec = Dict[int, Affine]


class TemplateAlgebra:
    def __init__(
        self,
        basis: Sequence[str],
        products: Mapping[Tuple[str, str], Mapping[str, object]],
        unknowns: Sequence[str],
        ideal: Sequence[str],
        name: str = "",
        out_of_window: Iterable[Tuple[str, str]] = (),
    ):
        self.basis = tuple(basis)
        if len(set(self.basis)) != len(self.basis):
            raise TemplateError("basis labels must be distinct")
        self.index = {b: i for i, b in enumerate(self.basis)}
        self.unknowns = list(unknowns)
        if len(set(self.unknowns)) != len(self.unknowns):
            raise TemplateError("duplicate unknowns")
        self.ideal = list(ideal)
        self.name = name
        unk = set(self.unknowns)
        ideal_set = set(self.ideal)
        for lab in ideal_set:
            if lab not in self.index:
                raise TemplateError(f"ideal label {lab!r} not in basis")
        self.products: Dict[Tuple[str, str], Dict[str, Affine]] = {}
        for (a, b), vec in products.items():
            clean = {}
            for lab, c in vec.items():
                if lab not in self.index or a not in self.index or b not in self.index:
                    raise TemplateError(f"unknown label in product {(a, b)}")
                c = Affine.lift(c)
                extra = set(c.syms) - unk
                if extra:
                    raise TemplateError(f"undeclared unknowns {sorted(extra)}")
                if c.syms and lab not in ideal_set:
                    raise NonlinearTemplate(f"unknown multiplies non-ideal vector {lab!r} in {(a, b)}")
                if c.syms and (a in ideal_set or b in ideal_set):
                    raise NonlinearTemplate(f"product {(a, b)} touches the ideal but has unknowns")
                if c:
                    clean[lab] = c
            if clean:
                self.products[(a, b)] = clean
        for a in self.ideal:
            for b in self.ideal:
                if (a, b) in self.products:
                    raise TemplateError(f"ideal part is not abelian: [{a}, {b}] != 0")
        self.out_of_window = frozenset(tuple(p) for p in out_of_window)
        for p in self.out_of_window:
            if p in self.products:
                raise TemplateError(f"pair {p} is both defined and out of window")
        n = len(self.basis)
        self._table: List[Dict[int, AffVec]] = [dict() for _ in range(n)]
        for (a, b), vec in self.products.items():
            self._table[self.index[a]][self.index[b]] = {self.index[k]: v for k, v in vec.items()}
        self._flags = [set() for _ in range(n)]
        for a, b in self.out_of_window:
            self._flags[self.index[a]].add(self.index[b])

    @property
    def dim(self):
        return len(self.basis)

    def _br(self, u: Mapping[int, Affine], v: Mapping[int, Affine]) -> AffVec:
        out: Dict[int, Affine] = {}
        for i, cu in u.items():
            row, fl = self._table[i], self._flags[i]
            for j, cv in v.items():
                if j in fl:
                    raise OutOfWindow((self.basis[i], self.basis[j]))
                r = row.get(j)
                if not r:
                    continue
                s = cu * cv
                for k, c in r.items():
                    t = s * c
                    out[k] = out[k] + t if k in out else t
        return {k: c for k, c in out.items() if c}

    def residual(self, a: int, b: int, c: int) -> AffVec:
        one = Affine(1)
        out: Dict[int, Affine] = {}
        for sign, val in (
            (1, self._br(self._table[a].get(b, {}) if b not in self._flags[a] else self._raise(a, b), {c: one})),
            (-1, self._br(self._table[a].get(c, {}) if c not in self._flags[a] else self._raise(a, c), {b: one})),
            (-1, self._br({a: one}, self._table[b].get(c, {}) if c not in self._flags[b] else self._raise(b, c))),
        ):
            for k, v in val.items():
                v = v if sign == 1 else -v
                out[k] = out[k] + v if k in out else v
        return {k: v for k, v in out.items() if v}

    def _raise(self, i, j):
        raise OutOfWindow((self.basis[i], self.basis[j]))

    def substitute(self, exprs: Mapping[str, Affine], unknowns: Sequence[str]) -> "TemplateAlgebra":
        prods = {p: {k: c.substitute(exprs) for k, c in vec.items()} for p, vec in self.products.items()}
        return TemplateAlgebra(self.basis, prods, unknowns, self.ideal, self.name, self.out_of_window)

    def instantiate(self, values: Mapping[str, object], name: Optional[str] = None) -> Algebra:
        prods = {}
        for p, vec in self.products.items():
            prods[p] = {k: c.evaluate(values) for k, c in vec.items()}
        return Algebra(self.basis, prods, name=self.name if name is None else name, out_of_window=self.out_of_window)


# ---------------------------------------------------------------------------
# constraint expansion and solving
# ---------------------------------------------------------------------------


@dataclass
class ExpansionStats:
    triples: int = 0
    skipped: int = 0
    raw_equations: int = 0
    equations: int = 0
    origin: Dict[int, Tuple[str, str, str, str]] = field(default_factory=dict)


def _canonical(coeffs: Dict[str, Fraction], const: Fraction, order: Mapping[str, int]):
    lead = min(coeffs, key=order.__getitem__)
    k = coeffs[lead]
    return (tuple(sorted(((s, c / k) for s, c in coeffs.items()), key=lambda t: order[t[0]])), const / k)


def expand_constraints(
    T: TemplateAlgebra,
    triples: Optional[Iterable[Tuple[str, str, str]]] = None,
    stats: Optional[ExpansionStats] = None,
) -> LinearSystem:
    """One affine equation per (triple, output coordinate), deduplicated.

    A residual coefficient ``const + sum(c_s * s)`` becomes the row
    ``sum(c_s * s) = -const``.  A row with no unknowns and nonzero constant
    is kept so the solver reports the contradiction.
    """
    stats = stats if stats is not None else ExpansionStats()
    order = {s: i for i, s in enumerate(T.unknowns)}
    system = LinearSystem(T.unknowns)
    seen = set()
    if triples is None:
        idx = range(T.dim)
        trip = iproduct(idx, idx, idx)
    else:
        trip = ((T.index[a], T.index[b], T.index[c]) for a, b, c in triples)
    for a, b, c in trip:
        try:
            r = T.residual(a, b, c)
        except OutOfWindow:
            stats.skipped += 1
            continue
        stats.triples += 1
        for k, expr in r.items():
            stats.raw_equations += 1
            if not expr.syms:
                key = ("const", expr.const != 0)
                if key in seen:
                    continue
                seen.add(key)
                system.add_row({}, -expr.const)
                continue
            key = _canonical(expr.syms, -expr.const, order)
            if key in seen:
                continue
            seen.add(key)
            stats.origin[len(system.rows)] = (T.basis[a], T.basis[b], T.basis[c], T.basis[k])
            system.add_row(expr.syms, -expr.const)
    stats.equations = len(system.rows)
    return system


@dataclass
class SolvedFamily:
    """Solution set of a template: unknowns as affine expressions in ``free``."""

    template: TemplateAlgebra
    free: List[str]
    assignments: Dict[str, Affine]
    residual: TemplateAlgebra
    rank: int
    stats: ExpansionStats

    def forced_zero(self) -> List[str]:
        return [u for u, e in self.assignments.items() if not e]

    def values(self, free_values: Mapping[str, object]) -> Dict[str, Fraction]:
        missing = [f for f in self.free if f not in free_values]
        if missing:
            raise MissingParameter(missing[0])
        return {u: e.evaluate(free_values) for u, e in self.assignments.items()}


def _from_space(space: SolutionSpace) -> Dict[str, Affine]:
    return {v: Affine(const, lin) for v, (const, lin) in space.expressions.items()}


def random_rational(rng: random.Random, lo: int = -5, hi: int = 5, den: int = 3) -> Fraction:
    return Fraction(rng.randint(lo * den, hi * den), rng.randint(1, den))


def solve_template(
    T: TemplateAlgebra,
    prefer_free: Sequence[str] = (),
    samples: int = 10,
    seed: int = 0,
) -> SolvedFamily:
    """Expand, solve exactly and verify ``samples`` random members.

    Unknowns listed in ``prefer_free`` are ordered last, so they are chosen as
    free parameters whenever the solution set allows it.
    """
    stats = ExpansionStats()
    system = expand_constraints(T, stats=stats)
    pref = [u for u in prefer_free if u in T.unknowns]
    order = [u for u in T.unknowns if u not in set(pref)] + pref
    system = LinearSystem(order, system.rows)
    space = solve_homogeneous(system)
    assignments = _from_space(space)
    assignments = {u: assignments[u] for u in T.unknowns}
    fam = SolvedFamily(
        template=T,
        free=[u for u in order if u in set(space.free)],
        assignments=assignments,
        residual=T.substitute(assignments, [u for u in order if u in set(space.free)]),
        rank=space.rank,
        stats=stats,
    )
    rng = random.Random(seed)
    for _ in range(samples):
        vals = {f: random_rational(rng) for f in fam.free}
        A = instantiate(fam, vals)
        rep = leibniz_check(A)
        if not rep:
            raise AssertionError(f"solved family member fails the Leibniz identity: {rep.failures[:1]}")
    return fam


def instantiate(F: SolvedFamily, values: Mapping[str, object], name: Optional[str] = None) -> Algebra:
    missing = [f for f in F.free if f not in values]
    if missing:
        raise MissingParameter(missing[0])
    return F.residual.instantiate({f: values[f] for f in F.free}, name)


# ---------------------------------------------------------------------------
# JSON
# ---------------------------------------------------------------------------


def template_to_json(T: TemplateAlgebra) -> dict:
    prods = []
    for (a, b) in sorted(T.products, key=lambda p: (T.index[p[0]], T.index[p[1]])):
        vec = T.products[(a, b)]
        prods.append(
            {
                "left": a,
                "right": b,
                "result": [[k, vec[k].to_json()] for k in sorted(vec, key=T.index.__getitem__)],
            }
        )
    doc = {"name": T.name, "basis": list(T.basis), "unknowns": list(T.unknowns), "ideal": list(T.ideal), "products": prods}
    if T.out_of_window:
        doc["out_of_window"] = sorted(
            ([a, b] for a, b in T.out_of_window), key=lambda p: (T.index[p[0]], T.index[p[1]])
        )
    return doc


def template_from_json(doc: Mapping) -> TemplateAlgebra:
    prods: Dict[Tuple[str, str], Dict[str, Affine]] = {}
    for p in doc.get("products", []):
        key = (p["left"], p["right"])
        if key in prods:
            raise TemplateError(f"duplicate product {key}")
        prods[key] = {lab: Affine.from_json(c) for lab, c in p["result"]}
    return TemplateAlgebra(
        doc["basis"],
        prods,
        doc.get("unknowns", []),
        doc.get("ideal", []),
        doc.get("name", ""),
        [tuple(x) for x in doc.get("out_of_window", [])],
    )


# ---------------------------------------------------------------------------
# canned templates
# ---------------------------------------------------------------------------


def _poly_unknown(name: str, monos: Sequence[str]) -> Dict[str, Affine]:
    return {m: Affine.sym(f"{name}[{m}]") for m in monos}


def hfl_template(k: int, d: int) -> TemplateAlgebra:
    """Generators of H_{2k+1} over the Fock module, generator products unknown.

    Each unknown product is a polynomial of degree <= d, encoded by one
    symbol per monomial coefficient; the monomial basis runs to degree d+1 so
    that the action of ``X_i`` on an unknown stays in the window.  The
    normalization [X_i, one] = [D_i, one] = [one, one] = 0 is built in.
    """
    if k < 1 or d < 0:
        raise ValueError("need k >= 1 and d >= 0")
    gens = heisenberg_labels(k)
    all_monos = monomials_upto(k, d + 1)
    labels = [format_monomial(m) for m in all_monos]
    low = [format_monomial(m) for m in all_monos if sum(m) <= d]
    basis = gens + labels
    prods: Dict[Tuple[str, str], Dict[str, Affine]] = {}
    unknowns: List[str] = []
    flags = []

    def unknown_poly(name, base=None):
        vec = _poly_unknown(name, low)
        unknowns.extend(f"{name}[{m}]" for m in low)
        if base:
            vec.update(base)
        return vec

    for i in range(1, k + 1):
        for j in range(1, k + 1):
            prods[(f"X{i}", f"X{j}")] = unknown_poly(f"a_{i}_{j}")
            prods[(f"D{i}", f"D{j}")] = unknown_poly(f"b_{i}_{j}")
            if i != j:
                prods[(f"D{i}", f"X{j}")] = unknown_poly(f"c_{i}_{j}")
                prods[(f"X{i}", f"D{j}")] = unknown_poly(f"d_{i}_{j}")
    for i in range(1, k + 1):
        prods[(f"X{i}", f"D{i}")] = unknown_poly(f"e_{i}", {"one": Affine(1)})
        prods[(f"D{i}", f"X{i}")] = unknown_poly(f"f_{i}", {"one": Affine(-1)})
    for i in range(1, k + 1):
        prods[("one", f"X{i}")] = unknown_poly(f"h_{i}")
        prods[("one", f"D{i}")] = unknown_poly(f"g_{i}")
    for m in all_monos:
        ml = format_monomial(m)
        prods[(ml, "one")] = {ml: Affine(1)}
        for i in range(k):
            up = m[:i] + (m[i] + 1,) + m[i + 1 :]
            if sum(up) > d + 1:
                flags.append((ml, f"X{i + 1}"))
            else:
                prods[(ml, f"X{i + 1}")] = {format_monomial(up): Affine(1)}
            if m[i]:
                down = m[:i] + (m[i] - 1,) + m[i + 1 :]
                prods[(ml, f"D{i + 1}")] = {format_monomial(down): Affine(m[i])}
    return TemplateAlgebra(basis, prods, unknowns, labels, name=f"HFL{2 * k + 1}-template[d={d}]", out_of_window=flags)


def hfl_unknown_group(symbol: str) -> str:
    """``"a_1_2[x1^2]" -> "a_1_2"``."""
    return symbol.split("[", 1)[0]


M1_BASIS = ("x", "y", "z", "e1", "e2", "e3")
M1_FREE = ("alpha1", "alpha2", "alpha3", "beta1", "beta2", "delta1", "delta2", "eta1", "theta1")
M1_UNKNOWNS = tuple(
    f"{g}{i}" for g in ("alpha", "delta", "eta", "beta", "theta", "tau", "lambda", "mu") for i in (1, 2, 3)
)
# which unknown group sits in which product
M1_SLOTS = {
    ("x", "x"): "alpha",
    ("x", "z"): "eta",
    ("y", "y"): "beta",
    ("y", "z"): "theta",
    ("z", "x"): "tau",
    ("z", "y"): "lambda",
    ("z", "z"): "mu",
}


def _module_products(m: int, xs, ys, z, es):
    prods = {}
    for i in range(m):
        prods[(es[i + 1], xs[i])] = {es[0]: Affine(1)}
        prods[(es[m + 1], ys[i])] = {es[i + 1]: Affine(1)}
    prods[(es[m + 1], z)] = {es[0]: Affine(1)}
    return prods


def m1_template() -> TemplateAlgebra:
    """H_3 over its 3-dim faithful module with the 24 unknown coefficients."""
    x, y, z, e1, e2, e3 = M1_BASIS
    es = [e1, e2, e3]
    prods = _module_products(1, [x], [y], z, es)
    for (a, b), g in M1_SLOTS.items():
        prods[(a, b)] = {e: Affine.sym(f"{g}{i}") for i, e in enumerate(es, start=1)}
    prods[(x, y)] = {z: Affine(-1), **{e: Affine.sym(f"delta{i}") for i, e in enumerate(es, start=1)}}
    prods[(y, x)] = {z: Affine(1)}
    return TemplateAlgebra(M1_BASIS, prods, M1_UNKNOWNS, es, name="m1-template")


def general_labels(m: int):
    xs = [f"x{i}" for i in range(1, m + 1)]
    ys = [f"y{i}" for i in range(1, m + 1)]
    es = [f"e{i}" for i in range(1, m + 3)]
    return xs, ys, "z", es


def general_template(m: int) -> TemplateAlgebra:
    """H_{2m+1} over its (m+2)-dim faithful module; every generator product unknown
    except [y1, x1] = z and the Heisenberg parts of [x_i, y_i], [y_i, x_i]."""
    if m < 1:
        raise ValueError("m >= 1")
    xs, ys, z, es = general_labels(m)
    gens = xs + ys + [z]
    prods = _module_products(m, xs, ys, z, es)
    unknowns = []
    for a in gens:
        for b in gens:
            if (a, b) == (ys[0], xs[0]):
                prods[(a, b)] = {z: Affine(1)}
                continue
            vec = {}
            for s, e in enumerate(es, start=1):
                sym = f"[{a},{b}]_{s}"
                unknowns.append(sym)
                vec[e] = Affine.sym(sym)
            ia = xs.index(a) if a in xs else None
            ib = ys.index(b) if b in ys else None
            if ia is not None and ib is not None and ia == ib:
                vec[z] = Affine(-1)
            ja = ys.index(a) if a in ys else None
            jb = xs.index(b) if b in xs else None
            if ja is not None and jb is not None and ja == jb:
                vec[z] = Affine(1)
            prods[(a, b)] = vec
    return TemplateAlgebra(xs + ys + [z] + es, prods, unknowns, es, name=f"minrep-template[m={m}]")


# ---------------------------------------------------------------------------
# comparison with printed tables
# ---------------------------------------------------------------------------


def _A(const=0, **syms) -> Affine:
    return Affine(const, syms)


def m1_reference_family() -> Dict[str, Affine]:
    """The nine-parameter family as printed: each of the 24 unknowns in terms of the nine."""
    free = {s: Affine.sym(s) for s in M1_FREE}
    ref = dict(free)
    ref.update(
        delta3=_A(), eta2=_A(alpha3=1), eta3=_A(),
        beta3=_A(), theta2=_A(), theta3=_A(),
        tau1=_A(delta2=1, eta1=-1), tau2=_A(alpha3=-2), tau3=_A(),
        lambda1=_A(beta2=1, theta1=-1), lambda2=_A(), lambda3=_A(),
        mu1=_A(), mu2=_A(), mu3=_A(),
    )
    return {u: ref[u] for u in M1_UNKNOWNS}


# (triple, left side, right side) exactly as printed, including the row that
# disagrees with the solved family
M1_PRINTED_ROWS: List[Tuple[Tuple[str, str, str], Affine, Affine]] = [
    (("x", "x", "y"), _A(eta1=-1), _A(tau1=1, delta2=-1)),
    (("x", "x", "y"), _A(alpha3=1, eta2=-1), _A(tau2=1)),
    (("x", "x", "y"), _A(eta3=-1), _A(tau3=1)),
    (("x", "x", "z"), _A(alpha3=1), _A(eta2=1)),
    (("x", "y", "z"), _A(mu1=1), _A(delta3=1)),
    (("x", "y", "z"), _A(mu2=1), _A(eta3=-1)),
    (("x", "y", "z"), _A(mu3=1), _A()),
    (("y", "y", "z"), _A(beta3=1), _A()),
    (("y", "y", "z"), _A(theta3=1), _A()),
    (("y", "x", "y"), _A(theta1=-1), _A(lambda1=1, beta2=-1)),
    (("y", "x", "y"), _A(theta2=-1), _A(lambda2=1)),
    (("y", "x", "y"), _A(theta3=-1), _A(lambda3=1)),
    (("y", "x", "z"), _A(mu1=1), _A(theta2=1)),
    (("y", "x", "z"), _A(mu2=1), _A()),
    (("z", "x", "y"), _A(mu1=1), _A(lambda2=1)),
    (("z", "x", "y"), _A(mu2=1), _A(tau3=1)),
    (("z", "x", "z"), _A(mu2=1), _A(tau3=1)),
    (("z", "y", "z"), _A(lambda3=1), _A()),
    (("x", "z", "x"), _A(eta2=1), _A(alpha3=1)),
    (("x", "z", "y"), _A(mu1=1), _A(delta3=1)),
    (("x", "z", "y"), _A(mu2=1), _A(eta3=-1)),
]


def _rank_of(rows: Iterable[Tuple[Mapping[str, Fraction], Fraction]], order: Sequence[str]) -> int:
    from .exact import rref_rows

    idx = {v: i for i, v in enumerate(order)}
    n = len(order)
    dense = []
    for co, k in rows:
        r = {idx[v]: c for v, c in co.items() if c}
        if k:
            r[n] = k
        dense.append(r)
    return len(rref_rows(dense)[1])


def _implied(system_rows, row, order) -> bool:
    base = _rank_of(system_rows, order)
    return _rank_of(list(system_rows) + [row], order) == base


def _perms(t):
    from itertools import permutations

    return sorted(set(permutations(t)))


def m1_agreement_report(F: Optional[SolvedFamily] = None) -> dict:
    """Per-coefficient comparison of the solved family with the printed one.

    ``rows`` checks every printed constraint twice: whether it holds on the
    solved family, and whether the identity on its own triple (any order)
    already implies it.
    """
    T = m1_template()
    if F is None:
        F = solve_template(T, prefer_free=M1_FREE)
    ref = m1_reference_family()
    coeffs = []
    for u in M1_UNKNOWNS:
        solved = F.assignments[u]
        coeffs.append({"unknown": u, "solved": repr(solved), "printed": repr(ref[u]), "agree": solved == ref[u]})
    # the printed family lies in the solution set iff every equation vanishes on it
    system = expand_constraints(T)
    contained = all(
        not (sum((ref[v].scale(c) for v, c in co.items()), Affine()) - Affine(k)) for co, k in system.rows
    )
    rows = []
    for triple, lhs, rhs in M1_PRINTED_ROWS:
        rel = lhs - rhs
        holds = not rel.substitute(F.assignments)
        sub = expand_constraints(T, triples=_perms(triple))
        implied = _implied(sub.rows, (rel.syms, -rel.const), T.unknowns)
        rows.append(
            {"triple": list(triple), "relation": f"{lhs!r} = {rhs!r}", "holds_on_solution": holds, "implied_by_triple": implied}
        )
    return {
        "free_parameters": list(F.free),
        "rank": F.rank,
        "coefficients": coeffs,
        "all_coefficients_agree": all(c["agree"] for c in coeffs),
        "printed_family_in_solution_set": contained,
        "same_dimension": len(F.free) == len(M1_FREE),
        "rows": rows,
        "rows_failing": [r["relation"] for r in rows if not r["holds_on_solution"]],
    }


HFL_ROWS = [
    # (triple pattern, unknown group pattern, index range)
    (("X{i}", "X{j}", "one"), "a_{i}_{j}", "all"),
    (("D{i}", "D{j}", "one"), "b_{i}_{j}", "all"),
    (("D{i}", "X{j}", "one"), "c_{i}_{j}", "off"),
    (("X{i}", "D{j}", "one"), "d_{i}_{j}", "off"),
    (("X{i}", "D{i}", "one"), "e_{i}", "diag"),
    (("D{i}", "X{i}", "one"), "f_{i}", "diag"),
    (("one", "X{i}", "one"), "h_{i}", "diag"),
    (("one", "D{i}", "one"), "g_{i}", "diag"),
]


def hfl_row_report(k: int, d: int, T: Optional[TemplateAlgebra] = None) -> List[dict]:
    """For each printed row: does the identity on that single triple force the group to 0?"""
    T = T or hfl_template(k, d)
    out = []
    for pattern, group, kind in HFL_ROWS:
        for i in range(1, k + 1):
            for j in range(1, k + 1):
                if (kind == "diag") != (i == j) and kind != "all":
                    continue
                triple = tuple(p.format(i=i, j=j) for p in pattern)
                gname = group.format(i=i, j=j)
                sub = expand_constraints(T, triples=[triple])
                syms = [u for u in T.unknowns if hfl_unknown_group(u) == gname]
                forced = all(_implied(sub.rows, ({s: Fraction(1)}, Fraction(0)), T.unknowns) for s in syms)
                out.append({"triple": list(triple), "group": gname, "coefficients": len(syms), "forced_zero": forced})
    return out


def hfl_degree_report(k: int, d: int, samples: int = 2) -> dict:
    """Solve the HFL template at degrees d and d+1 and compare the forced zeros."""
    fams = {}
    for deg in (d, d + 1):
        T = hfl_template(k, deg)
        F = solve_template(T, samples=samples)
        fams[deg] = (T, F)
    Td, Fd = fams[d]
    Te, Fe = fams[d + 1]
    zero_d = set(Fd.forced_zero())
    zero_e = set(Fe.forced_zero())
    common = set(Td.unknowns) & set(Te.unknowns)
    independent = (
        not Fd.free
        and not Fe.free
        and zero_d == set(Td.unknowns)
        and zero_e == set(Te.unknowns)
        and all((u in zero_d) == (u in zero_e) for u in common)
    )
    return {
        "k": k,
        "degree": d,
        "unknowns": len(Td.unknowns),
        "free_parameters": len(Fd.free),
        "forced_zero": len(zero_d),
        "unknowns_next_degree": len(Te.unknowns),
        "forced_zero_next_degree": len(zero_e),
        "degree_independent": independent,
        "triples_checked": Fd.stats.triples,
        "triples_skipped": Fd.stats.skipped,
    }
