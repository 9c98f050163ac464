"""Polynomials, the Fock action and Heisenberg-Fock Leibniz algebras.

The algebras here are infinite-dimensional.  A :class:`GradedAlgebra`
evaluates brackets by closed-form rules on demand; :func:`materialize`
produces a finite :class:`~leibniz_lab.algebra.Algebra` on the generators
plus all monomials up to a degree, flagging (never truncating) products
that leave the window.
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass, field
from itertools import combinations_with_replacement
from typing import Callable, Dict, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple, Union

from .algebra import Algebra, Matrix
from .exact import Fraction, as_scalar
from .heisenberg import BadDimension, _heisenberg_products, heisenberg_labels

Monomial = Tuple[int, ...]
Key = Union[str, Monomial]  # generator label or monomial
Element = Dict[Key, Fraction]

__all__ = [
    "GradedAlgebra",
    "Polynomial",
    "UnknownGenerator",
    "build_generalized_hfl",
    "build_hfl",
    "fock_action",
    "format_monomial",
    "hfl_normalizing_change",
    "materialize",
    "monomials_upto",
    "parse_monomial",
]


class UnknownGenerator(KeyError):
    pass


# ---------------------------------------------------------------------------
# monomials and polynomials
# ---------------------------------------------------------------------------


def format_monomial(m: Monomial) -> str:
    """``(2, 0, 1)`` -> ``"x1^2*x3"``; the empty monomial is ``"1"``."""
    parts = []
    for i, t in enumerate(m, start=1):
        if t == 1:
            parts.append(f"x{i}")
        elif t > 1:
            parts.append(f"x{i}^{t}")
    return "*".join(parts) if parts else "1"


_FACTOR = re.compile(r"^x(\d+)(?:\^(\d+))?$")


def parse_monomial(label: str, nvars: int) -> Monomial:
    if label == "1":
        return (0,) * nvars
    exps = [0] * nvars
    for f in label.split("*"):
        mt = _FACTOR.match(f)
        if not mt:
            raise ValueError(f"bad monomial label {label!r}")
        i = int(mt.group(1))
        if not 1 <= i <= nvars:
            raise ValueError(f"variable x{i} outside 1..{nvars}")
        exps[i - 1] += int(mt.group(2) or 1)
    return tuple(exps)


def monomials_upto(nvars: int, d: int) -> List[Monomial]:
    """All monomials of degree <= d in graded lexicographic order."""
    out: List[Monomial] = []
    for deg in range(d + 1):
        block = []
        for combo in combinations_with_replacement(range(nvars), deg):
            e = [0] * nvars
            for i in combo:
                e[i] += 1
            block.append(tuple(e))
        block.sort(reverse=True)
        out += block
    return out


class Polynomial:
    """Sparse polynomial: monomial exponent tuple -> nonzero Fraction."""

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int, terms: Optional[Mapping[Monomial, object]] = None):
        self.nvars = nvars
        clean = {}
        for m, c in (terms or {}).items():
            m = tuple(m)
            if len(m) != nvars or any(t < 0 for t in m):
                raise ValueError(f"bad monomial {m} for {nvars} variables")
            c = as_scalar(c)
            if c:
                clean[m] = clean.get(m, 0) + c
        self.terms: Dict[Monomial, Fraction] = {m: c for m, c in clean.items() if c}

    @classmethod
    def monomial(cls, m: Monomial, coeff=1) -> "Polynomial":
        return cls(len(m), {m: coeff})

    @classmethod
    def from_coeffs(cls, coeffs: Sequence) -> "Polynomial":
        """Univariate polynomial from ``[c0, c1, ...]``."""
        return cls(1, {(i,): c for i, c in enumerate(coeffs)})

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self.nvars == other.nvars and self.terms == other.terms
        return NotImplemented

    def __repr__(self):
        if not self.terms:
            return "0"
        return " + ".join(f"{c}*{format_monomial(m)}" for m, c in sorted(self.terms.items(), reverse=True))

    def degree(self) -> int:
        return max((sum(m) for m in self.terms), default=-1)

    def __add__(self, other: "Polynomial") -> "Polynomial":
        t = dict(self.terms)
        for m, c in other.terms.items():
            t[m] = t.get(m, 0) + c
        return Polynomial(self.nvars, t)

    def __neg__(self):
        return Polynomial(self.nvars, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        return self + (-other)

    def scale(self, s) -> "Polynomial":
        return Polynomial(self.nvars, {m: s * c for m, c in self.terms.items()})

    def __mul__(self, other: "Polynomial") -> "Polynomial":
        t: Dict[Monomial, Fraction] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = tuple(a + b for a, b in zip(m1, m2))
                t[m] = t.get(m, 0) + c1 * c2
        return Polynomial(self.nvars, t)

    def mul_var(self, i: int) -> "Polynomial":
        """Multiply by x_i (0-based i)."""
        return Polynomial(
            self.nvars, {m[:i] + (m[i] + 1,) + m[i + 1 :]: c for m, c in self.terms.items()}
        )

    def diff(self, i: int) -> "Polynomial":
        """Partial derivative in x_i (0-based); t * x^(t-1) with 0 * x^(-1) = 0."""
        return Polynomial(
            self.nvars,
            {m[:i] + (m[i] - 1,) + m[i + 1 :]: m[i] * c for m, c in self.terms.items() if m[i] > 0},
        )


# ---------------------------------------------------------------------------
# generators and the Fock action
# ---------------------------------------------------------------------------


_GEN = re.compile(r"^(one|X(\d+)|D(\d+))(?:@(\d+))?$")


def _parse_generator(g: str):
    mt = _GEN.match(g)
    if not mt:
        raise UnknownGenerator(g)
    kind = "one" if mt.group(1) == "one" else mt.group(1)[0]
    j = int(mt.group(2) or mt.group(3) or 0)
    summand = int(mt.group(4)) if mt.group(4) else None
    return kind, j, summand


def fock_action(p: Polynomial, g: str) -> Polynomial:
    """Right action of H_{2k+1} on F[x_1..x_k]: one -> p, X_i -> x_i p, D_i -> dp/dx_i."""
    kind, j, summand = _parse_generator(g)
    if summand is not None:
        raise UnknownGenerator(f"{g}: use a generalized algebra for summand labels")
    if kind == "one":
        return p
    if not 1 <= j <= p.nvars:
        raise UnknownGenerator(g)
    return p.mul_var(j - 1) if kind == "X" else p.diff(j - 1)


# ---------------------------------------------------------------------------
# graded algebras
# ---------------------------------------------------------------------------

Action = Callable[[Polynomial, str], Polynomial]


@dataclass
class GradedAlgebra:
    """Generators acting on a polynomial module, brackets by closed-form rules.

    [g, h] comes from ``gen_products``; [p, g] = ``action(p, g)``; products
    with a polynomial on the right vanish.
    """

    name: str
    generators: List[str]
    nvars: int
    gen_products: Dict[Tuple[str, str], Element]
    action: Action
    degree: int = 0
    summands: List[List[str]] = field(default_factory=list)

    def bracket_basis(self, a: Key, b: Key) -> Element:
        if isinstance(b, tuple):
            return {}
        if b not in self.generators:
            raise UnknownGenerator(b)
        if isinstance(a, tuple):
            res = self.action(Polynomial.monomial(a), b)
            return dict(res.terms)
        if a not in self.generators:
            raise UnknownGenerator(a)
        return dict(self.gen_products.get((a, b), {}))

    def bracket(self, u: Mapping[Key, object], v: Mapping[Key, object]) -> Element:
        out: Dict[Key, Fraction] = {}
        for a, ca in u.items():
            for b, cb in v.items():
                for k, c in self.bracket_basis(a, b).items():
                    out[k] = out.get(k, 0) + ca * cb * c
        return {k: c for k, c in out.items() if c}

    def residual(self, a: Key, b: Key, c: Key) -> Element:
        """[[a,b],c] - [[a,c],b] - [a,[b,c]] evaluated without truncation."""
        out: Dict[Key, Fraction] = {}
        for sign, val in (
            (1, self.bracket(self.bracket_basis(a, b), {c: 1})),
            (-1, self.bracket(self.bracket_basis(a, c), {b: 1})),
            (-1, self.bracket({a: 1}, self.bracket_basis(b, c))),
        ):
            for k, v in val.items():
                out[k] = out.get(k, 0) + sign * v
        return {k: v for k, v in out.items() if v}

    def label(self, key: Key) -> str:
        return format_monomial(key) if isinstance(key, tuple) else key

    def random_spot_check(
        self, samples: int = 200, max_exponent: int = 10**6, seed: int = 0
    ) -> List[Tuple[Key, Key, Key, Element]]:
        """Leibniz residuals on random triples mixing generators and huge-exponent monomials."""
        rng = random.Random(seed)
        failures = []
        for _ in range(samples):
            triple = []
            for _ in range(3):
                if rng.random() < 0.4:
                    triple.append(tuple(rng.randint(0, max_exponent) for _ in range(self.nvars)))
                else:
                    triple.append(rng.choice(self.generators))
            r = self.residual(*triple)
            if r:
                failures.append((*triple, r))
        return failures


def materialize(G: GradedAlgebra, d: Optional[int] = None) -> Algebra:
    """Finite algebra on generators + monomials of degree <= d (default: G.degree)."""
    d = G.degree if d is None else d
    if d < 0:
        raise ValueError("degree must be >= 0")
    monos = monomials_upto(G.nvars, d)
    basis = list(G.generators) + [format_monomial(m) for m in monos]
    prods: Dict[Tuple[str, str], Dict[str, Fraction]] = {}
    flags = []
    for (a, b), vec in G.gen_products.items():
        for k in vec:
            if isinstance(k, tuple) and sum(k) > d:
                flags.append((a, b))
                break
        else:
            prods[(a, b)] = {G.label(k): c for k, c in vec.items()}
    for m in monos:
        ml = format_monomial(m)
        for g in G.generators:
            res = G.bracket_basis(m, g)
            if any(sum(k) > d for k in res):
                flags.append((ml, g))
            elif res:
                prods[(ml, g)] = {format_monomial(k): c for k, c in res.items()}
    return Algebra(basis, prods, name=f"{G.name}[deg<={d}]", out_of_window=flags)


def build_hfl(n: int, d: int = 0) -> GradedAlgebra:
    """HFL_n: H_n acting on F[x_1..x_k] by the Fock action, [H_n, I] = 0."""
    if n < 3 or n % 2 == 0:
        raise BadDimension(f"HFL_n needs odd n >= 3, got {n}")
    if d < 0:
        raise ValueError("degree must be >= 0")
    k = (n - 1) // 2
    return GradedAlgebra(
        name=f"HFL{n}",
        generators=heisenberg_labels(k),
        nvars=k,
        gen_products=_heisenberg_products(k),
        action=fock_action,
        degree=d,
        summands=[heisenberg_labels(k)],
    )


def build_generalized_hfl(ks: Sequence[int], d: int = 0) -> GradedAlgebra:
    """Direct sum of H_{2k_i+1} acting on F[x_1..x_n], n = sum(ks).

    Summand i's j-th pair acts through variable ``k_1 + ... + k_{i-1} + j``.
    Generator labels carry a ``@i`` suffix when there are two or more summands.
    """
    ks = list(ks)
    if not ks or any(k < 1 for k in ks):
        raise BadDimension(f"every summand needs k >= 1, got {ks}")
    if len(ks) == 1:
        G = build_hfl(2 * ks[0] + 1, d)
        return G
    offsets = [sum(ks[:i]) for i in range(len(ks))]
    gens: List[str] = []
    prods: Dict[Tuple[str, str], Element] = {}
    summands = []
    var_of: Dict[str, Tuple[str, int]] = {}
    for s, (k, off) in enumerate(zip(ks, offsets), start=1):
        suf = f"@{s}"
        labs = heisenberg_labels(k, suf)
        summands.append(labs)
        gens += labs
        prods.update(_heisenberg_products(k, suf))
        var_of["one" + suf] = ("one", -1)
        for j in range(1, k + 1):
            var_of[f"X{j}{suf}"] = ("X", off + j - 1)
            var_of[f"D{j}{suf}"] = ("D", off + j - 1)

    def action(p: Polynomial, g: str) -> Polynomial:
        if g not in var_of:
            raise UnknownGenerator(g)
        kind, i = var_of[g]
        if kind == "one":
            return p
        return p.mul_var(i) if kind == "X" else p.diff(i)

    name = "HFL_" + ",".join(str(2 * k + 1) for k in ks)
    return GradedAlgebra(name, gens, sum(ks), prods, action, d, summands)


def hfl_normalizing_change(A: Algebra, k: int) -> Matrix:
    """Change of basis X_i' = X_i - p_i, D_i' = D_i - q_i, one' = one - r.

    Here p_i = [X_i, one], q_i = [D_i, one], r = [one, one] are read off a
    materialized table whose generator part is ``one, X1, D1, ...``; after the
    change these three families of products vanish.
    """
    gens = heisenberg_labels(k)
    ent = {(j, j): Fraction(1) for j in range(A.dim)}
    for g in gens:
        col = A.index[g]
        for lab, c in A.product(g, "one").items():
            if lab in gens:
                raise ValueError(f"[{g}, one] has a generator component; not an HFL-type table")
            ent[(A.index[lab], col)] = ent.get((A.index[lab], col), 0) - c
    return Matrix(A.dim, A.dim, ent)
