"""Deformed Fock actions of H_3 on F[x].

Each action keeps two of the three Fock rules and replaces the third by a
linear map ``Omega`` on F[x]:

* action 1 replaces the action of ``one``,
* action 2 replaces the action of ``X1``,
* action 3 replaces the action of ``D1``.

:func:`module_axiom_check` tests the right-module law
``(p.a).b - (p.b).a = p.[a,b]`` on monomials, which is exactly what the
Leibniz identity demands of the resulting algebra ``H_3 + F[x]``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb
from typing import Callable, Dict, List, Mapping, Optional, Sequence, Tuple, Union

from .exact import Fraction, as_scalar
from .fock import GradedAlgebra, Polynomial, UnknownGenerator
from .heisenberg import _heisenberg_products, heisenberg_labels

__all__ = [
    "Arbitrary",
    "AxiomReport",
    "Identity",
    "MissingEntry",
    "OmegaSpec",
    "Psi2Sequence",
    "Psi3Polynomial",
    "PsiAction",
    "build_psi2_algebra",
    "build_psi3_algebra",
    "module_axiom_check",
    "omega_eval",
    "psi_act",
]

GENERATORS = ("one", "X1", "D1")
# [a, b] in H_3 as a map generator -> coefficient
_H3 = {("X1", "D1"): {"one": 1}, ("D1", "X1"): {"one": -1}}


class MissingEntry(KeyError):
    pass


def _x(i: int, c=1) -> Polynomial:
    return Polynomial(1, {(i,): c})


class OmegaSpec:
    """Base class for the data defining the deformed map Omega."""

    def __call__(self, i: int) -> Polynomial:
        raise NotImplementedError


@dataclass
class Identity(OmegaSpec):
    def __call__(self, i: int) -> Polynomial:
        return _x(i)


class Psi2Sequence(OmegaSpec):
    """Omega(x^i) = x^(i+1) + sum_{k<=i} c_k C(i,k) x^(i-k).

    ``c`` is either a finite sequence (entries past its end are zero) or a
    function ``k -> c_k``; values are computed on demand and cached.
    """

    def __init__(self, c: Union[Sequence, Callable[[int], object]]):
        self._source = c
        self._cache: Dict[int, Fraction] = {}

    def coeff(self, k: int) -> Fraction:
        if k not in self._cache:
            src = self._source
            if callable(src):
                v = src(k)
            else:
                v = src[k] if k < len(src) else 0
            self._cache[k] = as_scalar(v)
        return self._cache[k]

    def __call__(self, i: int) -> Polynomial:
        terms = {(i + 1,): Fraction(1)}
        for k in range(i + 1):
            ck = self.coeff(k)
            if ck:
                terms[(i - k,)] = terms.get((i - k,), 0) + ck * comb(i, k)
        return Polynomial(1, terms)

    def __repr__(self):
        return f"Psi2Sequence({self._source!r})"


@dataclass
class Psi3Polynomial(OmegaSpec):
    """Omega(x^i) = i x^(i-1) + x^i c(x), with 0 * x^(-1) = 0."""

    c: Polynomial = field(default_factory=lambda: Polynomial(1))

    def __post_init__(self):
        if not isinstance(self.c, Polynomial):
            self.c = Polynomial.from_coeffs(self.c)
        if self.c.nvars != 1:
            raise ValueError("c(x) must be univariate")

    def __call__(self, i: int) -> Polynomial:
        return _x(i).diff(0) + _x(i) * self.c


@dataclass
class Arbitrary(OmegaSpec):
    """Explicit table i -> Omega(x^i); exponents not in the table go to ``base``."""

    table: Mapping[int, Polynomial]
    base: Optional[OmegaSpec] = None

    def __call__(self, i: int) -> Polynomial:
        if i in self.table:
            return self.table[i]
        if self.base is None:
            raise MissingEntry(i)
        return self.base(i)


def omega_eval(spec: OmegaSpec, i: int) -> Polynomial:
    if i < 0:
        raise ValueError("exponent must be >= 0")
    return spec(i)


def _apply_omega(spec: OmegaSpec, p: Polynomial) -> Polynomial:
    out = Polynomial(1)
    for (i,), c in p.terms.items():
        out = out + omega_eval(spec, i).scale(c)
    return out


@dataclass
class PsiAction:
    which: int
    omega: OmegaSpec

    def __post_init__(self):
        if self.which not in (1, 2, 3):
            raise ValueError(f"action index must be 1, 2 or 3, got {self.which}")


_SLOT = {1: "one", 2: "X1", 3: "D1"}


def psi_act(act: PsiAction, p: Polynomial, g: str) -> Polynomial:
    if g not in GENERATORS:
        raise UnknownGenerator(g)
    if p.nvars != 1:
        raise ValueError("deformed actions live on F[x] in one variable")
    if g == _SLOT[act.which]:
        return _apply_omega(act.omega, p)
    if g == "one":
        return p
    if g == "X1":
        return p.mul_var(0)
    return p.diff(0)


def _act_vec(act: PsiAction, p: Polynomial, vec: Mapping[str, object]) -> Polynomial:
    out = Polynomial(1)
    for g, c in vec.items():
        out = out + psi_act(act, p, g).scale(c)
    return out


@dataclass
class AxiomReport:
    """``failures`` holds (exponent i, (a, b), residual polynomial)."""

    ok: bool
    dmax: int
    checked: int
    failures: List[Tuple[int, Tuple[str, str], Polynomial]]

    def __bool__(self):
        return self.ok

    def first_failure(self):
        return self.failures[0] if self.failures else None


def module_axiom_check(act: PsiAction, dmax: int, max_failures: Optional[int] = None) -> AxiomReport:
    """Check (x^i.a).b - (x^i.b).a = x^i.[a,b] for i <= dmax and all ordered pairs a != b."""
    if dmax < 0:
        raise ValueError("dmax must be >= 0")
    failures = []
    checked = 0
    for i in range(dmax + 1):
        m = _x(i)
        for a in GENERATORS:
            for b in GENERATORS:
                if a == b:
                    continue
                checked += 1
                lhs = psi_act(act, psi_act(act, m, a), b) - psi_act(act, psi_act(act, m, b), a)
                rhs = _act_vec(act, m, _H3.get((a, b), {}))
                r = lhs - rhs
                if r:
                    failures.append((i, (a, b), r))
                    if max_failures is not None and len(failures) >= max_failures:
                        return AxiomReport(False, dmax, checked, failures)
    return AxiomReport(not failures, dmax, checked, failures)


def _psi_algebra(act: PsiAction, d: int, name: str) -> GradedAlgebra:
    if d < 0:
        raise ValueError("degree must be >= 0")
    return GradedAlgebra(
        name=name,
        generators=heisenberg_labels(1),
        nvars=1,
        gen_products=_heisenberg_products(1),
        action=lambda p, g: psi_act(act, p, g),
        degree=d,
        summands=[heisenberg_labels(1)],
    )


def build_psi2_algebra(c, d: int = 0) -> GradedAlgebra:
    """H_3 + F[x] with [x^i, X1] = Omega(x^i) for the sequence ``c``."""
    spec = c if isinstance(c, Psi2Sequence) else Psi2Sequence(c)
    return _psi_algebra(PsiAction(2, spec), d, "psi2")


def build_psi3_algebra(c, d: int = 0) -> GradedAlgebra:
    """H_3 + F[x] with [x^i, D1] = i x^(i-1) + x^i c(x)."""
    spec = c if isinstance(c, Psi3Polynomial) else Psi3Polynomial(c)
    return _psi_algebra(PsiAction(3, spec), d, "psi3")
