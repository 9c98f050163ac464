"""Exact rational scalars, sparse matrices and linear systems.

Every scalar in the package is a :class:`fractions.Fraction` (always in lowest
terms with a positive denominator).  The only exception is
:class:`QuadraticSurd`, used when a normalization needs ``sqrt(d)`` for a
non-square rational ``d``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Hashable, Iterable, List, Mapping, Sequence, Tuple

__all__ = [
    "Fraction",
    "Inconsistent",
    "LinearSystem",
    "Matrix",
    "QuadraticSurd",
    "SingularMatrix",
    "SolutionSpace",
    "as_scalar",
    "format_scalar",
    "parse_scalar",
    "rational_sqrt",
    "rref",
    "rref_rows",
    "solve_homogeneous",
]


class Inconsistent(ValueError):
    """A linear system forces ``0 = c`` with ``c != 0``."""


class SingularMatrix(ValueError):
    pass


def parse_scalar(text) -> Fraction:
    """Parse ``"p/q"``, ``"p"`` or an int into a Fraction.  Floats are rejected."""
    if isinstance(text, bool):
        raise TypeError("booleans are not scalars")
    if isinstance(text, float):
        raise TypeError(f"refusing float {text!r}: pass an exact 'p/q' string")
    if isinstance(text, (int, Fraction)):
        return Fraction(text)
    s = str(text).strip()
    if not s or any(ch in s for ch in ".eE"):
        raise ValueError(f"not an exact rational: {text!r}")
    return Fraction(s)


def format_scalar(x) -> str:
    x = as_scalar(x)
    if isinstance(x, QuadraticSurd):
        return str(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def as_scalar(x):
    """Coerce to an exact scalar; surds with zero irrational part collapse to Fraction."""
    if isinstance(x, QuadraticSurd):
        return x.a if x.b == 0 else x
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not scalars")
    if isinstance(x, int):
        return Fraction(x)
    return parse_scalar(x)


def _isqrt_exact(n: int):
    if n < 0:
        return None
    r = math.isqrt(n)
    return r if r * r == n else None


def rational_sqrt(q) -> Fraction | None:
    """Exact square root of a rational if it is rational, else ``None``."""
    q = Fraction(q)
    if q < 0:
        return None
    num = _isqrt_exact(q.numerator)
    den = _isqrt_exact(q.denominator)
    if num is None or den is None:
        return None
    return Fraction(num, den)


@dataclass(frozen=True)
class QuadraticSurd:
    """``a + b*sqrt(d)`` with rational a, b and a fixed non-square rational d.

    Only the field operations needed by change-of-basis verification are
    provided.  Mixing surds with different radicands raises ``ValueError``.
    """

    a: Fraction
    b: Fraction
    d: Fraction

    def __post_init__(self):
        object.__setattr__(self, "a", Fraction(self.a))
        object.__setattr__(self, "b", Fraction(self.b))
        object.__setattr__(self, "d", Fraction(self.d))

    @classmethod
    def sqrt(cls, d) -> "QuadraticSurd | Fraction":
        d = Fraction(d)
        r = rational_sqrt(d)
        if r is not None:
            return r
        if d == 0:
            return Fraction(0)
        return cls(Fraction(0), Fraction(1), d)

    def _coerce(self, other):
        if isinstance(other, QuadraticSurd):
            if other.d != self.d:
                raise ValueError("surds with different radicands")
            return other
        if isinstance(other, (int, Fraction)):
            return QuadraticSurd(Fraction(other), Fraction(0), self.d)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return QuadraticSurd(self.a + o.a, self.b + o.b, self.d)

    __radd__ = __add__

    def __neg__(self):
        return QuadraticSurd(-self.a, -self.b, self.d)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return QuadraticSurd(self.a - o.a, self.b - o.b, self.d)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return QuadraticSurd(
            self.a * o.a + self.b * o.b * self.d, self.a * o.b + self.b * o.a, self.d
        )

    __rmul__ = __mul__

    def conjugate(self):
        return QuadraticSurd(self.a, -self.b, self.d)

    def norm(self) -> Fraction:
        return self.a * self.a - self.b * self.b * self.d

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        n = o.norm()
        if n == 0:
            raise ZeroDivisionError("division by zero surd")
        return self * o.conjugate() * QuadraticSurd(1 / n, Fraction(0), self.d)

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o / self

    def __eq__(self, other):
        if isinstance(other, QuadraticSurd):
            return (self.a, self.b) == (other.a, other.b) and (
                self.b == 0 or self.d == other.d
            )
        if isinstance(other, (int, Fraction)):
            return self.b == 0 and self.a == other
        return NotImplemented

    def __hash__(self):
        if self.b == 0:
            return hash(self.a)
        return hash((self.a, self.b, self.d))

    def __bool__(self):
        return self.a != 0 or self.b != 0

    def __str__(self):
        return f"{format_scalar(self.a)}+{format_scalar(self.b)}*sqrt({format_scalar(self.d)})"


# ---------------------------------------------------------------------------
# sparse rows and reduced row echelon form
# ---------------------------------------------------------------------------

SparseRow = Dict[int, object]


def _axpy(row: SparseRow, scale, other: SparseRow) -> None:
    """row += scale * other, dropping exact zeros."""
    for c, v in other.items():
        nv = row.get(c, 0) + scale * v
        if nv:
            row[c] = nv
        else:
            row.pop(c, None)


class _Echelon:
    """Incrementally maintained reduced row echelon basis of a row space.

    Because the RREF of a row space is unique, the result does not depend on
    the order in which rows are added.
    """

    def __init__(self):
        self.pivots: Dict[int, SparseRow] = {}

    def reduce(self, row: SparseRow) -> SparseRow:
        row = {c: v for c, v in row.items() if v}
        for c in [c for c in row if c in self.pivots]:
            v = row.get(c)
            if v:
                _axpy(row, -v, self.pivots[c])
        return row

    def add(self, row: SparseRow) -> bool:
        row = self.reduce(row)
        if not row:
            return False
        lead = min(row)
        inv = 1 / row[lead]
        row = {c: v * inv for c, v in row.items()}
        for prow in self.pivots.values():
            v = prow.get(lead)
            if v:
                _axpy(prow, -v, row)
        self.pivots[lead] = row
        return True

    def rows(self) -> List[SparseRow]:
        return [self.pivots[c] for c in sorted(self.pivots)]


def rref_rows(rows: Iterable[Mapping[int, object]]) -> Tuple[List[SparseRow], List[int]]:
    """RREF of sparse rows (dicts column -> scalar).  Returns (rows, pivot columns)."""
    ech = _Echelon()
    for r in rows:
        ech.add(dict(r))
    piv = sorted(ech.pivots)
    return [ech.pivots[c] for c in piv], piv


@dataclass(frozen=True)
class Matrix:
    """Sparse exact matrix; absent entries are zero."""

    rows: int
    cols: int
    entries: Mapping[Tuple[int, int], object] = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for (i, j), v in self.entries.items():
            if not (0 <= i < self.rows and 0 <= j < self.cols):
                raise IndexError(f"entry ({i},{j}) outside {self.rows}x{self.cols}")
            v = as_scalar(v)
            if v:
                clean[(i, j)] = v
        object.__setattr__(self, "entries", clean)

    @classmethod
    def from_dense(cls, data: Sequence[Sequence]) -> "Matrix":
        r = len(data)
        c = len(data[0]) if r else 0
        return cls(r, c, {(i, j): v for i, row in enumerate(data) for j, v in enumerate(row)})

    @classmethod
    def identity(cls, n: int) -> "Matrix":
        return cls(n, n, {(i, i): 1 for i in range(n)})

    def __getitem__(self, ij):
        return self.entries.get(ij, Fraction(0))

    def to_dense(self) -> List[List]:
        out = [[Fraction(0)] * self.cols for _ in range(self.rows)]
        for (i, j), v in self.entries.items():
            out[i][j] = v
        return out

    def row(self, i: int) -> SparseRow:
        return {j: v for (r, j), v in self.entries.items() if r == i}

    def column(self, j: int) -> SparseRow:
        return {i: v for (i, c), v in self.entries.items() if c == j}

    def __matmul__(self, other: "Matrix") -> "Matrix":
        if self.cols != other.rows:
            raise ValueError("shape mismatch")
        by_row: Dict[int, Dict[int, object]] = {}
        for (k, j), v in other.entries.items():
            by_row.setdefault(k, {})[j] = v
        out: Dict[Tuple[int, int], object] = {}
        for (i, k), a in self.entries.items():
            for j, b in by_row.get(k, {}).items():
                out[(i, j)] = out.get((i, j), 0) + a * b
        return Matrix(self.rows, other.cols, out)

    def __add__(self, other: "Matrix") -> "Matrix":
        out = dict(self.entries)
        for k, v in other.entries.items():
            out[k] = out.get(k, 0) + v
        return Matrix(self.rows, self.cols, out)

    def __sub__(self, other: "Matrix") -> "Matrix":
        return self + other.scale(-1)

    def scale(self, s) -> "Matrix":
        return Matrix(self.rows, self.cols, {k: s * v for k, v in self.entries.items()})

    def transpose(self) -> "Matrix":
        return Matrix(self.cols, self.rows, {(j, i): v for (i, j), v in self.entries.items()})

    def rank(self) -> int:
        return len(rref(self)[1])

    def inverse(self) -> "Matrix":
        if self.rows != self.cols:
            raise SingularMatrix("non-square matrix")
        n = self.rows
        aug = []
        for i in range(n):
            r = self.row(i)
            r[n + i] = Fraction(1)
            aug.append(r)
        red, piv = rref_rows(aug)
        if piv[:n] != list(range(n)) or len(piv) < n:
            raise SingularMatrix("matrix is not invertible")
        return Matrix(n, n, {(i, c - n): v for i, r in enumerate(red) for c, v in r.items() if c >= n})

    def __eq__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        return (self.rows, self.cols) == (other.rows, other.cols) and self.entries == other.entries

    def __hash__(self):
        return hash((self.rows, self.cols, frozenset(self.entries.items())))


def rref(m: Matrix) -> Tuple[Matrix, List[int]]:
    """Reduced row echelon form; zero rows are dropped to the bottom."""
    red, piv = rref_rows(m.row(i) for i in range(m.rows))
    return Matrix(m.rows, m.cols, {(i, j): v for i, r in enumerate(red) for j, v in r.items()}), piv


# ---------------------------------------------------------------------------
# linear systems
# ---------------------------------------------------------------------------


@dataclass
class LinearSystem:
    """Rows ``sum(coeffs[v] * v) = constant`` over declared variables."""

    variables: List[Hashable]
    rows: List[Tuple[Dict[Hashable, Fraction], Fraction]] = field(default_factory=list)

    def __post_init__(self):
        self.variables = list(self.variables)
        if len(set(self.variables)) != len(self.variables):
            raise ValueError("duplicate variable labels")
        known = set(self.variables)
        for coeffs, _ in self.rows:
            bad = set(coeffs) - known
            if bad:
                raise KeyError(f"undeclared variables {sorted(map(str, bad))}")

    def add_row(self, coeffs: Mapping[Hashable, object], constant=0) -> None:
        bad = set(coeffs) - set(self.variables)
        if bad:
            raise KeyError(f"undeclared variables {sorted(map(str, bad))}")
        self.rows.append(({k: as_scalar(v) for k, v in coeffs.items() if v}, as_scalar(constant)))

    def residual(self, values: Mapping[Hashable, object]) -> List:
        return [sum((c * values[v] for v, c in co.items()), Fraction(0)) - k for co, k in self.rows]


@dataclass
class SolutionSpace:
    """Affine solution set: pivot variables as affine expressions in free ones.

    ``expressions[v]`` is ``(constant, {free_var: coefficient})``; free
    variables map to themselves.
    """

    variables: List[Hashable]
    free: List[Hashable]
    pivots: List[Hashable]
    expressions: Dict[Hashable, Tuple[Fraction, Dict[Hashable, Fraction]]]
    rank: int

    def evaluate(self, free_values: Mapping[Hashable, object]) -> Dict[Hashable, Fraction]:
        missing = [f for f in self.free if f not in free_values]
        if missing:
            raise KeyError(f"missing free values {missing}")
        out = {}
        for v in self.variables:
            const, lin = self.expressions[v]
            out[v] = const + sum((c * as_scalar(free_values[f]) for f, c in lin.items()), Fraction(0))
        return out

    def basis(self) -> List[Dict[Hashable, Fraction]]:
        """One homogeneous solution per free variable (that variable set to 1)."""
        out = []
        for f in self.free:
            vals = {g: Fraction(int(g == f)) for g in self.free}
            part = self.evaluate(vals)
            zero = self.evaluate({g: 0 for g in self.free})
            out.append({v: part[v] - zero[v] for v in self.variables})
        return out


def solve_homogeneous(system: LinearSystem) -> SolutionSpace:
    """Solve exactly; raises :class:`Inconsistent` if the constants contradict.

    Pivoting is leftmost in declared variable order, so variables declared
    last are the ones preferred as free parameters.
    """
    idx = {v: i for i, v in enumerate(system.variables)}
    n = len(system.variables)
    rows = []
    for coeffs, const in system.rows:
        r = {idx[v]: c for v, c in coeffs.items() if c}
        if const:
            r[n] = const
        if r:
            rows.append(r)
    red, piv = rref_rows(rows)
    if piv and piv[-1] == n:
        raise Inconsistent("system forces 0 = nonzero")
    piv_set = set(piv)
    free = [v for i, v in enumerate(system.variables) if i not in piv_set]
    exprs: Dict[Hashable, Tuple[Fraction, Dict[Hashable, Fraction]]] = {
        v: (Fraction(0), {v: Fraction(1)}) for v in free
    }
    for r, p in zip(red, piv):
        const = r.get(n, Fraction(0))
        lin = {system.variables[c]: -v for c, v in r.items() if c != p and c != n}
        exprs[system.variables[p]] = (const, lin)
    return SolutionSpace(
        variables=list(system.variables),
        free=free,
        pivots=[system.variables[p] for p in piv],
        expressions=exprs,
        rank=len(piv),
    )
