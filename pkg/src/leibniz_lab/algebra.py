"""Finite-dimensional algebras given by structure constants.

The Leibniz identity is checked in its *right* form

    [[y, z], x] = [[y, x], z] + [y, [z, x]]

i.e. right multiplications are derivations.  Left/right conventions differ
across the literature, so this orientation is fixed here and nowhere else.
"""

from __future__ import annotations

import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from .exact import Matrix, _Echelon, as_scalar, format_scalar, parse_scalar

Vector = Dict[str, object]

__all__ = [
    "Algebra",
    "Fingerprint",
    "LeibnizReport",
    "NotAnIdeal",
    "OutOfWindow",
    "Subspace",
    "UnknownLabel",
    "algebra_from_json",
    "algebra_to_json",
    "bracket",
    "change_of_basis",
    "dumps_algebra",
    "fingerprint",
    "leibniz_check",
    "loads_algebra",
    "quotient",
    "squares_ideal",
    "squares_span",
]


class UnknownLabel(KeyError):
    pass


class NotAnIdeal(ValueError):
    pass


class OutOfWindow(ArithmeticError):
    """A product outside a truncated algebra's degree window was needed."""


def _clean(vec: Mapping) -> dict:
    out = {}
    for k, v in vec.items():
        v = as_scalar(v)
        if v:
            out[k] = v
    return out


class Algebra:
    """Basis labels plus a sparse bilinear product table.

    ``products[(a, b)]`` is the sparse vector ``[a, b]``; absent pairs are zero.
    ``out_of_window`` lists pairs whose product is *unknown* because it leaves
    a truncation window; evaluating such a product raises :class:`OutOfWindow`.
    """

    def __init__(
        self,
        basis: Sequence[str],
        products: Mapping[Tuple[str, str], Mapping[str, object]],
        name: str = "",
        out_of_window: Iterable[Tuple[str, str]] = (),
    ):
        basis = tuple(basis)
        if len(set(basis)) != len(basis):
            raise ValueError("basis labels must be distinct")
        for lab in basis:
            if not isinstance(lab, str) or not lab:
                raise ValueError(f"bad label {lab!r}")
        self.basis = basis
        self.name = name
        self.index = {lab: i for i, lab in enumerate(basis)}
        prods = {}
        for (a, b), vec in products.items():
            for lab in (a, b, *vec):
                if lab not in self.index:
                    raise UnknownLabel(lab)
            vec = _clean(vec)
            if vec:
                prods[(a, b)] = vec
        self.products = prods
        flags = frozenset((a, b) for a, b in out_of_window)
        for a, b in flags:
            if a not in self.index or b not in self.index:
                raise UnknownLabel((a, b))
            if (a, b) in prods:
                raise ValueError(f"pair {(a, b)} is both defined and out of window")
        self.out_of_window = flags
        n = len(basis)
        self._table: List[Dict[int, Dict[int, object]]] = [dict() for _ in range(n)]
        for (a, b), vec in prods.items():
            self._table[self.index[a]][self.index[b]] = {self.index[k]: v for k, v in vec.items()}
        self._flags: List[frozenset] = [frozenset() for _ in range(n)]
        rows: Dict[int, set] = {}
        for a, b in flags:
            rows.setdefault(self.index[a], set()).add(self.index[b])
        for i, s in rows.items():
            self._flags[i] = frozenset(s)

    @property
    def dim(self) -> int:
        return len(self.basis)

    def __repr__(self):
        return f"Algebra({self.name or '?'}, dim={self.dim}, products={len(self.products)})"

    def __eq__(self, other):
        if not isinstance(other, Algebra):
            return NotImplemented
        return (
            self.basis == other.basis
            and self.products == other.products
            and self.out_of_window == other.out_of_window
        )

    def __getstate__(self):
        return {
            "basis": self.basis,
            "products": self.products,
            "name": self.name,
            "out_of_window": self.out_of_window,
        }

    def __setstate__(self, state):
        self.__init__(**state)

    def product(self, a: str, b: str) -> Vector:
        if a not in self.index or b not in self.index:
            raise UnknownLabel((a, b))
        if (a, b) in self.out_of_window:
            raise OutOfWindow((a, b))
        return dict(self.products.get((a, b), {}))

    def relabel(self, mapping: Mapping[str, str], name: Optional[str] = None) -> "Algebra":
        m = lambda s: mapping.get(s, s)  # noqa: E731
        return Algebra(
            [m(b) for b in self.basis],
            {(m(a), m(b)): {m(k): v for k, v in vec.items()} for (a, b), vec in self.products.items()},
            name=self.name if name is None else name,
            out_of_window=[(m(a), m(b)) for a, b in self.out_of_window],
        )

    def is_antisymmetric(self) -> bool:
        for a in self.basis:
            for b in self.basis:
                u = self.products.get((a, b), {})
                v = self.products.get((b, a), {})
                keys = set(u) | set(v)
                if any(u.get(k, 0) + v.get(k, 0) for k in keys):
                    return False
        return True

    # -- index-level helpers used by the hot loops ---------------------------

    def _vec(self, v) -> Dict[int, object]:
        if isinstance(v, str):
            v = {v: 1}
        out = {}
        for k, c in v.items():
            if k not in self.index:
                raise UnknownLabel(k)
            c = as_scalar(c)
            if c:
                out[self.index[k]] = c
        return out

    def _labels(self, v: Mapping[int, object]) -> Vector:
        return {self.basis[i]: c for i, c in sorted(v.items())}

    def _br(self, u: Mapping[int, object], v: Mapping[int, object]) -> Dict[int, object]:
        out: Dict[int, object] = {}
        table, flags = self._table, self._flags
        for i, cu in u.items():
            row, fl = table[i], flags[i]
            for j, cv in v.items():
                if j in fl:
                    raise OutOfWindow((self.basis[i], self.basis[j]))
                r = row.get(j)
                if r:
                    s = cu * cv
                    for k, c in r.items():
                        out[k] = out.get(k, 0) + s * c
        return {k: c for k, c in out.items() if c}

    def _br1(self, i: int, j: int) -> Dict[int, object]:
        if j in self._flags[i]:
            raise OutOfWindow((self.basis[i], self.basis[j]))
        return self._table[i].get(j, {})


def bracket(A: Algebra, u, v) -> Vector:
    """Bilinear extension of the product table.  ``u``/``v`` are label dicts or labels."""
    return A._labels(A._br(A._vec(u), A._vec(v)))


# ---------------------------------------------------------------------------
# Leibniz identity
# ---------------------------------------------------------------------------


@dataclass
class LeibnizReport:
    ok: bool
    checked: int
    skipped: int
    failures: List[Tuple[str, str, str, Vector]] = field(default_factory=list)
    policy: str = "full"

    def __bool__(self):
        return self.ok

    def summary(self) -> str:
        head = "pass" if self.ok else f"FAIL ({len(self.failures)} triples)"
        s = f"{head}, {self.checked} triples"
        if self.skipped:
            s += f" ({self.skipped} skipped out of window)"
        return s


def _residual(A: Algebra, a: int, b: int, c: int) -> Dict[int, object]:
    # [[a,b],c] - [[a,c],b] - [a,[b,c]]
    out: Dict[int, object] = {}
    ab = A._br1(a, b)
    if ab:
        for k, v in A._br({**ab}, {c: 1}).items():
            out[k] = out.get(k, 0) + v
    ac = A._br1(a, c)
    if ac:
        for k, v in A._br({**ac}, {b: 1}).items():
            out[k] = out.get(k, 0) - v
    bc = A._br1(b, c)
    if bc:
        for k, v in A._br({a: 1}, bc).items():
            out[k] = out.get(k, 0) - v
    return {k: v for k, v in out.items() if v}


def _check_chunk(args):
    A, firsts, allowed = args
    checked = skipped = 0
    failures = []
    for a in firsts:
        for b in allowed:
            for c in allowed:
                try:
                    r = _residual(A, a, b, c)
                except OutOfWindow:
                    skipped += 1
                    continue
                checked += 1
                if r:
                    failures.append((A.basis[a], A.basis[b], A.basis[c], A._labels(r)))
    return checked, skipped, failures


def default_workers() -> int:
    env = os.environ.get("LEIBNIZ_LAB_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return os.cpu_count() or 1


def leibniz_check(
    A: Algebra,
    labels: Optional[Sequence[str]] = None,
    workers: int = 1,
    max_failures: Optional[int] = None,
) -> LeibnizReport:
    """Check the right Leibniz identity on every ordered triple of basis elements.

    ``labels`` restricts the triples to a subset of the basis.  Triples whose
    evaluation needs an out-of-window product are skipped and counted.
    """
    allowed = [A.index[l] for l in (labels if labels is not None else A.basis)]
    if workers > 1 and len(allowed) ** 3 > 20000:
        chunks = [allowed[i::workers] for i in range(workers)]
        with ProcessPoolExecutor(max_workers=workers) as ex:
            parts = list(ex.map(_check_chunk, [(A, ch, allowed) for ch in chunks]))
        checked = sum(p[0] for p in parts)
        skipped = sum(p[1] for p in parts)
        order = {l: i for i, l in enumerate(A.basis)}
        failures = sorted(
            (f for p in parts for f in p[2]), key=lambda f: (order[f[0]], order[f[1]], order[f[2]])
        )
    else:
        checked, skipped, failures = _check_chunk((A, allowed, allowed))
    if max_failures is not None:
        failures = failures[:max_failures]
    policy = "in-window" if (A.out_of_window or labels is not None) else "full"
    return LeibnizReport(not failures, checked, skipped, failures, policy)


# ---------------------------------------------------------------------------
# subspaces
# ---------------------------------------------------------------------------


class Subspace:
    """Subspace of an algebra, stored as its reduced row echelon basis."""

    def __init__(self, ambient: Sequence[str], vectors: Iterable[Mapping[str, object]] = ()):
        self.ambient = tuple(ambient)
        self._index = {l: i for i, l in enumerate(self.ambient)}
        self._ech = _Echelon()
        for v in vectors:
            self._ech.add(self._coords(v))

    def _coords(self, v) -> Dict[int, object]:
        if isinstance(v, str):
            v = {v: 1}
        out = {}
        for k, c in v.items():
            if k not in self._index:
                raise UnknownLabel(k)
            c = as_scalar(c)
            if c:
                out[self._index[k]] = c
        return out

    def add(self, v) -> bool:
        return self._ech.add(self._coords(v))

    @property
    def dim(self) -> int:
        return len(self._ech.pivots)

    @property
    def pivots(self) -> List[str]:
        return [self.ambient[i] for i in sorted(self._ech.pivots)]

    def basis(self) -> List[Vector]:
        return [{self.ambient[i]: c for i, c in sorted(r.items())} for r in self._ech.rows()]

    def contains(self, v) -> bool:
        return not self._ech.reduce(self._coords(v))

    def reduce(self, v) -> Vector:
        """Normal form of ``v`` modulo the subspace (zero at every pivot label)."""
        return {self.ambient[i]: c for i, c in sorted(self._ech.reduce(self._coords(v)).items())}

    def complement_labels(self) -> List[str]:
        piv = set(self._ech.pivots)
        return [l for i, l in enumerate(self.ambient) if i not in piv]

    def __eq__(self, other):
        if not isinstance(other, Subspace):
            return NotImplemented
        return self.ambient == other.ambient and self.basis() == other.basis()

    def __le__(self, other: "Subspace") -> bool:
        return all(other.contains(v) for v in self.basis())

    def __repr__(self):
        return f"Subspace(dim={self.dim}, pivots={self.pivots})"


def squares_span(A: Algebra) -> Subspace:
    """span{[v, v]} via polarization: [b_i, b_i] and [b_i, b_j] + [b_j, b_i]."""
    S = Subspace(A.basis)
    n = A.dim
    for i in range(n):
        for j in range(i, n):
            try:
                v = dict(A._br1(i, j))
                if i != j:
                    for k, c in A._br1(j, i).items():
                        v[k] = v.get(k, 0) + c
            except OutOfWindow:
                continue
            if any(v.values()):
                S._ech.add(v)
    return S


def _close_two_sided(A: Algebra, S: Subspace) -> Subspace:
    """Smallest two-sided ideal containing S (out-of-window products ignored)."""
    n = A.dim
    queue = [dict(r) for r in S._ech.rows()]
    while queue:
        v = queue.pop()
        for b in range(n):
            for w in _safe_products(A, v, b):
                red = S._ech.reduce(w)
                if red:
                    S._ech.add(red)
                    queue.append(red)
    return S


def _safe_products(A: Algebra, v, b):
    out = []
    for u, w in ((v, {b: 1}), ({b: 1}, v)):
        try:
            out.append(A._br(u, w))
        except OutOfWindow:
            # drop only the offending terms; each summand is a basis product
            acc: Dict[int, object] = {}
            for i, ci in u.items():
                for j, cj in w.items():
                    try:
                        r = A._br1(i, j)
                    except OutOfWindow:
                        continue
                    for k, c in r.items():
                        acc[k] = acc.get(k, 0) + ci * cj * c
            out.append({k: c for k, c in acc.items() if c})
    return out


def squares_ideal(A: Algebra) -> Subspace:
    """Two-sided ideal generated by all squares [v, v]."""
    return _close_two_sided(A, squares_span(A))


def ideal_generated(A: Algebra, vectors: Iterable[Mapping[str, object]]) -> Subspace:
    return _close_two_sided(A, Subspace(A.basis, vectors))


def is_ideal(A: Algebra, J: Subspace) -> bool:
    for v in J.basis():
        vi = A._vec(v)
        for b in range(A.dim):
            for w in _safe_products(A, vi, b):
                if J._ech.reduce(w):
                    return False
    return True


def quotient(A: Algebra, J: Subspace, name: str = "") -> Algebra:
    """L/J on the non-pivot labels of J's echelon form."""
    if J.ambient != A.basis:
        raise ValueError("subspace lives in a different algebra")
    if not is_ideal(A, J):
        raise NotAnIdeal("subspace is not a two-sided ideal")
    keep = J.complement_labels()
    prods = {}
    flags = []
    for a in keep:
        for b in keep:
            if (a, b) in A.out_of_window:
                flags.append((a, b))
                continue
            red = J.reduce(A.products.get((a, b), {}))
            if red:
                prods[(a, b)] = red
    return Algebra(keep, prods, name=name or f"{A.name}/J", out_of_window=flags)


# ---------------------------------------------------------------------------
# change of basis
# ---------------------------------------------------------------------------


def change_of_basis(
    A: Algebra, g: Matrix, labels: Optional[Sequence[str]] = None, name: Optional[str] = None
) -> Algebra:
    """Table of A in the basis given by the columns of ``g``.

    Column j of ``g`` holds the old coordinates of new basis vector j, so
    the new structure constants are ``c'(u, v) = g^{-1} [g u, g v]``.
    """
    n = A.dim
    if g.rows != n or g.cols != n:
        raise ValueError(f"need a {n}x{n} matrix")
    ginv = g.inverse()  # raises SingularMatrix
    cols = [g.column(j) for j in range(n)]
    inv_cols: List[Dict[int, object]] = [ginv.column(k) for k in range(n)]
    labels = tuple(labels) if labels is not None else A.basis
    prods = {}
    for i in range(n):
        for j in range(n):
            w = A._br(cols[i], cols[j])
            if not w:
                continue
            new: Dict[int, object] = {}
            for k, c in w.items():
                for r, v in inv_cols[k].items():
                    new[r] = new.get(r, 0) + v * c
            new = {labels[r]: as_scalar(c) for r, c in sorted(new.items()) if c}
            if new:
                prods[(labels[i], labels[j])] = new
    return Algebra(labels, prods, name=A.name if name is None else name)


def matrix_from_vectors(A: Algebra, vectors: Sequence[Mapping[str, object]]) -> Matrix:
    """Matrix whose column j is the j-th vector (label dict) in A's basis."""
    ent = {}
    for j, v in enumerate(vectors):
        for k, c in v.items():
            if k not in A.index:
                raise UnknownLabel(k)
            ent[(A.index[k], j)] = c
    return Matrix(A.dim, len(vectors), ent)


# ---------------------------------------------------------------------------
# invariants
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Fingerprint:
    dim: int
    derived_dim: int
    lower_central: Tuple[int, ...]
    left_annihilator: int
    right_annihilator: int
    center: int
    squares_span: int
    squares_ideal: int
    symmetric_radical: int

    def as_dict(self) -> dict:
        return {
            "dim": self.dim,
            "derived_dim": self.derived_dim,
            "lower_central": list(self.lower_central),
            "left_annihilator": self.left_annihilator,
            "right_annihilator": self.right_annihilator,
            "center": self.center,
            "squares_span": self.squares_span,
            "squares_ideal": self.squares_ideal,
            "symmetric_radical": self.symmetric_radical,
        }


def _rank(rows: Iterable[Mapping]) -> int:
    ech = _Echelon()
    for r in rows:
        ech.add(dict(r))
    return len(ech.pivots)


def _map_rank(A: Algebra, image) -> int:
    """Rank of the linear map b_i -> image(i), images given as dicts keyed by anything."""
    keys: Dict[object, int] = {}
    rows = []
    for i in range(A.dim):
        img = image(i)
        rows.append({keys.setdefault(k, len(keys)): v for k, v in img.items() if v})
    return _rank(rows)


def lower_central_series(A: Algebra) -> List[Subspace]:
    series = [Subspace(A.basis, [{b: 1} for b in A.basis])]
    while True:
        cur = series[-1]
        nxt = Subspace(A.basis)
        for v in cur._ech.rows():
            for b in range(A.dim):
                w = A._br(v, {b: 1})
                if w:
                    nxt._ech.add(w)
        if nxt.dim == cur.dim:
            return series
        series.append(nxt)
        if nxt.dim == 0:
            return series


def fingerprint(A: Algebra) -> Fingerprint:
    """Isomorphism invariants, all from exact rank computations."""
    if A.out_of_window:
        raise OutOfWindow("fingerprints need a complete product table")
    n = A.dim
    series = lower_central_series(A)
    derived = series[1].dim if len(series) > 1 else series[0].dim

    def left(i):
        return {(j, k): c for j in range(n) for k, c in A._br1(i, j).items()}

    def right(i):
        return {(j, k): c for j in range(n) for k, c in A._br1(j, i).items()}

    def both(i):
        return {**{("l",) + k: v for k, v in left(i).items()}, **{("r",) + k: v for k, v in right(i).items()}}

    l3 = series[2] if len(series) > 2 else series[-1]

    def sym(i):
        out = {}
        for j in range(n):
            s = dict(A._br1(i, j))
            for k, c in A._br1(j, i).items():
                s[k] = s.get(k, 0) + c
            for k, c in l3._ech.reduce(s).items():
                out[(j, k)] = c
        return out

    return Fingerprint(
        dim=n,
        derived_dim=derived,
        lower_central=tuple(s.dim for s in series),
        left_annihilator=n - _map_rank(A, left),
        right_annihilator=n - _map_rank(A, right),
        center=n - _map_rank(A, both),
        squares_span=squares_span(A).dim,
        squares_ideal=squares_ideal(A).dim,
        symmetric_radical=n - _map_rank(A, sym),
    )


# ---------------------------------------------------------------------------
# JSON interchange
# ---------------------------------------------------------------------------


def algebra_to_json(A: Algebra) -> dict:
    idx = A.index
    prods = []
    for (a, b) in sorted(A.products, key=lambda p: (idx[p[0]], idx[p[1]])):
        vec = A.products[(a, b)]
        prods.append(
            {
                "left": a,
                "right": b,
                "result": [[k, format_scalar(vec[k])] for k in sorted(vec, key=idx.__getitem__)],
            }
        )
    doc = {"name": A.name, "basis": list(A.basis), "products": prods}
    if A.out_of_window:
        doc["out_of_window"] = [
            [a, b] for a, b in sorted(A.out_of_window, key=lambda p: (idx[p[0]], idx[p[1]]))
        ]
    return doc


def algebra_from_json(doc: Mapping) -> Algebra:
    basis = doc["basis"]
    prods: Dict[Tuple[str, str], Dict[str, object]] = {}
    for p in doc.get("products", []):
        key = (p["left"], p["right"])
        if key in prods:
            raise ValueError(f"duplicate product entry {key}")
        vec: Dict[str, object] = {}
        for lab, c in p["result"]:
            vec[lab] = vec.get(lab, 0) + parse_scalar(c)
        prods[key] = vec
    flags = [tuple(x) for x in doc.get("out_of_window", [])]
    return Algebra(basis, prods, name=doc.get("name", ""), out_of_window=flags)


def dumps_algebra(A: Algebra) -> str:
    return json.dumps(algebra_to_json(A), indent=2, ensure_ascii=False) + "\n"


def loads_algebra(text: str) -> Algebra:
    return algebra_from_json(json.loads(text))
