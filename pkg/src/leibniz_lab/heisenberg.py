"""Heisenberg Lie algebras: construction, direct sums and recognition."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from .algebra import Algebra, bracket, fingerprint, leibniz_check, lower_central_series
from .exact import Fraction, Matrix

__all__ = [
    "BadDimension",
    "DirectSumStructure",
    "HeisenbergDetection",
    "detect_heisenberg",
    "direct_sum",
    "heisenberg_labels",
    "make_heisenberg",
]


class BadDimension(ValueError):
    pass


def heisenberg_labels(k: int, suffix: str = "") -> List[str]:
    """``one, X1, D1, ..., Xk, Dk`` (central element first)."""
    labels = ["one" + suffix]
    for i in range(1, k + 1):
        labels += [f"X{i}{suffix}", f"D{i}{suffix}"]
    return labels


def _heisenberg_products(k: int, suffix: str = "") -> Dict[Tuple[str, str], Dict[str, Fraction]]:
    one = "one" + suffix
    prods = {}
    for i in range(1, k + 1):
        x, d = f"X{i}{suffix}", f"D{i}{suffix}"
        prods[(x, d)] = {one: Fraction(1)}
        prods[(d, x)] = {one: Fraction(-1)}
    return prods


def make_heisenberg(n: int, suffix: str = "") -> Algebra:
    """H_n, n = 2k + 1, with [X_i, D_i] = one = -[D_i, X_i]."""
    if n < 3 or n % 2 == 0:
        raise BadDimension(f"Heisenberg dimension must be odd and >= 3, got {n}")
    k = (n - 1) // 2
    return Algebra(heisenberg_labels(k, suffix), _heisenberg_products(k, suffix), name=f"H{n}")


@dataclass
class DirectSumStructure:
    sizes: List[int]
    bases: List[List[str]]


def direct_sum(algebras: Sequence[Algebra], name: str = "") -> Tuple[Algebra, DirectSumStructure]:
    """Block-diagonal sum.  Labels are suffixed ``@i`` (1-based) only if they collide."""
    if not algebras:
        raise ValueError("need at least one summand")
    seen: Dict[str, int] = {}
    for A in algebras:
        for b in A.basis:
            seen[b] = seen.get(b, 0) + 1
    clash = any(v > 1 for v in seen.values())
    basis: List[str] = []
    prods = {}
    flags = []
    bases = []
    for s, A in enumerate(algebras, start=1):
        ren = {b: (f"{b}@{s}" if clash else b) for b in A.basis}
        B = A.relabel(ren)
        basis += B.basis
        bases.append(list(B.basis))
        prods.update(B.products)
        flags += list(B.out_of_window)
    nm = name or "+".join(A.name or "?" for A in algebras)
    return (
        Algebra(basis, prods, name=nm, out_of_window=flags),
        DirectSumStructure([A.dim for A in algebras], bases),
    )


@dataclass
class HeisenbergDetection:
    """Result of :func:`detect_heisenberg`.  Falsy when the algebra was rejected.

    ``matrix`` has as columns the old coordinates of the canonical basis
    ``labels`` (``one, X1, D1, ...``), so ``change_of_basis(A, matrix, labels)``
    reproduces :func:`make_heisenberg` exactly.
    """

    k: Optional[int] = None
    matrix: Optional[Matrix] = None
    labels: List[str] = field(default_factory=list)
    reason: Optional[str] = None

    def __bool__(self):
        return self.reason is None


def _sub(u, v, s=1):
    out = dict(u)
    for key, c in v.items():
        nv = out.get(key, 0) - s * c
        if nv:
            out[key] = nv
        else:
            out.pop(key, None)
    return out


def detect_heisenberg(A: Algebra) -> HeisenbergDetection:
    if A.out_of_window:
        return HeisenbergDetection(reason="NotLie")
    if not A.is_antisymmetric() or not leibniz_check(A):
        return HeisenbergDetection(reason="NotLie")
    series = lower_central_series(A)
    derived = series[1] if len(series) > 1 else series[0]
    fp = fingerprint(A)
    if fp.center != 1 or derived.dim != 1:
        return HeisenbergDetection(reason="CenterDim")
    z = derived.basis()[0]
    # center == [L, L] iff z is central (both are one-dimensional)
    for b in A.basis:
        if bracket(A, z, b) or bracket(A, b, z):
            return HeisenbergDetection(reason="CenterDim")
    zlab = next(iter(z))
    zc = z[zlab]

    def omega(u, v) -> Fraction:
        w = bracket(A, u, v)
        return w.get(zlab, Fraction(0)) / zc

    # complement of span{z}: the basis vectors other than z's pivot label
    work = [{b: Fraction(1)} for b in A.basis if b != zlab]
    pairs = []
    while work:
        u = None
        for i, cand in enumerate(work):
            partner = next((j for j, w in enumerate(work) if j != i and omega(cand, w) != 0), None)
            if partner is not None:
                u, v = cand, work[partner]
                work = [w for j, w in enumerate(work) if j not in (i, partner)]
                break
        if u is None:
            return HeisenbergDetection(reason="DegenerateForm")
        s = omega(u, v)
        v = {key: c / s for key, c in v.items()}
        new_work = []
        for w in work:
            a, b = omega(w, v), omega(w, u)
            w = _sub(w, u, a)
            w = _sub(w, v, -b)
            new_work.append(w)
        work = new_work
        pairs.append((u, v))
    k = len(pairs)
    labels = ["one"]
    cols = [z]
    for i, (u, v) in enumerate(pairs, start=1):
        labels += [f"X{i}", f"D{i}"]
        cols += [u, v]
    ent = {}
    for j, col in enumerate(cols):
        for key, c in col.items():
            ent[(A.index[key], j)] = c
    return HeisenbergDetection(k=k, matrix=Matrix(A.dim, A.dim, ent), labels=labels)
