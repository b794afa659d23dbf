"""First Chern classes on E^n as formal sums of kernel-row divisors.

A nonzero row c in End(E)^n defines the divisor D_c = ker(c: E^n -> E).
A class is a multiset of such rows.  Degrees are intersection numbers:
n kernel divisors meet in norm(det) points (zero if the rows are
dependent), so the self-intersection of a class is n! times the sum over
n-subsets of its rows.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import comb, factorial, prod

from .matrix import MorphMatrix, ShapeError, pair_det
from .order import OrderDesc, OrderElem


@dataclass(frozen=True)
class KernelRow:
    entries: tuple  # tuple of OrderElem

    def __post_init__(self):
        if not any(self.entries):
            raise ValueError("kernel rows must be nonzero")

    @property
    def n(self) -> int:
        return len(self.entries)

    def pairs(self):
        return tuple((x.a, x.b) for x in self.entries)


class DivisorClass:
    """Multiset of KernelRow with positive multiplicities."""

    def __init__(self, n: int, order: OrderDesc, rows=()):
        self.n = n
        self.order = order
        self.rows: Counter = Counter()
        for row, mult in rows:
            self.add(row, mult)

    def add(self, row, mult: int = 1):
        if not isinstance(row, KernelRow):
            row = KernelRow(tuple(x if isinstance(x, OrderElem) else self.order.elem(x) for x in row))
        if row.n != self.n:
            raise ShapeError(f"row of length {row.n} in a class on E^{self.n}")
        if mult < 1:
            raise ValueError("multiplicities are positive")
        self.rows[row] += mult

    def items(self):
        return list(self.rows.items())

    def expanded(self) -> list:
        out = []
        for row, mult in self.rows.items():
            out.extend([row] * mult)
        return out

    def multiplicity(self, row) -> int:
        if not isinstance(row, KernelRow):
            row = KernelRow(tuple(x if isinstance(x, OrderElem) else self.order.elem(x) for x in row))
        return self.rows.get(row, 0)

    def __eq__(self, other):
        if not isinstance(other, DivisorClass):
            return NotImplemented
        return self.n == other.n and self.order == other.order and self.rows == other.rows

    def __repr__(self):
        parts = [f"{m}*ker({', '.join(map(str, r.entries))})" for r, m in self.rows.items()]
        return "DivisorClass(" + " + ".join(parts) + ")"


def c1_standard(n: int, order: OrderDesc) -> DivisorClass:
    if n < 1:
        raise ValueError("n >= 1")
    return DivisorClass(
        n, order, [(tuple(1 if i == j else 0 for j in range(n)), 1) for i in range(n)]
    )


def pullback(cls: DivisorClass, psi: MorphMatrix) -> DivisorClass:
    """psi^{-1} of each kernel divisor: ker(c) becomes ker(c psi).

    When c psi = 0 the pulled-back bundle is trivial and the row is dropped.
    """
    if psi.shape != (cls.n, cls.n):
        raise ShapeError(f"pullback of a class on E^{cls.n} along {psi.shape}")
    out = DivisorClass(cls.n, cls.order)
    for row, mult in cls.rows.items():
        r = (MorphMatrix([row.entries], cls.order) @ psi).entries[0]
        if any(r):
            out.add(r, mult)
    return out


def tensor(classes) -> DivisorClass:
    classes = list(classes)
    first = classes[0]
    out = DivisorClass(first.n, first.order)
    for c in classes:
        if c.n != first.n or c.order != first.order:
            raise ShapeError("tensor of classes on different spaces")
        for row, mult in c.rows.items():
            out.add(row, mult)
    return out


def power(cls: DivisorClass, m: int) -> DivisorClass:
    if m < 1:
        raise ValueError("m >= 1")
    return DivisorClass(cls.n, cls.order, [(r, mult * m) for r, mult in cls.rows.items()])


def intersection(rows, order: OrderDesc) -> int:
    """D_{r_1} . ... . D_{r_n}: norm of the determinant of the stacked rows."""
    d = pair_det([r.pairs() for r in rows], order.t, order.q)
    a, b = d
    return a * a + a * b * order.t + b * b * order.q


def degree_int(cls: DivisorClass) -> int:
    """Top self-intersection of the class.

    Repeated copies of a row have vanishing joint determinant, so only
    subsets of distinct rows count, each weighted by the product of
    multiplicities.
    """
    items = cls.items()
    total = 0
    for sub in combinations(items, cls.n):
        weight = prod(m for _, m in sub)
        total += weight * intersection([r for r, _ in sub], cls.order)
    return factorial(cls.n) * total


def degree_int_expanded(cls: DivisorClass) -> int:
    """Same degree by literal expansion over the multiset with repetition."""
    rows = cls.expanded()
    return factorial(cls.n) * sum(
        intersection(sub, cls.order) for sub in combinations(rows, cls.n)
    )


def phi_I_classes(B: MorphMatrix):
    """For each increasing n-tuple I of rows of B, the class of phi_I^* O_n."""
    N, n = B.shape
    std = c1_standard(n, B.order)
    for I in combinations(range(N), n):
        yield I, pullback(std, B.select_rows(I))


@dataclass(frozen=True)
class GaelCheck:
    lhs: int
    rhs: int

    @property
    def equal(self) -> bool:
        return self.lhs == self.rhs


def gael_check(B: MorphMatrix) -> GaelCheck:
    """Degree of the tensor of all phi_I^* O_n versus C(N-1, n-1)^n times the sum of their degrees."""
    N, n = B.shape
    for i in range(N):
        if not any(B.row(i)):
            raise ValueError(f"row {i} of B is zero")
    k = comb(N - 1, n - 1)
    full = DivisorClass(n, B.order, [(B.row(i), k) for i in range(N)])
    lhs = degree_int(full)
    rhs = k**n * sum(degree_int(c) for _, c in phi_I_classes(B))
    return GaelCheck(lhs, rhs)


def tensor_of_phi_I(B: MorphMatrix) -> DivisorClass:
    return tensor(c for _, c in phi_I_classes(B))


def restriction_degree_transfer(alpha: int, N: int, n: int, dim: int, value, mu: bool = False):
    """Multiply a degree on O_N by [alpha^2 C(N-1, n-1)]^dim (exponent 1 for essential minima)."""
    if not 0 <= dim <= n:
        raise ValueError(f"need 0 <= dim <= n, got {dim}")
    factor = alpha * alpha * comb(N - 1, n - 1)
    e = 1 if mu else dim
    v = Fraction(value) * factor**e
    return int(v) if v.denominator == 1 else v


def paper_degree_factor(dim: int, p: int = 3) -> Fraction:
    """Rescale intersection degrees so E^dim has degree p^dim instead of dim!."""
    return Fraction(p**dim, factorial(dim))
