"""Matrices over End(E), read as morphisms E^N -> E^n.

Determinants and ranks use fraction-free elimination on raw (a, b) pairs;
the OrderElem wrapper is only used at the API boundary.  Column and row
indices are 0-based throughout.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from math import gcd

from .order import NotDivisible, OrderDesc, OrderElem, OrderMismatch, elem_from_json


class NotAnIsogeny(ValueError):
    """Square matrix with vanishing determinant."""


class ShapeError(ValueError):
    pass


# --- raw pair arithmetic -----------------------------------------------------
# A pair (a, b) stands for a + b*w with w^2 = t*w - q.


def _pmul(x, y, t, q):
    a, b = x
    c, d = y
    bd = b * d
    return (a * c - bd * q, a * d + b * c + bd * t)


def _psub(x, y):
    return (x[0] - y[0], x[1] - y[1])


def _pnorm(x, t, q):
    a, b = x
    return a * a + a * b * t + b * b * q


def _pdiv(x, y, t, q):
    # exact quotient; Bareiss guarantees divisibility
    ny = _pnorm(y, t, q)
    c = (y[0] + y[1] * t, -y[1])
    p = _pmul(x, c, t, q)
    if p[0] % ny or p[1] % ny:
        raise NotDivisible("inexact Bareiss step")
    return (p[0] // ny, p[1] // ny)


def pair_det(rows, t=0, q=0):
    """Bareiss determinant of a square grid of (a, b) pairs."""
    n = len(rows)
    if n == 0:
        return (1, 0)
    if n == 1:
        return rows[0][0]
    if n == 2:
        return _psub(_pmul(rows[0][0], rows[1][1], t, q), _pmul(rows[0][1], rows[1][0], t, q))
    m = [list(r) for r in rows]
    sign = 1
    prev = (1, 0)
    for k in range(n - 1):
        if m[k][k] == (0, 0):
            for i in range(k + 1, n):
                if m[i][k] != (0, 0):
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return (0, 0)
        pivot = m[k][k]
        rowk = m[k]
        for i in range(k + 1, n):
            rowi = m[i]
            lead = rowi[k]
            for j in range(k + 1, n):
                v = _psub(_pmul(rowi[j], pivot, t, q), _pmul(lead, rowk[j], t, q))
                rowi[j] = v if prev == (1, 0) else _pdiv(v, prev, t, q)
        prev = pivot
    d = m[n - 1][n - 1]
    return d if sign > 0 else (-d[0], -d[1])


def pair_rank(rows, t=0, q=0) -> int:
    """Rank over the fraction field by cross-multiplication only."""
    m = [list(r) for r in rows if r]
    if not m:
        return 0
    ncols = len(m[0])
    rank = 0
    for col in range(ncols):
        piv = None
        for i in range(rank, len(m)):
            if m[i][col] != (0, 0):
                piv = i
                break
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        p = m[rank][col]
        for i in range(rank + 1, len(m)):
            lead = m[i][col]
            if lead == (0, 0):
                continue
            row = [
                _psub(_pmul(m[i][j], p, t, q), _pmul(lead, m[rank][j], t, q))
                for j in range(ncols)
            ]
            # divide out the integer content to keep entries small
            c = 0
            for a, b in row:
                c = gcd(c, a, b)
            if c > 1:
                row = [(a // c, b // c) for a, b in row]
            m[i] = row
        rank += 1
        if rank == len(m):
            break
    return rank


# --- matrices ----------------------------------------------------------------


class MorphMatrix:
    """An n x N matrix over End(E), i.e. a morphism E^N -> E^n."""

    __slots__ = ("order", "entries", "_pairs")

    def __init__(self, entries, order: OrderDesc):
        rows = []
        for row in entries:
            r = []
            for x in row:
                if isinstance(x, OrderElem):
                    if x.order != order:
                        raise OrderMismatch(f"{x.order} vs {order}")
                    r.append(x)
                elif isinstance(x, tuple):
                    r.append(OrderElem(int(x[0]), int(x[1]), order))
                else:
                    r.append(OrderElem(int(x), 0, order))
            rows.append(tuple(r))
        if not rows or not rows[0]:
            raise ShapeError("matrices need at least one row and one column")
        width = len(rows[0])
        if any(len(r) != width for r in rows):
            raise ShapeError("ragged matrix")
        self.order = order
        self.entries = tuple(rows)
        self._pairs = None

    # construction helpers
    @classmethod
    def identity(cls, n: int, order: OrderDesc) -> MorphMatrix:
        return cls([[1 if i == j else 0 for j in range(n)] for i in range(n)], order)

    @classmethod
    def scalar(cls, n: int, value, order: OrderDesc) -> MorphMatrix:
        z = order.zero()
        v = value if isinstance(value, OrderElem) else order.elem(value)
        return cls([[v if i == j else z for j in range(n)] for i in range(n)], order)

    @classmethod
    def diag(cls, values, order: OrderDesc) -> MorphMatrix:
        values = list(values)
        n = len(values)
        return cls([[values[i] if i == j else 0 for j in range(n)] for i in range(n)], order)

    @classmethod
    def zeros(cls, n: int, N: int, order: OrderDesc) -> MorphMatrix:
        return cls([[0] * N for _ in range(n)], order)

    @property
    def rows(self) -> int:
        return len(self.entries)

    @property
    def cols(self) -> int:
        return len(self.entries[0])

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols

    def pairs(self):
        if self._pairs is None:
            self._pairs = tuple(tuple((x.a, x.b) for x in row) for row in self.entries)
        return self._pairs

    def __getitem__(self, idx):
        i, j = idx
        return self.entries[i][j]

    def __eq__(self, other):
        if not isinstance(other, MorphMatrix):
            return NotImplemented
        return self.order == other.order and self.entries == other.entries

    def __hash__(self):
        return hash((self.order, self.entries))

    def __repr__(self):
        body = "; ".join(", ".join(str(x) for x in row) for row in self.entries)
        return f"MorphMatrix[{body}]"

    def row(self, i: int) -> tuple:
        return self.entries[i]

    def column(self, j: int) -> tuple:
        return tuple(row[j] for row in self.entries)

    def transpose(self) -> MorphMatrix:
        return MorphMatrix(list(zip(*self.entries)), self.order)

    def select_columns(self, cols) -> MorphMatrix:
        return MorphMatrix([[row[j] for j in cols] for row in self.entries], self.order)

    def select_rows(self, rows) -> MorphMatrix:
        return MorphMatrix([self.entries[i] for i in rows], self.order)

    def map(self, fn) -> MorphMatrix:
        return MorphMatrix([[fn(x) for x in row] for row in self.entries], self.order)

    def __add__(self, other: MorphMatrix) -> MorphMatrix:
        if self.shape != other.shape:
            raise ShapeError(f"{self.shape} + {other.shape}")
        return MorphMatrix(
            [[x + y for x, y in zip(r, s)] for r, s in zip(self.entries, other.entries)],
            self.order,
        )

    def __neg__(self):
        return self.map(lambda x: -x)

    def __sub__(self, other: MorphMatrix) -> MorphMatrix:
        return self + (-other)

    def __mul__(self, scalar) -> MorphMatrix:
        if isinstance(scalar, MorphMatrix):
            return NotImplemented
        return self.map(lambda x: x * scalar)

    __rmul__ = __mul__

    def __matmul__(self, other: MorphMatrix) -> MorphMatrix:
        if self.order != other.order:
            raise OrderMismatch(f"{self.order} vs {other.order}")
        if self.cols != other.rows:
            raise ShapeError(f"cannot compose {self.shape} with {other.shape}")
        t, q = self.order.t, self.order.q
        a = self.pairs()
        b = other.pairs()
        out = []
        for row in a:
            r = []
            for j in range(other.cols):
                s0 = s1 = 0
                for k, x in enumerate(row):
                    y = b[k][j]
                    bd = x[1] * y[1]
                    s0 += x[0] * y[0] - bd * q
                    s1 += x[0] * y[1] + x[1] * y[0] + bd * t
                r.append((s0, s1))
            out.append(r)
        return MorphMatrix(out, self.order)

    def is_scalar(self, value: int) -> bool:
        if not self.is_square:
            return False
        return all(
            x == (value if i == j else 0)
            for i, row in enumerate(self.entries)
            for j, x in enumerate(row)
        )

    def is_zero(self) -> bool:
        return not any(x for row in self.entries for x in row)

    def integer_content(self) -> int:
        c = 0
        for row in self.entries:
            for x in row:
                c = gcd(c, x.a, x.b)
        return c

    def exact_div(self, k: int) -> MorphMatrix:
        def f(x):
            if x.a % k or x.b % k:
                raise NotDivisible(f"{x} not divisible by {k}")
            return OrderElem(x.a // k, x.b // k, self.order)

        return self.map(f)

    # linear algebra
    def det(self) -> OrderElem:
        return det(self)

    def rank(self) -> int:
        return rank(self)

    def minor(self, cols) -> OrderElem:
        return minor(self, cols)

    def adjugate(self) -> MorphMatrix:
        return adjugate(self)

    def op_norm_sq(self) -> int:
        return op_norm_sq(self)

    def to_json(self) -> dict:
        return {
            "order": self.order.to_json(),
            "entries": [[x.to_json() for x in row] for row in self.entries],
        }

    @classmethod
    def from_json(cls, data: dict) -> MorphMatrix:
        order = OrderDesc.from_json(data.get("order", {"kind": "rational"}))
        return cls([[elem_from_json(x, order) for x in row] for row in data["entries"]], order)


class Isogeny(MorphMatrix):
    """Square matrix with nonzero determinant."""

    __slots__ = ("_det",)

    def __init__(self, entries, order: OrderDesc):
        super().__init__(entries, order)
        if not self.is_square:
            raise ShapeError(f"isogeny must be square, got {self.shape}")
        self._det = det(self)
        if not self._det:
            raise NotAnIsogeny("determinant vanishes")

    @classmethod
    def of(cls, m: MorphMatrix) -> Isogeny:
        if isinstance(m, Isogeny):
            return m
        return cls(m.entries, m.order)

    def det(self) -> OrderElem:
        return self._det


def _elem(pair, order):
    return OrderElem(pair[0], pair[1], order)


def det(m: MorphMatrix) -> OrderElem:
    if not m.is_square:
        raise ShapeError(f"det of non-square {m.shape}")
    return _elem(pair_det(m.pairs(), m.order.t, m.order.q), m.order)


def minor(m: MorphMatrix, cols) -> OrderElem:
    """Determinant of the columns listed in ``cols`` (0-based, in order given)."""
    cols = tuple(cols)
    if len(cols) != m.rows:
        raise ShapeError(f"need {m.rows} column indices, got {len(cols)}")
    if any(not 0 <= c < m.cols for c in cols) or len(set(cols)) != len(cols):
        raise ShapeError(f"bad column multi-index {cols}")
    p = m.pairs()
    sub = [[row[c] for c in cols] for row in p]
    return _elem(pair_det(sub, m.order.t, m.order.q), m.order)


def maximal_minors(m: MorphMatrix) -> dict:
    """All n x n minors indexed by strictly increasing column tuples."""
    p = m.pairs()
    t, q = m.order.t, m.order.q
    out = {}
    for cols in combinations(range(m.cols), m.rows):
        out[cols] = _elem(pair_det([[row[c] for c in cols] for row in p], t, q), m.order)
    return out


def rank(m: MorphMatrix) -> int:
    return pair_rank(m.pairs(), m.order.t, m.order.q)


def adjugate(m: MorphMatrix) -> MorphMatrix:
    if not m.is_square:
        raise ShapeError(f"adjugate of non-square {m.shape}")
    n = m.rows
    if n == 1:
        return MorphMatrix([[1]], m.order)
    p = m.pairs()
    t, q = m.order.t, m.order.q
    out = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            sub = [[p[r][c] for c in range(n) if c != j] for r in range(n) if r != i]
            d = pair_det(sub, t, q)
            if (i + j) % 2:
                d = (-d[0], -d[1])
            out[j][i] = d
    adj = MorphMatrix(out, m.order)
    d = det(m)
    if not (m @ adj == MorphMatrix.scalar(n, d, m.order) == adj @ m):
        raise ArithmeticError("adjugate postcondition failed")
    return adj


def op_norm_sq(m: MorphMatrix) -> int:
    """max_ij |m_ij|^2, the square of the entry norm ||m||."""
    return max(x.norm() for row in m.entries for x in row)


@dataclass(frozen=True)
class DualResult:
    dual: Isogeny
    alpha: int


def dual_isogeny(phi: MorphMatrix) -> DualResult:
    """Smallest positive integer alpha and integral dual with phi*dual = dual*phi = [alpha].

    phi^{-1} = adj(phi)*conj(D)/norm(D) with D = det(phi); alpha*phi^{-1} is
    integral iff norm(D) divides alpha times every coordinate, so the
    minimal alpha is norm(D)/gcd(norm(D), content).
    """
    if not phi.is_square:
        raise ShapeError(f"dual of non-square {phi.shape}")
    d = det(phi)
    if not d:
        raise NotAnIsogeny("determinant vanishes")
    nd = d.norm()
    m1 = adjugate(phi) * d.conj()
    g = gcd(nd, m1.integer_content())
    alpha = nd // g
    dual = m1.exact_div(g)
    n = phi.rows
    scalar = MorphMatrix.scalar(n, alpha, phi.order)
    if not (phi @ dual == scalar == dual @ phi):
        raise ArithmeticError("dual isogeny postcondition failed")
    return DualResult(Isogeny(dual.entries, phi.order), alpha)


def scaled_inverse_is_integral(phi: MorphMatrix, beta: int) -> bool:
    """Whether beta*phi^{-1} has entries in the order (no shortcut through alpha)."""
    d = det(phi)
    nd = d.norm()
    m1 = adjugate(phi) * d.conj()
    return all(
        (beta * x.a) % nd == 0 and (beta * x.b) % nd == 0 for row in m1.entries for x in row
    )


def ker_cardinality(phi: MorphMatrix) -> int:
    """|ker phi| on E^N, equal to norm(det phi)."""
    d = det(phi)
    if not d:
        raise NotAnIsogeny("determinant vanishes")
    return d.norm()


def block(top_left, top_right, bottom_left, bottom_right) -> MorphMatrix:
    rows = [list(a) + list(b) for a, b in zip(top_left.entries, top_right.entries)]
    rows += [list(a) + list(b) for a, b in zip(bottom_left.entries, bottom_right.entries)]
    return MorphMatrix(rows, top_left.order)


def vstack(*mats: MorphMatrix) -> MorphMatrix:
    rows = []
    for m in mats:
        rows.extend(m.entries)
    return MorphMatrix(rows, mats[0].order)


def permutation_matrix(perm, order: OrderDesc) -> MorphMatrix:
    """Matrix J with (M @ J) column k equal to column perm[k] of M."""
    n = len(perm)
    rows = [[0] * n for _ in range(n)]
    for k, src in enumerate(perm):
        rows[src][k] = 1
    return MorphMatrix(rows, order)
