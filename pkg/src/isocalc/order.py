"""Exact arithmetic in End(E): either Z or an imaginary quadratic order Z[w].

The generator w satisfies w^2 = t*w - q with t^2 - 4q < 0.  Elements are
stored as integer pairs (a, b) meaning a + b*w.  Complex absolute values
never appear; everything is phrased through norm(x) = |x|^2.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd, isqrt

RATIONAL = "rational"
QUADRATIC = "quadratic"


class OrderMismatch(ValueError):
    """Operands live in different endomorphism rings."""


class NotDivisible(ArithmeticError):
    """Exact quotient does not exist in the order."""


@dataclass(frozen=True)
class OrderDesc:
    kind: str = RATIONAL
    t: int = 0
    q: int = 0

    def __post_init__(self):
        if self.kind == RATIONAL:
            if self.t or self.q:
                raise ValueError("rational order carries no (t, q)")
        elif self.kind == QUADRATIC:
            if self.t * self.t - 4 * self.q >= 0:
                raise ValueError(
                    f"t^2 - 4q = {self.t * self.t - 4 * self.q} is not negative"
                )
        else:
            raise ValueError(f"unknown order kind {self.kind!r}")

    @classmethod
    def rational(cls) -> OrderDesc:
        return cls(RATIONAL)

    @classmethod
    def quadratic(cls, t: int, q: int) -> OrderDesc:
        return cls(QUADRATIC, int(t), int(q))

    @property
    def is_rational(self) -> bool:
        return self.kind == RATIONAL

    @property
    def discriminant(self) -> int:
        return self.t * self.t - 4 * self.q

    def elem(self, a: int = 0, b: int = 0) -> OrderElem:
        return OrderElem(int(a), int(b), self)

    def zero(self) -> OrderElem:
        return OrderElem(0, 0, self)

    def one(self) -> OrderElem:
        return OrderElem(1, 0, self)

    def omega(self) -> OrderElem:
        if self.is_rational:
            raise ValueError("Z has no quadratic generator")
        return OrderElem(0, 1, self)

    def to_json(self) -> dict:
        if self.is_rational:
            return {"kind": RATIONAL}
        return {"kind": QUADRATIC, "t": self.t, "q": self.q}

    @classmethod
    def from_json(cls, data: dict) -> OrderDesc:
        kind = data.get("kind")
        if kind == RATIONAL:
            return cls.rational()
        if kind == QUADRATIC:
            return cls.quadratic(int(data["t"]), int(data["q"]))
        raise ValueError(f"unknown order kind {kind!r}")

    def __str__(self):
        if self.is_rational:
            return "Z"
        return f"Z[w], w^2 = {self.t}w - {self.q}"


GAUSSIAN = OrderDesc.quadratic(0, 1)
EISENSTEIN = OrderDesc.quadratic(-1, 1)
INTEGERS = OrderDesc.rational()


@dataclass(frozen=True, slots=True)
class OrderElem:
    a: int
    b: int
    order: OrderDesc

    def __post_init__(self):
        if self.b and self.order.is_rational:
            raise ValueError("elements of Z have no w-component")

    def _coerce(self, other) -> OrderElem:
        if isinstance(other, OrderElem):
            if other.order != self.order:
                raise OrderMismatch(f"{self.order} vs {other.order}")
            return other
        if isinstance(other, int):
            return OrderElem(other, 0, self.order)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return OrderElem(self.a + other.a, self.b + other.b, self.order)

    __radd__ = __add__

    def __neg__(self):
        return OrderElem(-self.a, -self.b, self.order)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return OrderElem(self.a - other.a, self.b - other.b, self.order)

    def __rsub__(self, other):
        return -self + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        a, b, c, d = self.a, self.b, other.a, other.b
        bd = b * d
        o = self.order
        return OrderElem(a * c - bd * o.q, a * d + b * c + bd * o.t, o)

    __rmul__ = __mul__

    def __eq__(self, other):
        if isinstance(other, int):
            return self.b == 0 and self.a == other
        if isinstance(other, OrderElem):
            return (self.a, self.b, self.order) == (other.a, other.b, other.order)
        return NotImplemented

    def __hash__(self):
        return hash((self.a, self.b, self.order))

    def __bool__(self):
        return bool(self.a or self.b)

    def conj(self) -> OrderElem:
        # conj(w) = t - w
        return OrderElem(self.a + self.b * self.order.t, -self.b, self.order)

    def norm(self) -> int:
        a, b = self.a, self.b
        return a * a + a * b * self.order.t + b * b * self.order.q

    def content(self) -> int:
        return gcd(self.a, self.b)

    def is_rational_integer(self) -> bool:
        return self.b == 0

    def abs_floor(self) -> int:
        """Largest integer <= |x|."""
        return isqrt(self.norm())

    def abs_ceil(self) -> int:
        """Smallest integer >= |x|."""
        n = self.norm()
        r = isqrt(n)
        return r if r * r == n else r + 1

    def to_json(self) -> dict:
        return {"a": str(self.a), "b": str(self.b)}

    def __repr__(self):
        return f"OrderElem({self.a}, {self.b})"

    def __str__(self):
        if self.order.is_rational or self.b == 0:
            return str(self.a)
        if self.a == 0:
            return f"{self.b}w"
        sign = "+" if self.b > 0 else "-"
        return f"{self.a}{sign}{abs(self.b)}w"


def elem_from_json(data, order: OrderDesc) -> OrderElem:
    if isinstance(data, (int, str)):
        return OrderElem(int(data), 0, order)
    return OrderElem(int(data["a"]), int(data.get("b", 0)), order)


def add(x: OrderElem, y: OrderElem) -> OrderElem:
    return x + y


def mul(x: OrderElem, y: OrderElem) -> OrderElem:
    return x * y


def conj(x: OrderElem) -> OrderElem:
    return x.conj()


def norm(x: OrderElem) -> int:
    return x.norm()


def try_div(x: OrderElem, y: OrderElem) -> OrderElem:
    """Return z with y*z == x, or raise NotDivisible.

    Computed as x*conj(y)/norm(y) with an integrality check on both
    coordinates.
    """
    if x.order != y.order:
        raise OrderMismatch(f"{x.order} vs {y.order}")
    ny = y.norm()
    if ny == 0:
        raise ZeroDivisionError("division by zero in the order")
    p = x * y.conj()
    if p.a % ny or p.b % ny:
        raise NotDivisible(f"{x} is not divisible by {y}")
    return OrderElem(p.a // ny, p.b // ny, x.order)


def divides(y: OrderElem, x: OrderElem) -> bool:
    try:
        try_div(x, y)
    except NotDivisible:
        return False
    return True
