"""Degree and essential-minimum formulas, and the lower-bound constant chains.

Exact formulas return Fractions.  Lower bounds are products of rational
powers, kept symbolically as ``PowerProduct`` and evaluated with
outward rounding (lower end rounded down, upper end rounded up).  The
constant c0 is an opaque positive rational supplied by the caller, so
every bound produced here is conditional on it.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb

from .certified import DEFAULT_PRECISION, Enclosure, pow_enclosure, round_down, round_up, to_decimal
from .order import OrderElem

NORM = "norm"
PAPER = "paper"
CONVENTIONS = (NORM, PAPER)

_SMALL_PRIMES = [p for p in range(2, 200) if all(p % d for d in range(2, int(p**0.5) + 1))]


class InvalidParams(ValueError):
    pass


class MissingStabilizer(ValueError):
    """A push-forward formula needs a stabilizer cardinality the caller did not give."""


def default_precision() -> int:
    env = os.environ.get("ISOCALC_PRECISION")
    return int(env) if env else DEFAULT_PRECISION


def as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        return Fraction(x.strip())
    return Fraction(x)


# --- symbolic power products -------------------------------------------------


def _fmt_exp(e: Fraction) -> str:
    return str(e.numerator) if e.denominator == 1 else f"{e.numerator}/{e.denominator}"


@dataclass(frozen=True)
class PowerProduct:
    """prod base^exp over positive integer bases, plus named opaque symbols."""

    factors: tuple = ()  # ((base:int, exp:Fraction), ...) in insertion order
    symbols: tuple = ()  # ((name:str, exp:Fraction), ...)

    @classmethod
    def of(cls, base, exp=1) -> PowerProduct:
        exp = as_fraction(exp)
        if isinstance(base, str):
            return cls((), ((base, exp),))
        b = as_fraction(base)
        if b <= 0:
            raise ValueError("bases must be positive")
        fs = []
        if b.numerator != 1:
            fs.append((b.numerator, exp))
        if b.denominator != 1:
            fs.append((b.denominator, -exp))
        return cls(tuple(fs), ())

    def __mul__(self, other: PowerProduct) -> PowerProduct:
        return PowerProduct(self.factors + other.factors, self.symbols + other.symbols)

    def pow(self, e) -> PowerProduct:
        e = as_fraction(e)
        return PowerProduct(
            tuple((b, x * e) for b, x in self.factors), tuple((s, x * e) for s, x in self.symbols)
        )

    def canonical(self) -> dict:
        """Exponents per prime (small primes split out) and per leftover base/symbol."""
        out: dict = {}
        for b, e in self.factors:
            for p in _SMALL_PRIMES:
                if b == 1:
                    break
                k = 0
                while b % p == 0:
                    b //= p
                    k += 1
                if k:
                    out[p] = out.get(p, 0) + e * k
            if b != 1:
                out[b] = out.get(b, 0) + e
        for s, e in self.symbols:
            out[s] = out.get(s, 0) + e
        return {k: v for k, v in out.items() if v != 0}

    def same_value(self, other: PowerProduct) -> bool:
        return self.canonical() == other.canonical()

    def enclose(self, symbols: dict, prec: int) -> Enclosure:
        # integer exponents are multiplied out exactly, so exact values stay exact
        exact = Fraction(1)
        enc = Enclosure.exact(1)
        work = prec + 16
        for key, e in self.canonical().items():
            base = as_fraction(symbols[key]) if isinstance(key, str) else Fraction(key)
            if e.denominator == 1:
                exact *= base ** int(e)
            else:
                lo, hi = pow_enclosure(base, e, work)
                enc = enc.mul(Enclosure(lo, hi), work)
        lo, hi = enc.lo * exact, enc.hi * exact
        return Enclosure(round_down(lo, prec), round_up(hi, prec))

    def __str__(self):
        parts = []
        for s, e in self.symbols:
            parts.append(s if e == 1 else f"{s}^({_fmt_exp(e)})")
        for b, e in self.factors:
            parts.append(str(b) if e == 1 else f"{b}^({_fmt_exp(e)})")
        return " * ".join(parts) if parts else "1"


# --- parameters and results --------------------------------------------------


@dataclass(frozen=True)
class BoundParams:
    N: int
    n: int
    d: int
    eta: Fraction
    c0: Fraction = Fraction(1)
    convention: str = NORM

    def __post_init__(self):
        object.__setattr__(self, "eta", as_fraction(self.eta))
        object.__setattr__(self, "c0", as_fraction(self.c0))
        if not 0 < self.d < self.n <= self.N:
            raise InvalidParams(f"need 0 < d < n <= N, got N={self.N}, n={self.n}, d={self.d}")
        if self.eta < 0:
            raise InvalidParams("eta must be nonnegative")
        if self.c0 <= 0:
            raise InvalidParams("c0 must be positive")
        if self.convention not in CONVENTIONS:
            raise InvalidParams(f"unknown degree convention {self.convention!r}")

    @property
    def codim(self) -> int:
        return self.n - self.d

    @property
    def exp_num(self) -> Fraction:
        """Exponent on the ambient degree: 1/(n-d) - eta."""
        return Fraction(1, self.codim) - self.eta

    @property
    def exp_den(self) -> Fraction:
        """Exponent on deg V in the denominator: 1/(n-d) + eta."""
        return Fraction(1, self.codim) + self.eta

    def to_json(self) -> dict:
        return {
            "N": self.N,
            "n": self.n,
            "d": self.d,
            "eta": str(self.eta),
            "c0": str(self.c0),
            "convention": self.convention,
        }


@dataclass(frozen=True)
class Step:
    name: str
    expr: str
    lo: Fraction
    hi: Fraction
    relation: str = "="

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "relation": self.relation,
            "expr": self.expr,
            "lower": to_decimal(self.lo),
            "upper": to_decimal(self.hi, up=True),
        }


@dataclass
class CertifiedBound:
    expr: PowerProduct
    value: Fraction  # certified lower bound for expr
    upper: Fraction
    precision: int
    derivation: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "value": to_decimal(self.value),
            "value_exact": str(self.value),
            "upper": to_decimal(self.upper, up=True),
            "expression": str(self.expr),
            "precision_bits": self.precision,
            "conditional_on": "c0",
            "derivation": [s.to_json() for s in self.derivation],
            "notes": list(self.notes),
        }


def _step(name, expr: PowerProduct, symbols, prec, relation="=") -> Step:
    enc = expr.enclose(symbols, prec)
    return Step(name, str(expr), enc.lo, enc.hi, relation)


# --- degree formulas ---------------------------------------------------------


def _abs_sq(a) -> int:
    return a.norm() if isinstance(a, OrderElem) else int(a) ** 2


def deg_power(m: int, d: int, deg) -> Fraction:
    """deg_{L^m} V = m^d deg_L V."""
    return Fraction(m) ** d * as_fraction(deg)


def deg_preimage(a, n: int, d: int, deg) -> Fraction:
    """deg [a]^{-1} V = |a|^{2(n-d)} deg V."""
    return Fraction(_abs_sq(a)) ** (n - d) * as_fraction(deg)


def deg_image(a, d: int, deg, stab: int | None) -> Fraction:
    """deg [a] V = |a|^{2d} / |Stab V cap ker[a]| deg V."""
    if stab is None:
        raise MissingStabilizer("image degree needs |Stab V cap ker[a]|")
    return Fraction(_abs_sq(a) ** d, stab) * as_fraction(deg)


def deg_push(stab: int | None, deg_image_value) -> Fraction:
    """deg phi_*(V) = |Stab V cap ker phi| deg phi(V)."""
    if stab is None:
        raise MissingStabilizer("push-forward degree needs |Stab V cap ker phi|")
    return stab * as_fraction(deg_image_value)


def deg_pullback_ambient(ker_card: int, deg_ambient) -> Fraction:
    """deg_{phi^* L} E^n = |ker phi| deg_L E^n."""
    return ker_card * as_fraction(deg_ambient)


def deg_mw_bound(N: int, d: int, psi_norm_sq: int, deg) -> Fraction:
    """Upper bound N^d (3N||psi||)^{2d} deg X, using ||psi||^2 exactly."""
    return Fraction(N) ** d * Fraction(9 * N * N * psi_norm_sq) ** d * as_fraction(deg)


def degree_transforms(op: str, **kw) -> Fraction:
    ops = {
        "power": lambda: deg_power(kw["m"], kw["d"], kw["deg"]),
        "preimage": lambda: deg_preimage(kw["a"], kw["n"], kw["d"], kw["deg"]),
        "image": lambda: deg_image(kw["a"], kw["d"], kw["deg"], kw.get("stab")),
        "push": lambda: deg_push(kw.get("stab"), kw["deg"]),
        "pullback": lambda: deg_pullback_ambient(kw["ker"], kw["deg"]),
        "mw": lambda: deg_mw_bound(kw["N"], kw["d"], kw["norm_sq"], kw["deg"]),
    }
    if op not in ops:
        raise ValueError(f"unknown degree transform {op!r}")
    return ops[op]()


# --- essential minimum combinators ------------------------------------------


@dataclass(frozen=True)
class MuValue:
    """A value for an essential minimum, either exact ('=') or a lower bound ('>=')."""

    value: Fraction
    relation: str = "="

    def __add__(self, other: MuValue) -> MuValue:
        return MuValue(self.value + other.value, ">=" if ">=" in (self.relation, other.relation) else "=")


def mu_power(m: int, mu: MuValue) -> MuValue:
    """mu_{L^m}(V) = m mu_L(V)."""
    return MuValue(m * mu.value, mu.relation)


def mu_pullback(mu_of_image: MuValue) -> MuValue:
    """mu_{phi^* L}(V) = mu_L(phi(V))."""
    return mu_of_image


def mu_tensor(parts) -> MuValue:
    """mu of a tensor of pullbacks is at least the sum of the parts."""
    total = Fraction(0)
    for p in parts:
        total += p.value
    return MuValue(total, ">=")


def mu_combinators(op: str, *args) -> MuValue:
    if op == "power":
        return mu_power(*args)
    if op == "pullback":
        return mu_pullback(*args)
    if op == "tensor":
        return mu_tensor(*args)
    raise ValueError(f"unknown combinator {op!r}")


# --- constants ---------------------------------------------------------------


def kappa_bound(n: int, N: int) -> int:
    """3^{2N} 2^{8nN^2}."""
    if not 1 <= n <= N:
        raise ValueError(f"need 1 <= n <= N, got n={n}, N={N}")
    return 3 ** (2 * N) * 2 ** (8 * n * N * N)


def c1_expr(params: BoundParams) -> PowerProduct:
    return PowerProduct.of(3, Fraction(-params.n, params.codim)) * PowerProduct.of("c0")


def sin1_bound(deg_V, params: BoundParams, prec: int | None = None) -> CertifiedBound:
    """c0 (deg V)^{-1/(n-d) - eta}: the standard-polarization bound taken as input."""
    prec = prec or default_precision()
    expr = PowerProduct.of("c0") * PowerProduct.of(as_fraction(deg_V), -params.exp_den)
    sym = {"c0": params.c0}
    enc = expr.enclose(sym, prec)
    return CertifiedBound(expr, enc.lo, enc.hi, prec, [_step("bound", expr, sym, prec, ">=")])


def thm1_bound(deg_ambient, deg_V, params: BoundParams, prec: int | None = None) -> CertifiedBound:
    """c1 A^{1/(n-d) - eta} / B^{1/(n-d) + eta} with A, B the phi^*O_n degrees of E^n and V."""
    prec = prec or default_precision()
    A = as_fraction(deg_ambient)
    B = as_fraction(deg_V)
    if A < 1 or B < 1:
        raise InvalidParams("degrees must be at least 1")
    sym = {"c0": params.c0}
    c1 = c1_expr(params)
    expr = c1 * PowerProduct.of(A, params.exp_num) * PowerProduct.of(B, -params.exp_den)
    enc = expr.enclose(sym, prec)
    steps = [
        _step("c1", c1, sym, prec),
        _step("bound", expr, sym, prec, ">="),
    ]
    return CertifiedBound(expr, enc.lo, enc.hi, prec, steps, [f"degree convention: {params.convention}"])


@dataclass
class ConstantChain:
    params: BoundParams
    kappa: int
    relative: dict  # name -> PowerProduct factor applied to the previous constant
    absolute: dict  # name -> PowerProduct in terms of c0 only
    enclosures: dict
    notes: list

    TEMPLATES = {
        "c1": "c1 = 3^(-n/(n-d)) * c0",
        "c2": "c2 = c1 * kappa^(-1)",
        "c3": "c3 = c2 * kappa^(2(n-d)eta) * C(N-1,n-1)^(-n/(n-d)-d*eta)",
        "c4": "c4 = c3 * (9N)^((-n-d)/(n-d)+(n-d)eta) * C(N,n)^(-4n/(n-d)-2(n-d)eta)",
        "c''": "c'' = c4 * 2^(-1)",
    }
    ORDER = ("c1", "c2", "c3", "c4", "c''")
    PREVIOUS = {"c1": "c0", "c2": "c1", "c3": "c2", "c4": "c3", "c''": "c4"}

    def instantiated(self, name: str) -> str:
        return f"{name} = {self.PREVIOUS[name]} * {self.relative[name]}"

    def value(self, name: str) -> Enclosure:
        return self.enclosures[name]

    def to_json(self) -> dict:
        return {
            "params": self.params.to_json(),
            "kappa": str(self.kappa),
            "constants": [
                {
                    "name": k,
                    "template": self.TEMPLATES[k],
                    "expr": self.instantiated(k),
                    "absolute": str(self.absolute[k]),
                    "lower": to_decimal(self.enclosures[k].lo),
                    "upper": to_decimal(self.enclosures[k].hi, up=True),
                }
                for k in self.ORDER
            ],
            "notes": list(self.notes),
        }


CHAIN_NOTES = [
    "c3 absorbs alpha^(-2(n+d)eta) as kappa^(+2(n-d)eta); evaluated as printed",
    "one intermediate display carries exponent 1/(n-d) - 4(n+d+1)eta on deg H; the final constant uses 1/(n-d) - eta",
]


def thm2_constants(params: BoundParams, prec: int | None = None) -> ConstantChain:
    prec = prec or default_precision()
    N, n, d, eta = params.N, params.n, params.d, params.eta
    k = n - d
    kappa = kappa_bound(n, N)
    rel = {
        "c1": PowerProduct.of(3, Fraction(-n, k)),
        "c2": PowerProduct.of(kappa, -1),
        "c3": PowerProduct.of(kappa, 2 * k * eta)
        * PowerProduct.of(comb(N - 1, n - 1), Fraction(-n, k) - d * eta),
        "c4": PowerProduct.of(9 * N, Fraction(-n - d, k) + k * eta)
        * PowerProduct.of(comb(N, n), Fraction(-4 * n, k) - 2 * k * eta),
        "c''": PowerProduct.of(2, -1),
    }
    absolute = {}
    acc = PowerProduct.of("c0")
    sym = {"c0": params.c0}
    enclosures = {}
    for name in ConstantChain.ORDER:
        acc = acc * rel[name]
        absolute[name] = acc
        enclosures[name] = acc.enclose(sym, prec)
    return ConstantChain(params, kappa, rel, absolute, enclosures, list(CHAIN_NOTES))


def thm2_bound(
    deg_H, deg_V, params: BoundParams, translate: bool = False, prec: int | None = None, extra_steps=()
) -> CertifiedBound:
    """c (deg H)^{1/(n-d) - eta} / (deg V)^{1/(n-d) + eta} with c = c4, or c'' = c4/2 for translates."""
    prec = prec or default_precision()
    H = as_fraction(deg_H)
    V = as_fraction(deg_V)
    if H <= 0 or V < 1:
        raise InvalidParams("need deg H > 0 and deg V >= 1")
    chain = thm2_constants(params, prec)
    final = "c''" if translate else "c4"
    c = chain.absolute[final]
    expr = c * PowerProduct.of(H, params.exp_num) * PowerProduct.of(V, -params.exp_den)
    sym = {"c0": params.c0}
    steps = list(extra_steps)
    steps.append(Step("kappa", str(chain.kappa), Fraction(chain.kappa), Fraction(chain.kappa), "="))
    for name in ConstantChain.ORDER:
        enc = chain.enclosures[name]
        steps.append(Step(name, chain.instantiated(name), enc.lo, enc.hi))
    enc = expr.enclose(sym, prec)
    steps.append(Step("bound", str(expr), enc.lo, enc.hi, ">="))
    notes = list(chain.notes) + [f"degree convention: {params.convention}"]
    if translate:
        notes.append("H declared a translate: constant halved unconditionally (worst case)")
    return CertifiedBound(expr, enc.lo, enc.hi, prec, steps, notes)


# --- change of coordinates by T ---------------------------------------------


@dataclass(frozen=True)
class StimaFactors:
    height_lower: Fraction  # h(T^{-1}x) >= height_lower * h(x)
    height_upper: Fraction  # h(T^{-1}x) <= height_upper * h(x)
    deg_H_lower: Fraction  # deg T^{-1}H >= deg_H_lower * deg H
    deg_V_upper: Fraction  # deg T^{-1}V <= deg_V_upper * deg V


def stima_factors(T_norm_sq: int, Tinv_norm_sq: int, N: int, n: int, d: int) -> StimaFactors:
    return StimaFactors(
        Fraction(1, N * N * T_norm_sq),
        Fraction(N * N * Tinv_norm_sq),
        Fraction(1, 9 * N**3 * T_norm_sq) ** n,
        Fraction(9 * N**3 * Tinv_norm_sq) ** d,
    )


def stima_transforms(T_norm_sq: int, Tinv_norm_sq: int, N: int, n: int, d: int, h=None, deg_H=None, deg_V=None) -> dict:
    f = stima_factors(T_norm_sq, Tinv_norm_sq, N, n, d)
    out = {"factors": f}
    if h is not None:
        h = as_fraction(h)
        out["height_window"] = (f.height_lower * h, f.height_upper * h)
    if deg_H is not None:
        out["deg_H_lower"] = f.deg_H_lower * as_fraction(deg_H)
    if deg_V is not None:
        out["deg_V_upper"] = f.deg_V_upper * as_fraction(deg_V)
    return out
