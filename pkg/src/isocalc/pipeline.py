"""From an isogeny presenting an abelian subvariety H of E^N to a certified lower bound.

The input phi = (phi_H; phi_H') has phi_H of rank N-n (so H is, up to
torsion, ker phi_H) and phi_H' of rank n.  The construction is:

    T            saturating transform, last n columns of (phi T)^{-1} in general position
    phi' = phi T
    alpha, dual  phi' dual = dual phi' = [alpha], dual = (A | B)
    phi_I        rows of B indexed by increasing n-tuples I, all isogenies of E^n
    deg H        |det phi'| deg_{tensor phi_I^* O_n}(E^n) / [alpha^2 C(N-1,n-1)]^n

and, when 0 < d < n, the constant chain and the final bound.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from math import comb, factorial

from .bounds import NORM, PAPER, BoundParams, CertifiedBound, kappa_bound, thm2_bound, as_fraction
from .divisors import degree_int, gael_check, paper_degree_factor, tensor_of_phi_I
from .matrix import Isogeny, MorphMatrix, dual_isogeny, op_norm_sq, rank
from .saturation import all_minors_nonzero, lambda_bound, lambda_bound_int, transform_for_H

SCHEMA_VERSION = 1


class PipelineError(RuntimeError):
    def __init__(self, stage: str, cause: Exception):
        super().__init__(f"[{stage}] {type(cause).__name__}: {cause}")
        self.stage = stage
        self.cause = cause


class MinorVanished(ValueError):
    pass


@dataclass
class PipelineInput:
    phi: MorphMatrix
    n: int
    d: int | None = None
    deg_V: Fraction | None = None
    eta: Fraction = Fraction(1, 100)
    c0: Fraction = Fraction(1)
    convention: str = NORM
    translate: bool = False

    def __post_init__(self):
        N = self.phi.rows
        if not self.phi.is_square:
            raise ValueError(f"phi must be square, got {self.phi.shape}")
        if not 1 <= self.n <= N:
            raise ValueError(f"need 1 <= n <= N, got n={self.n}")
        if not self.phi.det():
            raise ValueError("phi must be an isogeny (nonzero determinant)")
        if self.n < N and rank(self.phi.select_rows(range(N - self.n))) != N - self.n:
            raise ValueError(f"phi_H must have rank {N - self.n}")
        if rank(self.phi.select_rows(range(N - self.n, N))) != self.n:
            raise ValueError(f"phi_H' must have rank {self.n}")

    @classmethod
    def from_json(cls, data: dict) -> PipelineInput:
        phi = MorphMatrix.from_json(data["phi"])
        return cls(
            phi=phi,
            n=int(data["n"]),
            d=int(data["d"]) if data.get("d") is not None else None,
            deg_V=as_fraction(data["deg_V"]) if data.get("deg_V") is not None else None,
            eta=as_fraction(data.get("eta", "1/100")),
            c0=as_fraction(data.get("c0", "1")),
            convention=data.get("convention", NORM),
            translate=bool(data.get("translate", False)),
        )

    def to_json(self) -> dict:
        return {
            "phi": self.phi.to_json(),
            "n": self.n,
            "d": self.d,
            "deg_V": None if self.deg_V is None else str(self.deg_V),
            "eta": str(self.eta),
            "c0": str(self.c0),
            "convention": self.convention,
            "translate": self.translate,
        }


def build_phi_I_family(dual: MorphMatrix, n: int):
    """[(I, phi_I)] for the last n columns B of the dual; each phi_I must be an isogeny."""
    N = dual.rows
    B = dual.select_columns(range(N - n, N))
    out = []
    for I in combinations(range(N), n):
        rows = B.select_rows(I)
        try:
            out.append((I, Isogeny(rows.entries, rows.order)))
        except ValueError as exc:
            raise MinorVanished(f"phi_I for I={I} is not an isogeny") from exc
    return out


@dataclass(frozen=True)
class DegH:
    value: Fraction  # lower bound when exact is False
    exact: bool
    det_factor: Fraction
    tensor_degree: int
    divisor: int


def compute_deg_H(phi_prime: MorphMatrix, alpha: int, B: MorphMatrix, n: int, convention: str) -> DegH:
    """deg_{O_N} of H from the degree of the tensor of phi_I^* O_n on E^n.

    Under the norm convention |det| is the kernel cardinality norm(det).
    Under the "paper" convention flag |det| is the complex absolute value and
    degrees are rescaled so E^n has degree 3^n; an irrational |det| is
    replaced by its integer floor, which keeps the result a lower bound.
    """
    N = phi_prime.rows
    D = phi_prime.det()
    tensor_degree = degree_int(tensor_of_phi_I(B))
    divisor = (alpha * alpha * comb(N - 1, n - 1)) ** n
    if convention == NORM:
        det_factor = Fraction(D.norm())
        exact = True
        scale = Fraction(1)
    elif convention == PAPER:
        floor = D.abs_floor()
        exact = floor * floor == D.norm()
        det_factor = Fraction(floor)
        scale = paper_degree_factor(n)
    else:
        raise ValueError(f"unknown convention {convention!r}")
    value = det_factor * tensor_degree * scale / divisor
    return DegH(value, exact, det_factor, tensor_degree, divisor)


@dataclass
class PipelineReport:
    input: PipelineInput
    T: MorphMatrix
    T_inv: MorphMatrix
    saturation: object
    phi_prime: MorphMatrix
    alpha: int
    dual: MorphMatrix
    family: list
    family_degrees: list
    deg_H: DegH
    kappa: int
    kappa_ok: bool
    checks: dict = field(default_factory=dict)
    bound: CertifiedBound | None = None
    notes: list = field(default_factory=list)
    T_real_bound_ok: bool = True  # |lambda| <= C(N,n)/N, informational

    @property
    def ok(self) -> bool:
        return all(self.checks.values())

    def to_json(self) -> dict:
        N = self.phi_prime.rows
        n = self.input.n
        D = self.phi_prime.det()
        return {
            "schema_version": SCHEMA_VERSION,
            "input": self.input.to_json(),
            "T": self.T.to_json()["entries"],
            "T_inv": self.T_inv.to_json()["entries"],
            "saturation": self.saturation.to_json(),
            "phi_prime": self.phi_prime.to_json()["entries"],
            "det_phi_prime": D.to_json(),
            "ker_phi_prime": str(D.norm()),
            "abs_det_phi_prime_floor": str(D.abs_floor()),
            "alpha": str(self.alpha),
            "dual": self.dual.to_json()["entries"],
            "A": self.dual.select_columns(range(N - n)).to_json()["entries"] if n < N else [],
            "B": self.dual.select_columns(range(N - n, N)).to_json()["entries"],
            "phi_I": [
                {"I": list(I), "degree": str(deg), "det": m.det().to_json()}
                for (I, m), deg in zip(self.family, self.family_degrees)
            ],
            "deg_H": str(self.deg_H.value),
            "deg_H_exact": self.deg_H.exact,
            "tensor_degree": str(self.deg_H.tensor_degree),
            "kappa": str(self.kappa),
            "kappa_check": self.kappa_ok,
            "lambda_real_bound": self.T_real_bound_ok,
            "checks": dict(self.checks),
            "bound": None if self.bound is None else self.bound.to_json(),
            "notes": list(self.notes),
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, indent=2)


def _stage(name, fn, *args, **kw):
    try:
        return fn(*args, **kw)
    except PipelineError:
        raise
    except Exception as exc:  # tag and propagate
        raise PipelineError(name, exc) from exc


def run_pipeline(inp: PipelineInput, prec: int | None = None) -> PipelineReport:
    phi = inp.phi
    N, n = phi.rows, inp.n
    order = phi.order

    T, T_inv, sat = _stage("transform", transform_for_H, phi, n)
    phi_prime = _stage("compose", lambda: Isogeny.of(phi @ T))
    dr = _stage("dual", dual_isogeny, phi_prime)
    alpha, dual = dr.alpha, dr.dual
    family = _stage("phi_I", build_phi_I_family, dual, n)
    B = dual.select_columns(range(N - n, N))
    family_degrees = [factorial(n) * m.det().norm() for _, m in family]
    gael = _stage("gael", gael_check, B)
    deg_H = _stage("deg_H", compute_deg_H, phi_prime, alpha, B, n, inp.convention)

    kappa = kappa_bound(n, N)
    D = phi_prime.det()
    size = D.norm() if inp.convention == NORM else D.abs_ceil()
    # unit diagonal entries of T exceed C(N,n)/N when that is below 1
    entry_cap = max(1, lambda_bound_int(N, n))
    T_sq = max(op_norm_sq(T), op_norm_sq(T_inv))
    checks = {
        "dual_left": phi_prime @ dual == MorphMatrix.scalar(N, alpha, order),
        "dual_right": dual @ phi_prime == MorphMatrix.scalar(N, alpha, order),
        "alpha_divides_ker": D.norm() % alpha == 0,
        "ker_identity": dual.det().norm() * D.norm() == alpha ** (2 * N),
        "B_minors_nonzero": all_minors_nonzero(B.transpose()),
        "gael": gael.equal,
        "T_unimodular": T.det() == 1 or T.det() == -1,
        "T_inverse": (T @ T_inv).is_scalar(1),
        "T_entry_bound": T_sq <= entry_cap**2,
        "phi_I_isogenies": all(m.det() for _, m in family),
    }
    report = PipelineReport(
        inp, T, T_inv, sat, phi_prime, alpha, dual, family, family_degrees, deg_H, kappa, size <= kappa, checks
    )
    report.T_real_bound_ok = all(abs(x) <= lambda_bound(N, n) for row in sat.X for x in row)
    if not deg_H.exact:
        report.notes.append("paper convention: |det| irrational, deg H uses its integer floor")
    if inp.d is None or not 0 < inp.d < n:
        report.notes.append("no bound: need 0 < d < n; geometric stages only")
        return report
    if inp.deg_V is None:
        report.notes.append("no bound: deg_V not supplied")
        return report
    params = BoundParams(N, n, inp.d, inp.eta, inp.c0, inp.convention)
    report.bound = _stage(
        "bound", thm2_bound, deg_H.value, inp.deg_V, params, inp.translate, prec
    )
    return report
