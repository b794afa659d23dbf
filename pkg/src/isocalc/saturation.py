"""Bounded unimodular transforms that make every maximal minor nonzero.

Given an n x N matrix psi of rank n, find a column permutation J and an
integral T = (Id_n X; 0 Id_{N-n}) with small |X_ij| such that all n x n
minors of psi J T are nonzero.  Columns are added one at a time; for each
new column the pivots i_1..i_n receive integer multipliers lambda_r that
avoid a finite forbidden set of fraction-field values.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from math import comb

from .matrix import (
    MorphMatrix,
    NotAnIsogeny,
    adjugate,
    det,
    pair_det,
    pair_rank,
    permutation_matrix,
)


class BoundTooSmall(ValueError):
    """Every integer within the bound is forbidden."""


class PreconditionViolated(ValueError):
    pass


class RankDeficient(ValueError):
    pass


@dataclass(frozen=True)
class Round:
    column: int  # the column being repaired (0-based)
    r: int  # round number, 1..n
    index: int  # pivot column i_r (0-based)
    lam: int
    forbidden: int  # |S_r|, distinct values
    forbidden_raw: int  # number of minors that produced S_r
    bound: Fraction  # C(k, n)/k for the k-column sub-problem

    def to_json(self) -> dict:
        return {
            "column": self.column,
            "round": self.r,
            "index": self.index,
            "lambda": self.lam,
            "forbidden_size": self.forbidden,
            "forbidden_raw": self.forbidden_raw,
            "bound": str(self.bound),
        }


@dataclass
class SaturationResult:
    perm: tuple  # J as a column permutation: (psi J)[:, k] = psi[:, perm[k]]
    X: list  # n x (N-n) integer block of T
    trace: list = field(default_factory=list)

    @property
    def n(self) -> int:
        return len(self.X)

    @property
    def N(self) -> int:
        return len(self.perm)

    def J(self, order) -> MorphMatrix:
        return permutation_matrix(self.perm, order)

    def T(self, order) -> MorphMatrix:
        return unipotent(self.X, self.N, order)

    def T_inv(self, order) -> MorphMatrix:
        return unipotent([[-x for x in row] for row in self.X], self.N, order)

    def max_lambda(self) -> int:
        return max((abs(x) for row in self.X for x in row), default=0)

    def to_json(self) -> dict:
        return {
            "J": list(self.perm),
            "X": [list(row) for row in self.X],
            "trace": [r.to_json() for r in self.trace],
        }


def unipotent(X, N: int, order) -> MorphMatrix:
    """(Id_n X; 0 Id_{N-n}) over the order."""
    n = len(X)
    rows = []
    for i in range(N):
        row = [1 if i == j else 0 for j in range(N)]
        if i < n:
            for j in range(n, N):
                row[j] = X[i][j - n]
        rows.append(row)
    return MorphMatrix(rows, order)


def lambda_bound(N: int, n: int) -> Fraction:
    return Fraction(comb(N, n), N)


def lambda_bound_int(N: int, n: int) -> int:
    return -((-comb(N, n)) // N)


def _candidates(bound: int):
    yield 0
    for k in range(1, bound + 1):
        yield k
        yield -k


def choose_lambda(forbidden, bound: int) -> int:
    """Smallest |lambda| <= bound, positive first, avoiding every num/den in ``forbidden``.

    ``forbidden`` holds (num, den) pairs of order elements (or raw pairs);
    lambda == num/den is tested as lambda*den == num.
    """
    forb = [(_as_pair(a), _as_pair(b)) for a, b in forbidden]
    for lam in _candidates(bound):
        if all((lam * d[0], lam * d[1]) != nu for nu, d in forb):
            return lam
    raise BoundTooSmall(f"all {2 * bound + 1} integers in [-{bound}, {bound}] are forbidden")


def _as_pair(x):
    if isinstance(x, tuple):
        return x
    if isinstance(x, int):
        return (x, 0)
    return (x.a, x.b)


def _distinct_fractions(values, t, q):
    """Count distinct num/den values by cross-multiplication."""
    seen = []
    for nu, de in values:
        for nu2, de2 in seen:
            if _pm(nu, de2, t, q) == _pm(nu2, de, t, q):
                break
        else:
            seen.append((nu, de))
    return len(seen)


def _pm(x, y, t, q):
    bd = x[1] * y[1]
    return (x[0] * y[0] - bd * q, x[0] * y[1] + x[1] * y[0] + bd * t)


def _col_det(cols_data, idx, t, q):
    # cols_data[j] is column j as a list of pairs; idx lists the columns in order
    n = len(idx)
    return pair_det([[cols_data[c][i] for c in idx] for i in range(n)], t, q)


def casino_pass(cols, k: int, t: int, q: int, bound: int | None = None):
    """Repair column ``k`` of a column list so every minor of columns 0..k is nonzero.

    ``cols`` is a list of columns (lists of pairs), modified in place;
    all minors of columns 0..k-1 must already be nonzero.  Returns
    (lambdas as {pivot: lambda}, trace rounds).
    """
    n = len(cols[0])
    width = k + 1
    if bound is None:
        bound = lambda_bound_int(width, n)
    exact_bound = lambda_bound(width, n)
    for idx in combinations(range(k), n):
        if _col_det(cols, idx, t, q) == (0, 0):
            raise PreconditionViolated(f"minor {idx} of the leading columns vanishes")
    rho = {k}
    trace = []
    lambdas = {}
    for r in range(1, n + 1):
        zero = None
        for idx in combinations(range(width), n):
            if k in idx and _col_det(cols, idx, t, q) == (0, 0):
                zero = idx
                break
        if zero is None:
            i_r = min(i for i in range(n) if i not in rho)
            rho.add(i_r)
            trace.append(Round(k, r, i_r, 0, 0, 0, exact_bound))
            continue
        i0 = [c for c in zero if c != k]
        i_r = min(i for i in range(n) if i not in i0)
        rho.add(i_r)
        forbidden = []
        others = [c for c in range(k) if c != i_r]
        for I1 in combinations(others, n - 1):
            num = _col_det(cols, list(I1) + [k], t, q)
            den = _col_det(cols, list(I1) + [i_r], t, q)
            forbidden.append(((-num[0], -num[1]), den))
        lam = choose_lambda(forbidden, bound)
        trace.append(
            Round(k, r, i_r, lam, _distinct_fractions(forbidden, t, q), len(forbidden), exact_bound)
        )
        if lam:
            src = cols[i_r]
            cols[k] = [(a + lam * s[0], b + lam * s[1]) for (a, b), s in zip(cols[k], src)]
        lambdas[i_r] = lambdas.get(i_r, 0) + lam
    for idx in combinations(range(width), n):
        if k in idx and _col_det(cols, idx, t, q) == (0, 0):
            raise ArithmeticError(f"minor {idx} still vanishes after repair")
    return lambdas, trace


def first_independent_columns(psi: MorphMatrix):
    n, N = psi.shape
    p = psi.pairs()
    t, q = psi.order.t, psi.order.q
    for cols in combinations(range(N), n):
        if pair_det([[row[c] for c in cols] for row in p], t, q) != (0, 0):
            return cols
    return None


def saturate_minors(psi: MorphMatrix) -> SaturationResult:
    n, N = psi.shape
    t, q = psi.order.t, psi.order.q
    if n > N or pair_rank(psi.pairs(), t, q) != n:
        raise RankDeficient(f"need rank {n}")
    lead = first_independent_columns(psi)
    perm = tuple(lead) + tuple(c for c in range(N) if c not in lead)
    p = psi.pairs()
    cols = [[row[c] for row in p] for c in perm]
    X = [[0] * (N - n) for _ in range(n)]
    trace = []
    for k in range(n, N):
        lambdas, rounds = casino_pass(cols, k, t, q)
        for i, lam in lambdas.items():
            X[i][k - n] = lam
        trace.extend(rounds)
    return SaturationResult(perm, X, trace)


def all_minors_nonzero(m: MorphMatrix) -> bool:
    p = m.pairs()
    t, q = m.order.t, m.order.q
    return all(
        pair_det([[row[c] for c in cols] for row in p], t, q) != (0, 0)
        for cols in combinations(range(m.cols), m.rows)
    )


def transform_for_H(phi: MorphMatrix, n: int):
    """Unimodular T so all n x n minors of the last n columns of (phi T)^{-1} are nonzero.

    Saturates the last n rows of adj(phi)^t (a nonzero multiple of
    (phi^{-1})^t) and returns (T, T^{-1}, saturation result), with
    T = J (T0^{-1})^t since J is a permutation matrix.
    """
    N = phi.rows
    if not phi.is_square:
        raise NotAnIsogeny(f"non-square {phi.shape}")
    if not 1 <= n <= N:
        raise ValueError(f"need 1 <= n <= N, got n={n}, N={N}")
    d = det(phi)
    if not d:
        raise NotAnIsogeny("determinant vanishes")
    adj_t = adjugate(phi).transpose()
    psi = adj_t.select_rows(range(N - n, N))
    sat = saturate_minors(psi)
    order = phi.order
    J = sat.J(order)
    T = J @ sat.T_inv(order).transpose()
    T_inv = sat.T(order).transpose() @ J.transpose()
    if not (T @ T_inv).is_scalar(1):
        raise ArithmeticError("T * T^{-1} != Id")
    check = adjugate(phi @ T).select_columns(range(N - n, N))
    if not all_minors_nonzero(check):
        raise ArithmeticError("transform failed to saturate (phi T)^{-1}")
    return T, T_inv, sat
