"""Brute-force model of E[m]^N = ((Z/m)^2)^N for kernel and stabilizer checks.

E[m] is modelled as O/mO with basis (1, w); multiplication by w acts by
the companion matrix [[0, -q], [1, t]].  A matrix over the order becomes
an integer matrix of twice the size acting on stacked coordinate pairs.
Enumeration is chunked through numpy and refuses to start above a point
budget.
"""

from __future__ import annotations

import numpy as np

from .matrix import MorphMatrix, ShapeError, dual_isogeny
from .order import OrderDesc

DEFAULT_BUDGET = 10**7
_CHUNK = 1 << 16


class BudgetExceeded(RuntimeError):
    """Enumeration would visit more points than the configured budget."""


class TorsionModel:
    def __init__(self, m: int, order: OrderDesc, budget: int = DEFAULT_BUDGET):
        if m < 1:
            raise ValueError("modulus must be positive")
        self.m = m
        self.order = order
        self.budget = budget
        if order.is_rational:
            self.omega = None
        else:
            self.omega = np.array([[0, -order.q], [1, order.t]], dtype=np.int64) % m
            w2 = (self.omega @ self.omega) % m
            expect = (order.t * self.omega - order.q * np.eye(2, dtype=np.int64)) % m
            assert np.array_equal(w2, expect)

    def elem_matrix(self, x) -> np.ndarray:
        out = x.a * np.eye(2, dtype=np.int64)
        if x.b:
            out = out + x.b * self.omega
        return out % self.m

    def lift(self, phi: MorphMatrix) -> np.ndarray:
        if phi.order != self.order:
            raise ValueError(f"order mismatch: {phi.order} vs {self.order}")
        n, N = phi.shape
        out = np.zeros((2 * n, 2 * N), dtype=np.int64)
        for i, row in enumerate(phi.entries):
            for j, x in enumerate(row):
                out[2 * i : 2 * i + 2, 2 * j : 2 * j + 2] = self.elem_matrix(x)
        return out

    def size(self, N: int) -> int:
        return self.m ** (2 * N)

    def guard(self, N: int):
        if self.size(N) > self.budget:
            raise BudgetExceeded(f"{self.m}^{2 * N} = {self.size(N)} points exceeds budget {self.budget}")

    def points(self, N: int):
        """All of E[m]^N in chunks of shape (k, 2N)."""
        self.guard(N)
        total = self.size(N)
        dim = 2 * N
        weights = self.m ** np.arange(dim - 1, -1, -1, dtype=np.int64)
        for start in range(0, total, _CHUNK):
            idx = np.arange(start, min(start + _CHUNK, total), dtype=np.int64)
            yield (idx[:, None] // weights[None, :]) % self.m

    def eval(self, phi: MorphMatrix, x) -> np.ndarray:
        """phi applied to one point or a (k, 2N) batch."""
        lifted = self.lift(phi)
        x = np.asarray(x, dtype=np.int64)
        if x.shape[-1] != lifted.shape[1]:
            raise ShapeError(f"point of dimension {x.shape[-1]} for map {phi.shape}")
        return (x @ lifted.T) % self.m

    def kernel(self, phi: MorphMatrix) -> np.ndarray:
        lifted = self.lift(phi)
        out = []
        for chunk in self.points(phi.cols):
            img = (chunk @ lifted.T) % self.m
            out.append(chunk[~img.any(axis=1)])
        return np.concatenate(out) if out else np.zeros((0, 2 * phi.cols), dtype=np.int64)

    def count_kernel(self, phi: MorphMatrix) -> int:
        lifted = self.lift(phi)
        count = 0
        for chunk in self.points(phi.cols):
            img = (chunk @ lifted.T) % self.m
            count += int((~img.any(axis=1)).sum())
        return count

    def codes(self, arr) -> np.ndarray:
        arr = np.asarray(arr, dtype=np.int64)
        weights = self.m ** np.arange(arr.shape[-1] - 1, -1, -1, dtype=np.int64)
        return arr @ weights

    def preimage(self, phi: MorphMatrix, targets: set) -> set:
        if not targets:
            return set()
        lifted = self.lift(phi)
        wanted = self.codes(np.array(sorted(targets), dtype=np.int64))
        out = set()
        for chunk in self.points(phi.cols):
            img = (chunk @ lifted.T) % self.m
            hit = np.isin(self.codes(img), wanted)
            out |= _key(chunk[hit])
        return out


def count_kernel(phi: MorphMatrix, m: int | None = None, budget: int = DEFAULT_BUDGET) -> int:
    """Number of x in E[m]^N with phi(x) = 0; m defaults to alpha of the dual."""
    if m is None:
        m = dual_isogeny(phi).alpha
    return TorsionModel(m, phi.order, budget).count_kernel(phi)


def eval_point(phi: MorphMatrix, x, m: int):
    return tuple(int(v) for v in TorsionModel(m, phi.order).eval(phi, x))


# --- kernel relations --------------------------------------------------------


def _key(rows) -> set:
    return {tuple(int(v) for v in r) for r in rows}


def verify_relker_composition(psi: MorphMatrix, psi2: MorphMatrix, m: int, budget=DEFAULT_BUDGET) -> bool:
    """psi^{-1}(ker psi2) == ker(psi2 psi) on E[m]^{cols psi}."""
    if psi2.cols != psi.rows:
        raise ShapeError(f"cannot compose {psi2.shape} after {psi.shape}")
    model = TorsionModel(m, psi.order, budget)
    a = model.lift(psi)
    b = model.lift(psi2)
    comp = model.lift(psi2 @ psi)
    for chunk in model.points(psi.cols):
        via_image = ~(((chunk @ a.T) % m) @ b.T % m).any(axis=1)
        direct = ~((chunk @ comp.T) % m).any(axis=1)
        if not np.array_equal(via_image, direct):
            return False
    return True


def gauss_pair(a: MorphMatrix, b: MorphMatrix):
    """The matrices (Id 0; a b) and (Id 0; 0 b) for a 1 x (N-n) and b 1 x n."""
    order = a.order
    k = a.cols
    n = b.cols
    N = k + n
    top = [[1 if i == j else 0 for j in range(N)] for i in range(k)]
    full = MorphMatrix(top + [list(a.row(0)) + list(b.row(0))], order)
    reduced = MorphMatrix(top + [[0] * k + list(b.row(0))], order)
    return full, reduced


def verify_relker_gauss(a: MorphMatrix, b: MorphMatrix, m: int, budget=DEFAULT_BUDGET) -> bool:
    full, reduced = gauss_pair(a, b)
    model = TorsionModel(m, a.order, budget)
    return _key(model.kernel(full)) == _key(model.kernel(reduced))


def verify_relker(psi, psi2, a, b, m: int, budget=DEFAULT_BUDGET) -> bool:
    return verify_relker_composition(psi, psi2, m, budget) and verify_relker_gauss(a, b, m, budget)


# --- stabilizers -------------------------------------------------------------


def stabilizer(S: set, L: int) -> set:
    """{t : S + t subset of S} for a finite nonempty S of points mod L.

    Every t in the stabilizer lies in S - s0.  Candidates are thinned by a
    few sample translates, then checked exactly one by one; confirmed ones
    generate a subgroup whose members need no further check.
    """
    if not S:
        raise ValueError("stabilizer of the empty set is not finite")
    pts = np.array(sorted(S), dtype=np.int64)
    weights = L ** np.arange(pts.shape[1] - 1, -1, -1, dtype=np.int64)
    codes = np.sort(pts @ weights)

    def member(arr):
        c = arr @ weights
        pos = np.minimum(np.searchsorted(codes, c), len(codes) - 1)
        return codes[pos] == c

    cand = (pts - pts[0]) % L
    step = max(1, len(pts) // 64)
    for s in pts[::step]:
        cand = cand[member((cand + s) % L)]
    group = np.zeros((1, pts.shape[1]), dtype=np.int64)
    known = {0}
    for t in cand:
        if int(t @ weights) in known or not member((pts + t) % L).all():
            continue
        # group + <t> as a union of cosets group + k t
        cosets = [group]
        shift = t.copy()
        while int(shift @ weights) not in known:
            cosets.append((group + shift) % L)
            shift = (shift + t) % L
        group = np.concatenate(cosets)
        known = set((group @ weights).tolist())
    return _key(group)


def _scale(points, k: int, L: int) -> set:
    return {tuple((k * v) % L for v in p) for p in points}


def verify_stab(S, phi: MorphMatrix, m: int, budget=DEFAULT_BUDGET) -> bool:
    """Stab(phi^{-1} S) == phi^{-1}(Stab S) for S inside E[m]^N."""
    S = {tuple(int(v) % m for v in p) for p in S}
    # work in E[alpha m]^N so every preimage of an m-torsion point is visible
    alpha = dual_isogeny(phi).alpha
    L = alpha * m
    model = TorsionModel(L, phi.order, budget)
    S_L = _scale(S, alpha, L)
    lhs = stabilizer(model.preimage(phi, S_L), L)
    rhs = model.preimage(phi, stabilizer(S_L, L))
    return lhs == rhs


def stab_cardinality_identity(S, phi: MorphMatrix, m: int, budget=DEFAULT_BUDGET):
    """Both sides of |Stab(dual^{-1} S) cap ker[alpha]| = |ker dual| |Stab S cap ker phi|."""
    S = {tuple(int(v) % m for v in p) for p in S}
    dr = dual_isogeny(phi)
    alpha, dual = dr.alpha, dr.dual
    L = alpha * m
    model = TorsionModel(L, phi.order, budget)
    S_L = _scale(S, alpha, L)
    pre = model.preimage(dual, S_L)
    # ker[alpha] inside E[L]^N is m * E[alpha]^N
    small = np.concatenate(list(TorsionModel(alpha, phi.order, budget).points(phi.cols))) * m
    ker_alpha = _key(small)
    lhs = len(stabilizer(pre, L) & ker_alpha)
    ker_phi = _key(small[~model.eval(phi, small).any(axis=1)])
    ker_dual = count_kernel(dual, alpha, budget)
    rhs = ker_dual * len(stabilizer(S_L, L) & ker_phi)
    return lhs, rhs


def verify_stab_full(S, phi: MorphMatrix, m: int, budget=DEFAULT_BUDGET) -> bool:
    lhs, rhs = stab_cardinality_identity(S, phi, m, budget)
    return verify_stab(S, phi, m, budget) and lhs == rhs


def subgroup_generated(gens, m: int) -> set:
    """Subgroup of E[m]^N generated by integer combinations of ``gens``."""
    gens = [tuple(int(v) % m for v in g) for g in gens]
    if not gens:
        raise ValueError("need at least one generator")
    dim = len(gens[0])
    out = {tuple([0] * dim)}
    frontier = list(out)
    while frontier:
        nxt = []
        for p in frontier:
            for g in gens:
                s = tuple((x + y) % m for x, y in zip(p, g))
                if s not in out:
                    out.add(s)
                    nxt.append(s)
        frontier = nxt
    return out


def submodule_generated(gens, m: int, order: OrderDesc) -> set:
    """Smallest End(E)-stable subgroup containing ``gens`` (closed under w as well)."""
    gens = [tuple(int(v) % m for v in g) for g in gens]
    if order.is_rational:
        return subgroup_generated(gens, m)
    model = TorsionModel(m, order)
    w = model.omega
    more = list(gens)
    for g in gens:
        arr = np.array(g, dtype=np.int64).reshape(-1, 2)
        more.append(tuple(int(v) for v in ((arr @ w.T) % m).reshape(-1)))
    return subgroup_generated(more, m)
