"""Slow, independent reference implementations used only by the tests.

None of these touch the fast paths in isocalc: determinants are Leibniz
sums, element arithmetic goes through 2x2 integer multiplication
matrices, kernels and stabilizers are enumerated with plain Python sets.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import permutations, product
from math import comb, factorial

from isocalc.order import OrderElem


def mult_matrix(x: OrderElem):
    """Integer matrix of multiplication by x on the basis (1, w)."""
    t, q = x.order.t, x.order.q
    # x * 1 = a + b w ; x * w = -bq + (a + bt) w
    return [[x.a, -x.b * q], [x.b, x.a + x.b * t]]


def mat2_mul(A, B):
    return [[sum(A[i][k] * B[k][j] for k in range(2)) for j in range(2)] for i in range(2)]


def mat2_det(A):
    return A[0][0] * A[1][1] - A[0][1] * A[1][0]


def elem_from_mult_matrix(M, order):
    # first column is the image of 1
    return OrderElem(M[0][0], M[1][0], order)


def ref_mul(x: OrderElem, y: OrderElem) -> OrderElem:
    return elem_from_mult_matrix(mat2_mul(mult_matrix(x), mult_matrix(y)), x.order)


def ref_norm(x: OrderElem) -> int:
    return mat2_det(mult_matrix(x))


def _sign(perm) -> int:
    s = 1
    p = list(perm)
    for i in range(len(p)):
        while p[i] != i:
            j = p[i]
            p[i], p[j] = p[j], p[i]
            s = -s
    return s


def leibniz_det(rows, order) -> OrderElem:
    n = len(rows)
    total = order.zero()
    for perm in permutations(range(n)):
        term = order.one()
        for i in range(n):
            term = ref_mul(term, rows[i][perm[i]])
        total = total + term if _sign(perm) > 0 else total - term
    return total


def ref_rank(m) -> int:
    """Largest k with a nonzero k x k minor."""
    from itertools import combinations

    rows, cols = m.shape
    for k in range(min(rows, cols), 0, -1):
        for R in combinations(range(rows), k):
            for C in combinations(range(cols), k):
                sub = [[m.entries[i][j] for j in C] for i in R]
                if leibniz_det(sub, m.order):
                    return k
    return 0


def ref_adjugate(m):
    n = m.rows
    order = m.order
    if n == 1:
        return [[order.one()]]
    out = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            sub = [[m.entries[r][c] for c in range(n) if c != j] for r in range(n) if r != i]
            cof = leibniz_det(sub, order)
            out[j][i] = cof if (i + j) % 2 == 0 else -cof
    return out


def ref_min_alpha(phi) -> int:
    """Smallest beta >= 1 with beta * phi^{-1} integral, by scanning divisors of norm(det)."""
    order = phi.order
    D = leibniz_det(phi.entries, order)
    nd = ref_norm(D)
    adj = ref_adjugate(phi)
    Dbar = D.conj()
    scaled = [[ref_mul(x, Dbar) for x in row] for row in adj]  # phi^{-1} = scaled / nd
    for beta in range(1, nd + 1):
        if nd % beta:
            continue
        if all((beta * x.a) % nd == 0 and (beta * x.b) % nd == 0 for row in scaled for x in row):
            return beta
    raise AssertionError("norm(det) always works")


def point_action(x: OrderElem, m: int):
    M = mult_matrix(x)
    return [[v % m for v in row] for row in M]


def ref_apply(phi, point, m):
    """phi acting on a point of E[m]^N written as 2N coordinates."""
    n, N = phi.shape
    out = []
    for i in range(n):
        acc = [0, 0]
        for j in range(N):
            M = point_action(phi.entries[i][j], m)
            u, v = point[2 * j], point[2 * j + 1]
            acc[0] += M[0][0] * u + M[0][1] * v
            acc[1] += M[1][0] * u + M[1][1] * v
        out.extend([acc[0] % m, acc[1] % m])
    return tuple(out)


def ref_kernel(phi, m):
    N = phi.cols
    zero = tuple([0] * (2 * phi.rows))
    return {p for p in product(range(m), repeat=2 * N) if ref_apply(phi, p, m) == zero}


def ref_stabilizer(S, L):
    S = set(S)
    dim = len(next(iter(S)))
    out = set()
    for t in product(range(L), repeat=dim):
        if all(tuple((a + b) % L for a, b in zip(s, t)) in S for s in S):
            out.add(t)
    return out


def ref_degree(rows, order) -> int:
    """Sum over ordered n-tuples of distinct positions in the multiset (no combinatorial shortcut)."""
    if not rows:
        return 0
    n = len(rows[0])
    total = 0
    for idx in permutations(range(len(rows)), n):
        total += ref_norm(leibniz_det([list(rows[i]) for i in idx], order))
    return total


def ref_gael(B):
    """Both sides of the tensor identity, from first principles."""
    from itertools import combinations

    N, n = B.shape
    k = comb(N - 1, n - 1)
    rows = [B.entries[i] for i in range(N) for _ in range(k)]
    lhs = ref_degree(rows, B.order)
    rhs = k**n * sum(
        factorial(n) * ref_norm(leibniz_det([B.entries[i] for i in I], B.order))
        for I in combinations(range(N), n)
    )
    return lhs, rhs


def mp_power_product(factors, symbols, values, prec=600):
    """High-precision value of prod base^exp with mpmath."""
    import mpmath

    with mpmath.workprec(prec):
        acc = mpmath.mpf(1)
        for b, e in factors:
            acc *= mpmath.power(mpmath.mpf(b), mpmath.mpf(e.numerator) / e.denominator)
        for s, e in symbols:
            v = Fraction(values[s])
            base = mpmath.mpf(v.numerator) / v.denominator
            acc *= mpmath.power(base, mpmath.mpf(e.numerator) / e.denominator)
        return acc


def ref_connected_kernel_degree(K, n):
    """n! det(K K*) for the connected kernel of K (rank N-n, rows over Z or Z[i]).

    Valid when the maximal minors of K generate the unit ideal: then ker K
    is connected and the orthogonal lattice has the same Gram determinant.
    Returns None when that primitivity test fails.
    """
    from math import gcd
    from itertools import combinations

    order = K.order
    r, N = K.rows, K.cols
    g = 0
    for cols in combinations(range(N), r):
        g = gcd(g, leibniz_det([[K.entries[i][j] for j in cols] for i in range(r)], order).norm())
    if g != 1:
        return None
    if r == 0:
        return factorial(n)
    gram = [
        [sum((ref_mul(K.entries[i][k], K.entries[j][k].conj()) for k in range(N)), order.zero()) for j in range(r)]
        for i in range(r)
    ]
    d = leibniz_det(gram, order)
    assert d.b == 0 and d.a > 0
    return factorial(n) * d.a
