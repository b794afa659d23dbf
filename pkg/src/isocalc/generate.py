"""Seeded random instances for verification runs and tests."""

from __future__ import annotations

import random
from math import isqrt

from .matrix import Isogeny, MorphMatrix, det, rank
from .order import OrderDesc, OrderElem


def random_elem(order: OrderDesc, rng: random.Random, max_norm: int = 100) -> OrderElem:
    """Uniform over elements with norm <= max_norm (rejection sampling on a box)."""
    if order.is_rational:
        r = isqrt(max_norm)
        return order.elem(rng.randint(-r, r))
    # norm >= (4q - t^2)/(4q) * a^2-ish; a generous box plus rejection is enough here
    box = isqrt(max_norm) * 2 + 2
    while True:
        a = rng.randint(-box, box)
        b = rng.randint(-box, box)
        x = OrderElem(a, b, order)
        if x.norm() <= max_norm:
            return x


def random_matrix(n: int, N: int, order: OrderDesc, rng: random.Random, max_norm: int = 100, zero_prob: float = 0.0) -> MorphMatrix:
    rows = []
    for _ in range(n):
        row = []
        for _ in range(N):
            if zero_prob and rng.random() < zero_prob:
                row.append(order.zero())
            else:
                row.append(random_elem(order, rng, max_norm))
        rows.append(row)
    return MorphMatrix(rows, order)


def random_rank_n(n: int, N: int, order: OrderDesc, rng: random.Random, max_norm: int = 100, zero_prob: float = 0.0) -> MorphMatrix:
    while True:
        m = random_matrix(n, N, order, rng, max_norm, zero_prob)
        if rank(m) == n:
            return m


def random_isogeny(N: int, order: OrderDesc, rng: random.Random, max_norm: int = 9, max_ker: int | None = None) -> Isogeny:
    """Random N x N isogeny, optionally with norm(det) <= max_ker."""
    while True:
        m = random_matrix(N, N, order, rng, max_norm)
        d = det(m)
        if not d:
            continue
        if max_ker is not None and d.norm() > max_ker:
            continue
        return Isogeny(m.entries, order)


def random_order(rng: random.Random) -> OrderDesc:
    """Z, Z[i], Z[w] (Eisenstein), or a random non-maximal imaginary quadratic order."""
    choice = rng.randrange(4)
    if choice == 0:
        return OrderDesc.rational()
    if choice == 1:
        return OrderDesc.quadratic(0, 1)
    if choice == 2:
        return OrderDesc.quadratic(-1, 1)
    while True:
        t = rng.randint(-3, 3)
        q = rng.randint(1, 6)
        if t * t - 4 * q < 0:
            return OrderDesc.quadratic(t, q)


def random_pipeline_phi(N: int, n: int, order: OrderDesc, rng: random.Random, max_norm: int = 4) -> Isogeny:
    """Isogeny whose top N-n rows and bottom n rows have full rank (automatic once det != 0)."""
    return random_isogeny(N, order, rng, max_norm)


def random_unimodular(N: int, order: OrderDesc, rng: random.Random, steps: int = 6, max_norm: int = 4) -> MorphMatrix:
    """Product of random elementary row operations (determinant 1)."""
    m = MorphMatrix.identity(N, order)
    if N == 1:
        return m
    for _ in range(steps):
        i, j = rng.sample(range(N), 2)
        e = [[1 if r == c else 0 for c in range(N)] for r in range(N)]
        e[i][j] = random_elem(order, rng, max_norm)
        m = MorphMatrix(e, order) @ m
    return m


def random_small_alpha_isogeny(N: int, order: OrderDesc, rng: random.Random, diag_norm: int = 4) -> Isogeny:
    """U D V with U, V unimodular and D diagonal of small norm, so alpha stays small."""
    while True:
        D = [random_elem(order, rng, diag_norm) for _ in range(N)]
        if all(D):
            break
    m = random_unimodular(N, order, rng) @ MorphMatrix.diag(D, order) @ random_unimodular(N, order, rng)
    return Isogeny(m.entries, order)
