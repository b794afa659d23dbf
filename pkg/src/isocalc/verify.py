"""Randomized self-check suite run by ``isocalc verify``.

Each check draws seeded instances and compares a fast exact routine
against a slower independent one (brute-force enumeration, literal
expansion, explicit multiplication).
"""

from __future__ import annotations

import random
from math import factorial

from .divisors import DivisorClass, c1_standard, degree_int, degree_int_expanded, gael_check, pullback
from .generate import random_isogeny, random_order, random_rank_n
from .matrix import MorphMatrix, dual_isogeny, scaled_inverse_is_integral
from .order import GAUSSIAN, INTEGERS
from .saturation import all_minors_nonzero, lambda_bound_int, saturate_minors
from .torsion import DEFAULT_BUDGET, count_kernel


def _check_saturation(rng, trials):
    for _ in range(trials):
        order = rng.choice([INTEGERS, GAUSSIAN])
        n = rng.randint(1, 3)
        N = rng.randint(n, 6)
        psi = random_rank_n(n, N, order, rng, max_norm=25, zero_prob=0.4)
        res = saturate_minors(psi)
        out = psi @ res.J(order) @ res.T(order)
        if not all_minors_nonzero(out):
            return False, f"minor vanished for {psi}"
        if res.max_lambda() > lambda_bound_int(N, n):
            return False, f"lambda too large for {psi}"
    return True, ""


def _check_dual(rng, trials):
    for _ in range(trials):
        order = random_order(rng)
        N = rng.randint(1, 3)
        phi = random_isogeny(N, order, rng, max_norm=9)
        dr = dual_isogeny(phi)
        scalar = MorphMatrix.scalar(N, dr.alpha, order)
        if phi @ dr.dual != scalar or dr.dual @ phi != scalar:
            return False, f"dual identity fails for {phi}"
        if dr.dual.det().norm() * phi.det().norm() != dr.alpha ** (2 * N):
            return False, f"kernel identity fails for {phi}"
        if phi.det().norm() <= 200:
            for beta in range(1, dr.alpha):
                if scaled_inverse_is_integral(phi, beta):
                    return False, f"alpha not minimal for {phi}"
    return True, ""


def _check_kernel(rng, trials, budget):
    done = 0
    while done < trials:
        order = rng.choice([INTEGERS, GAUSSIAN])
        N = rng.randint(1, 2)
        phi = random_isogeny(N, order, rng, max_norm=5)
        alpha = dual_isogeny(phi).alpha
        if alpha ** (2 * N) > budget:
            continue
        if count_kernel(phi, alpha, budget) != phi.det().norm():
            return False, f"kernel count differs for {phi}"
        done += 1
    return True, ""


def _check_degrees(rng, trials):
    for _ in range(trials):
        order = rng.choice([INTEGERS, GAUSSIAN])
        n = rng.randint(1, 3)
        N = rng.randint(n, 5)
        B = random_rank_n(N, n, order, rng, max_norm=16, zero_prob=0.3) if N == n else None
        if B is None:
            rows = []
            while len(rows) < N:
                r = random_rank_n(1, n, order, rng, max_norm=16, zero_prob=0.3)
                rows.append(list(r.row(0)))
            B = MorphMatrix(rows, order)
        if not gael_check(B).equal:
            return False, f"gael identity fails for {B}"
        psi = random_isogeny(n, order, rng, max_norm=9)
        cls = pullback(c1_standard(n, order), psi)
        if degree_int(cls) != factorial(n) * psi.det().norm():
            return False, f"pullback degree wrong for {psi}"
        doubled = DivisorClass(n, order, [(r, 2 * m) for r, m in cls.items()])
        if degree_int(doubled) != degree_int_expanded(doubled):
            return False, f"literal expansion disagrees for {psi}"
    return True, ""


def run_suite(seed: int = 0, budget: int = DEFAULT_BUDGET, trials: int = 40) -> dict:
    rng = random.Random(seed)
    checks = {
        "saturation": lambda: _check_saturation(rng, trials),
        "dual": lambda: _check_dual(rng, trials),
        "kernel_count": lambda: _check_kernel(rng, max(1, trials // 4), budget),
        "degrees": lambda: _check_degrees(rng, trials),
    }
    results = {}
    for name, fn in checks.items():
        ok, detail = fn()
        results[name] = {"ok": ok, "detail": detail}
    return {"seed": seed, "trials": trials, "ok": all(r["ok"] for r in results.values()), "checks": results}
