from itertools import product

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from conftest import isogenies
from oracles import ref_apply, ref_kernel, ref_norm, ref_stabilizer

from isocalc.matrix import MorphMatrix, det, dual_isogeny
from isocalc.order import EISENSTEIN, GAUSSIAN, INTEGERS, OrderDesc
from isocalc.torsion import (
    BudgetExceeded,
    TorsionModel,
    count_kernel,
    eval_point,
    gauss_pair,
    stab_cardinality_identity,
    stabilizer,
    submodule_generated,
    subgroup_generated,
    verify_relker,
    verify_relker_composition,
    verify_relker_gauss,
    verify_stab,
    verify_stab_full,
)

Z = INTEGERS
G = GAUSSIAN


def M(rows, order=Z):
    return MorphMatrix(rows, order)


def test_companion_action():
    for order in (G, EISENSTEIN, OrderDesc.quadratic(3, 5)):
        for m in (2, 5, 7):
            w = TorsionModel(m, order).omega
            lhs = (w @ w) % m
            rhs = (order.t * w - order.q * np.eye(2, dtype=np.int64)) % m
            assert np.array_equal(lhs, rhs)


def test_eval_examples():
    x = (1, 1, 0, 1)
    assert eval_point(MorphMatrix.identity(2, G), x, 3) == x
    for p in product(range(2), repeat=2):
        assert eval_point(M([[2]]), p, 2) == (0, 0)
    assert eval_point(M([[G.elem(1, 1)]], G), (1, 0), 2) == (1, 1)


def test_count_kernel_examples():
    assert count_kernel(M([[2]]), 2) == 4
    for m in (1, 2, 5):
        assert count_kernel(MorphMatrix.identity(2, G), m) == 1
    assert count_kernel(M([[G.elem(1, 1)]], G), 2) == 2
    # default modulus is alpha
    assert count_kernel(MorphMatrix.diag([2, 3], Z)) == 36


def test_budget_refusal():
    with pytest.raises(BudgetExceeded):
        count_kernel(MorphMatrix.scalar(3, 10, Z), 10, budget=10**5)


def test_relker_examples():
    I2 = MorphMatrix.identity(2, G)
    assert verify_relker_composition(I2, I2, 3)
    a, b = M([[1]]), M([[1]])
    full, reduced = gauss_pair(a, b)
    model = TorsionModel(3, Z)
    k1 = {tuple(r) for r in model.kernel(full).tolist()}
    k2 = {tuple(r) for r in model.kernel(reduced).tolist()}
    # x1 = 0 and x1 + x2 = 0 leave only the origin of E[3]^2
    assert k1 == k2 == {(0, 0, 0, 0)}
    assert verify_relker_gauss(a, b, 3)
    psi = M([[G.elem(1, 1), 2], [0, G.elem(0, 1)]], G)
    psi2 = M([[1, G.elem(1, -1)]], G)
    assert verify_relker(psi, psi2, M([[G.elem(1, 1)]], G), M([[G.elem(2, 1)]], G), 2)


def test_stab_examples():
    assert verify_stab_full({(0, 0)}, M([[2]]), 2)
    S = subgroup_generated([(1, 2, 0, 3)], 4)
    assert verify_stab(S, MorphMatrix.identity(2, Z), 4)
    assert stabilizer(S, 4) == S
    # E[2] x {0} inside E[4]^2 written with coordinates mod 4
    S = {(2 * a, 2 * b, 0, 0) for a in range(2) for b in range(2)}
    assert verify_stab(S, MorphMatrix.diag([2, 1], Z), 4)
    lhs, rhs = stab_cardinality_identity(S, MorphMatrix.diag([2, 1], Z), 4)
    assert lhs == rhs


def test_submodule_is_closed_under_omega():
    S = submodule_generated([(1, 0, 2, 1)], 3, G)
    w = TorsionModel(3, G).omega
    for p in S:
        arr = np.array(p).reshape(-1, 2)
        img = tuple(int(v) for v in ((arr @ w.T) % 3).reshape(-1))
        assert img in S


@given(st.data())
def test_kernel_matches_enumeration(data):
    order = data.draw(st.sampled_from([Z, G, EISENSTEIN]))
    N = data.draw(st.integers(1, 2))
    phi = data.draw(isogenies(N, order, bound=3))
    m = data.draw(st.integers(1, 5))
    assume(m ** (2 * N) <= 5000)
    model = TorsionModel(m, order)
    got = {tuple(r) for r in model.kernel(phi).tolist()}
    assert got == ref_kernel(phi, m)
    for p in list(got)[:5]:
        assert ref_apply(phi, p, m) == tuple([0] * (2 * N))


@given(st.data())
def test_count_kernel_equals_norm_det(data):
    order = data.draw(st.sampled_from([Z, G, EISENSTEIN, OrderDesc.quadratic(1, 2)]))
    N = data.draw(st.integers(1, 2))
    phi = data.draw(isogenies(N, order, bound=3))
    alpha = dual_isogeny(phi).alpha
    assume(alpha ** (2 * N) <= 10**5)
    assert count_kernel(phi, alpha) == ref_norm(det(phi))


@given(st.data())
def test_count_kernel_multiplicative(data):
    order = data.draw(st.sampled_from([Z, G]))
    a = data.draw(isogenies(1, order, bound=3))
    b = data.draw(isogenies(1, order, bound=3))
    ab = a @ b
    L = dual_isogeny(ab).alpha
    assume(L**2 <= 10**5)
    assert count_kernel(ab, L) == count_kernel(a, L) * count_kernel(b, L)


@given(st.data())
def test_stabilizer_matches_naive(data):
    L = data.draw(st.integers(2, 5))
    dim = data.draw(st.integers(1, 2))
    pts = data.draw(st.lists(st.tuples(*[st.integers(0, L - 1)] * dim), min_size=1, max_size=12))
    S = set(pts)
    if data.draw(st.booleans()):
        S = subgroup_generated(list(S)[:2], L) | S
    assert stabilizer(S, L) == ref_stabilizer(S, L)


@given(st.data())
def test_stab_preimage_on_random_sets(data):
    order = data.draw(st.sampled_from([Z, G]))
    phi = data.draw(isogenies(1, order, bound=3))
    alpha = dual_isogeny(phi).alpha
    m = data.draw(st.integers(2, 4))
    assume((alpha * m) ** 2 <= 2000)
    S = set(data.draw(st.lists(st.tuples(st.integers(0, m - 1), st.integers(0, m - 1)), min_size=1, max_size=5)))
    assert verify_stab(S, phi, m)
    sub = submodule_generated(list(S), m, order)
    lhs, rhs = stab_cardinality_identity(sub, phi, m)
    assert lhs == rhs
