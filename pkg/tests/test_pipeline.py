import json
from fractions import Fraction
from math import factorial

import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from conftest import isogenies
from oracles import ref_connected_kernel_degree

from isocalc.matrix import MorphMatrix
from isocalc.order import EISENSTEIN, GAUSSIAN, INTEGERS
from isocalc.pipeline import (
    MinorVanished,
    PipelineError,
    PipelineInput,
    build_phi_I_family,
    compute_deg_H,
    run_pipeline,
)


def _gauss(a, b=0):
    return GAUSSIAN.elem(a, b)


def test_phi_I_family_examples():
    dual = MorphMatrix([[2, 1], [0, 1]], INTEGERS)
    fam = build_phi_I_family(dual, 1)
    assert [I for I, _ in fam] == [(0,), (1,)]
    assert [m.entries[0][0].a for _, m in fam] == [1, 1]
    with pytest.raises(MinorVanished):
        build_phi_I_family(MorphMatrix.identity(2, INTEGERS), 1)


def test_deg_H_examples():
    # phi' = [[1,-1],[0,2]]: H is the diagonal of E^2, degree 2
    phi = MorphMatrix([[1, -1], [0, 2]], INTEGERS)
    B = MorphMatrix([[1], [1]], INTEGERS)
    deg = compute_deg_H(phi, 2, B, 1, "norm")
    assert deg.value == 2 and deg.exact
    assert deg.det_factor == 4 and deg.tensor_degree == 2 and deg.divisor == 4


def test_deg_H_diag_example():
    # B = (0; 1): phi_(0) = 0 pulls O_1 back to the trivial class
    phi = MorphMatrix.diag([1, 2], INTEGERS)
    from isocalc.matrix import dual_isogeny

    dr = dual_isogeny(phi)
    assert dr.alpha == 2
    B = dr.dual.select_columns([1])
    deg = compute_deg_H(phi, 2, B, 1, "norm")
    # H = ker(1, 0) = {0} x E
    assert deg.value == 1 == ref_connected_kernel_degree(phi.select_rows([0]), 1)


def test_deg_H_identity_full_rank():
    for N in (1, 2, 3):
        phi = MorphMatrix.identity(N, GAUSSIAN)
        r = run_pipeline(PipelineInput(phi, N))
        assert r.ok and r.T.is_scalar(1)
        assert r.deg_H.value == factorial(N)


def test_deg_H_invariant_under_row_relabeling():
    phi = MorphMatrix([[1, _gauss(1, 1), 0], [0, 2, 1], [1, 0, _gauss(0, 1)]], GAUSSIAN)
    r = run_pipeline(PipelineInput(phi, 2))
    B = r.dual.select_columns([1, 2])
    for perm in ([2, 0, 1], [1, 0, 2], [2, 1, 0]):
        again = compute_deg_H(r.phi_prime, r.alpha, B.select_rows(perm), 2, "norm")
        assert again.value == r.deg_H.value


def test_identity_phi_bound_tracks_thm1():
    # H = E^N: the bound is the thm2 formula at deg_H = N!, no hidden rescaling
    from isocalc.bounds import BoundParams, thm2_bound

    phi = MorphMatrix.identity(3, INTEGERS)
    r = run_pipeline(PipelineInput(phi, 3, 1, Fraction(7)))
    assert r.ok
    assert r.bound.value == thm2_bound(6, 7, BoundParams(3, 3, 1, Fraction(1, 100))).value


def test_deg_H_paper_convention_floor():
    phi = MorphMatrix([[1, 0], [0, _gauss(1, 1)]], GAUSSIAN)
    B = MorphMatrix([[_gauss(1, 1)], [1]], GAUSSIAN)
    deg = compute_deg_H(phi, 2, B, 1, "paper")
    assert not deg.exact  # |1+i| = sqrt 2
    assert deg.det_factor == 1


def test_pipeline_smallest_example():
    phi = MorphMatrix([[1, -1], [0, 1]], INTEGERS)
    r = run_pipeline(PipelineInput(phi, 1))
    assert r.T.is_scalar(1) and r.alpha == 1
    assert r.deg_H.value == 2 == ref_connected_kernel_degree(r.phi_prime.select_rows([0]), 1)
    assert r.ok and r.bound is None
    assert any("no bound" in n for n in r.notes)


@pytest.mark.parametrize(
    "rows, order, expected",
    [
        ([[1, 0, 0], [0, 1, 0], [0, 0, 1]], GAUSSIAN, 6),
        ([[1, _gauss(1, 1), 0], [0, 2, 1], [1, 0, _gauss(0, 1)]], GAUSSIAN, 10),
    ],
)
def test_pipeline_gaussian_examples(rows, order, expected):
    phi = MorphMatrix(rows, order)
    r = run_pipeline(PipelineInput(phi, 2, 1, Fraction(10)))
    assert r.ok
    assert r.deg_H.value == expected == ref_connected_kernel_degree(r.phi_prime.select_rows([0]), 2)
    assert r.bound is not None and 0 < r.bound.value <= r.bound.upper


def test_pipeline_regression_value():
    # deg_H = 10 from the Gram oracle; the bound is then the thm2 value at (10, 10)
    from isocalc.bounds import BoundParams, thm2_bound

    phi = MorphMatrix([[1, _gauss(1, 1), 0], [0, 2, 1], [1, 0, _gauss(0, 1)]], GAUSSIAN)
    r = run_pipeline(PipelineInput(phi, 2, 1, Fraction(10)))
    direct = thm2_bound(10, 10, BoundParams(3, 2, 1, Fraction(1, 100)))
    assert r.bound.value == direct.value
    assert r.to_json()["bound"]["value"].startswith("1.065543332139894467")


def test_pipeline_is_deterministic():
    phi = MorphMatrix([[1, _gauss(1, 1), 0], [0, 2, 1], [1, 0, _gauss(0, 1)]], GAUSSIAN)
    inp = PipelineInput(phi, 2, 1, Fraction(10))
    assert run_pipeline(inp).dumps() == run_pipeline(inp).dumps()
    again = PipelineInput.from_json(json.loads(json.dumps(inp.to_json())))
    assert run_pipeline(again).dumps() == run_pipeline(inp).dumps()


def test_stage_tagged_errors():
    phi = MorphMatrix([[1, -1, 0], [0, 1, 0], [0, 0, 1]], INTEGERS)
    with pytest.raises(PipelineError) as info:
        run_pipeline(PipelineInput(phi, 2, 1, Fraction(0)))
    assert info.value.stage == "bound"


def test_input_validation():
    with pytest.raises(ValueError):
        PipelineInput(MorphMatrix([[1, 0, 0], [0, 1, 0]], INTEGERS), 1)
    with pytest.raises(ValueError):
        PipelineInput(MorphMatrix([[1, 1], [1, 1]], INTEGERS), 1)
    with pytest.raises(ValueError):
        PipelineInput(MorphMatrix.identity(2, INTEGERS), 3)


@given(st.data())
def test_deg_H_matches_gram_oracle(data):
    order = data.draw(st.sampled_from([INTEGERS, GAUSSIAN]))
    N = data.draw(st.integers(2, 3))
    n = data.draw(st.integers(1, N - 1))
    phi = data.draw(isogenies(N, order, bound=3))
    try:
        inp = PipelineInput(phi, n)
    except ValueError:
        assume(False)
    r = run_pipeline(inp)
    assert r.ok, r.checks
    ref = ref_connected_kernel_degree(r.phi_prime.select_rows(range(N - n)), n)
    if ref is not None:
        assert r.deg_H.value == ref


@given(isogenies(3, EISENSTEIN, bound=2))
def test_pipeline_identities_eisenstein(phi):
    r = run_pipeline(PipelineInput(phi, 2, 1, Fraction(5)))
    assert r.ok, r.checks
    assert r.bound.value <= r.bound.upper
