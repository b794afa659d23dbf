import os
import sys

from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

sys.path.insert(0, os.path.dirname(__file__))

from isocalc.matrix import MorphMatrix  # noqa: E402
from isocalc.order import EISENSTEIN, GAUSSIAN, INTEGERS, OrderDesc, OrderElem  # noqa: E402

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@st.composite
def orders(draw, rational=True):
    choices = [GAUSSIAN, EISENSTEIN]
    if rational:
        choices.append(INTEGERS)
    pick = draw(st.sampled_from(choices + ["random"]))
    if pick != "random":
        return pick
    t = draw(st.integers(-4, 4))
    q = draw(st.integers(t * t // 4 + 1, t * t // 4 + 8))
    return OrderDesc.quadratic(t, q)


def elems(order, bound=12):
    if order.is_rational:
        return st.integers(-bound, bound).map(lambda a: OrderElem(a, 0, order))
    return st.tuples(st.integers(-bound, bound), st.integers(-bound, bound)).map(
        lambda ab: OrderElem(ab[0], ab[1], order)
    )


@st.composite
def matrices(draw, rows, cols, order=None, bound=6):
    if order is None:
        order = draw(orders())
    entries = [[draw(elems(order, bound)) for _ in range(cols)] for _ in range(rows)]
    return MorphMatrix(entries, order)


@st.composite
def isogenies(draw, N, order=None, bound=5):
    m = draw(matrices(N, N, order, bound))
    from hypothesis import assume

    assume(bool(m.det()))
    return m
