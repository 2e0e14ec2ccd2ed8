"""Property-based checks of the invariants every module promises."""

import math

import numpy as np
import pytest
from hypothesis import HealthCheck, assume, given, settings
from hypothesis import strategies as st

from renyi_range import diagram2, diagram3
from renyi_range.entropy import (
    UniformMixture,
    product_distribution,
    realize_mixture,
    renyi_entropy,
)
from renyi_range.vandermonde import VandermondeInstance, gen_vandermonde_det, lu_determinant

SETTINGS = settings(max_examples=200, deadline=None, suppress_health_check=[HealthCheck.too_slow])

positive_orders = st.one_of(
    st.floats(min_value=0.05, max_value=20, allow_nan=False),
    st.sampled_from([0.5, 1.0, 2.0, 3.0, math.inf]),
)


@st.composite
def distributions(draw, min_size=1, max_size=12):
    n = draw(st.integers(min_size, max_size))
    raw = draw(st.lists(st.floats(min_value=0, max_value=1), min_size=n, max_size=n))
    raw = np.array(raw)
    assume(raw.sum() > 1e-3)
    return raw / raw.sum()


def _is_uniform(p):
    nz = p[p > 0]
    return np.ptp(nz) <= 1e-12 * nz.max()


@SETTINGS
@given(distributions(min_size=2), positive_orders, positive_orders)
def test_monotone_in_order(p, a, b):
    assume(abs(a - b) > 1e-3)
    a, b = min(a, b), max(a, b)
    ha, hb = renyi_entropy(p, a), renyi_entropy(p, b)
    if _is_uniform(p):
        assert ha == pytest.approx(hb, abs=1e-12)
    else:
        assert hb <= ha + 1e-12
        # Strictness, where the difference is resolvable in floating point.
        nz = p[p > 0]
        if nz.min() > 1e-3 and np.ptp(np.log(nz)) > 0.1 and b - a > 0.1:
            assert hb < ha


@SETTINGS
@given(distributions(max_size=6), distributions(max_size=6), st.sampled_from([0, 0.5, 1, 2, math.inf]))
def test_additive_on_products(p, q, a):
    # Products of tiny masses can underflow to 0, which changes the support.
    assume(p[p > 0].min() * q[q > 0].min() > 0)
    pq = product_distribution(p, q)
    assert renyi_entropy(pq, a) == pytest.approx(renyi_entropy(p, a) + renyi_entropy(q, a), abs=1e-10)


@SETTINGS
@given(distributions(min_size=2), positive_orders, st.randoms(use_true_random=False))
def test_permutation_invariant_bit_exact(p, a, rnd):
    idx = list(range(len(p)))
    rnd.shuffle(idx)
    assert renyi_entropy(p[idx], a) == renyi_entropy(p, a)


@SETTINGS
@given(st.lists(st.tuples(st.integers(1, 40), st.floats(0.001, 1)), min_size=1, max_size=6, unique_by=lambda t: t[0]))
def test_realized_mixture_sorted_and_normalised(pairs):
    pairs = sorted(pairs, reverse=True)
    total = sum(w for _, w in pairs)
    m = UniformMixture.from_pairs((k, w / total) for k, w in pairs)
    p = realize_mixture(m).probs
    assert abs(math.fsum(p) - 1) <= 1e-12
    assert np.all(np.diff(p) >= 0)
    assert len(p) == pairs[0][0]


@SETTINGS
@given(st.integers(2, 6), st.data())
def test_vandermonde_positive(size, data):
    xs = sorted(data.draw(st.lists(st.floats(0.01, 10), min_size=size, max_size=size, unique=True)))
    betas = sorted(data.draw(st.lists(st.floats(-3, 3), min_size=size, max_size=size, unique=True)))
    assume(min(np.diff(xs)) > 1e-3 and min(np.diff(betas)) > 1e-3)
    assert gen_vandermonde_det(VandermondeInstance(tuple(xs), tuple(betas))) > 0


@SETTINGS
@given(st.integers(2, 5), st.data())
def test_vandermonde_grows_in_last_abscissa(size, data):
    # With the first exponent shifted to 0 (dividing out prod x_j ** beta_1),
    # the determinant is non-decreasing in x_l for x_l >= x_{l-1}.
    xs = sorted(data.draw(st.lists(st.floats(0.05, 5), min_size=size, max_size=size, unique=True)))
    betas = sorted(data.draw(st.lists(st.floats(-2, 2), min_size=size, max_size=size, unique=True)))
    assume(min(np.diff(xs)) > 1e-3 and min(np.diff(betas)) > 1e-2)
    b = np.array(betas) - betas[0]

    def det(last):
        x = np.array(xs[:-1] + [last])
        return lu_determinant(x[None, :] ** b[:, None])

    x0 = xs[-2]
    grid = x0 + np.linspace(0, 3, 31)
    vals = np.array([det(v) for v in grid])
    scale = np.max(np.abs(vals)) + 1e-300
    assert np.all(np.diff(vals) >= -1e-9 * scale)


@SETTINGS
@given(st.integers(1, 12), st.sampled_from([0.5, 1, 2, 3, math.inf]), st.floats(0, 1))
def test_segment_round_trip(k, a, u):
    h = math.log(k) + u * (math.log(k + 1) - math.log(k))
    s = diagram2.invert_on_segment(k + 1, k, a, h)
    assert renyi_entropy(diagram2.segment_point(k + 1, k, s), a) == pytest.approx(h, abs=1e-10)


@pytest.mark.parametrize("a", [0.5, 1, 2, 3, math.inf])
def test_segment_monotone(a):
    s = np.linspace(0, 1, 10_001)
    for k in range(1, 13):
        h = diagram2.segment_entropy(k + 1, k, s, a)
        assert np.all(np.diff(h) > 0)
    for n in (2, 3, 8, 64):
        h = diagram2.segment_entropy(n, 1, s, a)
        assert np.all(np.diff(h) > 0)


@SETTINGS
@given(distributions(min_size=2, max_size=8), st.sampled_from([(1, 2), (0.5, 2), (2, 3), (1, math.inf)]))
def test_two_order_sandwich(p, orders):
    n = len(p)
    h1, h2 = (renyi_entropy(p, a) for a in orders)
    up = diagram2.upper_bound(diagram2.BoundQuery2(*orders, h1, n)).bound
    lo = diagram2.lower_bound_fixed_n(diagram2.BoundQuery2(*orders, h1, n)).bound
    assert lo - 1e-9 <= h2 <= up + 1e-9


@settings(max_examples=60, deadline=None)
@given(distributions(min_size=3, max_size=7), st.sampled_from([(1, 2, 3), (0.5, 2, 5), (0.5, 1, math.inf)]))
def test_three_order_sandwich_and_round_trip(p, orders):
    # Within ~1e-14 of U_1, one ulp of the apex weight moves H_0.5 by more
    # than the 1e-9 match tolerance; such points are not resolvable.
    assume(p[p > 0].min() >= 1e-12)
    n = len(p)
    h = [float(renyi_entropy(p, a)) for a in orders]
    lo = diagram3.lower3_array(*orders, np.array([h[0]]), np.array([h[1]]))
    up = diagram3.upper3_array(*orders, np.array([h[0]]), np.array([h[1]]), n)
    assert lo[4][0] and up[4][0] >= 1
    assert lo[0][0] - 1e-9 <= h[2] <= up[0][0] + 1e-9
    cell = diagram3.invert_on_lower_surface(orders[0], orders[1], h[0], h[1])
    q = diagram3.simplex_point(cell)
    assert renyi_entropy(q, orders[0]) == pytest.approx(h[0], abs=1e-9)
    assert renyi_entropy(q, orders[1]) == pytest.approx(h[1], abs=1e-9)


@pytest.mark.parametrize("k", [1, 2, 3, 6, 10])
@pytest.mark.parametrize("orders", [(1, 2, 3), (0.5, 2, math.inf)])
def test_vertex_mapping(k, orders):
    s = diagram3.surface_mesh(*orders, max(k, 3), "lower", 2)
    if k >= 3:
        s2 = diagram3.surface_mesh(*orders, k, "upper", 2)
        assert np.any(np.all(np.abs(s2.vertices - math.log(k)) < 1e-12, axis=1))
    assert np.any(np.all(np.abs(s.vertices - math.log(k)) < 1e-12, axis=1))
