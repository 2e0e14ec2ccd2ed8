import math

import numpy as np
import pytest

from renyi_range.diagram2 import (
    BoundQuery2,
    boundary_curve,
    bucket,
    invert_on_segment,
    lower_bound,
    lower_bound_array,
    lower_bound_fixed_n,
    lower_bound_unbounded,
    segment_entropy,
    segment_point,
    upper_bound,
    upper_bound_array,
)
from renyi_range.entropy import realize_mixture, renyi_entropy
from renyi_range.errors import ConsistencyError, DomainError, EntropyRangeError

# tests/oracles/reference_values.py: root of H_1((s/2, 1 - s/2)) = 0.5, bracketed
# by a 1e-6 scan and refined at 50 digits.
SEGMENT_ROOT = 0.39941980510795438917186637793109812105964551717603
SEGMENT_BRACKET = (0.399419, 0.39942)
# Brute force over the 1/600 grid, H_1 in [0.998, 1.002].
GRID_MAX_H2_N3 = 0.9433907538393586
GRID_MIN_H2_N4 = 0.7262789136794522


class TestSegments:
    def test_points(self):
        assert segment_point(2, 1, 1.0).probs.tolist() == [0.5, 0.5]
        assert segment_point(2, 1, 0.0).probs.tolist() == [0.0, 1.0]
        np.testing.assert_allclose(segment_point(4, 1, 0.5).probs, [0.125, 0.125, 0.125, 0.625], atol=1e-16)

    @pytest.mark.parametrize("args", [(1, 2, 0.5), (2, 2, 0.5), (2, 1, 1.5)])
    def test_bad_points(self, args):
        with pytest.raises(DomainError):
            segment_point(*args)

    @pytest.mark.parametrize("k", [1, 2, 5])
    @pytest.mark.parametrize("a", [0.5, 1, 2, math.inf])
    def test_inverse_endpoints(self, k, a):
        assert invert_on_segment(k + 1, k, a, math.log(k)) == pytest.approx(0.0, abs=1e-12)
        assert invert_on_segment(k + 1, k, a, math.log(k + 1)) == pytest.approx(1.0, abs=1e-12)

    def test_binary_root_reference(self):
        s = invert_on_segment(2, 1, 1, 0.5)
        assert SEGMENT_BRACKET[0] <= s <= SEGMENT_BRACKET[1]
        assert s == pytest.approx(SEGMENT_ROOT, abs=1e-14)
        assert renyi_entropy(segment_point(2, 1, s), 1) == pytest.approx(0.5, abs=1e-14)

    def test_out_of_range(self):
        with pytest.raises(EntropyRangeError) as e:
            invert_on_segment(3, 2, 1, 0.5)
        assert e.value.interval == pytest.approx((math.log(2), math.log(3)))

    def test_order_zero_not_invertible(self):
        with pytest.raises(DomainError):
            invert_on_segment(3, 2, 0, 0.8)

    def test_monotonicity_violation_detected(self, monkeypatch):
        import renyi_range.diagram2 as d2

        monkeypatch.setattr(d2, "segment_entropy", lambda k_hi, k_lo, s, order: -np.asarray(s, dtype=float))
        with pytest.raises(ConsistencyError):
            d2.invert_on_segment(3, 2, 1, 0.8)


def test_bucket_closed_on_left():
    h = np.array([0.0, math.log(2), math.log(3), math.log(3) - 1e-15, 2.0])
    assert bucket(h).tolist() == [1, 2, 3, 2, 7]


class TestQuery:
    def test_orders_must_increase(self):
        with pytest.raises(DomainError):
            BoundQuery2(2, 2, 0.5)
        with pytest.raises(DomainError):
            BoundQuery2(2, 1, 0.5)

    def test_range(self):
        with pytest.raises(EntropyRangeError) as e:
            BoundQuery2(1, 2, 1.5, 4)
        assert e.value.interval == (0.0, math.log(4))
        with pytest.raises(EntropyRangeError):
            BoundQuery2(1, 2, -0.1)

    def test_clamps_near_log_n(self):
        q = BoundQuery2(1, 2, math.log(4) + 5e-13, 4)
        assert q.h1 == math.log(4)


class TestUpper:
    def test_diagonal(self):
        r = upper_bound(BoundQuery2(1, 2, math.log(3)))
        assert r.bound == pytest.approx(math.log(3), abs=1e-12)
        assert r.attained
        np.testing.assert_allclose(realize_mixture(r.witness).probs, [1 / 3] * 3, atol=1e-12)
        assert upper_bound(BoundQuery2(1, math.inf, math.log(2))).bound == pytest.approx(math.log(2), abs=1e-12)

    def test_grid_oracle(self):
        r = upper_bound(BoundQuery2(1, 2, 1.0))
        assert r.witness.supports == (3, 2)
        assert abs(r.bound - GRID_MAX_H2_N3) < 5e-3

    def test_n_only_limits_h1(self):
        a = upper_bound(BoundQuery2(0.5, 3, 0.9))
        b = upper_bound(BoundQuery2(0.5, 3, 0.9, 3))
        assert a.bound == b.bound

    def test_witness_reproduces(self):
        for h in (0.1, 0.7, 1.3, 2.9):
            for a1, a2 in ((1, 2), (0.5, 2), (2, 3), (1, math.inf)):
                r = upper_bound(BoundQuery2(a1, a2, h))
                p = realize_mixture(r.witness)
                assert renyi_entropy(p, a1) == pytest.approx(h, abs=1e-9)
                assert renyi_entropy(p, a2) == pytest.approx(r.bound, abs=1e-9)


class TestLower:
    def test_endpoints(self):
        r = lower_bound_fixed_n(BoundQuery2(1, 2, 0.0, 4))
        assert r.bound == 0 and r.witness.supports == (1,)
        r = lower_bound_fixed_n(BoundQuery2(1, 2, math.log(4), 4))
        assert r.bound == pytest.approx(math.log(4), abs=1e-12) and r.witness.supports == (4,)

    def test_grid_oracle(self):
        r = lower_bound_fixed_n(BoundQuery2(1, 2, 1.0, 4))
        assert abs(r.bound - GRID_MIN_H2_N4) < 5e-3
        assert r.witness.supports == (4, 1)

    def test_fixed_n_requires_n(self):
        with pytest.raises(DomainError):
            lower_bound_fixed_n(BoundQuery2(1, 2, 1.0))

    def test_unbounded(self):
        r = lower_bound_unbounded(BoundQuery2(0.5, 2, 3.0))
        assert (r.bound, r.attained, r.witness) == (0.0, False, None)
        assert lower_bound_unbounded(BoundQuery2(2, 3, 2.0)).bound == pytest.approx(1.5, abs=1e-15)
        assert lower_bound_unbounded(BoundQuery2(2, math.inf, 1.0)).bound == pytest.approx(0.5, abs=1e-15)
        with pytest.raises(EntropyRangeError):
            lower_bound_unbounded(BoundQuery2(2, 3, 0.0))

    def test_dispatch(self):
        assert lower_bound(BoundQuery2(1, 2, 1.0, 4)).attained
        assert not lower_bound(BoundQuery2(1, 2, 1.0)).attained

    def test_unbounded_below_fixed(self):
        h = np.linspace(0.01, math.log(6), 40)
        for a1, a2 in ((1, 2), (0.5, 2), (2, 3), (1.5, math.inf)):
            for n in (2, 3, 6):
                hh = h[h <= math.log(n)]
                fixed = lower_bound_array(a1, a2, hh, n)[0]
                free = np.array([lower_bound_unbounded(BoundQuery2(a1, a2, x)).bound for x in hh])
                assert np.all(free <= fixed + 1e-12)

    def test_lower_below_upper(self):
        h = np.linspace(0, math.log(5), 101)
        for a1, a2 in ((1, 2), (0.5, 2), (2, 3), (1, math.inf)):
            assert np.all(lower_bound_array(a1, a2, h, 5)[0] <= upper_bound_array(a1, a2, h)[0] + 1e-12)

    def test_n_one(self):
        assert lower_bound_fixed_n(BoundQuery2(1, 2, 0.0, 1)).bound == 0.0


class TestCurve:
    @pytest.mark.parametrize("n", [2, 3, 4, 7])
    def test_diagonal_vertices(self, n):
        c = boundary_curve(1, 2, n, 16)
        for k in range(1, n + 1):
            d = np.abs(c.vertices - math.log(k)).max(axis=1)
            assert d.min() < 1e-12

    def test_order_and_labels(self):
        c = boundary_curve(1, 2, 4, 5)
        assert c.closed
        assert c.vertices.shape == (16, 2)
        assert c.segment_labels[0] == (4, 3) and c.segment_labels[-1] == (1, 4)
        np.testing.assert_allclose(c.vertices[0], [math.log(4)] * 2, atol=1e-14)
        # Diagonal vertices appear for k = n .. 1 in order.
        starts = [i for i in range(len(c.segment_labels)) if i == 0 or c.segment_labels[i] != c.segment_labels[i - 1]]
        np.testing.assert_allclose(c.vertices[starts, 0], np.log([4, 3, 2, 1]), atol=1e-14)

    def test_two_points_arcs_coincide(self):
        c = boundary_curve(1, 2, 2, 9)
        upper = c.vertices[np.array([lab == (2, 1) for lab in c.segment_labels])]
        lower = c.vertices[np.array([lab == (1, 2) for lab in c.segment_labels])]
        np.testing.assert_allclose(np.sort(upper[1:], axis=0), np.sort(lower[1:], axis=0), atol=1e-13)

    def test_bad_arguments(self):
        with pytest.raises(DomainError):
            boundary_curve(1, 2, 1)
        with pytest.raises(DomainError):
            boundary_curve(1, 2, 3, 1)

    def test_curve_matches_bounds(self):
        c = boundary_curve(0.5, 2, 5, 33)
        upper = np.array([lab[0] > lab[1] for lab in c.segment_labels])
        v = c.vertices
        np.testing.assert_allclose(upper_bound_array(0.5, 2, v[upper, 0])[0], v[upper, 1], atol=1e-10)
        np.testing.assert_allclose(lower_bound_array(0.5, 2, v[~upper, 0], 5)[0], v[~upper, 1], atol=1e-10)


def test_segment_entropy_broadcasts():
    s = np.linspace(0, 1, 7)
    h = segment_entropy(np.array([[3.0], [5.0]]), np.array([[2.0], [4.0]]), s, 2)
    assert h.shape == (2, 7)
