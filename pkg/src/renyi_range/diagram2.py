"""Joint range of two Rényi entropies.

For orders ``0 < a1 < a2`` and distributions on ``n`` points the range of
``P -> (H_a1(P), H_a2(P))`` is bounded by the images of the segments
``D(k+1, k)`` (mixtures of U_{k+1} and U_k) from above and of ``D(n, 1)``
from below.  Bounds are found by inverting ``H_a1`` along the relevant
segment with bisection and evaluating ``H_a2`` at the preimage.

The ``*_array`` functions are the batch kernels used by the verification
oracle; the scalar functions wrap them and attach witnesses.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .bisection import bisect
from .entropy import (
    EntropyValue,
    Order,
    OrderLike,
    ProbVector,
    UniformMixture,
    as_order,
    mixture_entropy_columns,
    realize_mixture,
)
from .errors import ConsistencyError, DomainError, EntropyRangeError

# h1 closer than this to log n is treated as log n.
CLAMP = 1e-12
SEGMENT_TOL = 1e-11


def _log(k):
    return np.log(np.asarray(k, dtype=float))


def segment_entropy(k_hi, k_lo, s, order: OrderLike) -> np.ndarray:
    """H_order of s U_{k_hi} + (1 - s) U_{k_lo}, batched over any broadcastable inputs."""
    s = np.asarray(s, dtype=float)
    return mixture_entropy_columns([k_hi, k_lo], [s, 1.0 - s], order)


def segment_point(k_hi: int, k_lo: int, s: float) -> ProbVector:
    """The mixture s U_{k_hi} + (1 - s) U_{k_lo}; s = 1 gives U_{k_hi}."""
    if not k_hi > k_lo >= 1:
        raise DomainError(f"need k_hi > k_lo >= 1, got ({k_hi}, {k_lo})")
    if not 0.0 <= s <= 1.0:
        raise DomainError(f"mixture parameter must lie in [0, 1], got {s!r}")
    return realize_mixture(UniformMixture((k_hi, k_lo), (s, 1.0 - s)))


def invert_segment_array(k_hi, k_lo, order: OrderLike, h) -> np.ndarray:
    """Batch inverse of ``s -> H_order(segment)``; targets must already be in range."""
    order = as_order(order)
    k_hi, k_lo, h = np.broadcast_arrays(
        np.asarray(k_hi, dtype=float), np.asarray(k_lo, dtype=float), np.asarray(h, dtype=float)
    )
    s = bisect(lambda s: segment_entropy(k_hi, k_lo, s, order), h, 0.0, 1.0)
    # Entropy is stationary at the uniform end, so snap endpoint targets exactly.
    s = np.where(h >= segment_entropy(k_hi, k_lo, 1.0, order), 1.0, s)
    return np.where(h <= segment_entropy(k_hi, k_lo, 0.0, order), 0.0, s)


def invert_on_segment(k_hi: int, k_lo: int, order: OrderLike, h: float) -> float:
    """The weight s on U_{k_hi} at which the segment reaches entropy ``h``."""
    if not k_hi > k_lo >= 1:
        raise DomainError(f"need k_hi > k_lo >= 1, got ({k_hi}, {k_lo})")
    order = as_order(order)
    if order.value == 0:
        raise DomainError("order 0 is constant along a segment and cannot be inverted")
    h = float(h)
    lo, hi = math.log(k_lo), math.log(k_hi)
    if not lo - CLAMP <= h <= hi + CLAMP:
        raise EntropyRangeError(f"entropy {h!r} outside [{lo!r}, {hi!r}]", (lo, hi))
    ends = segment_entropy(k_hi, k_lo, np.array([0.0, 1.0]), order)
    if ends[0] > ends[1]:
        raise ConsistencyError(f"entropy decreases along D({k_hi},{k_lo}) for order {order}")
    h = min(max(h, lo), hi)
    s = float(invert_segment_array(k_hi, k_lo, order, h))
    if abs(float(segment_entropy(k_hi, k_lo, s, order)) - h) > SEGMENT_TOL:
        raise ConsistencyError(f"bisection on D({k_hi},{k_lo}) did not converge for h={h!r}")
    return s


@dataclass(frozen=True)
class BoundQuery2:
    """H_{alpha2} bound query given H_{alpha1} = h1 (nats); ``n`` caps the alphabet."""

    alpha1: Order
    alpha2: Order
    h1: float
    n: Optional[int] = None

    def __post_init__(self):
        a1, a2 = as_order(self.alpha1), as_order(self.alpha2)
        if not 0 < a1.value < a2.value:
            raise DomainError(f"need 0 < alpha1 < alpha2, got ({a1}, {a2})")
        object.__setattr__(self, "alpha1", a1)
        object.__setattr__(self, "alpha2", a2)
        h1 = float(self.h1)
        if math.isnan(h1) or h1 < -CLAMP:
            raise EntropyRangeError(f"h1 must be non-negative, got {h1!r}", (0.0, self._cap()))
        h1 = max(h1, 0.0)
        if self.n is not None:
            if int(self.n) != self.n or self.n < 1:
                raise DomainError(f"alphabet size must be a positive integer, got {self.n!r}")
            object.__setattr__(self, "n", int(self.n))
            if h1 > math.log(self.n) + CLAMP:
                raise EntropyRangeError(
                    f"h1 = {h1!r} exceeds log n = {math.log(self.n)!r}", (0.0, math.log(self.n))
                )
            if h1 > math.log(self.n) - CLAMP:
                h1 = math.log(self.n)
        object.__setattr__(self, "h1", h1)

    def _cap(self):
        return math.log(self.n) if self.n else math.inf


@dataclass(frozen=True)
class BoundResult:
    """A tight bound with the mixture attaining it.

    ``attained`` is False for infima that no distribution reaches; those come
    without a witness.  ``multiplicity`` counts the boundary cells in which a
    preimage was found (only the three-order upper bound can exceed 1).
    """

    bound: EntropyValue
    witness: Optional[UniformMixture]
    attained: bool
    multiplicity: int = 1


def bucket(h1) -> np.ndarray:
    """k with log k <= h1 < log(k+1), lane-wise."""
    h1 = np.asarray(h1, dtype=float)
    k = np.maximum(np.floor(np.exp(h1)), 1.0)
    k = np.where(_log(k) > h1, k - 1, k)
    k = np.where(_log(k + 1) <= h1, k + 1, k)
    return np.maximum(k, 1.0)


def upper_bound_array(alpha1: OrderLike, alpha2: OrderLike, h1):
    """Batch upper bound; returns (bound, k, s) with the witness s U_{k+1} + (1-s) U_k."""
    h1 = np.maximum(np.asarray(h1, dtype=float), 0.0)
    k = bucket(h1)
    s = invert_segment_array(k + 1, k, alpha1, h1)
    return segment_entropy(k + 1, k, s, alpha2), k, s


def lower_bound_array(alpha1: OrderLike, alpha2: OrderLike, h1, n: int):
    """Batch fixed-n lower bound; returns (bound, t) with the witness t U_n + (1-t) U_1."""
    h1 = np.asarray(h1, dtype=float)
    cap = math.log(n)
    h1 = np.where(h1 > cap - CLAMP, cap, np.maximum(h1, 0.0))
    if n == 1:
        return np.zeros_like(h1), np.ones_like(h1)
    t = invert_segment_array(n, 1, alpha1, h1)
    return segment_entropy(n, 1, t, alpha2), t


def _witness(k_hi, k_lo, s) -> UniformMixture:
    return UniformMixture((int(k_hi), int(k_lo)), (s, 1.0 - s)).compact()


def upper_bound(q: BoundQuery2) -> BoundResult:
    """Largest H_{alpha2} given H_{alpha1} = h1; independent of n."""
    bound, k, s = upper_bound_array(q.alpha1, q.alpha2, np.array([q.h1]))
    return BoundResult(EntropyValue(float(bound[0])), _witness(k[0] + 1, k[0], float(s[0])), True)


def lower_bound_fixed_n(q: BoundQuery2) -> BoundResult:
    """Smallest H_{alpha2} given H_{alpha1} = h1 on an n-point alphabet."""
    if q.n is None:
        raise DomainError("the fixed-n lower bound needs an alphabet size")
    if q.n == 1:
        return BoundResult(EntropyValue(0.0), UniformMixture((1,), (1.0,)), True)
    bound, t = lower_bound_array(q.alpha1, q.alpha2, np.array([q.h1]), q.n)
    return BoundResult(EntropyValue(float(bound[0])), _witness(q.n, 1, float(t[0])), True)


def unbounded_lower_value(alpha1: OrderLike, alpha2: OrderLike, h1):
    """Infimum of H_{alpha2} over all alphabets given H_{alpha1} = h1 (batch-friendly)."""
    a1, a2 = as_order(alpha1), as_order(alpha2)
    h1 = np.asarray(h1, dtype=float)
    if a1.value <= 1:
        return np.zeros_like(h1)
    ratio = 1.0 if a2.is_infinite else a2.value / (a2.value - 1.0)
    return ratio * (a1.value - 1.0) / a1.value * h1


def lower_bound_unbounded(q: BoundQuery2) -> BoundResult:
    """Infimum of H_{alpha2} when the alphabet size is unrestricted (never attained)."""
    if q.h1 <= 0:
        raise EntropyRangeError("the unbounded lower bound needs h1 > 0", (0.0, math.inf))
    value = float(unbounded_lower_value(q.alpha1, q.alpha2, q.h1))
    return BoundResult(EntropyValue(value), None, False)


def lower_bound(q: BoundQuery2) -> BoundResult:
    return lower_bound_fixed_n(q) if q.n is not None else lower_bound_unbounded(q)


@dataclass(frozen=True)
class DiagramCurve:
    """Closed boundary polyline of the two-order range.

    ``vertices`` has shape (N, 2).  ``segment_labels[i]`` is the segment
    ``(a, b)`` (from U_a to U_b) that vertex i starts.  The first vertex is
    not repeated at the end.
    """

    vertices: np.ndarray
    segment_labels: tuple
    closed: bool = True


def boundary_curve(alpha1: OrderLike, alpha2: OrderLike, n: int, samples_per_segment: int = 64) -> DiagramCurve:
    """Sample D(n,n-1) + ... + D(2,1) + D(1,n) uniformly in the mixture weight.

    Each segment contributes ``samples_per_segment`` points including its
    start vertex and excluding its end vertex, which starts the next segment.
    """
    a1, a2 = as_order(alpha1), as_order(alpha2)
    if n < 2:
        raise DomainError("a boundary curve needs n >= 2")
    if samples_per_segment < 2:
        raise DomainError("need at least two samples per segment")
    s = np.linspace(1.0, 0.0, samples_per_segment)[:-1]
    vertices, labels = [], []
    for k in range(n - 1, 0, -1):
        pts = np.column_stack([segment_entropy(k + 1, k, s, a1), segment_entropy(k + 1, k, s, a2)])
        vertices.append(pts)
        labels += [(k + 1, k)] * len(s)
    # D(1, n): weight on U_n grows from 0 to 1.
    t = 1.0 - s
    vertices.append(np.column_stack([segment_entropy(n, 1, t, a1), segment_entropy(n, 1, t, a2)]))
    labels += [(1, n)] * len(t)
    out = np.vstack(vertices)
    out.setflags(write=False)
    return DiagramCurve(out, tuple(labels), True)
