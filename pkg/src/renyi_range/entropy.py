"""Rényi entropies of finite distributions and of mixtures of uniform distributions.

All values are computed in nats. Conversion to bits or hartleys happens only
through :meth:`EntropyValue.to` at the presentation boundary.

Two evaluation paths exist:

* :func:`renyi_entropy` works on an explicit :class:`ProbVector`, sorting the
  entries and accumulating with ``math.fsum`` so results are reproducible and
  permutation invariant bit for bit.
* :func:`mixture_entropy` works on batches of uniform mixtures without ever
  materialising the probability vector.  A mixture of right-aligned uniforms
  has only as many distinct point probabilities as it has components, so the
  power sum reduces to a short weighted sum.  This is what the bound solvers
  call in their inner loops.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Iterable, Union

import numpy as np

from .errors import DomainError

# |alpha - 1| below this switches the generic formula to Shannon's.
SHANNON_SWITCH = 1e-7
# Largest accepted |sum(p) - 1| before a ProbVector refuses to rescale.
NORMALIZATION_SLACK = 1e-9
WEIGHT_SLACK = 1e-12

BASES = {"e": math.e, "2": 2.0, "10": 10.0}


class OrderKind(enum.Enum):
    ZERO = "zero"
    ONE = "one"
    INFINITY = "infinity"
    GENERIC = "generic"


@dataclass(frozen=True)
class Order:
    """An order alpha in [0, inf] with the limit cases 0, 1 and inf tagged."""

    value: float
    kind: OrderKind = field(init=False, compare=False)

    def __post_init__(self):
        value = float(self.value)
        if math.isnan(value) or value < 0:
            raise DomainError(f"Rényi order must be a non-negative number, got {self.value!r}")
        object.__setattr__(self, "value", value)
        if value == 0:
            kind = OrderKind.ZERO
        elif value == 1:
            kind = OrderKind.ONE
        elif math.isinf(value):
            kind = OrderKind.INFINITY
        else:
            kind = OrderKind.GENERIC
        object.__setattr__(self, "kind", kind)

    @classmethod
    def parse(cls, text: str) -> "Order":
        token = text.strip().lower()
        if token in ("inf", "infinity", "∞"):
            return cls(math.inf)
        try:
            return cls(float(token))
        except ValueError:
            raise DomainError(f"cannot parse order {text!r}") from None

    @property
    def is_infinite(self) -> bool:
        return self.kind is OrderKind.INFINITY

    @property
    def uses_shannon(self) -> bool:
        """True when the Shannon formula is used (alpha = 1 or within the switch band)."""
        return self.kind is OrderKind.ONE or (
            self.kind is OrderKind.GENERIC and abs(self.value - 1.0) < SHANNON_SWITCH
        )

    def __lt__(self, other):
        return self.value < as_order(other).value

    def __le__(self, other):
        return self.value <= as_order(other).value

    def __gt__(self, other):
        return self.value > as_order(other).value

    def __ge__(self, other):
        return self.value >= as_order(other).value

    def __float__(self):
        return self.value

    def __str__(self):
        if self.is_infinite:
            return "inf"
        return format(self.value, "g")


OrderLike = Union[Order, float, int, str]


def as_order(a: OrderLike) -> Order:
    if isinstance(a, Order):
        return a
    if isinstance(a, str):
        return Order.parse(a)
    return Order(a)


class EntropyValue(float):
    """A float carrying the logarithm base it is expressed in ("e", "2" or "10")."""

    def __new__(cls, value, base: str = "e"):
        if base not in BASES:
            raise DomainError(f"unsupported base {base!r}; use one of {sorted(BASES)}")
        obj = super().__new__(cls, value)
        obj.base = base
        return obj

    @property
    def nats(self) -> float:
        if self.base == "e":
            return float(self)
        return float(self) * math.log(BASES[self.base])

    def to(self, base) -> "EntropyValue":
        base = str(base)
        if base == self.base:
            return self
        if base not in BASES:
            raise DomainError(f"unsupported base {base!r}; use one of {sorted(BASES)}")
        if base == "e":
            return EntropyValue(self.nats, "e")
        return EntropyValue(self.nats / math.log(BASES[base]), base)

    def __repr__(self):
        return f"EntropyValue({float(self)!r}, base={self.base!r})"

    def __reduce__(self):
        return (EntropyValue, (float(self), self.base))


def nats_from(value: float, base: str) -> float:
    """Convert a value given in ``base`` units to nats."""
    return float(EntropyValue(value, str(base)).nats)


class ProbVector:
    """A finite probability vector.

    Inputs whose sum is within ``NORMALIZATION_SLACK`` of one are rescaled;
    the signed pre-normalisation deviation is kept in :attr:`deviation`.
    The entries are stored as a read-only float64 array.
    """

    __slots__ = ("_probs", "deviation")

    def __init__(self, probs: Iterable[float]):
        arr = np.array(list(probs) if not isinstance(probs, np.ndarray) else probs, dtype=float)
        if arr.ndim != 1 or arr.size == 0:
            raise DomainError("a probability vector needs at least one entry")
        if not np.all(np.isfinite(arr)):
            raise DomainError("probability entries must be finite")
        if np.any(arr < 0):
            bad = int(np.flatnonzero(arr < 0)[0])
            raise DomainError(f"probability entry {bad} is negative ({arr[bad]!r})")
        total = math.fsum(arr.tolist())
        deviation = total - 1.0
        if abs(deviation) > NORMALIZATION_SLACK:
            raise DomainError(f"probabilities sum to {total!r}, not 1 (slack {NORMALIZATION_SLACK:g})")
        if deviation != 0.0:
            arr = arr / total
        arr.setflags(write=False)
        self._probs = arr
        self.deviation = deviation

    @property
    def probs(self) -> np.ndarray:
        return self._probs

    @property
    def n(self) -> int:
        return int(self._probs.size)

    def __len__(self):
        return self.n

    def __iter__(self):
        return iter(self._probs.tolist())

    def __getitem__(self, i):
        return self._probs[i]

    def __array__(self, dtype=None, copy=None):
        return self._probs if dtype is None else self._probs.astype(dtype)

    def __eq__(self, other):
        if not isinstance(other, ProbVector):
            return NotImplemented
        return np.array_equal(self._probs, other._probs)

    def __hash__(self):
        return hash(self._probs.tobytes())

    def __repr__(self):
        return f"ProbVector({self._probs.tolist()!r})"


def as_prob_vector(p) -> ProbVector:
    return p if isinstance(p, ProbVector) else ProbVector(p)


def renyi_entropy(p, order: OrderLike) -> EntropyValue:
    """Rényi entropy of order ``order`` in nats.

    Entries equal to exactly 0.0 are dropped before evaluation, which gives
    ``0 log 0 = 0`` for Shannon and excludes them from the support count of
    order 0.  Generic orders are evaluated in the log domain, shifted by the
    largest ``alpha * log p_i``.
    """
    p = as_prob_vector(p)
    a = as_order(order)
    x = np.sort(p.probs)
    x = x[x > 0]
    if a.kind is OrderKind.ZERO:
        h = math.log(x.size)
    elif a.kind is OrderKind.INFINITY:
        h = -math.log(x[-1])
    elif a.uses_shannon:
        h = -math.fsum((x * np.log(x)).tolist())
    else:
        t = a.value * np.log(x)
        top = float(t.max())
        h = (top + math.log(math.fsum(np.exp(t - top).tolist()))) / (1.0 - a.value)
    return EntropyValue(max(h, 0.0))


def uniform(k: int) -> ProbVector:
    """The uniform distribution on ``k`` points."""
    if int(k) != k or k < 1:
        raise DomainError(f"uniform distribution needs k >= 1, got {k!r}")
    return ProbVector(np.full(int(k), 1.0 / k))


@dataclass(frozen=True)
class UniformMixture:
    """Convex weights over right-aligned uniform distributions U_k.

    ``supports`` must be strictly decreasing; this is the orientation order of
    the simplex spanned by the components.
    """

    supports: tuple
    weights: tuple

    def __post_init__(self):
        supports = tuple(int(k) for k in self.supports)
        weights = tuple(float(w) for w in self.weights)
        if not supports or len(supports) != len(weights):
            raise DomainError("a mixture needs matching, non-empty supports and weights")
        if any(k < 1 for k in supports):
            raise DomainError("support sizes must be positive")
        if any(a <= b for a, b in zip(supports, supports[1:])):
            raise DomainError(f"support sizes must be strictly decreasing, got {supports}")
        if any(not (-WEIGHT_SLACK <= w <= 1 + WEIGHT_SLACK) for w in weights):
            raise DomainError(f"weights must lie in [0, 1], got {weights}")
        if abs(math.fsum(weights) - 1.0) > WEIGHT_SLACK:
            raise DomainError(f"weights must sum to 1, got {math.fsum(weights)!r}")
        weights = tuple(min(max(w, 0.0), 1.0) for w in weights)
        object.__setattr__(self, "supports", supports)
        object.__setattr__(self, "weights", weights)

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple]) -> "UniformMixture":
        pairs = list(pairs)
        return cls(tuple(k for k, _ in pairs), tuple(w for _, w in pairs))

    @property
    def components(self) -> list:
        return list(zip(self.supports, self.weights))

    def compact(self) -> "UniformMixture":
        """Drop zero-weight components."""
        kept = [(k, w) for k, w in self.components if w > 0]
        total = math.fsum(w for _, w in kept)
        return UniformMixture.from_pairs((k, w / total) for k, w in kept)

    def entropy(self, order: OrderLike) -> float:
        return float(mixture_entropy(np.array(self.supports), np.array(self.weights), order))


def realize_mixture(m: UniformMixture) -> ProbVector:
    """The probability vector sum_i w_i U_{k_i}, of length max(k_i), non-decreasing."""
    out = np.zeros(max(m.supports))
    for k, w in m.components:
        out[-k:] += w / k
    return ProbVector(out)


def product_distribution(p, q) -> ProbVector:
    p, q = as_prob_vector(p), as_prob_vector(q)
    return ProbVector(np.outer(p.probs, q.probs).ravel())


def grouped_renyi(values: np.ndarray, mults: np.ndarray, order: OrderLike) -> np.ndarray:
    """Rényi entropy of distributions given as distinct values with multiplicities.

    ``values`` and ``mults`` have shape (..., L); row r describes the
    distribution taking value ``values[r, j]`` on ``mults[r, j]`` points.
    """
    a = as_order(order)
    values = np.asarray(values, dtype=float)
    mults = np.asarray(mults, dtype=float)
    if values.shape[-1] <= _FEW_GROUPS:
        values, mults = np.broadcast_arrays(values, mults)
        return _grouped_columns(
            [values[..., j] for j in range(values.shape[-1])],
            [mults[..., j] for j in range(values.shape[-1])],
            a,
        )
    live = (values > 0) & (mults > 0)
    safe = np.where(live, values, 1.0)
    with np.errstate(divide="ignore"):
        logv = np.log(safe)
    if a.kind is OrderKind.ZERO:
        h = np.log(np.sum(np.where(live, mults, 0.0), axis=-1))
    elif a.kind is OrderKind.INFINITY:
        h = -np.log(np.max(np.where(live, values, 0.0), axis=-1))
    elif a.uses_shannon:
        h = -np.sum(np.where(live, mults * safe * logv, 0.0), axis=-1)
    else:
        with np.errstate(divide="ignore"):
            t = np.where(live, np.log(np.where(live, mults, 1.0)) + a.value * logv, -np.inf)
        top = np.max(t, axis=-1, keepdims=True)
        total = np.sum(np.exp(t - top), axis=-1)
        h = (top[..., 0] + np.log(total)) / (1.0 - a.value)
    return np.maximum(h, 0.0)


_FEW_GROUPS = 8


def _grouped_columns(values: list, mults: list, a: Order) -> np.ndarray:
    """Column-at-a-time variant of :func:`grouped_renyi` for a handful of groups."""
    live = [(v > 0) & (c > 0) for v, c in zip(values, mults)]
    with np.errstate(divide="ignore", invalid="ignore"):
        if a.kind is OrderKind.ZERO:
            h = np.log(sum(np.where(ok, c, 0.0) for ok, c in zip(live, mults)))
        elif a.kind is OrderKind.INFINITY:
            top = values[0]
            for v in values[1:]:
                top = np.maximum(top, v)
            h = -np.log(top)
        elif a.uses_shannon:
            h = -sum(np.where(ok, c * v * np.log(v), 0.0) for ok, v, c in zip(live, values, mults))
        else:
            terms = [np.where(ok, np.log(c) + a.value * np.log(v), -np.inf)
                     for ok, v, c in zip(live, values, mults)]
            top = terms[0]
            for t in terms[1:]:
                top = np.maximum(top, t)
            total = sum(np.exp(t - top) for t in terms)
            h = (top + np.log(total)) / (1.0 - a.value)
    return np.maximum(h, 0.0)


def mixture_entropy(supports, weights, order: OrderLike) -> np.ndarray:
    """Batch Rényi entropy of uniform mixtures.

    ``supports`` (integers, strictly decreasing along the last axis) and
    ``weights`` broadcast to a common shape (..., L).  The distinct point
    probabilities are the running sums of ``w_i / k_i`` and the j-th of them
    occurs ``k_j - k_{j+1}`` times.
    """
    supports = np.asarray(supports, dtype=float)
    weights = np.asarray(weights, dtype=float)
    supports, weights = np.broadcast_arrays(supports, weights)
    if supports.shape[-1] <= _FEW_GROUPS:
        return mixture_entropy_columns(
            [supports[..., j] for j in range(supports.shape[-1])],
            [weights[..., j] for j in range(supports.shape[-1])],
            order,
        )
    values = np.cumsum(weights / supports, axis=-1)
    nxt = np.concatenate([supports[..., 1:], np.zeros_like(supports[..., :1])], axis=-1)
    return grouped_renyi(values, supports - nxt, order)


def renyi_rows(P: np.ndarray, order: OrderLike) -> np.ndarray:
    """Rényi entropy of every row of a 2-D array of probability vectors."""
    P = np.asarray(P, dtype=float)
    return grouped_renyi(P, np.ones_like(P), order)


def mixture_entropy_columns(supports: list, weights: list, order: OrderLike) -> np.ndarray:
    """:func:`mixture_entropy` with the components passed as separate arrays.

    The solvers call this in their inner loops, where avoiding the stacked
    (..., L) layout roughly halves the cost.
    """
    values, mults = [], []
    running = 0.0
    for j, (k, w) in enumerate(zip(supports, weights)):
        running = running + w / k
        values.append(running)
        mults.append(k - supports[j + 1] if j + 1 < len(supports) else k)
    return _grouped_columns(values, mults, as_order(order))
