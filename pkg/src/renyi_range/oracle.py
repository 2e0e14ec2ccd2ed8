"""Brute-force ground truth for the bound formulas.

Distributions come either from Monte Carlo (flat Dirichlet draws as
normalised exponentials) or from the lattice of all ``c / R`` with integer
``c`` summing to ``R``.  The oracle only ever evaluates entropies; bound
formulas enter solely as the targets that envelopes and sandwich checks are
compared against.

Random streams use numpy's PCG64 generator.  Draws are made in fixed-size
blocks, block ``i`` seeded by ``SeedSequence(seed, spawn_key=(i,))``, so the
stream for a given seed does not depend on how it is consumed.
"""

from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator, Optional, Sequence

import numpy as np

from . import diagram2, diagram3
from .entropy import OrderLike, ProbVector, as_order, renyi_rows
from .errors import DomainError

BLOCK = 1 << 16
MODES = ("monte-carlo", "lattice")
MC_TOLERANCE = 1e-9
LATTICE_TOLERANCE = 5e-3


@dataclass(frozen=True)
class SampleConfig:
    n: int
    count: int = 1
    seed: int = 0
    mode: str = "monte-carlo"
    lattice_resolution: int = 1

    def __post_init__(self):
        mode = {"mc": "monte-carlo"}.get(self.mode, self.mode)
        if mode not in MODES:
            raise DomainError(f"mode must be one of {MODES}, got {self.mode!r}")
        object.__setattr__(self, "mode", mode)
        for name in ("n", "count", "lattice_resolution"):
            value = getattr(self, name)
            if int(value) != value or value < 1:
                raise DomainError(f"{name} must be a positive integer, got {value!r}")
            object.__setattr__(self, name, int(value))
        if int(self.seed) != self.seed or not 0 <= self.seed < 2 ** 64:
            raise DomainError(f"seed must be a 64-bit unsigned integer, got {self.seed!r}")
        object.__setattr__(self, "seed", int(self.seed))

    @property
    def size(self) -> int:
        """Number of distributions the configuration produces."""
        if self.mode == "lattice":
            return math.comb(self.lattice_resolution + self.n - 1, self.n - 1)
        return self.count


def _mc_block(seed: int, i: int, rows: int, n: int) -> np.ndarray:
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(i,))))
    e = rng.standard_exponential((rows, n))
    return e / e.sum(axis=1, keepdims=True)


def lattice_points(n: int, resolution: int) -> np.ndarray:
    """All vectors c / R with non-negative integers c summing to R (stars and bars)."""
    r = resolution
    if n == 1:
        return np.ones((1, 1))
    bars = np.fromiter(
        itertools.chain.from_iterable(itertools.combinations(range(r + n - 1), n - 1)),
        dtype=np.int64,
        count=math.comb(r + n - 1, n - 1) * (n - 1),
    ).reshape(-1, n - 1)
    edges = np.column_stack([np.full(len(bars), -1), bars, np.full(len(bars), r + n - 1)])
    return (np.diff(edges, axis=1) - 1) / r


def lattice_classes(n: int, resolution: int):
    """Lattice points up to permutation: sorted rows plus how many points each stands for.

    Entropies are permutation invariant, so envelopes computed from the
    classes weighted by these counts equal those of the full lattice.
    """
    rows, mult = [], []

    def parts(left, slots, cap, prefix):
        if slots == 1:
            if left <= cap:
                yield prefix + [left]
            return
        for c in range(min(left, cap), -1, -1):
            if c * slots < left:
                break
            yield from parts(left - c, slots - 1, c, prefix + [c])

    for p in parts(resolution, n, resolution, []):
        counts = Counter(p)
        perms = math.factorial(n)
        for c in counts.values():
            perms //= math.factorial(c)
        rows.append(p[::-1])
        mult.append(perms)
    return np.array(rows, dtype=float) / resolution, np.array(mult, dtype=np.int64)


def sample_blocks(cfg: SampleConfig, block: int = BLOCK) -> Iterator[np.ndarray]:
    """The configured distributions as 2-D arrays of at most ``block`` rows."""
    if cfg.mode == "lattice":
        pts = lattice_points(cfg.n, cfg.lattice_resolution)
        for start in range(0, len(pts), block):
            yield pts[start:start + block]
        return
    done = 0
    i = 0
    while done < cfg.count:
        rows = min(BLOCK, cfg.count - done)
        chunk = _mc_block(cfg.seed, i, rows, cfg.n)
        for start in range(0, rows, block):
            yield chunk[start:start + block]
        done += rows
        i += 1


def sample_array(cfg: SampleConfig) -> np.ndarray:
    return np.vstack(list(sample_blocks(cfg)))


def sample_simplex(cfg: SampleConfig) -> Iterator[ProbVector]:
    """Stream of :class:`ProbVector`; see :func:`sample_blocks` for the bulk form."""
    for chunk in sample_blocks(cfg):
        for row in chunk:
            yield ProbVector(row)


def _as_rows(samples) -> np.ndarray:
    if isinstance(samples, np.ndarray):
        return np.atleast_2d(np.asarray(samples, dtype=float))
    rows = [np.asarray(p, dtype=float) for p in samples]
    if not rows:
        raise DomainError("no samples given")
    width = max(len(r) for r in rows)
    return np.array([np.pad(r, (width - len(r), 0)) for r in rows])


def entropy_table(samples, orders: Sequence[OrderLike]) -> np.ndarray:
    """Column j holds H_{orders[j]} of every sample."""
    P = _as_rows(samples)
    return np.column_stack([renyi_rows(P, a) for a in orders])


def _bin_index(h: np.ndarray, width: float) -> np.ndarray:
    return np.floor(h / width + 1e-12).astype(np.int64)


def _group(keys: np.ndarray):
    """Sort lanes by key row; returns (order, unique keys, group starts)."""
    order = np.lexsort(keys.T[::-1])
    sk = keys[order]
    new = np.ones(len(sk), dtype=bool)
    new[1:] = np.any(sk[1:] != sk[:-1], axis=1)
    starts = np.flatnonzero(new)
    return order, sk[starts], starts


@dataclass(frozen=True)
class EnvelopeBin:
    center: tuple
    min_value: float
    max_value: float
    count: int
    # Observed extent of the conditioning coordinates inside the bin.
    lo: tuple
    hi: tuple


@dataclass(frozen=True)
class EnvelopeReport:
    """Per-bin range of the last entropy given the others.

    With two orders a bin is an interval of H_{alpha1}; with three it is a
    square cell of (H_{alpha1}, H_{alpha2}).  Empty bins are not listed.
    """

    orders: tuple
    bin_width: float
    bins: tuple

    @property
    def centers(self) -> np.ndarray:
        return np.array([b.center for b in self.bins])


def empirical_envelope(samples, orders: Sequence[OrderLike], bin_width: float,
                       weights: Optional[np.ndarray] = None) -> EnvelopeReport:
    """Bin samples by all but the last order and record min/max of the last.

    ``weights`` are sample multiplicities (see :func:`lattice_classes`); they
    only affect the reported counts.
    """
    if not bin_width > 0:
        raise DomainError(f"bin width must be positive, got {bin_width!r}")
    orders = tuple(as_order(a) for a in orders)
    if len(orders) not in (2, 3):
        raise DomainError("an envelope needs two or three orders")
    table = entropy_table(samples, orders)
    weights = np.ones(len(table), dtype=np.int64) if weights is None else np.asarray(weights)
    cond, target = table[:, :-1], table[:, -1]
    keys = _bin_index(cond, bin_width)
    order, ukeys, starts = _group(keys)
    t = target[order]
    c = cond[order]
    mins = np.minimum.reduceat(t, starts)
    maxs = np.maximum.reduceat(t, starts)
    counts = np.add.reduceat(weights[order], starts)
    lo = np.minimum.reduceat(c, starts, axis=0)
    hi = np.maximum.reduceat(c, starts, axis=0)
    bins = tuple(
        EnvelopeBin(tuple(float((k + 0.5) * bin_width) for k in key), float(mn), float(mx), int(ct),
                    tuple(map(float, l)), tuple(map(float, h)))
        for key, mn, mx, ct, l, h in zip(ukeys, mins, maxs, counts, lo, hi)
    )
    return EnvelopeReport(orders, float(bin_width), bins)


@dataclass(frozen=True)
class BinAgreement:
    center: tuple
    count: int
    empirical_max: float
    analytic_max: float
    empirical_min: float
    analytic_min: float

    @property
    def gap_max(self) -> float:
        return self.analytic_max - self.empirical_max

    @property
    def gap_min(self) -> float:
        return self.empirical_min - self.analytic_min


@dataclass(frozen=True)
class AgreementReport:
    """Empirical envelope next to the analytic bounds, bin by bin.

    The analytic extreme of a bin is the extreme of the bound over the
    bin's own samples, so both columns describe the same set of
    conditioning values.  Gaps are non-negative when the bounds hold.
    """

    orders: tuple
    n: int
    bin_width: float
    bins: tuple

    def worst(self, side: str) -> float:
        gaps = [abs(b.gap_max if side == "upper" else b.gap_min) for b in self.bins]
        return max(gaps) if gaps else 0.0


def _bound_columns(orders, n, table, upper=None, lower=None):
    """Analytic upper and lower bound at every row's conditioning values."""
    if len(orders) == 2:
        h1 = table[:, 0]
        up = upper(h1) if upper else diagram2.upper_bound_array(orders[0], orders[1], h1)[0]
        lo = lower(h1) if lower else diagram2.lower_bound_array(orders[0], orders[1], h1, n)[0]
    else:
        h1, h2 = table[:, 0], table[:, 1]
        up = upper(h1, h2) if upper else diagram3.upper3_array(*orders, h1, h2, n)[0]
        lo = lower(h1, h2) if lower else diagram3.lower3_array(*orders, h1, h2)[0]
    return np.asarray(up, dtype=float), np.asarray(lo, dtype=float)


def compare_envelope(samples, orders: Sequence[OrderLike], n: int, bin_width: float,
                     weights: Optional[np.ndarray] = None) -> AgreementReport:
    """Bin-wise comparison of the empirical envelope with the analytic bounds.

    A bin whose bound could not be evaluated for some sample gets a NaN
    analytic value there, which surfaces as an infinite gap.
    """
    orders = tuple(as_order(a) for a in orders)
    table = entropy_table(samples, orders)
    weights = np.ones(len(table), dtype=np.int64) if weights is None else np.asarray(weights)
    up, lo = _bound_columns(orders, n, table)
    up = np.where(np.isnan(up), np.inf, up)
    lo = np.where(np.isnan(lo), -np.inf, lo)
    keys = _bin_index(table[:, :-1], bin_width)
    order, ukeys, starts = _group(keys)
    t = table[order, -1]
    rows = zip(
        ukeys,
        np.add.reduceat(weights[order], starts),
        np.maximum.reduceat(t, starts),
        np.maximum.reduceat(up[order], starts),
        np.minimum.reduceat(t, starts),
        np.minimum.reduceat(lo[order], starts),
    )
    bins = tuple(
        BinAgreement(tuple(float((k + 0.5) * bin_width) for k in key), int(ct),
                     float(emax), float(amax), float(emin), float(amin))
        for key, ct, emax, amax, emin, amin in rows
    )
    return AgreementReport(orders, int(n), float(bin_width), bins)


@dataclass(frozen=True)
class Violation:
    dist: ProbVector
    kind: str
    bound: float
    observed: float
    excess: float


@dataclass
class ViolationReport:
    total_checked: int = 0
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def merge(self, other: "ViolationReport") -> "ViolationReport":
        return ViolationReport(self.total_checked + other.total_checked, self.violations + other.violations)


def _violations(P, observed, up, lo, tolerance):
    out = []
    # A bound that could not be evaluated counts as violated.
    over = observed - up
    under = lo - observed
    over = np.where(np.isnan(up), np.inf, over)
    under = np.where(np.isnan(lo), np.inf, under)
    for i in np.flatnonzero(over > tolerance):
        out.append(Violation(ProbVector(P[i]), "upper", float(up[i]), float(observed[i]), float(over[i])))
    for i in np.flatnonzero(under > tolerance):
        out.append(Violation(ProbVector(P[i]), "lower", float(lo[i]), float(observed[i]), float(under[i])))
    return out


def _check(samples, orders, n, tolerance, upper, lower) -> ViolationReport:
    blocks: Iterable[np.ndarray]
    if isinstance(samples, SampleConfig):
        blocks = sample_blocks(samples)
    elif isinstance(samples, np.ndarray):
        blocks = [np.atleast_2d(samples)]
    else:
        blocks = [_as_rows(samples)]
    report = ViolationReport()
    for P in blocks:
        if P.shape[1] > n:
            raise DomainError(f"samples have {P.shape[1]} entries but n = {n}")
        table = entropy_table(P, orders)
        up, lo = _bound_columns(orders, n, table, upper, lower)
        report = report.merge(ViolationReport(len(P), _violations(P, table[:, -1], up, lo, tolerance)))
    return report


def check_bounds2(samples, alpha1: OrderLike, alpha2: OrderLike, n: int,
                  tolerance: float = MC_TOLERANCE,
                  upper: Optional[Callable] = None, lower: Optional[Callable] = None) -> ViolationReport:
    """Check lower_fixed_n(h1) - tol <= H_{alpha2} <= upper(h1) + tol for every sample.

    ``samples`` is a :class:`SampleConfig`, a 2-D array or an iterable of
    distributions.  ``upper``/``lower`` replace the bound kernels (each maps
    an array of h1 to an array of bounds); the harness self-test uses this.
    """
    orders = (as_order(alpha1), as_order(alpha2))
    return _check(samples, orders, n, tolerance, upper, lower)


def check_bounds3(samples, alpha1: OrderLike, alpha2: OrderLike, alpha3: OrderLike, n: int,
                  tolerance: float = MC_TOLERANCE,
                  upper: Optional[Callable] = None, lower: Optional[Callable] = None) -> ViolationReport:
    """As :func:`check_bounds2` for H_{alpha3} given (H_{alpha1}, H_{alpha2})."""
    if n < 3:
        raise DomainError("three-order checks need n >= 3")
    orders = (as_order(alpha1), as_order(alpha2), as_order(alpha3))
    return _check(samples, orders, n, tolerance, upper, lower)
