"""Joint range of three Rényi entropies.

Given ``(h1, h2)`` in the two-order range of ``(a1, a2)``, the extreme values
of ``H_a3`` are attained on two triangulated surfaces of uniform mixtures:

* lower: the cells D(m, m-1, 1), m = 3, 4, ... (the bound does not depend
  on n, and every admissible (h1, h2) has exactly one preimage);
* upper: the cells D(n, m, m-1), m = 2..n-1 (the bound grows with n).

Every cell is a triangle whose edge D(hi, lo) = D(m, m-1) is an arc of the
two-order upper boundary and whose third vertex (the apex) is U_1 for the
lower surface and U_n for the upper one.  A point of a cell is written as

    w * U_apex + (1 - w) * (s * U_hi + (1 - s) * U_lo)

and ``(w, s)`` is found by a nested bracketed solve: for fixed ``w`` the
inner solve matches ``H_a2`` along ``s``; the outer solve moves ``w`` until
``H_a1`` matches.  Both maps are monotone, so only brackets are needed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .bisection import solve_bracketed
from .diagram2 import (
    BoundResult,
    lower_bound_array,
    segment_entropy,
    unbounded_lower_value,
    upper_bound_array,
)
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
from .errors import DomainError, EntropyRangeError

# Slack when comparing a target with the endpoints of a monotone bracket.
EDGE_TOL = 1e-12
# A preimage is accepted when both entropy coordinates match to this.
MATCH_TOL = 1e-9
# Solve to bracket collapse: near U_1 entropies are tiny and H_a1 moves like a
# square root of the weights, so an absolute residual stop is too coarse.
SOLVE_FTOL = 0.0
# (h1, h2) this far outside the two-order range is still clamped onto it.
RANGE_TOL = 1e-9
MAX_CELL = 2 ** 40


@dataclass(frozen=True)
class SurfaceCell:
    """A point of D(k1, k2, k3) given by barycentric weights."""

    supports: tuple
    barycentric: tuple

    def __post_init__(self):
        supports = tuple(int(k) for k in self.supports)
        bary = tuple(float(x) for x in self.barycentric)
        if len(supports) != 3 or len(bary) != 3:
            raise DomainError("a surface cell has three supports and three weights")
        if not supports[0] > supports[1] > supports[2] >= 1:
            raise DomainError(f"supports must be strictly decreasing, got {supports}")
        if min(bary) < -1e-12 or abs(math.fsum(bary) - 1.0) > 1e-12:
            raise DomainError(f"barycentric weights must be non-negative and sum to 1, got {bary}")
        object.__setattr__(self, "supports", supports)
        object.__setattr__(self, "barycentric", tuple(max(x, 0.0) for x in bary))

    @property
    def mixture(self) -> UniformMixture:
        return UniformMixture(self.supports, self.barycentric)


def simplex_point(c: SurfaceCell) -> ProbVector:
    return realize_mixture(c.mixture)


@dataclass(frozen=True)
class BoundQuery3:
    """H_{alpha3} bound query given H_{alpha1} = h1 and H_{alpha2} = h2 (nats)."""

    alpha1: Order
    alpha2: Order
    alpha3: Order
    h1: float
    h2: float
    n: Optional[int] = None

    def __post_init__(self):
        a1, a2, a3 = (as_order(a) for a in (self.alpha1, self.alpha2, self.alpha3))
        if not 0 < a1.value < a2.value < a3.value:
            raise DomainError(f"need 0 < alpha1 < alpha2 < alpha3, got ({a1}, {a2}, {a3})")
        for name, a in (("alpha1", a1), ("alpha2", a2), ("alpha3", a3)):
            object.__setattr__(self, name, a)
        if self.n is not None:
            if int(self.n) != self.n or self.n < 1:
                raise DomainError(f"alphabet size must be a positive integer, got {self.n!r}")
            object.__setattr__(self, "n", int(self.n))
        h1, h2 = float(self.h1), float(self.h2)
        lo, hi = pair_interval(a1, a2, h1, self.n)
        if not lo - RANGE_TOL <= h2 <= hi + RANGE_TOL:
            raise EntropyRangeError(
                f"(h1, h2) = ({h1!r}, {h2!r}) is outside the joint range; h2 must lie in [{lo!r}, {hi!r}]",
                (lo, hi),
            )
        object.__setattr__(self, "h1", h1)
        object.__setattr__(self, "h2", min(max(h2, lo), hi))


def pair_interval(alpha1: OrderLike, alpha2: OrderLike, h1: float, n: Optional[int] = None):
    """The interval of attainable H_{alpha2} given H_{alpha1} = h1.

    Without ``n`` the lower end is the (unattained) infimum.
    """
    h1 = float(h1)
    cap = math.log(n) if n else math.inf
    if math.isnan(h1) or h1 < -RANGE_TOL or h1 > cap + RANGE_TOL:
        raise EntropyRangeError(f"h1 = {h1!r} must lie in [0, {cap!r}]", (0.0, cap))
    h1 = min(max(h1, 0.0), cap)
    hi = float(upper_bound_array(alpha1, alpha2, np.array([h1]))[0][0])
    if n:
        lo = float(lower_bound_array(alpha1, alpha2, np.array([h1]), n)[0][0])
    else:
        lo = float(unbounded_lower_value(alpha1, alpha2, h1))
    return lo, hi


def _cell_columns(kind: str, m, n):
    """Supports (largest first) plus the positions of apex, hi and lo."""
    m = np.asarray(m, dtype=float)
    if kind == "lower":
        return [m, m - 1.0, np.ones_like(m)], (2, 0, 1)
    return [np.full_like(m, float(n)), m, m - 1.0], (0, 1, 2)


def _weights(idx, w, s):
    out = [None, None, None]
    apex, hi, lo = idx
    out[apex] = w
    out[hi] = (1.0 - w) * s
    out[lo] = (1.0 - w) * (1.0 - s)
    return out


def _cell_entropy(supports, idx, w, s, order):
    return mixture_entropy_columns(supports, _weights(idx, w, s), order)


def _superlevel(f, target, f0, f1, increasing):
    """Interval of w in [0, 1] with f(w) >= target, for monotone f; NaN when empty.

    ``f`` is lane-aware, as for :func:`solve_bracketed`.
    """
    lo = np.zeros_like(target)
    hi = np.ones_like(target)
    root = solve_bracketed(f, np.clip(target, np.minimum(f0, f1), np.maximum(f0, f1)), 0.0, 1.0, increasing, ftol=SOLVE_FTOL)
    if increasing:
        empty = target > f1 + EDGE_TOL
        lo = np.where(target <= f0, 0.0, root)
    else:
        empty = target > f0 + EDGE_TOL
        hi = np.where(target <= f1, 1.0, root)
    return np.where(empty, np.nan, lo), np.where(empty, np.nan, hi)


def _sublevel(f, target, f0, f1, increasing):
    """Interval of w in [0, 1] with f(w) <= target, for monotone f; NaN when empty."""
    lo = np.zeros_like(target)
    hi = np.ones_like(target)
    root = solve_bracketed(f, np.clip(target, np.minimum(f0, f1), np.maximum(f0, f1)), 0.0, 1.0, increasing, ftol=SOLVE_FTOL)
    if increasing:
        empty = target < f0 - EDGE_TOL
        hi = np.where(target >= f1, 1.0, root)
    else:
        empty = target < f1 - EDGE_TOL
        lo = np.where(target >= f0, 0.0, root)
    return np.where(empty, np.nan, lo), np.where(empty, np.nan, hi)


def solve_cells(kind: str, m, n, alpha1: OrderLike, alpha2: OrderLike, h1, h2,
                alpha3: Optional[OrderLike] = None):
    """Find (w, s) in the cells of ``kind`` indexed by ``m`` mapping to (h1, h2).

    All arguments except ``kind`` and ``n`` are lane arrays.  Returns
    ``(w, s, ok)``; lanes without a preimage in their cell have ok = False.
    With ``alpha3``, ties between numerically indistinguishable preimages
    go to the larger H_alpha3 on the upper surface and the smaller on the
    lower one.
    """
    a1, a2 = as_order(alpha1), as_order(alpha2)
    alpha3 = None if alpha3 is None else as_order(alpha3)
    m = np.asarray(m, dtype=float)
    h1 = np.asarray(h1, dtype=float)
    h2 = np.asarray(h2, dtype=float)
    supports, idx = _cell_columns(kind, m, n)
    apex = supports[idx[0]]
    k_hi, k_lo = supports[idx[1]], supports[idx[2]]
    increasing = kind == "upper"

    # Feasible apex weights: H_a2 must be reachable between the two apex edges.
    def f_hi(w, lanes):
        return _cell_entropy([c[lanes] for c in supports], idx, w, np.ones_like(w), a2)

    def f_lo(w, lanes):
        return _cell_entropy([c[lanes] for c in supports], idx, w, np.zeros_like(w), a2)

    a_lo, a_hi = _superlevel(f_hi, h2, np.log(k_hi), np.log(apex), increasing)
    b_lo, b_hi = _sublevel(f_lo, h2, np.log(k_lo), np.log(apex), increasing)
    w_lo = np.fmax(a_lo, b_lo)
    w_hi = np.fmin(a_hi, b_hi)
    ok = np.isfinite(w_lo) & np.isfinite(w_hi) & (w_lo <= w_hi + EDGE_TOL)
    w = np.zeros_like(h1)
    s = np.zeros_like(h1)
    if not ok.any():
        return w, s, ok

    sel = np.flatnonzero(ok)
    sup = [c[sel] for c in supports]
    t1, t2 = h1[sel], h2[sel]
    wl = w_lo[sel]
    wh = np.maximum(w_hi[sel], wl)

    def inner(wv, lanes):
        cols = [c[lanes] for c in sup]
        return solve_bracketed(
            lambda sv, sub: _cell_entropy([c[sub] for c in cols], idx, wv[sub], sv, a2),
            t2[lanes], 0.0, 1.0, True, ftol=SOLVE_FTOL,
        )

    def along_level(wv, lanes):
        return _cell_entropy([c[lanes] for c in sup], idx, wv, inner(wv, lanes), a1)

    every = np.arange(sel.size)
    g_lo, g_hi = along_level(wl, every), along_level(wh, every)
    w_sel = solve_bracketed(along_level, t1, wl, wh, g_hi >= g_lo, ftol=SOLVE_FTOL)
    s_sel = inner(w_sel, every)

    # Near a cell edge the map is ill-conditioned: slopes blow up for orders
    # <= 1, and where two point masses coincide (h1, h2) move only to second
    # order while H_a3 can move to first.  Edge points, with the free
    # coordinate re-solved from h1, are therefore also candidates.
    zeros, ones = np.zeros_like(s_sel), np.ones_like(s_sel)

    def on_edge(sv):
        return solve_bracketed(lambda wv, sub: _cell_entropy([c[sub] for c in sup], idx, wv, sv[sub], a1),
                               t1, 0.0, 1.0, increasing, ftol=SOLVE_FTOL)

    s_edge = solve_bracketed(lambda sv, sub: _cell_entropy([c[sub] for c in sup], idx, zeros[sub], sv, a1),
                             t1, 0.0, 1.0, True, ftol=SOLVE_FTOL)
    cands = [(w_sel, s_sel), (on_edge(zeros), zeros), (on_edge(ones), ones), (zeros, s_edge)]
    cands += [(wc, sc) for wc in (w_sel, wl, wh) for sc in (s_sel, zeros, ones)]

    def resid(wv, sv):
        return np.maximum(np.abs(_cell_entropy(sup, idx, wv, sv, a1) - t1),
                          np.abs(_cell_entropy(sup, idx, wv, sv, a2) - t2))

    res = np.array([resid(wc, sc) for wc, sc in cands])
    # Candidates within a few ulps of the best match are indistinguishable;
    # among them the bound takes the extreme H_a3 in its own direction.
    tie = res <= res.min(axis=0) + 8 * np.finfo(float).eps * np.maximum(1.0, np.maximum(np.abs(t1), np.abs(t2)))
    if alpha3 is None:
        score = -res
    else:
        score = np.array([_cell_entropy(sup, idx, wc, sc, alpha3) for wc, sc in cands])
        score = score if increasing else -score
    pick = np.argmax(np.where(tie, score, -np.inf), axis=0)
    w_sel = np.array([wc for wc, _ in cands])[pick, every]
    s_sel = np.array([sc for _, sc in cands])[pick, every]
    r1 = np.abs(_cell_entropy(sup, idx, w_sel, s_sel, a1) - t1)
    r2 = np.abs(_cell_entropy(sup, idx, w_sel, s_sel, a2) - t2)
    good = (r1 <= MATCH_TOL) & (r2 <= MATCH_TOL)
    w[sel], s[sel] = w_sel, s_sel
    ok[sel] = good
    return w, s, ok


def _locate_lower_cell(alpha1, alpha2, h1, h2):
    """Smallest m >= 3 with h1 <= log m whose curve D(m, 1) passes below (h1, h2).

    The curves D(m, 1) are nested and move down as m grows, so the predicate
    is monotone in m and a galloping search finds it.  Returns 0 where no
    cell up to ``MAX_CELL`` qualifies.
    """
    first = np.maximum(np.ceil(np.exp(h1) * (1 - 1e-15)), 3.0)
    first = np.where(np.log(first) < h1 - EDGE_TOL, first + 1, first)

    def below(m):
        lanes_h1 = np.minimum(h1, np.log(m))
        curve = _fan_value(alpha1, alpha2, lanes_h1, m)
        return curve <= h2 + EDGE_TOL

    lo = first - 1.0  # predicate false (or below 3) here
    hi = first.copy()
    found = below(hi)
    step = 1.0
    while not found.all():
        pending = ~found
        lo = np.where(pending, hi, lo)
        hi = np.where(pending, np.minimum(first + 2 * step, MAX_CELL), hi)
        step *= 2
        found = found | below(hi)
        if step > MAX_CELL:
            break
    while np.any(found & (hi - lo > 1)):
        mid = np.floor(0.5 * (lo + hi))
        live = found & (hi - lo > 1)
        test = below(np.where(live, mid, hi))
        hi = np.where(live & test, mid, hi)
        lo = np.where(live & ~test, mid, lo)
    return np.where(found, hi, 0.0)


def _fan_value(alpha1, alpha2, h1, m):
    """H_a2 on D(m, 1) where H_a1 = h1, lane-wise with per-lane m."""
    m = np.broadcast_to(np.asarray(m, dtype=float), np.shape(h1))
    t = solve_bracketed(lambda tv, lanes: segment_entropy(m[lanes], 1.0, tv, alpha1), h1, 0.0, 1.0,
                        ftol=SOLVE_FTOL)
    return segment_entropy(m, 1.0, t, alpha2)


def lower3_array(alpha1, alpha2, alpha3, h1, h2):
    """Batch lower bound on H_a3 (any alphabet size); returns (bound, m, w, s, ok)."""
    h1 = np.asarray(h1, dtype=float)
    h2 = np.asarray(h2, dtype=float)
    m = _locate_lower_cell(alpha1, alpha2, h1, h2)
    w, s, ok = np.zeros_like(h1), np.zeros_like(h1), np.zeros(h1.shape, dtype=bool)
    has = m >= 3
    for shift in (0.0, 1.0, -1.0):
        todo = has & ~ok & (m + shift >= 3)
        if not todo.any():
            continue
        sel = np.flatnonzero(todo)
        ws, ss, oks = solve_cells("lower", m[sel] + shift, None, alpha1, alpha2, h1[sel], h2[sel], alpha3)
        w[sel], s[sel], ok[sel] = ws, ss, oks
        m[sel] = np.where(oks, m[sel] + shift, m[sel])
    supports, idx = _cell_columns("lower", np.maximum(m, 3.0), None)
    bound = _cell_entropy(supports, idx, w, s, alpha3)
    return np.where(ok, bound, np.nan), m, w, s, ok


def upper3_array(alpha1, alpha2, alpha3, h1, h2, n: int):
    """Batch upper bound on H_a3 for alphabet size n; returns (bound, m, w, s, count).

    Every cell D(n, m, m-1) whose vertex box admits (h1, h2) is tried, and
    the largest H_a3 over all preimages is kept; ``count`` is the number of
    cells containing a preimage.
    """
    if n < 3:
        raise DomainError("the three-order upper surface needs n >= 3")
    h1 = np.asarray(h1, dtype=float)
    h2 = np.asarray(h2, dtype=float)
    best = np.full(h1.shape, -np.inf)
    best_m = np.zeros_like(h1)
    best_w = np.zeros_like(h1)
    best_s = np.zeros_like(h1)
    count = np.zeros(h1.shape, dtype=int)
    for m in range(2, n):
        floor = math.log(m - 1) - EDGE_TOL
        todo = (h1 >= floor) & (h2 >= floor)
        if not todo.any():
            continue
        sel = np.flatnonzero(todo)
        w, s, ok = solve_cells("upper", np.full(sel.size, float(m)), n, alpha1, alpha2, h1[sel], h2[sel], alpha3)
        supports, idx = _cell_columns("upper", np.full(sel.size, float(m)), n)
        val = _cell_entropy(supports, idx, w, s, alpha3)
        val = np.where(ok, val, -np.inf)
        count[sel] += ok
        better = val > best[sel]
        upd = sel[better]
        best[upd] = val[better]
        best_m[upd] = m
        best_w[upd] = w[better]
        best_s[upd] = s[better]
    best = np.where(np.isfinite(best), best, np.nan)
    return best, best_m, best_w, best_s, count


def _lower_cell(m, w, s) -> SurfaceCell:
    m = int(m)
    return SurfaceCell((m, m - 1, 1), ((1 - w) * s, (1 - w) * (1 - s), w))


def _upper_cell(n, m, w, s) -> SurfaceCell:
    m = int(m)
    return SurfaceCell((n, m, m - 1), (w, (1 - w) * s, (1 - w) * (1 - s)))


def invert_on_lower_surface(alpha1: OrderLike, alpha2: OrderLike, h1: float, h2: float) -> SurfaceCell:
    """The unique point x U_m + y U_{m-1} + z U_1 with entropies (h1, h2)."""
    a1, a2 = as_order(alpha1), as_order(alpha2)
    if not 0 < a1.value < a2.value:
        raise DomainError(f"need 0 < alpha1 < alpha2, got ({a1}, {a2})")
    lo, hi = pair_interval(a1, a2, h1)
    h1 = max(float(h1), 0.0)
    if not lo - RANGE_TOL <= h2 <= hi + RANGE_TOL:
        raise EntropyRangeError(f"h2 = {h2!r} outside [{lo!r}, {hi!r}] for h1 = {h1!r}", (lo, hi))
    h2 = min(max(float(h2), lo), hi)
    _, m, w, s, ok = lower3_array(a1, a2, math.inf, np.array([h1]), np.array([h2]))
    if not ok[0]:
        raise EntropyRangeError(f"no preimage of ({h1!r}, {h2!r}) on the lower surface", (lo, hi))
    return _lower_cell(m[0], float(w[0]), float(s[0]))


def lower_bound3(q: BoundQuery3) -> BoundResult:
    """Smallest H_{alpha3} given (h1, h2); the same for every alphabet size."""
    bound, m, w, s, ok = lower3_array(q.alpha1, q.alpha2, q.alpha3, np.array([q.h1]), np.array([q.h2]))
    if not ok[0]:
        raise EntropyRangeError(f"no preimage of ({q.h1!r}, {q.h2!r}) on the lower surface")
    cell = _lower_cell(m[0], float(w[0]), float(s[0]))
    return BoundResult(EntropyValue(float(bound[0])), cell.mixture.compact(), True)


def upper_bound3(q: BoundQuery3) -> BoundResult:
    """Largest H_{alpha3} given (h1, h2) on an n-point alphabet."""
    if q.n is None:
        raise DomainError("the three-order upper bound needs an alphabet size")
    if q.n < 3:
        raise DomainError("the three-order upper bound needs n >= 3")
    bound, m, w, s, count = upper3_array(
        q.alpha1, q.alpha2, q.alpha3, np.array([q.h1]), np.array([q.h2]), q.n
    )
    if count[0] == 0:
        raise EntropyRangeError(f"no preimage of ({q.h1!r}, {q.h2!r}) on the upper surface")
    cell = _upper_cell(q.n, m[0], float(w[0]), float(s[0]))
    return BoundResult(EntropyValue(float(bound[0])), cell.mixture.compact(), True, int(count[0]))


def lower_simplices(n: int) -> list:
    return [(m, m - 1, 1) for m in range(3, n + 1)]


def upper_simplices(n: int) -> list:
    return [(n, m, m - 1) for m in range(2, n)]


@dataclass(frozen=True)
class DiagramSurface:
    """Triangulated image of the upper or lower boundary surface.

    ``vertices`` holds one (h1, h2, h3) row per distinct mixture;
    ``cells[i]`` is that mixture.  ``triangles`` index into ``vertices`` and
    ``triangle_simplex[i]`` is the simplex a triangle came from.  Triangles
    of the upper surface D(n, m, m-1) are wound in reverse, matching its
    negative sign in the closed boundary surface.
    """

    kind: str
    simplices: tuple
    vertices: np.ndarray
    cells: tuple
    triangles: np.ndarray
    triangle_simplex: tuple

    def vertex_labels(self) -> list:
        first = {}
        for tri, simplex in zip(self.triangles, self.triangle_simplex):
            for v in tri:
                first.setdefault(int(v), simplex)
        return [first.get(i, self.cells[i].supports) for i in range(len(self.cells))]


def surface_mesh(alpha1: OrderLike, alpha2: OrderLike, alpha3: OrderLike, n: int, kind: str = "lower",
                 resolution: int = 16) -> DiagramSurface:
    """Sample Psi on a barycentric grid over each simplex of the surface.

    ``resolution`` is the number of grid points per simplex edge.  Vertices
    shared between simplices (same mixture) are stored once.
    """
    if kind not in ("upper", "lower"):
        raise DomainError(f"kind must be 'upper' or 'lower', got {kind!r}")
    if n < 3:
        raise DomainError("boundary surfaces need n >= 3")
    if resolution < 2:
        raise DomainError("resolution must be at least 2")
    orders = [as_order(a) for a in (alpha1, alpha2, alpha3)]
    simplices = upper_simplices(n) if kind == "upper" else lower_simplices(n)
    r = resolution - 1
    index = {}
    cells = []
    triangles = []
    tri_simplex = []
    for simplex in simplices:
        local = {}
        for i in range(r + 1):
            for j in range(r + 1 - i):
                k = r - i - j
                key = tuple(sorted((sup, c) for sup, c in zip(simplex, (i, j, k)) if c))
                if key not in index:
                    index[key] = len(cells)
                    cells.append(SurfaceCell(simplex, (i / r, j / r, k / r)))
                local[i, j] = index[key]
        for i in range(r):
            for j in range(r - i):
                faces = [(local[i, j], local[i + 1, j], local[i, j + 1])]
                if i + j + 1 < r:
                    faces.append((local[i + 1, j], local[i + 1, j + 1], local[i, j + 1]))
                for f in faces:
                    triangles.append(f if kind == "lower" else f[::-1])
                    tri_simplex.append(simplex)
    sup = np.array([c.supports for c in cells], dtype=float)
    bary = np.array([c.barycentric for c in cells], dtype=float)
    cols_s = [sup[:, j] for j in range(3)]
    cols_w = [bary[:, j] for j in range(3)]
    verts = np.column_stack([mixture_entropy_columns(cols_s, cols_w, a) for a in orders])
    verts.setflags(write=False)
    return DiagramSurface(kind, tuple(simplices), verts, tuple(cells),
                          np.array(triangles, dtype=int).reshape(-1, 3), tuple(tri_simplex))
