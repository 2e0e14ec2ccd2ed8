"""Vectorised bisection for monotone scalar functions.

Every lane of the input arrays is an independent root-finding problem.  The
only requirement is that each lane's function is monotone on its bracket;
the direction may differ between lanes.
"""

from __future__ import annotations

import numpy as np

MAX_HALVINGS = 100


def bisect(f, target, lo, hi, increasing=True, halvings: int = MAX_HALVINGS):
    """Solve ``f(x) = target`` lane-wise on ``[lo, hi]``.

    ``f`` maps an array of abscissae (one per lane) to an array of values.
    Iteration stops after ``halvings`` steps or once every bracket has shrunk
    to adjacent floats.  The returned abscissa is whichever final bracket end
    has the smaller residual, so exact endpoint solutions come back exactly.
    """
    target = np.asarray(target, dtype=float)
    lo, hi, target, increasing = np.broadcast_arrays(
        np.asarray(lo, dtype=float), np.asarray(hi, dtype=float), target, np.asarray(increasing, dtype=bool)
    )
    lo, hi = lo.copy(), hi.copy()
    for _ in range(halvings):
        mid = 0.5 * (lo + hi)
        if np.all((mid <= lo) | (mid >= hi)):
            break
        go_right = (f(mid) < target) == increasing
        lo = np.where(go_right, mid, lo)
        hi = np.where(go_right, hi, mid)
    r_lo = np.abs(f(lo) - target)
    r_hi = np.abs(f(hi) - target)
    return np.where(r_lo <= r_hi, lo, hi)


def solve_bracketed(f, target, lo, hi, increasing=True, ftol: float = 1e-14, max_steps: int = 300):
    """Bracket-preserving false position (Illinois variant) with a bisection guard.

    Solves ``f(x) = target`` lane-wise like :func:`bisect`, but ``f`` is
    called as ``f(x, idx)``: ``idx`` holds the flat indices of the lanes
    still being solved and ``x`` one abscissa per such lane.  Converged
    lanes drop out, so a slow tail costs little.

    Each step is a false-position step on the bracket, with the stale end's
    value halved whenever the same end moves twice in a row.  If the bracket
    has not halved over three steps the next step bisects.  A lane stops when
    its residual is below ``ftol`` or its bracket has collapsed to adjacent
    floats; the bracket end with the smaller residual is returned.
    """
    target = np.asarray(target, dtype=float)
    lo, hi, target, increasing = np.broadcast_arrays(
        np.asarray(lo, dtype=float), np.asarray(hi, dtype=float), target, np.asarray(increasing, dtype=bool)
    )
    shape = lo.shape
    sign = np.where(increasing, 1.0, -1.0).ravel()
    target = target.ravel()
    a, b = lo.ravel().copy(), hi.ravel().copy()
    every = np.arange(a.size)
    ga = sign * (np.asarray(f(a, every), dtype=float) - target)
    gb = sign * (np.asarray(f(b, every), dtype=float) - target)
    # Targets outside the bracket values collapse onto the nearer end.
    best = np.where(np.abs(ga) <= np.abs(gb), a, b)
    live = np.flatnonzero((ga < 0) & (gb > 0) & (np.minimum(-ga, gb) > ftol))
    a, b, ga, gb = a[live], b[live], ga[live], gb[live]
    wa, wb = ga.copy(), gb.copy()
    side = np.zeros(live.size, dtype=np.int8)
    ref = b - a
    age = np.zeros(live.size, dtype=np.int8)

    for _ in range(max_steps):
        if live.size == 0:
            break
        width = b - a
        with np.errstate(divide="ignore", invalid="ignore"):
            x = b - wb * width / (wb - wa)
        mid = 0.5 * (a + b)
        x = np.where((age >= 3) | ~np.isfinite(x) | (x <= a) | (x >= b), mid, x)
        stuck = (x <= a) | (x >= b)
        gx = sign[live] * (np.asarray(f(x, live), dtype=float) - target[live])
        left = gx < 0
        wb = np.where(left & (side == -1), 0.5 * wb, wb)
        wa = np.where(~left & (side == 1), 0.5 * wa, wa)
        a = np.where(left, x, a)
        ga = np.where(left, gx, ga)
        wa = np.where(left, gx, wa)
        b = np.where(left, b, x)
        gb = np.where(left, gb, gx)
        wb = np.where(left, wb, gx)
        side = np.where(left, -1, 1).astype(np.int8)
        halved = (b - a) <= 0.5 * ref
        ref = np.where(halved, b - a, ref)
        age = np.where(halved | (age >= 3), 0, age + 1).astype(np.int8)
        best[live] = np.where(-ga <= gb, a, b)
        done = stuck | (np.minimum(-ga, gb) <= ftol)
        if done.any():
            keep = ~done
            live = live[keep]
            a, b, ga, gb, wa, wb = a[keep], b[keep], ga[keep], gb[keep], wa[keep], wb[keep]
            side, ref, age = side[keep], ref[keep], age[keep]
    return best.reshape(shape)
