"""Independent reference values for the test suite.

Nothing here imports renyi_range.  Every value is computed from first
principles with mpmath (50 digits) or by brute-force enumeration with
plain numpy, then frozen into the tests.  Run with ``--fast`` to skip the
two large grid enumerations.

    python3 tests/oracles/reference_values.py
"""

import argparse
import itertools
import json
import math
import sys

import mpmath as mp
import numpy as np

mp.mp.dps = 50


def renyi_mp(p, a):
    p = [mp.mpf(x) for x in p if x != 0]
    if a == 1:
        return -mp.fsum(x * mp.log(x) for x in p)
    if a == mp.inf:
        return -mp.log(max(p))
    if a == 0:
        return mp.log(len(p))
    a = mp.mpf(a)
    return mp.log(mp.fsum(x ** a for x in p)) / (1 - a)


def mixture_mp(supports, weights):
    n = max(supports)
    out = [mp.mpf(0)] * n
    for k, w in zip(supports, weights):
        for j in range(n - k, n):
            out[j] += mp.mpf(w) / k
    return out


def scalar_values():
    out = {}
    out["h2_06_03_01"] = -mp.log(mp.mpf("0.46"))
    out["h2_bits_half_quarter_quarter"] = -mp.log(mp.mpf("0.375")) / mp.log(2)
    out["vdm_12_05_17"] = mp.mpf(2) ** mp.mpf("1.7") - mp.mpf(2) ** mp.mpf("0.5")

    # Jacobian block rows: a/(1-a) * p_j^(a-1) / S_a, then ones.
    def block(probs, alphas):
        probs = [mp.mpf(x) for x in probs]
        rows = []
        for a in alphas:
            a = mp.mpf(a)
            s = mp.fsum(x ** a for x in probs)
            rows.append([a / (1 - a) * x ** (a - 1) / s for x in probs])
        rows.append([mp.mpf(1)] * len(probs))
        return mp.matrix(rows)

    out["jac_025_075_a2"] = mp.det(block(["0.25", "0.75"], ["2"]))
    out["jac_01_03_06_a05_2"] = mp.det(block(["0.1", "0.3", "0.6"], ["0.5", "2"]))
    return out


def segment_root():
    """s with H_1((s/2, 1 - s/2)) = 0.5: scan s at step 1e-6, then refine."""
    s = np.arange(0, 1_000_001) * 1e-6
    q = s / 2
    with np.errstate(divide="ignore", invalid="ignore"):
        h = -(np.where(q > 0, q * np.log(q), 0) + (1 - q) * np.log(1 - q))
    i = int(np.flatnonzero((h[:-1] - 0.5) * (h[1:] - 0.5) <= 0)[0])
    lo, hi = mp.mpf(i) * mp.mpf("1e-6"), mp.mpf(i + 1) * mp.mpf("1e-6")
    f = lambda t: renyi_mp([t / 2, 1 - t / 2], 1) - mp.mpf("0.5")
    root = mp.findroot(f, (lo, hi), solver="anderson")
    assert lo <= root <= hi
    return {"segment_2_1_shannon_half": root, "segment_bracket": [float(lo), float(hi)]}


def partitions(total, parts, cap):
    """Non-increasing tuples of ``parts`` non-negative ints summing to total."""
    if parts == 1:
        if total <= cap:
            yield (total,)
        return
    for first in range(min(total, cap), -1, -1):
        if first * parts < total:
            break
        for rest in partitions(total - first, parts - 1, first):
            yield (first,) + rest


def grid_rows(n, R):
    rows = np.array(list(partitions(R, n, R)), dtype=float) / R
    return rows


def h_rows(P, a):
    with np.errstate(divide="ignore", invalid="ignore"):
        if a == 1:
            return -np.sum(np.where(P > 0, P * np.log(P), 0.0), axis=1)
        if a == math.inf:
            return -np.log(P.max(axis=1))
        return np.log(np.sum(np.where(P > 0, P ** a, 0.0), axis=1)) / (1 - a)


def grid_bin_extremes():
    """Orders (1, 2), bin H_1 in [0.998, 1.002]: max of H_2 on n=3, min on n=4, grid 1/600."""
    out = {}
    P3 = grid_rows(3, 600)
    h1, h2 = h_rows(P3, 1), h_rows(P3, 2)
    sel = (h1 >= 0.998) & (h1 <= 1.002)
    out["grid600_n3_max_h2_at_h1_1"] = float(h2[sel].max())
    P4 = grid_rows(4, 600)
    h1, h2 = h_rows(P4, 1), h_rows(P4, 2)
    sel = (h1 >= 0.998) & (h1 <= 1.002)
    out["grid600_n4_min_h2_at_h1_1"] = float(h2[sel].min())
    out["grid600_n4_max_h2_at_h1_1"] = float(h2[sel].max())
    return out


def solve_mixture(supports, orders, targets, start):
    """Weights (w1, w2) with w3 = 1 - w1 - w2 matching two entropies, or None."""
    def F(w1, w2):
        p = mixture_mp(supports, [w1, w2, 1 - w1 - w2])
        return [renyi_mp(p, orders[0]) - targets[0], renyi_mp(p, orders[1]) - targets[1]]

    try:
        w = mp.findroot(F, [mp.mpf(start[0]), mp.mpf(start[1])], tol=mp.mpf("1e-40"), maxsteps=200)
    except (ZeroDivisionError, ValueError):
        return None
    w1, w2 = w[0], w[1]
    w3 = 1 - w1 - w2
    if min(w1, w2, w3) < -mp.mpf("1e-30"):
        return None
    res = F(w1, w2)
    if max(abs(r) for r in res) > mp.mpf("1e-30"):
        return None
    return (w1, w2, w3)


def surface_preimages(simplices, orders, h1, h2, step=1e-3):
    """All preimages of (h1, h2) on the given three-support simplices.

    A barycentric grid scan at ``step`` finds candidate basins (grid points
    whose image lies close to the target); each basin is refined with a 2-D
    Newton solve in 50-digit arithmetic.  Returns a list of
    (supports, weights, H_a3) with duplicates merged.
    """
    found = []
    for sup in simplices:
        m = int(round(1 / step))
        i, j = np.meshgrid(np.arange(m + 1), np.arange(m + 1), indexing="ij")
        keep = i + j <= m
        w1, w2 = i[keep] / m, j[keep] / m
        w3 = 1 - w1 - w2
        n = max(sup)
        P = np.zeros((w1.size, n))
        for k, w in zip(sup, (w1, w2, w3)):
            P[:, n - k:] += (w / k)[:, None]
        d = np.hypot(h_rows(P, orders[0]) - h1, h_rows(P, orders[1]) - h2)
        cand = np.argsort(d)[:40]
        for c in cand:
            if d[c] > 5e-3:
                break
            sol = solve_mixture(sup, orders[:2], (mp.mpf(h1), mp.mpf(h2)), (w1[c], w2[c]))
            if sol is None:
                continue
            p = mixture_mp(sup, sol)
            key = tuple(float(x) for x in sorted(p))
            if any(max(abs(a - b) for a, b in zip(key, f[3])) < 1e-12 for f in found if len(f[3]) == len(key)):
                continue
            found.append((sup, tuple(float(x) for x in sol), renyi_mp(p, orders[2]), key))
    return [(s, w, h) for s, w, h, _ in found]


def three_order_points():
    out = {}
    orders = (1, 2, 3)
    lower_cells = [(m, m - 1, 1) for m in range(3, 8)]
    pre = surface_preimages(lower_cells, orders, 1.0, 0.92)
    out["low3_123_h1_1_h2_092"] = [(list(s), list(w), float(h)) for s, w, h in pre]
    n = 5
    upper_cells = [(n, m, m - 1) for m in range(2, n)]
    pre = surface_preimages(upper_cells, orders, 1.0, 0.92)
    out["up3_123_n5_h1_1_h2_092"] = [(list(s), list(w), float(h)) for s, w, h in pre]
    orders = (0.5, 2, 5)
    pre = surface_preimages([(m, m - 1, 1) for m in range(3, 9)], orders, 1.0, 0.5)
    out["low3_05_2_5_h1_1_h2_05"] = [(list(s), list(w), float(h)) for s, w, h in pre]
    pre = surface_preimages([(6, m, m - 1) for m in range(2, 6)], orders, 1.0, 0.5)
    out["up3_05_2_5_n6_h1_1_h2_05"] = [(list(s), list(w), float(h)) for s, w, h in pre]
    return out


def grid_cell_extremes():
    """Orders (1,2,3) on the 4-simplex at resolution 1/80, one interior (H_1, H_2) cell."""
    P = grid_rows(5, 80)
    h1, h2, h3 = h_rows(P, 1), h_rows(P, 2), h_rows(P, 3)
    lo1, lo2 = 1.20, 1.05
    sel = (h1 >= lo1) & (h1 < lo1 + 0.01) & (h2 >= lo2) & (h2 < lo2 + 0.01)
    return {
        "cell80_n5_123": {
            "h1_range": [lo1, lo1 + 0.01],
            "h2_range": [lo2, lo2 + 0.01],
            "count": int(sel.sum()),
            "max_h3": float(h3[sel].max()),
            "min_h3": float(h3[sel].min()),
        }
    }


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--fast", action="store_true", help="skip the large grid enumerations")
    args = ap.parse_args(argv)
    out = {}
    out.update({k: (str(v) if isinstance(v, mp.mpf) else v) for k, v in scalar_values().items()})
    seg = segment_root()
    out.update({k: (str(v) if isinstance(v, mp.mpf) else v) for k, v in seg.items()})
    out.update(three_order_points())
    if not args.fast:
        out.update(grid_bin_extremes())
        out.update(grid_cell_extremes())
    json.dump(out, sys.stdout, indent=2, default=str)
    print()


if __name__ == "__main__":
    main()
