"""Generalised Vandermonde determinants and the orientation of entropy maps.

For ``0 < x_1 <= ... <= x_l`` and ``b_1 < ... < b_l`` the determinant of
``(x_i ** b_j)`` is non-negative and vanishes exactly when two consecutive
``x`` coincide.  The Jacobian of ``P -> (H_a1(P), ..., H_am(P), sum P)``
restricted to ``m + 1`` distinct point probabilities factors into a diagonal
prefactor times such a determinant, which is why the entropy map preserves
orientation on simplices of uniform mixtures.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .entropy import OrderKind, as_order
from .errors import ConsistencyError, DomainError

DENOMINATOR_RTOL = 1e-9


def lu_determinant(a: np.ndarray) -> float:
    """Determinant by Gaussian elimination with partial pivoting."""
    a = np.array(a, dtype=float)
    n = a.shape[0]
    if a.shape != (n, n):
        raise DomainError("determinant needs a square matrix")
    det = 1.0
    for col in range(n):
        piv = col + int(np.argmax(np.abs(a[col:, col])))
        if a[piv, col] == 0.0:
            return 0.0
        if piv != col:
            a[[col, piv]] = a[[piv, col]]
            det = -det
        det *= a[col, col]
        below = a[col + 1:, col] / a[col, col]
        a[col + 1:, col:] -= np.outer(below, a[col, col:])
    return float(det)


@dataclass(frozen=True)
class VandermondeInstance:
    xs: tuple
    betas: tuple

    def __post_init__(self):
        xs = tuple(float(x) for x in self.xs)
        betas = tuple(float(b) for b in self.betas)
        if not xs or len(xs) != len(betas):
            raise DomainError("xs and betas must be non-empty and of equal length")
        if any(x <= 0 for x in xs):
            raise DomainError("xs must be positive")
        if any(a > b for a, b in zip(xs, xs[1:])):
            raise DomainError("xs must be sorted non-decreasing")
        if any(a >= b for a, b in zip(betas, betas[1:])):
            raise DomainError("betas must be strictly increasing")
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "betas", betas)

    def matrix(self) -> np.ndarray:
        """Rows indexed by exponent, columns by abscissa."""
        return np.power.outer(np.array(self.xs), np.array(self.betas)).T

    def scale(self) -> float:
        """Magnitude reference for deciding that a determinant is zero."""
        size = len(self.xs)
        return float(np.max(np.abs(self.matrix()))) ** size * math.factorial(size)


def gen_vandermonde_det(v: VandermondeInstance) -> float:
    return lu_determinant(v.matrix())


def zero_tolerance(scale: float) -> float:
    return 1e-12 * scale


def _check_orientation_args(probs, orders):
    probs = np.asarray(probs, dtype=float)
    orders = [as_order(a) for a in orders]
    m = len(orders)
    if probs.ndim != 1 or probs.size != m + 1:
        raise DomainError(f"need {m + 1} point probabilities for {m} orders, got {probs.size}")
    if np.any(probs <= 0):
        raise DomainError("point probabilities must be positive")
    if np.any(np.diff(probs) < 0):
        raise DomainError("point probabilities must be sorted increasing")
    for a in orders:
        if a.kind is not OrderKind.GENERIC or a.uses_shannon:
            raise DomainError(f"orders must lie in (0, inf) minus {{1}}, got {a}")
    if any(a.value >= b.value for a, b in zip(orders, orders[1:])):
        raise DomainError("orders must be strictly increasing")
    return probs, np.array([a.value for a in orders])


def _denominators(probs, alphas, denominators):
    own = np.array([math.fsum((probs ** a).tolist()) for a in alphas])
    if denominators is None:
        return own
    dens = np.asarray(denominators, dtype=float)
    if dens.shape != alphas.shape or np.any(dens <= 0):
        raise DomainError("one positive power sum per order is required")
    # The listed probabilities are the whole distribution only if they sum to one;
    # then the power sums are known exactly and inconsistent input is replaced.
    if abs(probs.sum() - 1.0) <= 1e-9:
        bad = np.abs(dens - own) > DENOMINATOR_RTOL * own
        dens = np.where(bad, own, dens)
    return dens


def jacobian_block(probs, orders, denominators=None) -> np.ndarray:
    """The (m+1) x (m+1) block of partial derivatives of the entropy map.

    Row i < m is ``a_i / (1 - a_i) * p_j ** (a_i - 1) / S_i`` with ``S_i``
    the power sum of order ``a_i``; the last row is all ones.
    """
    probs, alphas = _check_orientation_args(probs, orders)
    dens = _denominators(probs, alphas, denominators)
    rows = [(a / (1 - a)) * probs ** (a - 1) / s for a, s in zip(alphas, dens)]
    rows.append(np.ones_like(probs))
    return np.array(rows)


def factored_determinant(probs, orders, denominators=None) -> float:
    """Jacobian-block determinant via prefactor times a generalised Vandermonde.

    The exponents are ``a_i - 1`` plus 0 for the all-ones row.  Sorting the
    0 into place costs ``(-1) ** #{a_i > 1}`` adjacent row swaps, exactly the
    number of negative factors ``a_i / (1 - a_i)``, so the two signs cancel.
    """
    probs, alphas = _check_orientation_args(probs, orders)
    dens = _denominators(probs, alphas, denominators)
    prefactor = float(np.prod(alphas / (1 - alphas)) * np.prod(1.0 / dens))
    swaps = int(np.sum(alphas > 1))
    betas = tuple(sorted(list(alphas - 1) + [0.0]))
    v = VandermondeInstance(tuple(probs), betas)
    return prefactor * (-1) ** swaps * gen_vandermonde_det(v)


def orientation_sign(probs: Sequence[float], orders, denominators=None) -> int:
    """Sign of the Jacobian-block determinant, computed two ways.

    ``denominators`` are the power sums of the full distribution; they may be
    omitted when ``probs`` is the full distribution.  Raises
    :class:`ConsistencyError` if the direct and factored signs disagree.
    """
    block = jacobian_block(probs, orders, denominators)
    direct = lu_determinant(block)
    factored = factored_determinant(probs, orders, denominators)
    size = block.shape[0]
    tol = zero_tolerance(float(np.max(np.abs(block))) ** size * math.factorial(size))
    s_direct = 0 if abs(direct) <= tol else int(math.copysign(1, direct))
    s_factored = 0 if abs(factored) <= tol else int(math.copysign(1, factored))
    if s_direct != s_factored:
        raise ConsistencyError(
            f"direct determinant {direct!r} and factored form {factored!r} disagree in sign"
        )
    return s_direct
