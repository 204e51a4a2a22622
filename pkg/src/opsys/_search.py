"""Shared one-dimensional search helpers (threshold bisection)."""

from __future__ import annotations

from typing import Callable


def smallest_passing(
    predicate: Callable[[float], bool],
    r_max: float,
    precision: float,
    r_start: float = 1.0,
) -> float | None:
    """Smallest ``r >= 0`` with ``predicate(r)`` true, assuming monotonicity.

    Exponential search for an upper bracket starting at ``r_start``, then
    bisection down to ``precision``.  Returns ``None`` when no ``r <= r_max``
    passes.
    """
    if predicate(0.0):
        return 0.0
    hi = max(r_start, precision)
    while not predicate(hi):
        hi *= 2.0
        if hi > r_max:
            return None
    lo = 0.0 if hi == max(r_start, precision) else hi / 2.0
    while hi - lo > precision:
        mid = 0.5 * (lo + hi)
        if predicate(mid):
            hi = mid
        else:
            lo = mid
    return hi
