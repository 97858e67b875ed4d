"""Interlacing partition of ``{1, ..., n-1}`` and the companion sum inequality.

For rational ``x`` in (0, 1) and ``1 <= k <= n-2`` the set ``{1, ..., n-1}``
splits into ``n_1..n_k`` and ``m_1..m_{n-k-1}`` with ``n_i <= i/x`` and
``m_i <= i/(1-x)``. The construction rounds ``i/x`` and ``i/(1-x)`` down to
integers (with different tie rules) and then folds values above ``n-1``
back into the unused slots. Everything runs in exact rational arithmetic so
the tie cases are decided exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Tuple

from .polya_core import BoundaryParams, InvalidParams, min_replacement


class InterlaceError(ArithmeticError):
    """Raw values collided; the construction's distinctness argument failed."""


@dataclass(frozen=True)
class InterlacePartition:
    n: int
    k: int
    x: Fraction
    n_seq: Tuple[int, ...]
    m_seq: Tuple[int, ...]
    raw_n: Tuple[int, ...]
    raw_m: Tuple[int, ...]

    @property
    def remap(self) -> dict:
        """The bijection applied to raw values above ``n - 1``."""
        pairs = zip(self.raw_n + self.raw_m, self.n_seq + self.m_seq)
        return {raw: final for raw, final in pairs if raw > self.n - 1}

    def is_partition(self) -> bool:
        values = self.n_seq + self.m_seq
        return len(values) == self.n - 1 and set(values) == set(range(1, self.n))

    def bounds_hold(self) -> bool:
        x = self.x
        ok_n = all(v <= i / x for i, v in enumerate(self.n_seq, 1))
        ok_m = all(v <= i / (1 - x) for i, v in enumerate(self.m_seq, 1))
        return ok_n and ok_m


def _floor_rational(q: Fraction) -> int:
    return q.numerator // q.denominator


def _ceil_rational(q: Fraction) -> int:
    return -((-q.numerator) // q.denominator)


def build_partition(n: int, k: int, x: Fraction) -> InterlacePartition:
    if not isinstance(x, Fraction):
        raise TypeError("x must be a Fraction; convert floats explicitly with Fraction(...)")
    if n < 3:
        raise InvalidParams(f"n must be >= 3, got {n}")
    if not 1 <= k <= n - 2:
        raise InvalidParams(f"k must lie in 1..{n - 2}, got {k}")
    if not 0 < x < 1:
        raise InvalidParams(f"x must lie in (0, 1), got {x}")

    # i/x in (j, j+1]  ->  j, so exact integers drop by one
    raw_n = tuple(_ceil_rational(i / x) - 1 for i in range(1, k + 1))
    # i/(1-x) in (j, j+1) -> j, and i/(1-x) == j+1 -> j+1: plain floor
    raw_m = tuple(_floor_rational(i / (1 - x)) for i in range(1, n - k))

    raw = raw_n + raw_m
    if len(set(raw)) != len(raw):
        raise InterlaceError(f"raw values not distinct for n={n}, k={k}, x={x}: {raw}")

    top = n - 1
    overflow = sorted(v for v in raw if v > top)
    free = sorted(set(range(1, n)) - {v for v in raw if v <= top})
    if len(overflow) != len(free):
        raise InterlaceError(f"overflow {overflow} cannot fill free slots {free}")
    fold = dict(zip(overflow, free))

    n_seq = tuple(fold.get(v, v) for v in raw_n)
    m_seq = tuple(fold.get(v, v) for v in raw_m)
    return InterlacePartition(n, k, x, n_seq, m_seq, raw_n, raw_m)


def phi(u: float, c: float) -> float:
    return u / (1 + u * c)


def _check_interior(n: int, x: float, c: float):
    if not 0 < x < 1:
        raise InvalidParams(f"x must lie in (0, 1), got {x}")
    if n < 2:
        raise InvalidParams(f"n must be >= 2, got {n}")
    if c <= min_replacement(n, x):
        raise BoundaryParams(f"c={c} must exceed {min_replacement(n, x)}")


def verify_claim1(n: int, k: int, x: float, c: float) -> Tuple[float, float]:
    """Both sides of the logarithmic-derivative inequality.

    lhs = sum_{i<=k} i/(x+ic) + sum_{i<=n-k-1} i/(1-x+ic), rhs =
    sum_{i<=n-1} i/(1+ic). The inequality lhs > rhs holds strictly inside
    the admissible range.
    """
    _check_interior(n, x, c)
    if not 0 <= k <= n - 1:
        raise InvalidParams(f"k must lie in 0..{n - 1}, got {k}")
    lhs = math.fsum(i / (x + i * c) for i in range(k + 1))
    lhs += math.fsum(i / (1 - x + i * c) for i in range(n - k))
    rhs = math.fsum(i / (1 + i * c) for i in range(n))
    return lhs, rhs


def phi_chain(part: InterlacePartition, c: float) -> Tuple[float, float, float]:
    """Evaluate the three sums of the domination chain over a partition.

    Returns ``(upper, middle, lower)`` where upper sums phi at ``i/x`` and
    ``i/(1-x)``, middle sums phi at the partition entries and lower is
    ``sum_{i=1}^{n-1} phi(i)``; middle and lower agree up to ordering.
    """
    x = part.x
    upper = math.fsum(phi(float(i / x), c) for i in range(1, part.k + 1))
    upper += math.fsum(phi(float(i / (1 - x)), c) for i in range(1, part.n - part.k))
    middle = math.fsum(phi(v, c) for v in part.n_seq + part.m_seq)
    lower = math.fsum(phi(i, c) for i in range(1, part.n))
    return upper, middle, lower


def termwise_dominates(part: InterlacePartition, c: float) -> bool:
    """phi(i/x) >= phi(n_i) and phi(i/(1-x)) >= phi(m_i) for every index."""
    x = part.x
    for i, v in enumerate(part.n_seq, 1):
        if phi(float(i / x), c) < phi(v, c):
            return False
    for i, v in enumerate(part.m_seq, 1):
        if phi(float(i / (1 - x)), c) < phi(v, c):
            return False
    return True
