"""Floating-point kernels for the Pólya urn distribution.

The distribution counts white draws in ``n`` draws from an urn holding mass
``a`` of white and ``b`` of black, where every drawn colour is returned
together with ``c`` extra units of the same colour. Masses and ``c`` are
real; the only requirement is that every urn composition stays
nonnegative (``a + (n-1)c >= 0`` and ``b + (n-1)c >= 0``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from fractions import Fraction
from typing import List, Union

Number = Union[float, Fraction]

# Above this many draws the pmf is evaluated in log space.
LOG_SPACE_THRESHOLD = 30
# Largest negative rounding residue silently clamped to zero.
CLAMP_LIMIT = 1e-15
BRUTE_FORCE_MAX_N = 16
# Slack on the compatibility condition for floats; a boundary c computed as
# -min(x, 1-x)/(n-1) can leave x + (n-1)c at -1 ulp.
COMPAT_TOL = 1e-12


class InvalidParams(ValueError):
    """Parameters violate the compatibility condition or a precondition."""


class BoundaryParams(InvalidParams):
    """Replacement parameter is not strictly inside the admissible range."""


class SizeLimit(ValueError):
    """Input too large for an exhaustive routine."""


@dataclass(frozen=True)
class PolyaParams:
    n: int
    a: Number
    b: Number
    c: Number

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise InvalidParams(f"n must be an integer >= 1, got {self.n!r}")
        if self.a < 0 or self.b < 0:
            raise InvalidParams(f"masses must be nonnegative, got a={self.a}, b={self.b}")
        if self.a + self.b <= 0:
            raise InvalidParams("a + b must be positive")
        shift = (self.n - 1) * self.c
        slack = 0 if _is_exact(self.a, self.b, self.c) else COMPAT_TOL * (self.a + self.b)
        if self.a + shift < -slack or self.b + shift < -slack:
            raise InvalidParams(
                f"compatibility condition fails: a+(n-1)c={self.a + shift}, "
                f"b+(n-1)c={self.b + shift} (n={self.n}, c={self.c})"
            )


def _is_exact(*values) -> bool:
    return all(isinstance(v, (int, Fraction)) for v in values)


def _mass(v):
    """Urn mass after reinforcement; rounding residue below zero means empty."""
    return v if v > 0 else 0 * v


def min_replacement(n: int, x: Number) -> Number:
    """Smallest admissible replacement parameter ``-min(x, 1-x)/(n-1)``."""
    if n < 2:
        raise InvalidParams("minimal replacement parameter needs n >= 2")
    m = min(x, 1 - x)
    if isinstance(m, Fraction):
        return -m / (n - 1)
    return -m / (n - 1) if m != 0 else 0.0


@dataclass(frozen=True)
class StandardParams:
    """The specialisation ``a = x``, ``b = 1 - x``."""

    n: int
    x: Number
    c: Number

    def __post_init__(self):
        if not 0 <= self.x <= 1:
            raise InvalidParams(f"x must lie in [0, 1], got {self.x!r}")
        # delegates the compatibility check
        self.polya()

    def polya(self) -> PolyaParams:
        return PolyaParams(self.n, self.x, 1 - self.x, self.c)

    @property
    def boundary(self) -> Number:
        return min_replacement(self.n, self.x)


def _as_polya(params) -> PolyaParams:
    if isinstance(params, StandardParams):
        return params.polya()
    return params


@dataclass(frozen=True)
class Pmf:
    params: PolyaParams
    probs: tuple
    clamped: float = 0.0  # magnitude of the largest negative entry zeroed

    def __len__(self):
        return len(self.probs)

    def __getitem__(self, k):
        return self.probs[k]

    def __iter__(self):
        return iter(self.probs)

    def mean(self) -> float:
        return math.fsum(k * p for k, p in enumerate(self.probs))


def rising_factorial(x: Number, n: int, h: Number) -> Number:
    """Return ``x (x+h) ... (x+(n-1)h)``; the empty product (n = 0) is 1."""
    if n < 0:
        raise ValueError("n must be >= 0")
    out = 1 if isinstance(x, Fraction) or isinstance(h, Fraction) else 1.0
    for i in range(n):
        out *= x + i * h
    return out


def _mass_product(x: Number, n: int, h: Number) -> Number:
    out = 1 if _is_exact(x, h) else 1.0
    for i in range(n):
        out *= _mass(x + i * h)
    return out


def _pmf_direct(p: PolyaParams) -> List[Number]:
    n, a, b, c = p.n, p.a, p.b, p.c
    denom = _mass_product(a + b, n, c)
    return [
        math.comb(n, k) * _mass_product(a, k, c) * _mass_product(b, n - k, c) / denom
        for k in range(n + 1)
    ]


def _log_ratio(num: float, den: float) -> float:
    """log(num/den) for 0 < num, den; log1p keeps ratios near 1 accurate."""
    r = num / den
    if r < 0.5:
        return math.log(r) if r > 0 else -math.inf
    return math.log1p((num - den) / den)


def _pmf_log(p: PolyaParams) -> List[float]:
    # Each numerator factor is paired with one denominator factor so the
    # logs stay small: black factors b+ic with (a+b)+ic for i < n-k, white
    # factors a+ic with (a+b)+(n-k+i)c for i < k.
    n, a, b, c = p.n, float(p.a), float(p.b), float(p.c)
    s = a + b
    black = []
    for i in range(n):
        f = b + i * c
        black.append(_log_ratio(f, s + i * c) if f > 0 else -math.inf)
    out = []
    for k in range(n + 1):
        terms = black[: n - k]
        if -math.inf in terms:
            out.append(0.0)
            continue
        m = n - k
        dead = False
        for i in range(k):
            f = a + i * c
            if f <= 0:
                dead = True
                break
            terms.append(_log_ratio(f, s + (m + i) * c))
        if dead:
            out.append(0.0)
            continue
        if -math.inf in terms:
            out.append(0.0)
            continue
        terms.append(math.log(math.comb(n, k)))
        out.append(math.exp(math.fsum(terms)))
    return out


def pmf(params: Union[PolyaParams, StandardParams], method: str = "auto") -> Pmf:
    """Probabilities ``P(X = k)``, ``k = 0..n``.

    ``method`` is ``"auto"`` (direct products for n <= 30, log space above),
    ``"direct"`` or ``"log"``. Exact rational inputs stay exact on the
    direct path.
    """
    p = _as_polya(params)
    if method == "auto":
        method = "direct" if p.n <= LOG_SPACE_THRESHOLD else "log"
    # exactness is part of the key: Fraction(1, 2) == 0.5 would otherwise collide
    return _pmf_cached(p, method, _is_exact(p.a, p.b, p.c))


@lru_cache(maxsize=4096)
def _pmf_cached(p: PolyaParams, method: str, exact: bool) -> Pmf:
    if method == "direct":
        raw = _pmf_direct(p)
    elif method == "log":
        raw = _pmf_log(p)
    else:
        raise ValueError(f"unknown method {method!r}")
    clamped = 0.0
    probs = []
    for v in raw:
        if v < 0:
            if -v > CLAMP_LIMIT:
                raise ArithmeticError(f"negative probability {v} beyond rounding")
            clamped = max(clamped, float(-v))
            v = 0 * v
        probs.append(v)
    return Pmf(p, tuple(probs), clamped)


def brute_force_pmf(params: Union[PolyaParams, StandardParams]) -> Pmf:
    """Enumerate all ``2**n`` draw sequences and accumulate by success count.

    Independent of the closed form; exact when the inputs are Fractions.
    """
    p = _as_polya(params)
    n, a, b, c = p.n, p.a, p.b, p.c
    if n > BRUTE_FORCE_MAX_N:
        raise SizeLimit(f"brute force limited to n <= {BRUTE_FORCE_MAX_N}, got {n}")
    zero = a * 0
    totals = [zero] * (n + 1)
    total = a + b

    def walk(t, white, prob):
        if prob == 0:
            return
        if t == n:
            totals[white] += prob
            return
        black = t - white
        mass = total + t * c
        walk(t + 1, white + 1, prob * _mass(a + white * c) / mass)
        walk(t + 1, white, prob * _mass(b + black * c) / mass)

    walk(0, 0, zero + 1)
    return Pmf(p, tuple(totals))


def _check_s(params: StandardParams, s: int):
    if not 1 <= s <= params.n:
        raise InvalidParams(f"s must lie in 1..{params.n}, got {s}")


def partial_centered_moment(params: StandardParams, s: int) -> float:
    """``sum_{k<s} (n x - k) p_k`` by direct summation."""
    _check_s(params, s)
    probs = pmf(params).probs
    nx = params.n * params.x
    return math.fsum((nx - k) * probs[k] for k in range(s))


def check_kozniewska_identity(params: StandardParams, s: int) -> float:
    """Absolute residual of the closed form ``s p_s (1 - x + (n-s) c)``."""
    _check_s(params, s)
    probs = pmf(params).probs
    closed = s * probs[s] * (1 - params.x + (params.n - s) * params.c)
    return abs(partial_centered_moment(params, s) - closed)


def kozniewska_residuals(params: StandardParams) -> List[float]:
    """Residuals of :func:`check_kozniewska_identity` for every ``s = 1..n``."""
    n, x, c = params.n, params.x, params.c
    probs = pmf(params).probs
    terms = [(n * x - k) * p for k, p in enumerate(probs)]
    return [
        abs(math.fsum(terms[:s]) - s * probs[s] * (1 - x + (n - s) * c))
        for s in range(1, n + 1)
    ]


def pmf_dc(params: StandardParams, interior_margin: float = 1e-9) -> List[float]:
    """Analytic derivative of each ``p_k`` with respect to ``c``.

    Uses the logarithmic derivative of the rising factorials. At ``x`` in
    {0, 1} the pmf does not depend on ``c`` and zeros are returned.
    """
    n, x, c = params.n, float(params.x), float(params.c)
    if x in (0.0, 1.0) or n == 1:
        return [0.0] * (n + 1)
    if c < float(params.boundary) + interior_margin:
        raise BoundaryParams(
            f"c={c} is not interior (boundary {float(params.boundary)}, margin {interior_margin})"
        )
    probs = pmf(params).probs
    white = [i / (x + i * c) for i in range(n)]
    black = [i / (1 - x + i * c) for i in range(n)]
    norm = math.fsum(i / (1 + i * c) for i in range(n))
    out = []
    for k in range(n + 1):
        log_dc = math.fsum(white[:k]) + math.fsum(black[: n - k]) - norm
        out.append(probs[k] * log_dc)
    return out


def binomial_pmf(n: int, x: float) -> List[float]:
    return [math.comb(n, k) * x**k * (1 - x) ** (n - k) for k in range(n + 1)]

