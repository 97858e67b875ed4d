"""Positive linear operators built on the Pólya pmf.

All of them evaluate ``f`` only at the nodes ``k/n`` and average with the
Pólya weights::

    P(f; x) = sum_k f(k/n) p_{n,k}^{a,b,c}

Bernstein is the ``c = 0`` member with ``a = x, b = 1-x``; Stancu allows any
admissible ``c``; ``r_n`` pins ``c`` to its minimal admissible value.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from types import MappingProxyType
from typing import Callable, Optional, Sequence

from .polya_core import InvalidParams, PolyaParams, StandardParams, min_replacement, pmf


@dataclass(frozen=True)
class TestFunction:
    id: str
    eval: Callable[[float], float]
    is_convex: bool
    description: str = ""
    # gap(t, x) = f(t) - f(x) - s (t - x) for a subgradient s of f at x, in a
    # closed form that is exact where f is affine; lets tiny errors be summed
    # without cancellation
    gap: Optional[Callable[[float, float], float]] = None

    __test__ = False  # keep pytest from collecting this class

    def __call__(self, t: float) -> float:
        return self.eval(t)


@dataclass(frozen=True)
class OperatorEval:
    operator: str
    n: int
    x: float
    c: float
    value: float
    fx: float
    error: float  # value - f(x), evaluated stably when f carries a slope


def _hinge(t):
    return max(0.0, t - 0.3)


def _hinge_gap(t, x):
    return max(0.0, 0.3 - t) if x > 0.3 else max(0.0, t - 0.3)


def _abshalf_gap(t, x):
    if x > 0.5:
        return 2 * max(0.0, 0.5 - t)
    if x < 0.5:
        return 2 * max(0.0, t - 0.5)
    return abs(t - 0.5)


def _exp_gap(t, x):
    d = t - x
    return math.exp(x) * (math.expm1(d) - d)


def _neglog_gap(t, x):
    u = (t - x) / (x + 0.1)
    return u - math.log1p(u)


_FUNCTIONS = (
    TestFunction("sq", lambda t: t * t, True, "t^2", lambda t, x: (t - x) ** 2),
    TestFunction("abshalf", lambda t: abs(t - 0.5), True, "|t - 1/2|", _abshalf_gap),
    TestFunction("exp", math.exp, True, "exp(t)", _exp_gap),
    TestFunction("neglog", lambda t: -math.log(t + 0.1), True, "-log(t + 0.1)", _neglog_gap),
    TestFunction("hinge", _hinge, True, "max(0, t - 0.3)", _hinge_gap),
    TestFunction("cube", lambda t: t**3, True, "t^3", lambda t, x: (t - x) ** 2 * (t + 2 * x)),
    TestFunction("sin", lambda t: math.sin(2 * math.pi * t), False, "sin(2 pi t)"),
    TestFunction("id", lambda t: t, True, "t", lambda t, x: 0.0),
    TestFunction("one", lambda t: 1.0, True, "1", lambda t, x: 0.0),
)

REGISTRY = MappingProxyType({f.id: f for f in _FUNCTIONS})
CONVEX_SUITE = ("sq", "abshalf", "exp", "neglog", "hinge", "cube")
LINEAR = ("id", "one")


def get_function(fid: str) -> TestFunction:
    try:
        return REGISTRY[fid]
    except KeyError:
        raise KeyError(f"unknown function id {fid!r}; known: {', '.join(REGISTRY)}") from None


def midpoint_convex(f: TestFunction, points: int = 101, tol: float = 1e-12) -> bool:
    grid = [i / (points - 1) for i in range(points)]
    for u in grid:
        fu = f(u)
        for v in grid:
            if f((u + v) / 2) > (fu + f(v)) / 2 + tol:
                return False
    return True


def _weighted(f: TestFunction, n: int, x: float, probs: Sequence[float]):
    """Return ``(sum f(k/n) p_k, f(x), error)``.

    The pmf has mean ``n x``, so the error equals ``sum p_k gap(k/n, x)``; for
    convex f every gap is nonnegative and tiny errors keep relative accuracy.
    """
    fx = f(x)
    nodes = [(k / n, p) for k, p in enumerate(probs) if p != 0]
    value = math.fsum(f(t) * p for t, p in nodes)
    if f.gap is None:
        return value, fx, value - fx
    return value, fx, math.fsum(f.gap(t, x) * p for t, p in nodes)


def apply_general(f: TestFunction, n: int, x: float, a: float, b: float, c: float) -> OperatorEval:
    if not 0 <= x <= 1:
        raise InvalidParams(f"x must lie in [0, 1], got {x}")
    params = PolyaParams(n, a, b, c)
    probs = pmf(params).probs
    fx = f(x)
    value = math.fsum(f(k / n) * p for k, p in enumerate(probs) if p != 0)
    # the stable error form needs mean n x, which holds only when a/(a+b) = x
    return OperatorEval("general", n, x, c, value, fx, value - fx)


def stancu(f: TestFunction, n: int, x: float, c: float) -> OperatorEval:
    if n < 2:
        raise InvalidParams("stancu needs n >= 2")
    probs = pmf(StandardParams(n, x, c)).probs
    return OperatorEval("stancu", n, x, c, *_weighted(f, n, x, probs))


def bernstein(f: TestFunction, n: int, x: float) -> OperatorEval:
    probs = pmf(StandardParams(n, x, 0.0)).probs
    return OperatorEval("bernstein", n, x, 0.0, *_weighted(f, n, x, probs))


def bernstein_direct(f: TestFunction, n: int, x: float) -> float:
    """Textbook Bernstein polynomial, independent of the Pólya machinery."""
    return math.fsum(
        f(k / n) * math.comb(n, k) * x**k * (1 - x) ** (n - k) for k in range(n + 1)
    )


def r_n(f: TestFunction, n: int, x: float) -> OperatorEval:
    if n < 2:
        raise InvalidParams("r_n needs n >= 2")
    res = stancu(f, n, x, min_replacement(n, x))
    return OperatorEval("r_n", res.n, res.x, res.c, res.value, res.fx, res.error)


def b1(f: TestFunction, x: float) -> float:
    """Linear interpolant ``f(0)(1-x) + f(1)x``."""
    return f(0.0) * (1 - x) + f(1.0) * x
