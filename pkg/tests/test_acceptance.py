"""Exit criteria. Each test prints one PASS/FAIL line (also collected in the
terminal summary) with the measured worst value and runtime."""

import math
import subprocess
import sys
import time
from fractions import Fraction

import pytest

from conftest import ACCEPTANCE_LINES
from polya_order.interlace import build_partition, verify_claim1
from polya_order.operators import CONVEX_SUITE, REGISTRY, bernstein, r_n
from polya_order.ordering_verify import (
    DEFAULT_TOLERANCES,
    auto_c_grid,
    check_convex_order,
    check_error_monotone,
    partial_sums,
)
from polya_order.polya_core import (
    StandardParams,
    brute_force_pmf,
    kozniewska_residuals,
    min_replacement,
    pmf,
    pmf_dc,
)

X_TENTHS = [i / 10 for i in range(11)]
X_TWENTIETHS = [round(i / 20, 2) for i in range(21)]
X_INTERIOR = X_TWENTIETHS[1:-1]


def report(number, title, ok, detail, elapsed, limit=None):
    timing = f"{elapsed:.2f}s" + (f" (limit {limit:g}s)" if limit else "")
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number:>2}: {title} | {detail} | {timing}"
    ACCEPTANCE_LINES.append(line)
    print(line)


def c_set(n, x, values):
    """Boundary-relative c values; n = 1 has no boundary and drops those entries."""
    out = []
    for v in values:
        if isinstance(v, str):
            if n < 2:
                continue
            b = min_replacement(n, x)
            v = {"boundary": b, "boundary/2": b / 2}[v]
        out.append(v)
    return sorted(set(out))


def test_c01_oracle_equivalence():
    t0 = time.perf_counter()
    worst = 0.0
    for n in range(1, 11):
        for x in X_TENTHS:
            for c in c_set(n, x, ["boundary", 0.0, 0.25, 1.0, 5.0]):
                fast = pmf(StandardParams(n, x, c)).probs
                slow = brute_force_pmf(StandardParams(n, x, c)).probs
                worst = max(worst, max(abs(u - v) for u, v in zip(fast, slow)))
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-13 and elapsed < 10
    report(1, "pmf vs brute-force enumeration", ok, f"max dev {worst:.3e} <= 1e-13", elapsed, 10)
    assert ok


def test_c02_kozniewska_identity():
    t0 = time.perf_counter()
    worst = 0.0
    for n in range(1, 101):
        for x in X_INTERIOR:
            cs = c_set(n, x, ["boundary", "boundary/2", 0.0, 1.0, 5.0])
            if n == 1:
                cs = [-1.0, -0.5, 0.0, 1.0, 5.0]
            for c in cs:
                worst = max(worst, max(kozniewska_residuals(StandardParams(n, x, c))))
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-12 and elapsed < 30
    report(2, "partial first centered moment identity", ok, f"max residual {worst:.3e} <= 1e-12",
           elapsed, 30)
    assert ok


def test_c03_interlacing_partition():
    t0 = time.perf_counter()
    bad = []
    cells = 0
    for n in range(3, 41):
        for q in range(2, 13):
            for p in range(1, q):
                x = Fraction(p, q)
                for k in range(1, n - 1):
                    part = build_partition(n, k, x)
                    cells += 1
                    if not (part.is_partition() and part.bounds_hold()):
                        bad.append((n, k, x))
    elapsed = time.perf_counter() - t0
    ok = not bad and elapsed < 30
    report(3, "interlacing partition (exact)", ok, f"{cells} cells, {len(bad)} violations",
           elapsed, 30)
    assert ok


def test_c04_claim1_strictness():
    t0 = time.perf_counter()
    violations = 0
    worst = math.inf
    for n in range(2, 51):
        for x in X_INTERIOR:
            for c in (min_replacement(n, x) + 1e-6, 0.0, 0.5, 2.0):
                for k in range(n):
                    lhs, rhs = verify_claim1(n, k, x, c)
                    worst = min(worst, lhs - rhs)
                    violations += not lhs - rhs > 0
    elapsed = time.perf_counter() - t0
    ok = violations == 0 and worst >= DEFAULT_TOLERANCES["claim1"] and elapsed < 10
    report(4, "log-derivative inequality strict", ok,
           f"{violations} violations, min lhs-rhs {worst:.3e}", elapsed, 10)
    assert ok


C_GRID_ORDER = ["boundary", "boundary/2", 0.0, 0.1, 0.25, 0.5, 1.0, 5.0]


def test_c05_convex_order():
    t0 = time.perf_counter()
    worst = math.inf
    failures = 0
    for n in range(1, 61):
        for x in X_TWENTIETHS:
            cs = c_set(n, x, C_GRID_ORDER)
            for i, c1 in enumerate(cs):
                for c2 in cs[i + 1:]:
                    m = check_convex_order(n, x, c1, c2)
                    worst = min(worst, m)
                    failures += m < -1e-12
    elapsed = time.perf_counter() - t0
    ok = failures == 0 and elapsed < 60
    report(5, "convex ordering via stop-loss dominance", ok,
           f"{failures} failures, worst margin {worst:.3e} >= -1e-12", elapsed, 60)
    assert ok


def lemma2_scan():
    worst = math.inf
    strict_fail = []
    cells = 0
    for n in range(1, 61):
        for x in X_TWENTIETHS:
            cs = c_set(n, x, C_GRID_ORDER)
            sums = [partial_sums(n, x, c) for c in cs]
            for k in range(n + 1):
                for j in range(len(cs) - 1):
                    step = sums[j + 1][k] - sums[j][k]
                    cells += 1
                    worst = min(worst, step)
                    interior = 0 < x < 1 and n >= 2 and k <= n - 1
                    if interior and not step > 1e-14:
                        strict_fail.append((n, x, k, cs[j], cs[j + 1], step))
    return worst, strict_fail, cells


def test_c06_partial_sum_monotone():
    t0 = time.perf_counter()
    worst, strict_fail, cells = lemma2_scan()
    elapsed = time.perf_counter() - t0
    ok = worst >= -1e-12 and not strict_fail and elapsed < 60
    example = strict_fail[0] if strict_fail else None
    report(6, "partial-sum monotone in c", ok,
           f"worst step {worst:.3e} >= -1e-12; {len(strict_fail)}/{cells} interior steps "
           f"not > 1e-14 (first: {example})", elapsed, 60)
    assert worst >= -1e-12
    assert not strict_fail, f"{len(strict_fail)} interior increments <= 1e-14, e.g. {example}"


def test_c06_supplement_small_increments_are_genuine():
    """The increments flagged by criterion 6 are real, not rounding: exact
    rational arithmetic reproduces them as positive numbers below 1e-14."""
    n, x = 10, Fraction(1, 20)
    k = 9
    lo, hi = -x / (n - 1), -x / (2 * (n - 1))

    def exact_sum(c):
        p = brute_force_pmf(StandardParams(n, x, c)).probs
        return sum((x - Fraction(i, n)) * p[i] for i in range(k + 1))

    step = exact_sum(hi) - exact_sum(lo)
    assert 0 < step < Fraction(1, 10**14)
    floats = partial_sums(n, 0.05, float(hi))[k] - partial_sums(n, 0.05, float(lo))[k]
    assert floats == pytest.approx(float(step), rel=1e-9)


def criterion7_grid():
    for n in range(2, 31):
        for x in X_INTERIOR:
            yield n, x, auto_c_grid(n, x, 10)


def test_c07_error_monotone():
    t0 = time.perf_counter()
    worst = math.inf
    failures = strict_checked = strict_fail = 0
    linear_max = 0.0
    for n, x, grid in criterion7_grid():
        for fid in CONVEX_SUITE:
            res = check_error_monotone(REGISTRY[fid], n, x, grid)
            worst = min(worst, res.margin)
            failures += res.margin < -1e-12
            if res.strict_expected:
                strict_checked += 1
                strict_fail += not all(s > 0 for s in res.steps)
        lin = check_error_monotone(REGISTRY["id"], n, x, grid)
        linear_max = max(linear_max, max(lin.errors))
    elapsed = time.perf_counter() - t0
    ok = failures == 0 and strict_fail == 0 and linear_max <= 1e-13 and elapsed < 120
    report(7, "approximation error nondecreasing in c", ok,
           f"worst step {worst:.3e}; strict curves {strict_checked}, {strict_fail} not strict; "
           f"linear max error {linear_max:.1e}", elapsed, 120)
    assert ok


def test_c08_minimal_c_optimal():
    t0 = time.perf_counter()
    worst = -math.inf
    for n, x, _ in criterion7_grid():
        for fid in CONVEX_SUITE:
            f = REGISTRY[fid]
            worst = max(worst, abs(r_n(f, n, x).error) - abs(bernstein(f, n, x).error))
    spot = r_n(REGISTRY["sq"], 2, 0.5)
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-12 and spot.error == 0.0 and spot.value == 0.25
    report(8, "R_n error <= Bernstein error", ok,
           f"max(|R err|-|B err|) {worst:.3e}; r_n(t^2,2,0.5) error {spot.error}", elapsed)
    assert ok


def test_c09_gradient_check():
    t0 = time.perf_counter()
    h = 1e-6
    worst = 0.0
    for n in range(2, 31):
        for x in X_INTERIOR:
            for c in c_set(n, x, ["boundary/2", 0.0, 0.25, 1.0, 5.0]):
                analytic = pmf_dc(StandardParams(n, x, c))
                hi = pmf(StandardParams(n, x, c + h)).probs
                lo = pmf(StandardParams(n, x, c - h)).probs
                fd = [(u - v) / (2 * h) for u, v in zip(hi, lo)]
                worst = max(worst, max(abs(a - d) for a, d in zip(analytic, fd)))
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-5 and elapsed < 10
    report(9, "pmf c-derivative vs central differences", ok, f"max dev {worst:.3e} <= 1e-5",
           elapsed, 10)
    assert ok


def test_c10_verify_deterministic(tmp_path):
    t0 = time.perf_counter()
    blobs = []
    for name in ("first.csv", "second.csv"):
        out = tmp_path / name
        proc = subprocess.run([sys.executable, "-m", "polya_order", "verify", "--out", str(out)],
                              capture_output=True, text=True)
        assert proc.returncode == 0, proc.stderr
        blobs.append(out.read_bytes())
    elapsed = time.perf_counter() - t0
    ok = blobs[0] == blobs[1]
    report(10, "verify CSV byte-identical across runs", ok, f"{len(blobs[0])} bytes", elapsed)
    assert ok
