"""Numerical certification of convex ordering and error monotonicity in ``c``.

Checks operate on the standard family ``a = x, b = 1 - x``. Every check
returns a *margin*: a number that the theorem being checked says is
nonnegative (or strictly positive). Sweeps collect margins over parameter
grids into a :class:`SweepReport` that serialises to a flat CSV.
"""

from __future__ import annotations

import csv
import io
import itertools
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .interlace import build_partition, verify_claim1
from .operators import REGISTRY, b1, bernstein, get_function, stancu
from .polya_core import (
    InvalidParams,
    StandardParams,
    kozniewska_residuals,
    min_replacement,
    pmf,
    pmf_dc,
)

SCHEMA_VERSION = 1
CHECKS = ("convex-order", "partial-sum", "error-monotone", "kozniewska", "claim1", "partition")
CSV_HEADER = ("check", "n", "x", "k_or_t", "c1", "c2", "function", "margin", "pass")
JOBS_ENV = "POLYA_ORDER_JOBS"

DEFAULT_TOLERANCES = {
    "margin": 1e-12,  # allowed negative slack on every monotonicity margin
    "partial_sum_strict": 1e-14,  # interior partial-sum increments must exceed this
    "strictness": 1e-9,  # |B_n f - B_1 f| above this demands strict error growth
    "strictness_floor": 1e-12,  # below this the error curve may be flat
    "kozniewska": 1e-12,
    "claim1": 1e-12,
}


class NonConvexFunction(ValueError):
    pass


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class StopLossCurve:
    params: StandardParams
    values: Tuple[float, ...]


def stop_loss(params: StandardParams) -> StopLossCurve:
    """``E (t - X)_+`` at the integer breakpoints ``t = 0..n``.

    The transform is affine between consecutive integers, so these values
    determine it everywhere.
    """
    probs = pmf(params).probs
    # slope on [t, t+1] is P(X <= t)
    cdf = [math.fsum(probs[: t + 1]) for t in range(params.n)]
    values = tuple(math.fsum(cdf[:t]) for t in range(params.n + 1))
    return StopLossCurve(params, values)


def stop_loss_dc(params: StandardParams) -> List[float]:
    """Derivative in ``c`` of the stop-loss values at integer ``t``."""
    d = pmf_dc(params)
    return [math.fsum((t - i) * d[i] for i in range(t + 1)) for t in range(params.n + 1)]


def check_convex_order(n: int, x: float, c1: float, c2: float) -> float:
    """min over t of the stop-loss gap between ``c2`` and ``c1``."""
    if c2 < c1:
        raise InvalidParams(f"expected c2 >= c1, got c1={c1}, c2={c2}")
    lo = stop_loss(StandardParams(n, x, c1)).values
    hi = stop_loss(StandardParams(n, x, c2)).values
    return min(h - l for h, l in zip(hi, lo))


def partial_sum(n: int, x: float, c: float, k: int) -> float:
    """``sum_{i<=k} (x - i/n) p_i``."""
    return partial_sums(n, x, c)[k]


def partial_sums(n: int, x: float, c: float) -> List[float]:
    """All partial sums ``k = 0..n`` at once."""
    probs = pmf(StandardParams(n, x, c)).probs
    terms = [(x - i / n) * p for i, p in enumerate(probs)]
    return [math.fsum(terms[: k + 1]) for k in range(n + 1)]


def _ascending(c_grid: Sequence[float]):
    if any(b < a for a, b in zip(c_grid, c_grid[1:])):
        raise InvalidParams(f"c-grid must be ascending: {list(c_grid)}")


def partial_sum_steps(n: int, x: float, k: int, c_grid: Sequence[float]) -> List[float]:
    if not 0 <= k <= n:
        raise InvalidParams(f"k must lie in 0..{n}, got {k}")
    _ascending(c_grid)
    s = [partial_sums(n, x, c)[k] for c in c_grid]
    return [b - a for a, b in zip(s, s[1:])]


def check_partial_sum_monotone(n: int, x: float, k: int, c_grid: Sequence[float]) -> float:
    steps = partial_sum_steps(n, x, k, c_grid)
    return min(steps) if steps else 0.0


@dataclass(frozen=True)
class ErrorMonotone:
    margin: float
    strict_expected: bool
    indeterminate: bool
    errors: Tuple[float, ...]
    steps: Tuple[float, ...]
    gap: float  # |B_n f(x) - B_1 f(x)|

    @property
    def strict_ok(self) -> bool:
        return not self.strict_expected or all(s > 0 for s in self.steps)


def check_error_monotone(f, n: int, x: float, c_grid: Sequence[float],
                         tolerances: Optional[Dict[str, float]] = None) -> ErrorMonotone:
    """Error ``|P_n^c f(x) - f(x)|`` along an ascending ``c`` grid."""
    tol = {**DEFAULT_TOLERANCES, **(tolerances or {})}
    if not f.is_convex:
        raise NonConvexFunction(f"function {f.id!r} is not convex")
    _ascending(c_grid)
    errors = tuple(abs(stancu(f, n, x, c).error) for c in c_grid)
    steps = tuple(b - a for a, b in zip(errors, errors[1:]))
    gap = abs(bernstein(f, n, x).value - b1(f, x))
    strict = gap > tol["strictness"]
    indeterminate = tol["strictness_floor"] <= gap <= tol["strictness"]
    margin = min(steps) if steps else 0.0
    return ErrorMonotone(margin, strict, indeterminate, errors, steps, gap)


# -- grids -------------------------------------------------------------------

def auto_c_grid(n: int, x: float, count: int, c_max: float = 5.0) -> List[float]:
    """The boundary value followed by ``count - 1`` points geometrically spaced
    on (boundary, c_max]; offsets run from 1e-3 of the span up to the span."""
    if count < 1:
        raise ConfigError("auto grid needs count >= 1")
    lo = min_replacement(n, x) if n >= 2 else 0.0
    if count == 1:
        return [lo]
    span = c_max - lo
    m = count - 1
    if m == 1:
        return [lo, c_max]
    offsets = [span * 10.0 ** (-3.0 * (m - 1 - j) / (m - 1)) for j in range(m)]
    grid = [lo] + [lo + d for d in offsets]
    grid[-1] = c_max
    return grid


def parse_c_grid(text: str, n: int, x: float) -> List[float]:
    """``"auto:N"`` or a comma separated list."""
    text = text.strip()
    if text.startswith("auto:"):
        return auto_c_grid(n, x, int(text[5:]))
    return [float(v) for v in text.split(",") if v.strip()]


# -- sweep -------------------------------------------------------------------

@dataclass
class SweepConfig:
    n_list: List[int]
    x_list: List[float]
    c_list: Optional[List[float]] = None
    c_count: Optional[int] = None
    c_max: float = 5.0
    function_ids: List[str] = field(default_factory=list)
    checks: List[str] = field(default_factory=lambda: list(CHECKS))
    tolerances: Dict[str, float] = field(default_factory=dict)
    schema_version: int = SCHEMA_VERSION

    def __post_init__(self):
        if self.schema_version != SCHEMA_VERSION:
            raise ConfigError(f"unsupported schema_version {self.schema_version}")
        for name in self.checks:
            if name not in CHECKS:
                raise ConfigError(f"unknown check {name!r}")
        for fid in self.function_ids:
            if fid not in REGISTRY:
                raise ConfigError(f"unknown function id {fid!r}")
        for n in self.n_list:
            if not isinstance(n, int) or isinstance(n, bool) or n < 1:
                raise ConfigError(f"n values must be integers >= 1, got {n!r}")
        for x in self.x_list:
            if not isinstance(x, (int, float)) or not 0 <= x <= 1:
                raise ConfigError(f"x values must lie in [0, 1], got {x!r}")
        if (self.c_list is None) == (self.c_count is None):
            raise ConfigError("give exactly one of c.values or c.count")
        if self.c_count is not None and self.c_count < 1:
            raise ConfigError("c.count must be >= 1")
        unknown = set(self.tolerances) - set(DEFAULT_TOLERANCES)
        if unknown:
            raise ConfigError(f"unknown tolerance keys {sorted(unknown)}")

    @property
    def tol(self) -> Dict[str, float]:
        return {**DEFAULT_TOLERANCES, **self.tolerances}

    def c_grid(self, n: int, x: float) -> List[float]:
        """Ascending grid for one (n, x); boundary (n >= 2) and 0 always present."""
        if self.c_list is not None:
            values = list(self.c_list)
            if n >= 2:
                values.append(min_replacement(n, x))
        else:
            values = auto_c_grid(n, x, self.c_count, self.c_max)
        values.append(0.0)
        return sorted(set(float(v) for v in values))

    @classmethod
    def from_dict(cls, data: dict) -> "SweepConfig":
        if not isinstance(data, dict):
            raise ConfigError("config must be a mapping")
        known = {"schema_version", "n", "x", "c", "functions", "checks", "tolerances"}
        extra = set(data) - known
        if extra:
            raise ConfigError(f"unknown config keys {sorted(extra)}")
        if "schema_version" not in data:
            raise ConfigError("config needs a schema_version field")
        try:
            c = data.get("c", {"count": 10})
            if isinstance(c, list):
                c_list, c_count, c_max = [float(v) for v in c], None, 5.0
            elif isinstance(c, dict):
                c_list = [float(v) for v in c["values"]] if "values" in c else None
                c_count = int(c["count"]) if "count" in c else None
                c_max = float(c.get("max", 5.0))
            else:
                raise ConfigError("c must be a list or a mapping")
            return cls(
                n_list=list(data["n"]),
                x_list=list(data["x"]),
                c_list=c_list,
                c_count=c_count,
                c_max=c_max,
                function_ids=list(data.get("functions", [])),
                checks=list(data.get("checks", CHECKS)),
                tolerances=dict(data.get("tolerances", {})),
                schema_version=data["schema_version"],
            )
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(f"malformed config: {exc!r}") from exc

    @classmethod
    def load(cls, path) -> "SweepConfig":
        try:
            with open(path) as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        return cls.from_dict(data)

    def describe(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class Record:
    check: str
    n: int
    x: float
    k_or_t: Optional[int] = None
    c1: Optional[float] = None
    c2: Optional[float] = None
    function: Optional[str] = None
    margin: Optional[float] = None
    status: str = "pass"  # pass | fail | skip
    note: str = ""


@dataclass
class SweepReport:
    grid: dict
    records: List[Record]

    @property
    def failures(self) -> int:
        return sum(r.status == "fail" for r in self.records)

    @property
    def skipped(self) -> int:
        return sum(r.status == "skip" for r in self.records)

    @property
    def worst_margin(self) -> Optional[float]:
        margins = [r.margin for r in self.records if r.margin is not None]
        return min(margins) if margins else None

    def worst_by_check(self) -> Dict[str, float]:
        out: Dict[str, float] = {}
        for r in self.records:
            if r.margin is not None:
                out[r.check] = min(out.get(r.check, math.inf), r.margin)
        return out

    def notes(self) -> Dict[str, int]:
        counts: Dict[str, int] = {}
        for r in self.records:
            if r.note:
                key = r.note.split(":")[0]
                counts[key] = counts.get(key, 0) + 1
        return counts

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for r in self.records:
            w.writerow((
                r.check, r.n, _fmt(r.x), _fmt_opt(r.k_or_t), _fmt(r.c1), _fmt(r.c2),
                r.function or "", _fmt(r.margin), r.status,
            ))
        return buf.getvalue()

    def summary(self) -> str:
        lines = [f"cells: {len(self.records)}  failures: {self.failures}  skipped: {self.skipped}"]
        for check, worst in self.worst_by_check().items():
            lines.append(f"  {check:15s} worst margin {worst:.6e}")
        for note, count in self.notes().items():
            lines.append(f"  {note}: {count}")
        return "\n".join(lines)


def _fmt(v) -> str:
    if v is None:
        return ""
    return f"{float(v):.16e}"


def _fmt_opt(v) -> str:
    return "" if v is None else str(v)


def read_report_csv(text: str) -> SweepReport:
    rows = csv.DictReader(io.StringIO(text))
    if tuple(rows.fieldnames or ()) != CSV_HEADER:
        raise ValueError(f"unexpected CSV header {rows.fieldnames}")
    records = []
    for row in rows:
        opt = lambda key, conv: conv(row[key]) if row[key] != "" else None  # noqa: E731
        records.append(Record(
            check=row["check"], n=int(row["n"]), x=float(row["x"]),
            k_or_t=opt("k_or_t", int), c1=opt("c1", float), c2=opt("c2", float),
            function=row["function"] or None, margin=opt("margin", float), status=row["pass"],
        ))
    return SweepReport({}, records)


def _status(ok: bool) -> str:
    return "pass" if ok else "fail"


def _valid_c(n: int, x: float, c: float) -> bool:
    try:
        StandardParams(n, x, c)
    except InvalidParams:
        return False
    return True


def _cells_for(config: SweepConfig, check: str, n: int, x: float) -> List[Record]:
    """All records of one check at one (n, x) point, in grid order."""
    tol = config.tol
    grid = config.c_grid(n, x)
    valid = [c for c in grid if _valid_c(n, x, c)]
    out = [Record(check, n, x, c1=c, status="skip", note="invalid-params")
           for c in grid if c not in valid and check not in ("partition",)]

    if check == "convex-order":
        for c1, c2 in itertools.combinations(valid, 2):
            m = check_convex_order(n, x, c1, c2)
            out.append(Record(check, n, x, c1=c1, c2=c2, margin=m, status=_status(m >= -tol["margin"])))

    elif check == "partial-sum":
        interior_x = 0 < x < 1 and n >= 2
        sums = [partial_sums(n, x, c) for c in valid]
        for k in range(n + 1):
            steps = [b[k] - a[k] for a, b in zip(sums, sums[1:])]
            for (c1, c2), step in zip(zip(valid, valid[1:]), steps):
                ok = step >= -tol["margin"]
                if interior_x and k <= n - 1:
                    ok = ok and step > tol["partial_sum_strict"]
                out.append(Record(check, n, x, k_or_t=k, c1=c1, c2=c2, margin=step, status=_status(ok)))

    elif check == "error-monotone":
        if n < 2:
            return out
        for fid in config.function_ids:
            f = get_function(fid)
            if not f.is_convex:
                out.append(Record(check, n, x, function=fid, status="skip",
                                  note="non-convex-function"))
                continue
            res = check_error_monotone(f, n, x, valid, tol)
            for (c1, c2), step in zip(zip(valid, valid[1:]), res.steps):
                ok = step >= -tol["margin"] and (step > 0 or not res.strict_expected)
                note = "indeterminate-strictness" if res.indeterminate else ""
                out.append(Record(check, n, x, c1=c1, c2=c2, function=fid, margin=step,
                                  status=_status(ok), note=note))

    elif check == "kozniewska":
        for c in valid:
            for s, r in enumerate(kozniewska_residuals(StandardParams(n, x, c)), 1):
                out.append(Record(check, n, x, k_or_t=s, c1=c, margin=-r,
                                  status=_status(r <= tol["kozniewska"])))

    elif check == "claim1":
        if not (0 < x < 1 and n >= 2):
            return out
        for c in valid:
            if c <= min_replacement(n, x):
                out.append(Record(check, n, x, c1=c, status="skip", note="boundary-params"))
                continue
            for k in range(n):
                lhs, rhs = verify_claim1(n, k, x, c)
                m = lhs - rhs
                out.append(Record(check, n, x, k_or_t=k, c1=c, margin=m,
                                  status=_status(m >= tol["claim1"])))

    elif check == "partition":
        if not (0 < x < 1 and n >= 3):
            return []
        # explicit snap of the configured decimal to an exact rational
        q = Fraction(repr(float(x)))
        for k in range(1, n - 1):
            part = build_partition(n, k, q)
            slack = [i / q - v for i, v in enumerate(part.n_seq, 1)]
            slack += [i / (1 - q) - v for i, v in enumerate(part.m_seq, 1)]
            ok = part.is_partition() and part.bounds_hold()
            out.append(Record(check, n, x, k_or_t=k, margin=float(min(slack)), status=_status(ok)))
    return out


def _task(args):
    config, check, n, x = args
    return _cells_for(config, check, n, x)


def jobs_from_env() -> int:
    raw = os.environ.get(JOBS_ENV, "1").strip() or "1"
    jobs = int(raw)
    if jobs == 0:
        return os.cpu_count() or 1
    return max(jobs, 1)


def run_sweep(config: SweepConfig, jobs: Optional[int] = None) -> SweepReport:
    """Evaluate the configured checks over the grid; record order is fixed by
    (check, n, x) grid index regardless of ``jobs``."""
    tasks = [(config, check, n, x)
             for check in config.checks for n in config.n_list for x in config.x_list]
    jobs = jobs_from_env() if jobs is None else jobs
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            chunks = list(pool.map(_task, tasks, chunksize=max(1, len(tasks) // (4 * jobs))))
    else:
        chunks = [_task(t) for t in tasks]
    records = [r for chunk in chunks for r in chunk]
    return SweepReport(config.describe(), records)


def default_config() -> SweepConfig:
    from importlib.resources import files

    text = files("polya_order").joinpath("data/default_sweep.json").read_text()
    return SweepConfig.from_dict(json.loads(text))


def nondecreasing(values: Iterable[float], tol: float = 0.0) -> bool:
    values = list(values)
    return all(b - a >= -tol for a, b in zip(values, values[1:]))
