"""Finite-truncation profiles for the arithmetic growth conditions.

Each profile reports exact integers/rationals plus a floating exponent
column; the float appears only as the very last step (log of exact data),
so every comparison a test may want to make can be redone exactly.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, fields
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple, Union

from .core import CapExceededError, Iem, as_fraction
from .induction import InductionTrace


def log_of_fraction(x: Fraction) -> float:
    """Natural log of a positive rational, accurate for huge numerators."""
    if x <= 0:
        raise ValueError("argument must be positive")
    return math.log(x.numerator) - math.log(x.denominator)


@dataclass(frozen=True)
class ConditionProfileRow:
    k: int
    norm_k: int          # ||M(k)||, entry sum
    norm_step: int       # ||M(k, k+1)||
    epsilon_k: float     # log ||M(k,k+1)|| / log ||M(k)||


@dataclass(frozen=True)
class DeltaProfileRow:
    n: int
    delta_n: Fraction
    exponent: Optional[float]   # -log delta / log n, None at n = 1


@dataclass(frozen=True)
class ReturnProfileRow:
    r: Fraction
    samples: tuple              # pairs (x, tau) with tau None when capped
    capped: int
    min_ratio: Optional[float]  # stats over completed samples only
    mean_ratio: Optional[float]
    max_ratio: Optional[float]


@dataclass(frozen=True)
class BalanceProfileRow:
    k: int
    length_ratio: Fraction      # max_a lam_a(m_k) / min_a lam_a(m_k)
    norm_k: int                 # ||A(k)||


@dataclass(frozen=True)
class PositivityRow:
    k: int
    depth: int                  # least r with M(k, k+r) entrywise positive


def condition_profile(trace: InductionTrace, scheme: str, K: int) -> List[ConditionProfileRow]:
    """Exact norms and growth exponents of an accelerated cocycle.

    Row k compares the single accelerated step (k, k+1) against the
    accumulated matrix M(k); small epsilon_k along the whole profile is the
    finite signature of the norm-growth conditions.
    """
    times = trace.acceleration_times(scheme)
    if len(times) < K + 2:
        raise ValueError("trace provides %d %s times; need %d"
                         % (len(times) - 1, scheme, K + 1))
    rows = []
    for k in range(1, K + 1):
        norm_k = trace.cocycle(0, times[k]).norm
        norm_step = trace.cocycle(times[k], times[k + 1]).norm
        rows.append(ConditionProfileRow(k, norm_k, norm_step,
                                        math.log(norm_step) / math.log(norm_k)))
    return rows


def delta_profile(T: Iem, N: int, schedule: str = "all") -> List[DeltaProfileRow]:
    """Minimal discontinuity gap of T^n for n on the schedule, exactly.

    The discontinuity set grows by exact pullback layers; if a layer adds
    no new points the orbit of the discontinuities is closed (rational
    periodic data) and the profile truncates there.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    if schedule == "all":
        wanted = set(range(1, N + 1))
    elif schedule == "geometric":
        wanted = {N}
        n = 1
        while n <= N:
            wanted.add(n)
            n *= 2
    else:
        raise ValueError("schedule must be 'all' or 'geometric'")
    base = T.discontinuity_points()
    seen = set(base)
    frontier = base
    rows = []
    for n in range(1, N + 1):
        if n > 1:
            frontier = tuple(T.evaluate_inverse(x) for x in frontier)
            if all(x in seen for x in frontier):
                break
            seen.update(frontier)
        if n in wanted:
            pts = sorted({Fraction(0), *seen, T.total})
            delta = min(b - a for a, b in zip(pts, pts[1:]))
            exponent = -log_of_fraction(delta) / math.log(n) if n >= 2 else None
            rows.append(DeltaProfileRow(n, delta, exponent))
    return rows


def resolve_samples(T: Iem, samples: Union[int, Sequence]) -> Tuple[Fraction, ...]:
    """Equally spaced interior points for an integer spec, else the given list."""
    if isinstance(samples, int):
        if samples < 1:
            raise ValueError("sample count must be >= 1")
        return tuple(T.total * Fraction(i, samples + 1) for i in range(1, samples + 1))
    return tuple(as_fraction(x) for x in samples)


def return_profile(T: Iem, r_schedule: Sequence, samples: Union[int, Sequence],
                   cap: int) -> List[ReturnProfileRow]:
    """Return-time exponent statistics over an exact sample set.

    Capped computations are recorded with tau = None and excluded from the
    min/mean/max columns.
    """
    xs = resolve_samples(T, samples)
    rows = []
    for r in r_schedule:
        r = as_fraction(r)
        if not 0 < r:
            raise ValueError("r must be positive")
        pairs = []
        ratios = []
        capped = 0
        denom = -log_of_fraction(r / T.total)
        for x in xs:
            try:
                tau = T.return_time(x, r, cap)
            except CapExceededError:
                pairs.append((x, None))
                capped += 1
                continue
            pairs.append((x, tau))
            ratios.append(math.log(tau) / denom if denom > 0 else 0.0)
        if ratios:
            stats = (min(ratios), sum(ratios) / len(ratios), max(ratios))
        else:
            stats = (None, None, None)
        rows.append(ReturnProfileRow(r, tuple(pairs), capped, *stats))
    return rows


def balance_profile(trace: InductionTrace, K: int) -> List[BalanceProfileRow]:
    """Spread of the length vector at the letter-cycle acceleration times."""
    times = trace.acceleration_times("mmy")
    if len(times) < K + 1:
        raise ValueError("trace provides %d mmy times; need %d" % (len(times) - 1, K))
    rows = []
    for k in range(K + 1):
        lengths = trace.iem_at(times[k]).lengths.values()
        rows.append(BalanceProfileRow(k, max(lengths) / min(lengths),
                                      trace.cocycle(0, times[k]).norm))
    return rows


def positivity_depth(trace: InductionTrace, K: int) -> List[PositivityRow]:
    """Least r with the accelerated matrix M(k, k+r) entrywise positive.

    Uses the letter-cycle acceleration; on tie-free traces the depth is
    bounded by max(2d-3, 2).
    """
    times = trace.acceleration_times("mmy")
    last = len(times) - 1
    rows = []
    for k in range(K + 1):
        found = None
        for r in range(1, last - k + 1):
            if trace.cocycle(times[k], times[k + r]).is_positive():
                found = r
                break
        if found is None:
            raise ValueError("no positive product from time %d within the trace" % k)
        rows.append(PositivityRow(k, found))
    return rows


def positivity_bound(d: int) -> int:
    return max(2 * d - 3, 2)


# -- emission ----------------------------------------------------------------

def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, Fraction):
        return "%d/%d" % (value.numerator, value.denominator)
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, tuple):
        parts = []
        for item in value:
            if isinstance(item, tuple):
                parts.append(":".join(_cell(v) for v in item))
            else:
                parts.append(_cell(item))
        return ";".join(parts)
    return str(value)


def rows_to_csv(rows: Sequence) -> str:
    """One CSV document per profile; header row names the dataclass fields."""
    if not rows:
        return ""
    names = [f.name for f in fields(rows[0])]
    lines = [",".join(names)]
    for row in rows:
        lines.append(",".join(_cell(getattr(row, name)) for name in names))
    return "\n".join(lines) + "\n"


def _jsonable(value):
    if value is None or isinstance(value, (float, str)):
        return value
    if isinstance(value, bool):
        return value
    if isinstance(value, int):
        # big integers travel as base-10 strings to survive JSON readers
        return value if abs(value) < 2 ** 53 else str(value)
    if isinstance(value, Fraction):
        return "%d/%d" % (value.numerator, value.denominator)
    if isinstance(value, tuple):
        return [_jsonable(v) for v in value]
    return str(value)


def rows_to_jsonable(rows: Sequence) -> list:
    """JSON mirror of the CSV emission (list of field dicts)."""
    out = []
    for row in rows:
        out.append({f.name: _jsonable(getattr(row, f.name)) for f in fields(row)})
    return out
