"""Reduction of three-interval exchange maps to circle rotations.

A 3-IEM with the reversing permutation is the first-return map of a
rotation on a slightly longer circle.  This module builds that rotation,
projects induction paths onto the two-letter diagram, and checks the exact
comparison identities (matrix projection, row identities, norm sandwich,
acceleration alignment, Birkhoff-sum and return-time bounds).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Tuple

from .core import CapExceededError, Iem, PermutationPair, as_fraction
from .induction import (Arrow, CocycleMatrix, InductionTrace, RauzyPath,
                        bottom_arrow, top_arrow)

BAR_LABELS = ("Abar", "Cbar")
BAR_START = PermutationPair(BAR_LABELS, tuple(reversed(BAR_LABELS)))


def continued_fraction(alpha: Fraction) -> Tuple[int, ...]:
    """Partial quotients of alpha in (0,1); finite for rational input."""
    alpha = as_fraction(alpha)
    if not 0 < alpha < 1:
        raise ValueError("alpha must lie in (0,1)")
    p, q = alpha.numerator, alpha.denominator
    out = []
    while p:
        out.append(q // p)
        q, p = p, q % p
    return tuple(out)


def convergent_denominators(quotients) -> Tuple[int, ...]:
    """q_0 = 1 followed by the convergent denominators of the quotients."""
    qs = [1]
    prev, cur = 0, 1
    for a in quotients:
        prev, cur = cur, a * cur + prev
        qs.append(cur)
    return tuple(qs)


@dataclass(frozen=True)
class InducingRotation:
    """Rotation whose first return to [0, total) is the given 3-IEM.

    The circle has circumference total + lam_B and the rotation adds
    lam_B + lam_C; as a 2-IEM the lengths are (lam_A + lam_B, lam_B + lam_C).
    """

    interval_length: Fraction
    angle: Fraction
    alpha: Fraction
    cf: tuple
    denominators: tuple
    iem: Iem

    def step(self, x: Fraction) -> Fraction:
        y = as_fraction(x) + self.angle
        return y if y < self.interval_length else y - self.interval_length

    def circle_distance(self, u: Fraction, v: Fraction) -> Fraction:
        d = abs(u - v)
        return min(d, self.interval_length - d)

    def return_time(self, x: Fraction, r: Fraction, cap: int) -> int:
        """Least j >= 1 with |step^j(x) - x| < r, absolute value on [0, L).

        The same convention as the interval exchange return time; for x at
        distance at least r from the right endpoint the returning point
        automatically lies in (x - r, x + r), hence inside the induced
        domain, which is what the return-time comparison needs.
        """
        x = as_fraction(x)
        r = as_fraction(r)
        if r <= 0:
            raise ValueError("r must be positive")
        y = x
        for j in range(1, cap + 1):
            y = self.step(y)
            if abs(y - x) < r:
                return j
        raise CapExceededError("no rotation return within %d steps" % cap, cap)

    def first_return_to(self, x: Fraction, cutoff: Fraction, cap: int = 10 ** 6) -> Fraction:
        """First orbit point back inside [0, cutoff)."""
        y = self.step(as_fraction(x))
        for _ in range(cap):
            if y < cutoff:
                return y
            y = self.step(y)
        raise CapExceededError("no visit to [0, %s) within %d steps" % (cutoff, cap), cap)


def _reversing_letters(T: Iem) -> Tuple:
    perm = T.perm
    if perm.d != 3 or perm.bottom != tuple(reversed(perm.top)):
        raise ValueError("need a 3-interval map with the reversing permutation, got %s" % perm)
    return perm.top


def inducing_rotation(T: Iem) -> InducingRotation:
    a, b, c = _reversing_letters(T)
    length = T.total + T.lengths[b]
    angle = T.lengths[b] + T.lengths[c]
    alpha = angle / length
    bar = Iem(BAR_START, {BAR_LABELS[0]: T.lengths[a] + T.lengths[b],
                          BAR_LABELS[1]: T.lengths[b] + T.lengths[c]})
    cf = continued_fraction(alpha)
    return InducingRotation(length, angle, alpha, cf, convergent_denominators(cf), bar)


def induced_map_check(T: Iem, x: Fraction) -> bool:
    """T(x) equals the first return of the rotation to [0, total)."""
    rot = inducing_rotation(T)
    return rot.first_return_to(x, T.total) == T.evaluate(x)


# -- path projection ---------------------------------------------------------

@dataclass
class ProjectionResult:
    """Image of a 3-letter induction path on the 2-letter diagram.

    ``ell[n]`` counts the projected arrows among the first n; an arrow
    survives exactly when its loser is one of the outer letters, in which
    case winner and loser carry over (barred), and the middle-letter losses
    vanish.
    """

    bar_path: RauzyPath
    ell: tuple


def project_path(trace: InductionTrace) -> ProjectionResult:
    a, b, c = _reversing_letters(trace.initial)
    bar_path = RauzyPath(BAR_START)
    ell = [0]
    for arrow in trace.arrows:
        if arrow.loser == b:
            ell.append(ell[-1])
            continue
        bar_winner = BAR_LABELS[1] if arrow.loser == a else BAR_LABELS[0]
        vertex = bar_path.end
        bar_arrow = top_arrow(vertex) if vertex.top[-1] == bar_winner else bottom_arrow(vertex)
        bar_path.append(bar_arrow)
        ell.append(ell[-1] + 1)
    return ProjectionResult(bar_path, tuple(ell))


_PROJECTOR = ((1, 0), (1, 1), (0, 1))  # columns (Abar, Cbar), rows (A, B, C)


def r_matrix(trace: InductionTrace, n: int) -> Tuple[Tuple[int, ...], ...]:
    """3x2 product Q(n) times the fixed projector, rows in outer/middle order."""
    a, b, c = _reversing_letters(trace.initial)
    q = trace.cocycle(0, n)
    rows = []
    for row_label in (a, b, c):
        row = [q.entry(row_label, col) for col in (a, b, c)]
        rows.append(tuple(sum(row[i] * _PROJECTOR[i][j] for i in range(3))
                          for j in range(2)))
    return tuple(rows)


def bar_cocycle_from_r(r_rows) -> CocycleMatrix:
    """Rows of the outer letters form the projected 2x2 cocycle."""
    return CocycleMatrix(BAR_LABELS, [r_rows[0], r_rows[2]])


def check_projection_identity(trace: InductionTrace, proj: ProjectionResult, n: int) -> bool:
    expected = bar_cocycle_from_r(r_matrix(trace, n))
    actual = proj.bar_path.cocycle(0, proj.ell[n], BAR_LABELS)
    return expected == actual


def check_row_identity(trace: InductionTrace, n: int) -> bool:
    """The middle row of R(n) matches the combination dictated by the shape.

    Reversing shape: row_B = row_A + row_C; after a loss by the last outer
    letter the middle row equals the corresponding outer row.
    """
    a, b, c = _reversing_letters(trace.initial)
    rows = r_matrix(trace, n)
    perm = trace.iem_at(n).perm
    row_a, row_b, row_c = rows
    if perm.top == (a, b, c) and perm.bottom == (c, b, a):
        return row_b == tuple(x + y for x, y in zip(row_a, row_c))
    if perm.top == (a, c, b):
        return row_b == row_c
    if perm.bottom == (c, a, b):
        return row_b == row_a
    raise AssertionError("permutation %s outside the reversing class" % perm)


_BAR_LENGTH_CASES = {
    # permutation shape -> 3x2 matrix M with barlam(ell(n)) = lam(n) * M
    "reversing": ((1, 0), (1, 1), (0, 1)),
    "top_moved": ((1, 0), (0, 1), (0, 1)),
    "bottom_moved": ((1, 0), (1, 0), (0, 1)),
}


def bar_lengths(trace: InductionTrace, n: int) -> Tuple[Fraction, Fraction]:
    """Projected length pair at level ell(n), by the case matrix of the shape."""
    a, b, c = _reversing_letters(trace.initial)
    iem = trace.iem_at(n)
    if iem.perm.bottom == (c, b, a):
        case = "reversing" if iem.perm.top == (a, b, c) else "top_moved"
    else:
        case = "bottom_moved"
    m = _BAR_LENGTH_CASES[case]
    lam = [iem.lengths[x] for x in (a, b, c)]
    return tuple(sum(lam[i] * m[i][j] for i in range(3)) for j in range(2))


def check_bar_lengths(trace: InductionTrace, proj: ProjectionResult, n: int) -> bool:
    """Replaying the projected cocycle transports the rotation lengths exactly."""
    bar0 = bar_lengths(trace, 0)
    barn = bar_lengths(trace, n)
    q = proj.bar_path.cocycle(0, proj.ell[n], BAR_LABELS)
    return q.apply_row_vector(barn) == bar0


def norm_sandwich(trace: InductionTrace, proj: ProjectionResult, n: int):
    """(norm Q, norm projected Q, ok) with the factor-2 sandwich, exactly."""
    q_norm = trace.cocycle(0, n).norm
    bar_norm = proj.bar_path.cocycle(0, proj.ell[n], BAR_LABELS).norm
    ok = bar_norm <= 2 * q_norm and q_norm <= 2 * bar_norm
    return q_norm, bar_norm, ok


@dataclass(frozen=True)
class AlignmentRow:
    k: int
    j: int          # index with ell(n_j) equal to the k-th bar time
    ok_step: bool   # j advanced by 1 or 3
    ok_norms: bool  # bar step norm < step norm <= twice bar step norm


def bar_zorich_times(proj: ProjectionResult) -> List[int]:
    """Constant-winner block boundaries of the projected path.

    The final block is dropped: without the continuation of the trace its
    maximality is unknown.
    """
    times = [0]
    acc = 0
    blocks = proj.bar_path.winner_blocks()
    for winner, count in blocks[:-1]:
        acc += count
        times.append(acc)
    return times


def zorich_alignment(trace: InductionTrace, K: int) -> List[AlignmentRow]:
    """Match the accelerations of the path and its projection, with norms."""
    proj = project_path(trace)
    nz = trace.zorich_times()
    bars = bar_zorich_times(proj)
    if len(bars) < K + 1:
        raise ValueError("projection provides %d bar times; need %d" % (len(bars) - 1, K))
    rows = []
    j_prev = 0
    for k in range(K):
        j_next = None
        for j in range(j_prev + 1, j_prev + 4):
            if j < len(nz) and proj.ell[nz[j]] == bars[k + 1]:
                j_next = j
                break
        if j_next is None:
            raise ValueError("no aligned index for bar time %d within 3 steps" % (k + 1))
        step_norm = trace.cocycle(nz[j_prev], nz[j_next]).norm
        bar_norm = proj.bar_path.cocycle(bars[k], bars[k + 1], BAR_LABELS).norm
        rows.append(AlignmentRow(k + 1, j_next,
                                 j_next - j_prev in (1, 3),
                                 bar_norm < step_norm <= 2 * bar_norm))
        j_prev = j_next
    return rows


# -- Birkhoff sums and return times ------------------------------------------

@dataclass(frozen=True)
class StepFunction:
    """Exact piecewise-constant function on a circle of given circumference.

    ``values[i]`` holds on [breakpoints[i], breakpoints[i+1]) with the last
    piece wrapping around to breakpoints[0].
    """

    circumference: Fraction
    breakpoints: tuple
    values: tuple

    def __post_init__(self):
        if len(self.breakpoints) != len(self.values) or not self.breakpoints:
            raise ValueError("need one value per breakpoint")
        if list(self.breakpoints) != sorted(set(self.breakpoints)):
            raise ValueError("breakpoints must be strictly increasing")
        if not (0 <= self.breakpoints[0] and self.breakpoints[-1] < self.circumference):
            raise ValueError("breakpoints must lie in [0, circumference)")

    def evaluate(self, x: Fraction) -> Fraction:
        x = as_fraction(x)
        if not 0 <= x < self.circumference:
            raise ValueError("point outside the circle")
        value = self.values[-1]
        for b, v in zip(self.breakpoints, self.values):
            if x >= b:
                value = v
            else:
                break
        return value

    def variation(self) -> Fraction:
        vs = self.values
        return sum(abs(vs[i] - vs[i - 1]) for i in range(len(vs)))

    def mean(self) -> Fraction:
        bs = list(self.breakpoints) + [self.breakpoints[0] + self.circumference]
        total = sum(v * (bs[i + 1] - bs[i]) for i, v in enumerate(self.values))
        return total / self.circumference


def indicator(circumference: Fraction, cutoff: Fraction) -> StepFunction:
    """Indicator of [0, cutoff) on the circle; variation 2."""
    return StepFunction(circumference, (Fraction(0), as_fraction(cutoff)),
                        (Fraction(1), Fraction(0)))


def denjoy_koksma_check(rot: InducingRotation, f: StepFunction, x: Fraction, k: int):
    """(error, ok): Birkhoff sum over q_k steps vs q_k times the mean.

    The bounded-variation bound asserts error strictly below var(f).
    """
    if f.circumference != rot.interval_length:
        raise ValueError("step function lives on a different circle")
    q = rot.denominators[k]
    y = as_fraction(x)
    total = Fraction(0)
    for _ in range(q):
        total += f.evaluate(y)
        y = rot.step(y)
    error = abs(total - q * f.mean())
    return error, error < f.variation()


@dataclass(frozen=True)
class ReturnComparison:
    tau: int
    tau_bar: int
    scaled_bar: Fraction   # tau_bar * total / circumference
    ok: bool               # |tau - scaled_bar| < 2


def return_time_comparison(T: Iem, x: Fraction, r: Fraction, cap: int) -> ReturnComparison:
    """Return times of the map and its rotation agree up to the time-scale factor.

    With total length 1 the scale is 1/(1 + lam_B); general data uses
    total/circumference.  Requires x at distance at least r from the right
    endpoint so both returns stay inside the induced domain.
    """
    rot = inducing_rotation(T)
    x = as_fraction(x)
    r = as_fraction(r)
    if not 0 <= x < T.total - r:
        raise ValueError("need x in [0, total - r)")
    tau = T.return_time(x, r, cap)
    tau_bar = rot.return_time(x, r, cap)
    scaled = tau_bar * T.total / rot.interval_length
    return ReturnComparison(tau, tau_bar, scaled, abs(tau - scaled) < 2)
