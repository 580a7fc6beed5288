"""Exact representation and evaluation of interval exchange maps.

Every length, endpoint and orbit point is a `fractions.Fraction`; all
comparisons (containment, ties, minimal gaps) are exact.  Floating point
never enters this module.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Optional


class DomainError(ValueError):
    """A point lies outside the interval of definition."""


class CapExceededError(RuntimeError):
    """An orbit computation exhausted its step budget before returning.

    Distinct from a mathematical error: rational maps can be periodic and
    simply never come back within the budget.
    """

    def __init__(self, message: str, steps: int):
        super().__init__(message)
        self.steps = steps


def as_fraction(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


@dataclass(frozen=True)
class PermutationPair:
    """Combinatorial data of an interval exchange map.

    ``top`` and ``bottom`` list the interval labels in their order before
    and after the exchange; position (1-based) gives the two bijections
    onto {1..d}.
    """

    top: tuple
    bottom: tuple

    def __post_init__(self):
        if len(self.top) < 2:
            raise ValueError("need at least two intervals")
        if set(self.top) != set(self.bottom) or len(set(self.top)) != len(self.top):
            raise ValueError("top and bottom must be orderings of the same distinct labels")

    @property
    def d(self) -> int:
        return len(self.top)

    @property
    def letters(self) -> frozenset:
        return frozenset(self.top)

    def top_rank(self, label) -> int:
        return self.top.index(label) + 1

    def bottom_rank(self, label) -> int:
        return self.bottom.index(label) + 1

    def is_admissible(self) -> bool:
        for k in range(1, self.d):
            if set(self.top[:k]) == set(self.bottom[:k]):
                return False
        return True

    @staticmethod
    def from_strings(top: str, bottom: str) -> "PermutationPair":
        """Build from single-letter label strings, e.g. ``'ABDC', 'DACB'``."""
        return PermutationPair(tuple(top), tuple(bottom))

    def __str__(self):
        return "%s/%s" % ("".join(map(str, self.top)), "".join(map(str, self.bottom)))


def is_admissible(perm: PermutationPair) -> bool:
    return perm.is_admissible()


def symmetric_pair(labels: Iterable) -> PermutationPair:
    """The reversing pair (top order reversed on the bottom); always admissible."""
    top = tuple(labels)
    return PermutationPair(top, tuple(reversed(top)))


class Iem:
    """An interval exchange map with exact rational length data.

    The map acts on ``[0, total)`` translating each ``I_a = [p[a], p[a]+len_a)``
    onto ``[q[a], q[a]+len_a)``; it is right-continuous on each piece.
    ``alphabet`` fixes the label order used to index matrices and vectors;
    it is inherited unchanged through induction steps.
    """

    __slots__ = ("perm", "lengths", "alphabet", "total", "p", "q")

    def __init__(self, perm: PermutationPair, lengths: Mapping, alphabet=None):
        if set(lengths) != set(perm.top):
            raise ValueError("length labels do not match the permutation labels")
        self.perm = perm
        self.lengths = {a: as_fraction(v) for a, v in lengths.items()}
        for a, v in self.lengths.items():
            if v <= 0:
                raise ValueError("length of %r must be positive, got %s" % (a, v))
        self.alphabet = tuple(alphabet) if alphabet is not None else perm.top
        if set(self.alphabet) != set(perm.top):
            raise ValueError("alphabet does not match the permutation labels")
        self.total = sum(self.lengths.values())
        self.p = {}
        self.q = {}
        acc = Fraction(0)
        for a in perm.top:
            self.p[a] = acc
            acc += self.lengths[a]
        acc = Fraction(0)
        for a in perm.bottom:
            self.q[a] = acc
            acc += self.lengths[a]

    @property
    def d(self) -> int:
        return self.perm.d

    def length_vector(self) -> tuple:
        return tuple(self.lengths[a] for a in self.alphabet)

    def interval_label(self, x: Fraction):
        """Label a with x in I_a."""
        x = as_fraction(x)
        if not 0 <= x < self.total:
            raise DomainError("point %s outside [0, %s)" % (x, self.total))
        for a in self.perm.top:
            if x < self.p[a] + self.lengths[a]:
                return a
        raise AssertionError("unreachable: intervals tile the domain")

    def evaluate(self, x: Fraction) -> Fraction:
        a = self.interval_label(x)
        return as_fraction(x) - self.p[a] + self.q[a]

    def evaluate_inverse(self, y: Fraction) -> Fraction:
        y = as_fraction(y)
        if not 0 <= y < self.total:
            raise DomainError("point %s outside [0, %s)" % (y, self.total))
        for a in self.perm.bottom:
            if y < self.q[a] + self.lengths[a]:
                return y - self.q[a] + self.p[a]
        raise AssertionError("unreachable: image intervals tile the domain")

    def __call__(self, x):
        return self.evaluate(x)

    def discontinuity_points(self) -> tuple:
        """Points of D(T): left endpoints of all but the first top interval."""
        return tuple(self.p[a] for a in self.perm.top[1:])

    def discontinuities(self, n: int) -> tuple:
        """Sorted exact discontinuity set of the n-th iterate.

        Accumulates backward images of D(T) over n pullback layers; the
        result has at most n*(d-1) points.
        """
        if n < 1:
            raise ValueError("n must be >= 1")
        base = self.discontinuity_points()
        seen = set(base)
        frontier = base
        for _ in range(n - 1):
            frontier = tuple(self.evaluate_inverse(x) for x in frontier)
            seen.update(frontier)
        return tuple(sorted(seen))

    def delta(self, n: int) -> Fraction:
        """Minimal gap among {0} | D(T^n) | {total}, exactly."""
        pts = sorted({Fraction(0), *self.discontinuities(n), self.total})
        return min(b - a for a, b in zip(pts, pts[1:]))

    def return_time(self, x: Fraction, r: Fraction, cap: int) -> int:
        """Least j >= 1 with |T^j(x) - x| < r (absolute value on the interval).

        Raises :class:`CapExceededError` after ``cap`` steps.
        """
        x = as_fraction(x)
        r = as_fraction(r)
        if r <= 0:
            raise ValueError("r must be positive")
        y = x
        for j in range(1, cap + 1):
            y = self.evaluate(y)
            if abs(y - x) < r:
                return j
        raise CapExceededError("no return within %d steps" % cap, cap)

    def keane_witness(self, horizon: int):
        """Search for (m, a, b) with T^m(p_a) = p_b, top rank of b > 1, m <= horizon.

        Returns the first witness found, or None.  A None result is only
        a bounded scan, not a proof of the Keane property.
        """
        targets = {self.p[b]: b for b in self.perm.top[1:]}
        orbits = {a: self.p[a] for a in self.alphabet}
        for m in range(1, horizon + 1):
            for a in self.alphabet:
                orbits[a] = self.evaluate(orbits[a])
                b = targets.get(orbits[a])
                if b is not None:
                    return (m, a, b)
        return None

    def inverse(self) -> "Iem":
        """The inverse map, itself an interval exchange (top/bottom swapped)."""
        return Iem(PermutationPair(self.perm.bottom, self.perm.top), self.lengths,
                   alphabet=self.alphabet)

    # -- interchange format -------------------------------------------------

    def to_json_dict(self) -> dict:
        return {
            "labels": [str(a) for a in self.alphabet],
            "top": [str(a) for a in self.perm.top],
            "bottom": [str(a) for a in self.perm.bottom],
            "lengths": ["%d/%d" % (self.lengths[a].numerator, self.lengths[a].denominator)
                        for a in self.alphabet],
        }

    @staticmethod
    def from_json_dict(data: dict) -> "Iem":
        labels = list(data["labels"])
        lengths = {a: Fraction(s) for a, s in zip(labels, data["lengths"])}
        perm = PermutationPair(tuple(data["top"]), tuple(data["bottom"]))
        return Iem(perm, lengths, alphabet=tuple(labels))

    def __repr__(self):
        return "Iem(%s, %s)" % (self.perm, {a: str(v) for a, v in self.lengths.items()})
