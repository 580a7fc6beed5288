"""Shared generators and independent oracles for the test suite.

The continued-fraction and Fibonacci routines here are deliberately written
from scratch (plain Euclid / plain recurrence) so that library results are
checked against something that shares no code with the package.
"""
from fractions import Fraction

from ietkit import Iem, PermutationPair, symmetric_pair
from ietkit.induction import RauzyPath, rauzy_successors
from ietkit.words import realize_iem


def euclid_cf(x: Fraction):
    """Partial quotients of x in (0,1) by the plain Euclid algorithm."""
    p, q = x.numerator, x.denominator
    assert 0 < p < q
    out = []
    while p:
        out.append(q // p)
        q, p = p, q % p
    return out


def euclid_denominators(quotients):
    """Convergent denominators, starting with q_0 = 1."""
    qs = [1]
    prev, cur = 0, 1
    for a in quotients:
        prev, cur = cur, a * cur + prev
        qs.append(cur)
    return qs


def slow_fib(n: int) -> int:
    """F(-1)=1, F(0)=0 by the naive forward recurrence."""
    a, b = 1, 0
    for _ in range(n):
        a, b = b, a + b
    return b if n >= 0 else a


def random_walk_path(rng, start: PermutationPair, steps: int) -> RauzyPath:
    path = RauzyPath(start)
    for _ in range(steps):
        path.append(rng.choice(rauzy_successors(path.end)))
    return path


def random_path_iem(rng, letters: str, steps: int):
    """(iem, path) for a uniformly random walk from the reversing pair."""
    path = random_walk_path(rng, symmetric_pair(letters), steps)
    return realize_iem(path), path


def random_rational_iem(rng, letters: str, denominator: int = 10 ** 6) -> Iem:
    perm = symmetric_pair(letters)
    while True:
        lengths = {a: Fraction(rng.randint(1, denominator), denominator)
                   for a in letters}
        try:
            return Iem(perm, lengths)
        except ValueError:
            continue
