"""Winner words: parsing, length realization and the two four-letter examples.

A winner word names the winner of each arrow; since the two outgoing
arrows of a vertex have distinct winners, the word determines the path.
Grammar (whitespace separates terms)::

    WORD := TERM+ ; TERM := ATOM ["^" UINT] ; ATOM := LETTER | "(" WORD ")"
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Tuple

from .core import Iem, PermutationPair
from .induction import (Arrow, CocycleMatrix, RauzyPath, arrow_matrix,
                        bottom_arrow, top_arrow)


class WordError(ValueError):
    """Malformed winner-word text or a letter that never wins at its vertex."""


# -- Fibonacci oracle -------------------------------------------------------

_fib_cache = {-1: 1, 0: 0, 1: 1}


def fibonacci(n: int) -> int:
    """F(-1)=1, F(0)=0, F(n+1)=F(n)+F(n-1); memoized exact integers."""
    if n < -1:
        raise ValueError("index must be >= -1")
    if n not in _fib_cache:
        top = max(_fib_cache)
        a, b = _fib_cache[top - 1], _fib_cache[top]
        for i in range(top + 1, n + 1):
            a, b = b, a + b
            _fib_cache[i] = b
    return _fib_cache[n]


GOLDEN_RATIO = (math.sqrt(5) + 1) / 2  # reporting only; never used in exact math


# -- grammar ----------------------------------------------------------------

@dataclass(frozen=True)
class WordTerm:
    atom: object  # str letter or tuple of WordTerm
    count: int

    def render(self) -> str:
        if isinstance(self.atom, str):
            body = self.atom
        else:
            body = "(" + " ".join(t.render() for t in self.atom) + ")"
        return body if self.count == 1 else "%s^%d" % (body, self.count)


@dataclass(frozen=True)
class WinnerWord:
    terms: tuple

    def render(self) -> str:
        return " ".join(t.render() for t in self.terms)

    def letter_runs(self):
        """Yield (letter, count) pairs; group repetitions are expanded but
        top-level letter powers stay run-length (they may be huge)."""
        for term in self.terms:
            if isinstance(term.atom, str):
                yield (term.atom, term.count)
            else:
                inner = WinnerWord(term.atom)
                for _ in range(term.count):
                    yield from inner.letter_runs()

    def __str__(self):
        return self.render()


def parse_word(text: str) -> WinnerWord:
    """Parse winner-word text into its term tree."""
    tokens = re.findall(r"\(|\)|\^|\d+|[A-Za-z]|\S", text)
    pos = 0

    def parse_terms(depth: int) -> List[WordTerm]:
        nonlocal pos
        terms: List[WordTerm] = []
        while pos < len(tokens):
            tok = tokens[pos]
            if tok == ")":
                if depth == 0:
                    raise WordError("unbalanced ')'")
                return terms
            if tok == "(":
                pos += 1
                inner = parse_terms(depth + 1)
                if pos >= len(tokens) or tokens[pos] != ")":
                    raise WordError("missing ')'")
                pos += 1
                if not inner:
                    raise WordError("empty group")
                atom: object = tuple(inner)
            elif len(tok) == 1 and tok.isalpha():
                atom = tok
                pos += 1
            else:
                raise WordError("unexpected token %r" % tok)
            count = 1
            if pos < len(tokens) and tokens[pos] == "^":
                pos += 1
                if pos >= len(tokens) or not tokens[pos].isdigit():
                    raise WordError("missing repeat count after '^'")
                count = int(tokens[pos])
                pos += 1
                if count < 1:
                    raise WordError("repeat count must be >= 1")
            terms.append(WordTerm(atom, count))
        if depth:
            raise WordError("unbalanced '('")
        return terms

    terms = parse_terms(0)
    if not terms:
        raise WordError("empty word")
    return WinnerWord(tuple(terms))


def word_to_path(word: WinnerWord, start: PermutationPair) -> RauzyPath:
    """Walk the diagram choosing, at each vertex, the arrow won by the letter."""
    path = RauzyPath(start)
    for letter, count in word.letter_runs():
        while count > 0:
            vertex = path.end
            if vertex.top[-1] == letter:
                arrow = top_arrow(vertex)
            elif vertex.bottom[-1] == letter:
                arrow = bottom_arrow(vertex)
            else:
                raise WordError("%r never wins at vertex %s" % (letter, vertex))
            if arrow.target == arrow.source:
                path.append(arrow, count)
                count = 0
            else:
                path.append(arrow)
                count -= 1
    return path


def parse_winner_word(text: str, start: PermutationPair) -> RauzyPath:
    return word_to_path(parse_word(text), start)


# -- length realization -----------------------------------------------------

def realize_lengths(path: RauzyPath, tail=None) -> dict:
    """Length data whose induction replays ``path`` for all its steps.

    The data is tail * Q(0, n) normalized to total 1; any strictly positive
    tail works because the cocycle maps the open cone into the path's cone
    with strict winner/loser inequalities at every step.
    """
    labels = tuple(path.start.top)
    if tail is None:
        tail_vec = tuple(Fraction(1) for _ in labels)
    else:
        tail_vec = tuple(Fraction(tail[a]) for a in labels)
        if any(v <= 0 for v in tail_vec):
            raise ValueError("tail must be strictly positive")
    q = path.cocycle(0, len(path), labels)
    raw = q.apply_row_vector(tail_vec)
    total = sum(raw)
    return {a: v / total for a, v in zip(labels, raw)}


def realize_iem(path: RauzyPath, tail=None) -> Iem:
    return Iem(path.start, realize_lengths(path, tail), alphabet=tuple(path.start.top))


def quotient_word(quotients) -> str:
    """Two-letter winner word realizing the given partial quotients.

    The first run has length a_1 - 1 (so a_1 must be at least 2) and later
    runs have lengths a_2, a_3, ...; the constant-winner blocks of the
    resulting path then line up with the continued fraction of the realized
    angle, first quotient included.
    """
    quotients = list(quotients)
    if not quotients or quotients[0] < 2:
        raise ValueError("first partial quotient must be >= 2")
    runs = [quotients[0] - 1] + quotients[1:]
    if any(a < 1 for a in runs):
        raise ValueError("partial quotients must be positive")
    return " ".join("%s^%d" % ("A" if i % 2 == 0 else "B", a)
                    for i, a in enumerate(runs))


# -- the two explicit four-letter constructions -----------------------------

START_4 = PermutationPair.from_strings("ABDC", "DACB")


@dataclass
class ExampleSchedule:
    """Finite prefix of one of the two explicit infinite winner words.

    ``boundaries[k]`` is the literal arrow count through block k;
    ``stated_boundaries`` evaluates the block-length closed form, which for
    the slow-balance family disagrees with the literal count from k=2 on
    (see the per-family builders).  All path arithmetic uses the literal
    counts.
    """

    family: str
    k_max: int
    block_texts: List[str]
    boundaries: List[int]
    stated_boundaries: List[int]
    burst_sizes: List[int]  # per-block repeat parameter of the opening run

    @property
    def text(self) -> str:
        return " ".join(self.block_texts)

    def word(self) -> WinnerWord:
        return parse_word(self.text)

    def path(self) -> RauzyPath:
        return word_to_path(self.word(), START_4)


def zorich_failure_schedule(k_max: int) -> ExampleSchedule:
    """Blocks C^{s_k} B (D^2 A^3 D)^{2^k+k} B with s_k = F(2^(k+1)).

    The opening run doubles in Fibonacci index per block, so single-step
    Zorich norms outgrow any power of the accumulated norm.
    """
    if k_max < 1:
        raise ValueError("k_max must be >= 1")
    blocks, bounds, stated, bursts = [], [0], [0], [0]
    for k in range(1, k_max + 1):
        s = fibonacci(2 ** (k + 1))
        bursts.append(s)
        blocks.append("C^%d B (D^2 A^3 D)^%d B" % (s, 2 ** k + k))
        bounds.append(bounds[-1] + s + 1 + 6 * (2 ** k + k) + 1)
        stated.append(stated[-1] + s + 6 * 2 ** k + k + 2)
    return ExampleSchedule("zfail", k_max, blocks, bounds, stated, bursts)


def uniform_failure_schedule(k_max: int) -> ExampleSchedule:
    """Blocks C B^3 (D^2 A^3 D)^{2^k} B; no same-winner run exceeds 3 arrows."""
    if k_max < 1:
        raise ValueError("k_max must be >= 1")
    blocks, bounds, bursts = [], [0], [0]
    for k in range(1, k_max + 1):
        blocks.append("C B^3 (D^2 A^3 D)^%d B" % (2 ** k))
        bounds.append(bounds[-1] + 5 + 6 * 2 ** k)
        bursts.append(2 ** k)
    return ExampleSchedule("ufail", k_max, blocks, bounds, list(bounds), bursts)


_LABELS_4 = tuple("ABCD")


def zfail_block_closed_form(k: int) -> CocycleMatrix:
    """Fibonacci closed form of the k-th slow-balance block matrix."""
    n = 2 ** (k + 1)
    f = fibonacci
    return CocycleMatrix(_LABELS_4, [
        [f(n + 2 * k + 1), 0, 0, f(n + 2 * k)],
        [f(n + 2 * k + 1) - 1, 1, f(n), f(n + 2 * k)],
        [f(n + 2 * k + 1) - 1, 1, f(n) + 1, f(n + 2 * k)],
        [f(n + 2 * k + 2) - 1, 1, f(n), f(n + 2 * k + 1)],
    ])


def ufail_block_closed_form(k: int) -> CocycleMatrix:
    """Fibonacci closed form of the k-th bounded-burst block matrix."""
    n = 2 ** (k + 1)
    f = fibonacci
    return CocycleMatrix(_LABELS_4, [
        [f(n + 1), f(n), f(n), f(n)],
        [f(n + 1) - 1, f(n) + 1, f(n) + 1, f(n)],
        [f(n + 1) - 1, f(n) + 2, f(n) + 3, f(n)],
        [f(n + 2) - 1, f(n + 1) + 1, f(n + 1) + 1, f(n + 1)],
    ])


def ufail_block_norm(k: int) -> int:
    n = 2 ** (k + 1)
    return 9 * fibonacci(n) + 6 * fibonacci(n + 1) + fibonacci(n + 2) + 6


def verify_block_matrix(family: str, k: int):
    """(computed, closed_form, equal) for block k of the named family."""
    if family == "zfail":
        sched = zorich_failure_schedule(k)
        closed = zfail_block_closed_form(k)
    elif family == "ufail":
        sched = uniform_failure_schedule(k)
        closed = ufail_block_closed_form(k)
    else:
        raise ValueError("unknown family %r" % family)
    path = sched.path()
    computed = path.cocycle(sched.boundaries[k - 1], sched.boundaries[k], _LABELS_4)
    return computed, closed, computed == closed


@dataclass
class ZorichFailureWitness:
    k: int
    accumulated_norm: int       # ||Q(0..block k end)||
    burst_norm: int             # ||Q over the opening run of block k+1||
    burst_matrix: CocycleMatrix
    ok: bool                    # accumulated < burst**2, integer-exact


def z_failure_witness(k: int) -> ZorichFailureWitness:
    """Exact witness that one opening run outgrows the square root of the norm.

    The run of block k+1 has matrix I + s*E in the (B, C) entry, so its norm
    is s + 4; the check accumulated < (s+4)^2 restates the square-root
    inequality with integers only.
    """
    sched = zorich_failure_schedule(k + 1)
    path = sched.path()
    labels = _LABELS_4
    end_k = sched.boundaries[k]
    s_next = sched.burst_sizes[k + 1]
    accumulated = path.cocycle(0, end_k, labels)
    burst = path.cocycle(end_k, end_k + s_next, labels)
    expected = CocycleMatrix.elementary(labels, "B", "C", s_next)
    if burst != expected:
        raise AssertionError("opening-run matrix is not I + s*E as expected")
    ok = accumulated.norm < burst.norm ** 2
    return ZorichFailureWitness(k, accumulated.norm, burst.norm, burst, ok)


@dataclass
class UniformFailureRatio:
    k: int
    horizon: int
    return_bound: int                  # row sum bounding the return time
    length_lo: Fraction                # bracket for the short-interval length
    length_hi: Fraction
    ratio_lo: float                    # log(return_bound) / (-log length)
    ratio_hi: float
    ok: bool                           # ratio_hi < 3/4 and bracket below 3/4


def _log_fraction(x: Fraction) -> float:
    return math.log(x.numerator) - math.log(x.denominator)


def u_failure_ratio(k: int, horizon: Optional[int] = None) -> UniformFailureRatio:
    """Exact-return-time exponent bound for points of the short interval.

    The length of the B-interval three steps past block k depends on the
    infinite tail; over all admissible tails it is a ratio of two linear
    functionals on the positive cone, so its range is bracketed exactly by
    evaluating at the cone's extreme rays at depth ``horizon``.
    """
    if horizon is None:
        horizon = k + 2
    if horizon <= k + 1:
        raise ValueError("horizon must exceed k+1 so the bracket closes")
    sched = uniform_failure_schedule(horizon)
    path = sched.path()
    labels = _LABELS_4
    mid = sched.boundaries[k] + 3
    deep = sched.boundaries[horizon]
    q_mid = path.cocycle(0, mid, labels)
    q_mid_deep = path.cocycle(mid, deep, labels)
    q_deep = path.cocycle(0, deep, labels)
    return_bound = q_mid.row_sum("C")
    b_col = q_mid_deep.column("B")
    totals = [q_deep.row_sum(a) for a in labels]
    values = [Fraction(b, t) for b, t in zip(b_col, totals)]
    lo, hi = min(values), max(values)
    log_tau = math.log(return_bound)
    ratio_lo = log_tau / -_log_fraction(hi)
    ratio_hi = log_tau / -_log_fraction(lo)
    # larger length -> smaller -log -> larger ratio
    ratio_lo, ratio_hi = min(ratio_lo, ratio_hi), max(ratio_lo, ratio_hi)
    ok = ratio_hi < 0.75
    return UniformFailureRatio(k, horizon, return_bound, lo, hi, ratio_lo, ratio_hi, ok)
