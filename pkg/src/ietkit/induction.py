"""Rauzy-Veech induction, Rauzy classes, cocycle matrices and accelerations."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, List, Optional, Tuple

from .core import Iem, PermutationPair


class TieError(RuntimeError):
    """The two rightmost intervals have equal length; induction cannot proceed."""


@dataclass(frozen=True)
class Arrow:
    """One induction move between admissible pairs.

    ``kind`` is "top" when the last top interval wins, "bottom" otherwise.
    """

    source: PermutationPair
    kind: str
    winner: object
    loser: object
    target: PermutationPair


def top_arrow(perm: PermutationPair) -> Arrow:
    winner = perm.top[-1]
    loser = perm.bottom[-1]
    b = list(perm.bottom[:-1])
    b.insert(b.index(winner) + 1, loser)
    return Arrow(perm, "top", winner, loser, PermutationPair(perm.top, tuple(b)))


def bottom_arrow(perm: PermutationPair) -> Arrow:
    winner = perm.bottom[-1]
    loser = perm.top[-1]
    t = list(perm.top[:-1])
    t.insert(t.index(winner) + 1, loser)
    return Arrow(perm, "bottom", winner, loser, PermutationPair(tuple(t), perm.bottom))


def rauzy_successors(perm: PermutationPair) -> Tuple[Arrow, Arrow]:
    """The two outgoing arrows of an admissible pair."""
    if not perm.is_admissible():
        raise ValueError("pair %s is not admissible" % (perm,))
    return top_arrow(perm), bottom_arrow(perm)


@dataclass(frozen=True)
class RauzyDiagram:
    vertices: frozenset
    arrows: tuple


def rauzy_class(perm: PermutationPair) -> RauzyDiagram:
    """Closure of ``perm`` under the two successor moves (breadth-first)."""
    if not perm.is_admissible():
        raise ValueError("pair %s is not admissible" % (perm,))
    seen = {perm}
    arrows = []
    queue = deque([perm])
    while queue:
        v = queue.popleft()
        for arrow in rauzy_successors(v):
            arrows.append(arrow)
            if arrow.target not in seen:
                seen.add(arrow.target)
                queue.append(arrow.target)
    return RauzyDiagram(frozenset(seen), tuple(arrows))


class CocycleMatrix:
    """Nonnegative integer matrix indexed by a fixed label order.

    Row = loser side, column = winner side: the length transport identity
    lam(m) = lam(n) * Q(m, n) holds with lengths as row vectors.
    """

    __slots__ = ("labels", "rows")

    def __init__(self, labels, rows):
        self.labels = tuple(labels)
        self.rows = tuple(tuple(int(v) for v in row) for row in rows)
        d = len(self.labels)
        if len(self.rows) != d or any(len(r) != d for r in self.rows):
            raise ValueError("matrix shape does not match labels")

    @staticmethod
    def identity(labels) -> "CocycleMatrix":
        d = len(tuple(labels))
        return CocycleMatrix(labels, [[1 if i == j else 0 for j in range(d)] for i in range(d)])

    @staticmethod
    def elementary(labels, loser, winner, s: int = 1) -> "CocycleMatrix":
        """Identity plus ``s`` in the (loser, winner) entry."""
        labels = tuple(labels)
        i, j = labels.index(loser), labels.index(winner)
        rows = [[1 if a == b else 0 for b in range(len(labels))] for a in range(len(labels))]
        rows[i][j] += s
        return CocycleMatrix(labels, rows)

    def entry(self, row_label, col_label) -> int:
        return self.rows[self.labels.index(row_label)][self.labels.index(col_label)]

    def __matmul__(self, other: "CocycleMatrix") -> "CocycleMatrix":
        if self.labels != other.labels:
            raise ValueError("label order mismatch")
        n = len(self.labels)
        ot = list(zip(*other.rows))
        return CocycleMatrix(self.labels,
                             [[sum(r[k] * c[k] for k in range(n)) for c in ot] for r in self.rows])

    def __eq__(self, other):
        return (isinstance(other, CocycleMatrix) and self.labels == other.labels
                and self.rows == other.rows)

    def __hash__(self):
        return hash((self.labels, self.rows))

    @property
    def norm(self) -> int:
        """Sum of absolute values of the entries."""
        return sum(abs(v) for row in self.rows for v in row)

    def row_sum(self, label) -> int:
        """Return time of the labelled subinterval (sum of its row)."""
        return sum(self.rows[self.labels.index(label)])

    def row_sums(self) -> dict:
        return {a: self.row_sum(a) for a in self.labels}

    def column(self, label) -> tuple:
        j = self.labels.index(label)
        return tuple(row[j] for row in self.rows)

    def is_positive(self) -> bool:
        return all(v > 0 for row in self.rows for v in row)

    def determinant(self) -> int:
        """Exact integer determinant (fraction-free Bareiss elimination)."""
        n = len(self.labels)
        m = [list(r) for r in self.rows]
        sign = 1
        prev = 1
        for k in range(n - 1):
            if m[k][k] == 0:
                for i in range(k + 1, n):
                    if m[i][k] != 0:
                        m[k], m[i] = m[i], m[k]
                        sign = -sign
                        break
                else:
                    return 0
            for i in range(k + 1, n):
                for j in range(k + 1, n):
                    m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
            prev = m[k][k]
        return sign * m[n - 1][n - 1]

    def apply_row_vector(self, vec: tuple) -> tuple:
        """vec * M for a row vector aligned with the label order."""
        n = len(self.labels)
        return tuple(sum(vec[i] * self.rows[i][j] for i in range(n)) for j in range(n))

    def __repr__(self):
        return "CocycleMatrix(%r, %r)" % (self.labels, [list(r) for r in self.rows])


def arrow_matrix(arrow: Arrow, labels, power: int = 1) -> CocycleMatrix:
    """Matrix of one arrow (or of ``power`` repeats of a self-loop arrow).

    Repeats use the closed form I + s*E, exact for any s since E*E = 0.
    """
    if power < 0:
        raise ValueError("power must be >= 0")
    if power == 0:
        return CocycleMatrix.identity(labels)
    if power > 1 and arrow.target != arrow.source:
        raise ValueError("only self-loop arrows can be repeated in place")
    return CocycleMatrix.elementary(labels, arrow.loser, arrow.winner, power)


class RauzyPath:
    """A path in a Rauzy diagram, stored as run-length blocks of arrows.

    Blocks with counts in the millions stay cheap: a repeated arrow is a
    self-loop and its matrix power has the closed form I + s*E.
    """

    def __init__(self, start: PermutationPair, blocks: Optional[Iterable] = None):
        self.start = start
        self.blocks: List[Tuple[Arrow, int]] = []
        self._length = 0
        if blocks:
            for arrow, count in blocks:
                self.append(arrow, count)

    def append(self, arrow: Arrow, count: int = 1):
        if count < 1:
            raise ValueError("count must be >= 1")
        expected = self.end
        if arrow.source != expected:
            raise ValueError("arrow does not start at the path end")
        if count > 1 and arrow.target != arrow.source:
            raise ValueError("repeated arrow must be a self-loop")
        if self.blocks and self.blocks[-1][0] == arrow and arrow.target == arrow.source:
            prev, c = self.blocks[-1]
            self.blocks[-1] = (prev, c + count)
        else:
            self.blocks.append((arrow, count))
        self._length += count

    @property
    def end(self) -> PermutationPair:
        return self.blocks[-1][0].target if self.blocks else self.start

    def __len__(self):
        return self._length

    def vertex_at(self, i: int) -> PermutationPair:
        """Permutation pair after the first i arrows."""
        if not 0 <= i <= self._length:
            raise IndexError("index %d out of path range" % i)
        if i == 0:
            return self.start
        pos = 0
        for arrow, count in self.blocks:
            pos += count
            # blocks with count > 1 are self-loops, so any index inside the
            # block sits at the same vertex as its end
            if i <= pos:
                return arrow.target
        raise AssertionError("unreachable")

    def arrows(self):
        """Iterate arrows one by one.  Avoid on paths with huge blocks."""
        for arrow, count in self.blocks:
            for _ in range(count):
                yield arrow

    def winner_blocks(self):
        """Run-length pairs (winner, count) merging adjacent same-winner blocks."""
        out = []
        for arrow, count in self.blocks:
            if out and out[-1][0] == arrow.winner:
                out[-1] = (arrow.winner, out[-1][1] + count)
            else:
                out.append((arrow.winner, count))
        return out

    def cocycle(self, m: int, n: int, labels) -> CocycleMatrix:
        """Exact product over arrows m+1..n, later arrows multiplying on the left."""
        if not 0 <= m <= n <= self._length:
            raise IndexError("indices (%d, %d) out of path range" % (m, n))
        q = CocycleMatrix.identity(labels)
        pos = 0
        for arrow, count in self.blocks:
            lo = max(pos, m)
            hi = min(pos + count, n)
            if hi > lo:
                q = arrow_matrix(arrow, labels, hi - lo) @ q
            pos += count
            if pos >= n:
                break
        return q


def rv_step(iem: Iem) -> Tuple[Iem, Arrow]:
    """One induction step: the longer of the two rightmost intervals wins.

    Raises :class:`TieError` on equal lengths (a Keane failure for the data).
    """
    perm = iem.perm
    a_t = perm.top[-1]
    a_b = perm.bottom[-1]
    lt = iem.lengths[a_t]
    lb = iem.lengths[a_b]
    if lt == lb:
        raise TieError("equal rightmost lengths %s for %r and %r" % (lt, a_t, a_b))
    if lt > lb:
        arrow = top_arrow(perm)
    else:
        arrow = bottom_arrow(perm)
    lengths = dict(iem.lengths)
    lengths[arrow.winner] = lengths[arrow.winner] - lengths[arrow.loser]
    return Iem(arrow.target, lengths, alphabet=iem.alphabet), arrow


class InductionTrace:
    """A finite run of induction steps with snapshots and acceleration times.

    ``iems[n]`` is the map after n steps; ``arrows[n]`` joins ``iems[n]`` to
    ``iems[n+1]``.  A tie terminates the run and is recorded in
    ``stop_reason`` rather than raised.
    """

    def __init__(self, initial: Iem):
        self.initial = initial
        self.alphabet = initial.alphabet
        self.iems: List[Iem] = [initial]
        self.arrows: List[Arrow] = []
        self.stop_reason: Optional[str] = None

    @property
    def depth(self) -> int:
        return len(self.arrows)

    def iem_at(self, n: int) -> Iem:
        return self.iems[n]

    def path(self) -> RauzyPath:
        path = RauzyPath(self.initial.perm)
        for arrow in self.arrows:
            path.append(arrow)
        return path

    def cocycle(self, m: int, n: int) -> CocycleMatrix:
        """Q(m, n) over the recorded steps."""
        if not 0 <= m <= n <= self.depth:
            raise IndexError("indices (%d, %d) out of trace range" % (m, n))
        q = CocycleMatrix.identity(self.alphabet)
        for arrow in self.arrows[m:n]:
            q = arrow_matrix(arrow, self.alphabet) @ q
        return q

    def zorich_times(self) -> List[int]:
        """0 followed by the end indices of maximal constant-winner runs.

        The final run is reported only when confirmed maximal, i.e. when a
        later arrow with a different winner exists or the run ended in a tie.
        """
        times = [0]
        for i in range(1, self.depth):
            if self.arrows[i].winner != self.arrows[i - 1].winner:
                times.append(i)
        if self.depth and self.stop_reason == "tie":
            times.append(self.depth)
        return times

    def mmy_times(self) -> List[int]:
        """0 followed by the largest prefixes whose winners miss some letter.

        Truncated when the trace horizon ends before every letter has won
        again.
        """
        letters = set(self.alphabet)
        times = [0]
        pos = 0
        while True:
            seen = set()
            boundary = None
            for i in range(pos, self.depth):
                seen.add(self.arrows[i].winner)
                if seen == letters:
                    boundary = i  # step i+1 completes the set, so m = i
                    break
            if boundary is None:
                return times
            times.append(boundary)
            pos = boundary

    def acceleration_times(self, scheme: str) -> List[int]:
        if scheme == "zorich":
            return self.zorich_times()
        if scheme == "mmy":
            return self.mmy_times()
        raise ValueError("unknown scheme %r" % scheme)

    def accelerated_cocycle(self, scheme: str, k: int, l: int) -> CocycleMatrix:
        times = self.acceleration_times(scheme)
        if not 0 <= k <= l < len(times):
            raise IndexError("acceleration indices (%d, %d) beyond depth %d"
                             % (k, l, len(times) - 1))
        return self.cocycle(times[k], times[l])


def induce(iem: Iem, max_steps: int) -> InductionTrace:
    """Run up to ``max_steps`` induction steps, stopping early on a tie."""
    if max_steps < 0:
        raise ValueError("max_steps must be >= 0")
    trace = InductionTrace(iem)
    current = iem
    for _ in range(max_steps):
        try:
            current, arrow = rv_step(current)
        except TieError:
            trace.stop_reason = "tie"
            return trace
        trace.arrows.append(arrow)
        trace.iems.append(current)
    trace.stop_reason = "max_steps"
    return trace


def discontinuity_ancestry(trace: InductionTrace, n: int) -> dict:
    """Witness (a, i) with T^i(p_a(n)) = p for every discontinuity p of T.

    Each witness satisfies 0 <= i < Q_a(n); a failure to match every
    discontinuity signals an implementation bug and raises.
    """
    t0 = trace.initial
    tn = trace.iem_at(n)
    q = trace.cocycle(0, n)
    targets = set(t0.discontinuity_points())
    found = {}
    for a in tn.perm.top[1:]:
        budget = q.row_sum(a)
        x = tn.p[a]
        for i in range(budget):
            if x in targets:
                found.setdefault(x, (a, i))
                break
            x = t0.evaluate(x)
        else:
            raise AssertionError("no ancestor in D(T) for %r within its return time" % (a,))
    missing = targets - set(found)
    if missing:
        raise AssertionError("unmatched discontinuities: %s" % sorted(missing))
    return found


def tiling_check(trace: InductionTrace, n: int) -> bool:
    """Exact check that the forward tower over the level-n intervals tiles [0, total).

    Each I_a(n) is pushed forward Q_a(n) times; the push is valid because
    the interval stays inside a single continuity piece at every stage
    (verified exactly, not assumed).
    """
    t0 = trace.initial
    tn = trace.iem_at(n)
    q = trace.cocycle(0, n)
    pieces = []
    for a in tn.alphabet:
        left = tn.p[a]
        width = tn.lengths[a]
        for _ in range(q.row_sum(a)):
            pieces.append((left, width))
            lab = t0.interval_label(left)
            if left + width > t0.p[lab] + t0.lengths[lab]:
                return False
            left = t0.evaluate(left)
    pieces.sort()
    edge = Fraction(0)
    for left, width in pieces:
        if left != edge:
            return False
        edge = left + width
    return edge == t0.total
