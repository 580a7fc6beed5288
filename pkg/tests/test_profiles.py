import json
import math
import random
from fractions import Fraction

import pytest

from ietkit import Iem, induce, parse_winner_word, realize_iem, symmetric_pair
from ietkit.profiles import (balance_profile, condition_profile, delta_profile,
                             positivity_bound, positivity_depth, return_profile,
                             rows_to_csv, rows_to_jsonable)
from ietkit.words import quotient_word

from support import euclid_cf, euclid_denominators, random_path_iem


def golden_trace(runs=20):
    path = parse_winner_word(quotient_word([2] + [1] * (runs - 1)),
                             symmetric_pair("AB"))
    iem = realize_iem(path)
    return iem, induce(iem, len(path))


def test_condition_profile_matches_footnote_norms():
    iem, trace = golden_trace()
    quots = euclid_cf(iem.lengths["B"])
    qs = euclid_denominators(quots)
    rows = condition_profile(trace, "zorich", 12)
    for row in rows:
        assert row.norm_k == qs[row.k] + qs[row.k - 1]
        assert row.norm_step == quots[row.k] + 2
        assert abs(row.epsilon_k
                   - math.log(row.norm_step) / math.log(row.norm_k)) < 1e-12
    # the exponent column decreases toward zero on the golden trace
    eps = [row.epsilon_k for row in rows]
    assert all(a > b for a, b in zip(eps, eps[1:]))


def test_condition_profile_submultiplicative():
    rng = random.Random(3)
    T, _ = random_path_iem(rng, "ABCD", 150)
    trace = induce(T, 150)
    rows = condition_profile(trace, "mmy", min(6, len(trace.mmy_times()) - 2))
    for a, b in zip(rows, rows[1:]):
        assert b.norm_k <= a.norm_k * a.norm_step


def test_condition_profile_depth_error():
    T = Iem(symmetric_pair("AB"), {"A": Fraction(2, 3), "B": Fraction(1, 3)})
    trace = induce(T, 2)
    with pytest.raises(ValueError):
        condition_profile(trace, "zorich", 10)


def test_delta_profile_rational_truncates():
    T = Iem(symmetric_pair("AB"), {"A": Fraction(2, 3), "B": Fraction(1, 3)})
    rows = delta_profile(T, 50, "all")
    # rotation by 1/3 closes after finitely many pullback layers
    assert rows[-1].n < 50
    assert all(r.delta_n > 0 for r in rows)
    deltas = [r.delta_n for r in rows]
    assert all(a >= b for a, b in zip(deltas, deltas[1:]))


def test_delta_profile_golden_exponent_near_one():
    iem, _ = golden_trace(24)
    rows = delta_profile(iem, 512, "geometric")
    late = [r for r in rows if r.n >= 128]
    assert late and all(abs(r.exponent - 1) < 0.35 for r in late)


def test_return_profile_flags_caps_and_trivial_radius():
    T = Iem(symmetric_pair("AB"), {"A": Fraction(2, 3), "B": Fraction(1, 3)})
    rows = return_profile(T, [Fraction(2), Fraction(1, 10 ** 9)], 4, cap=10)
    big, tiny = rows
    assert big.capped == 0 and big.max_ratio == 0.0
    assert all(tau == 1 for _, tau in big.samples)
    # period-3 orbits never come within 1e-9 except exactly, within 10 steps they do
    assert tiny.capped in (0, 4)


def test_balance_profile_and_bound():
    rng = random.Random(5)
    T, _ = random_path_iem(rng, "ABC", 150)
    trace = induce(T, 150)
    K = min(6, len(trace.mmy_times()) - 1)
    rows = balance_profile(trace, K)
    for row in rows:
        assert row.length_ratio >= 1
        # 1 / ||A(k)|| <= max length at the accelerated time
        times = trace.mmy_times()
        lengths = trace.iem_at(times[row.k]).lengths.values()
        assert max(lengths) * row.norm_k >= T.total


def test_positivity_depth_bound():
    rng = random.Random(7)
    for letters in ("ABC", "ABCD"):
        T, _ = random_path_iem(rng, letters, 200)
        trace = induce(T, 200)
        bound = positivity_bound(len(letters))
        K = len(trace.mmy_times()) - 2 - bound
        if K < 0:
            continue
        for row in positivity_depth(trace, K):
            assert row.depth <= bound


def test_emission_formats():
    iem, trace = golden_trace()
    rows = condition_profile(trace, "zorich", 5)
    csv_text = rows_to_csv(rows)
    lines = csv_text.strip().splitlines()
    assert lines[0] == "k,norm_k,norm_step,epsilon_k"
    assert len(lines) == 6
    payload = rows_to_jsonable(rows)
    json.dumps(payload)  # must be serializable as-is
    assert payload[0]["k"] == 1
    ret = return_profile(iem, [Fraction(1, 8)], 3, cap=1000)
    json.dumps(rows_to_jsonable(ret))
    assert rows_to_csv(ret)
