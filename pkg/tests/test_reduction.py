import random
from fractions import Fraction

import pytest

from ietkit import Iem, PermutationPair, induce, symmetric_pair
from ietkit.reduction import (StepFunction, bar_zorich_times, check_bar_lengths,
                              check_projection_identity, check_row_identity,
                              continued_fraction, convergent_denominators,
                              denjoy_koksma_check, indicator, induced_map_check,
                              inducing_rotation, norm_sandwich, project_path,
                              return_time_comparison, zorich_alignment)

from support import random_rational_iem


def sample_map():
    return Iem(symmetric_pair("ABC"),
               {"A": Fraction(1, 2), "B": Fraction(1, 3), "C": Fraction(1, 6)})


def test_continued_fraction_oracle_agreement():
    from support import euclid_cf, euclid_denominators
    for frac in (Fraction(3, 8), Fraction(215, 371), Fraction(1, 2)):
        cf = continued_fraction(frac)
        assert list(cf) == euclid_cf(frac)
        assert list(convergent_denominators(cf)) == euclid_denominators(cf)


def test_inducing_rotation_parameters():
    rot = inducing_rotation(sample_map())
    assert rot.interval_length == Fraction(4, 3)
    assert rot.angle == Fraction(1, 2)
    assert rot.alpha == Fraction(3, 8)
    assert rot.iem.lengths["Abar"] == Fraction(1, 2) + Fraction(1, 3)
    assert rot.iem.lengths["Cbar"] == Fraction(1, 3) + Fraction(1, 6)
    assert rot.iem.total == rot.interval_length


def test_inducing_rotation_rejects_wrong_shape():
    bad = Iem(PermutationPair.from_strings("ABC", "CAB"),
              {"A": Fraction(1, 3), "B": Fraction(1, 3), "C": Fraction(1, 3)})
    with pytest.raises(ValueError):
        inducing_rotation(bad)


def test_induced_map_property():
    T = sample_map()
    for i in range(20):
        assert induced_map_check(T, T.total * Fraction(i, 20))


def test_projection_identities_everywhere():
    rng = random.Random(19)
    checked = 0
    while checked < 8:
        T = random_rational_iem(rng, "ABC")
        trace = induce(T, 80)
        if trace.depth < 40:
            continue
        proj = project_path(trace)
        for n in range(trace.depth + 1):
            assert check_projection_identity(trace, proj, n)
            assert check_row_identity(trace, n)
            assert check_bar_lengths(trace, proj, n)
            _, _, ok = norm_sandwich(trace, proj, n)
            assert ok
        # projected arrows are exactly the steps losing an outer letter
        outer_losses = sum(1 for a in trace.arrows if a.loser != "B")
        assert proj.ell[trace.depth] == outer_losses == len(proj.bar_path)
        checked += 1


def test_zorich_alignment():
    rng = random.Random(23)
    checked = 0
    while checked < 6:
        T = random_rational_iem(rng, "ABC")
        trace = induce(T, 150)
        proj = project_path(trace)
        if len(bar_zorich_times(proj)) < 5:
            continue
        rows = zorich_alignment(trace, 4)
        for row in rows:
            assert row.ok_step and row.ok_norms
        checked += 1


def test_step_function_exactness():
    f = StepFunction(Fraction(2), (Fraction(0), Fraction(1, 2), Fraction(3, 2)),
                     (Fraction(1), Fraction(-1), Fraction(2)))
    assert f.evaluate(Fraction(0)) == 1
    assert f.evaluate(Fraction(1)) == -1
    assert f.evaluate(Fraction(7, 4)) == 2
    assert f.variation() == abs(-1 - 1) + abs(2 - -1) + abs(1 - 2)
    assert f.mean() == (1 * Fraction(1, 2) + -1 * 1 + 2 * Fraction(1, 2)) / 2


def test_denjoy_koksma():
    T = sample_map()
    rot = inducing_rotation(T)
    f = indicator(rot.interval_length, T.total)
    assert f.variation() == 2
    for k in range(len(rot.denominators)):
        error, ok = denjoy_koksma_check(rot, f, Fraction(1, 7), k)
        assert ok and error < 2
    # a constant function has zero Birkhoff error (and zero variation, so
    # the strict bound is vacuously tight rather than satisfied)
    const = StepFunction(rot.interval_length, (Fraction(0),), (Fraction(5),))
    error, _ = denjoy_koksma_check(rot, const, Fraction(1, 7), 1)
    assert error == 0


def test_return_time_comparison():
    rng = random.Random(29)
    T = sample_map()
    for _ in range(10):
        r = T.total / 2 ** rng.randint(2, 8)
        x = (T.total - r) * Fraction(rng.randint(1, 999), 1000)
        rc = return_time_comparison(T, x, r, 10 ** 5)
        assert rc.ok
        assert abs(rc.tau - rc.scaled_bar) < 2
    with pytest.raises(ValueError):
        return_time_comparison(T, T.total - Fraction(1, 100), Fraction(1, 10), 100)
