"""zoo_test.py - presentation generators and the torsion schedule"""

import json
import math
import random
from fractions import Fraction

import pytest

from cayley import make_oracle
from errors import BadExponent, BadParameter, IntervalOverlap, PhiInadmissible
from presentation import coset_enumerate, parse
from zoo import (
    _check_disjoint,
    aperiodic_word,
    circular_distance,
    gen_aperiodic_words,
    gen_central_extension,
    gen_Gn_truncation,
    gen_Gpc_finite_quotient,
    gen_lacunary_family,
    index_set,
    schedule_torsion_params,
    thue_morse,
    with_provenance,
)


# ── words ─────────────────────────────────────────────────────────────

def test_thue_morse_prefix():
    assert thue_morse(8) == "abbabaab"
    assert thue_morse(16) == "abbabaabbaababba"


def test_aperiodic_words_drop_sixth_powers():
    out = gen_aperiodic_words(6)
    assert out.count == 62
    assert "aaaaaa" not in out.words
    assert out.words == sorted(out.words)
    assert out.meets_bound


def test_square_free_binary_words_run_out():
    out = gen_aperiodic_words(4, power=2)
    assert out.count == 0
    assert not out.meets_bound
    with pytest.raises(BadParameter):
        gen_aperiodic_words(0)


@pytest.mark.parametrize("length", range(1, 15))
def test_aperiodic_counts_stay_above_three_halves_power(length):
    out = gen_aperiodic_words(length)
    assert out.count * 2 ** length >= 3 ** length
    assert out.meets_bound
    assert len(set(out.words)) == out.count


def test_index_sets():
    assert index_set("tower", 3) == [2, 16, 65536]
    assert index_set("all", 3) == [1, 2, 3]
    with pytest.raises(BadParameter):
        index_set("primes", 3)


# ── lacunary families ─────────────────────────────────────────────────

def test_two_tier_family():
    family = gen_lacunary_family(count=2)
    p = family.presentation
    assert p.relators == ("aB", thue_morse(16))
    assert p.tiers == (1, 2)
    report = family.report
    assert tuple(report.spectrum) == (2, 16)
    assert report.classical is not None
    assert not report.classical.ok
    assert any("length-2 relator" in note for note in report.notes)
    gap = report.gaps[0]
    assert (gap.tier, gap.a, gap.b, gap.injectivity_floor) == (1, 3, 15, 7)


def test_second_tier_survives_the_first():
    # under a = b every positive word of length n is t^n
    p = gen_lacunary_family(count=2).presentation
    assert make_oracle("dehn", p.up_to_tier(1)).equal("a", "b")
    assert not make_oracle("dehn", p.up_to_tier(1)).is_trivial(p.relators[1])
    assert make_oracle("coset", p).order == 16


def test_balanced_first_tier_kills_the_second():
    p = gen_lacunary_family("thue-morse", count=2).presentation
    assert p.relators[0] == "ab"
    assert make_oracle("dehn", p.up_to_tier(1)).is_trivial(p.relators[1])


def test_aperiodic_source_lengths():
    assert [aperiodic_word(n) for n in (1, 2, 3)] == ["a", "aB", "abb"]
    assert aperiodic_word(65536) == thue_morse(65536)
    with pytest.raises(BadParameter):
        gen_lacunary_family("fibonacci", count=2)


def test_large_family_skips_the_classical_check():
    family = gen_lacunary_family(count=3)
    report = family.report
    assert report.classical is None
    assert any("classical check skipped" in note for note in report.notes)
    assert (report.witness.a, report.witness.b) == (17, 65535)
    assert report.sweep.ok


def test_family_rejects_bad_indices():
    with pytest.raises(BadParameter):
        gen_lacunary_family(indices=[4, 2], count=2)
    with pytest.raises(BadParameter):
        gen_lacunary_family(word_source=lambda n: "a", indices=[2, 4], count=2)


def test_provenance_header_is_a_comment():
    p = gen_lacunary_family(count=2).presentation
    text = with_provenance(p, "lacunary", {"count": 2})
    first = text.splitlines()[0]
    assert first.startswith("# provenance: ")
    header = json.loads(first[len("# provenance: "):])
    assert header["generator"] == "lacunary"
    assert header["params"] == {"count": 2}
    assert parse(text) == p


# ── central extensions ────────────────────────────────────────────────

def test_central_extension_of_one_relator():
    p = gen_central_extension(["ab"], [2])
    assert p.relators == ("baBA", "abAB", "abab")
    assert p.tiers == (1, 1, 1)


def test_central_extension_checks_its_inputs():
    with pytest.raises(BadExponent):
        gen_central_extension(["ab"], [1])
    with pytest.raises(BadParameter):
        gen_central_extension(["ab", "aab"], [2])


# ── G(p, c) ───────────────────────────────────────────────────────────

def test_circular_distance():
    assert circular_distance(7, 9) == 2
    assert circular_distance(-1, 9) == 1
    assert circular_distance(9, 9) == 0


def test_finite_quotient_h3():
    p = gen_Gpc_finite_quotient(3, 1, [1], 1)
    assert p.generators == ("a", "b", "c", "z")
    assert len(p.relators) == 13
    assert "zzz" in p.relators
    assert coset_enumerate(p).order == 81


def test_finite_quotient_parameters():
    with pytest.raises(BadParameter):
        gen_Gpc_finite_quotient(4, 1, [1], 1)
    with pytest.raises(BadParameter):
        gen_Gpc_finite_quotient(3, 3, [1], 1)
    with pytest.raises(BadParameter):
        gen_Gpc_finite_quotient(3, 1, [2, 1], 2)


def test_truncation_without_commutators():
    p = gen_Gn_truncation(3, [], 0, 1)
    assert p.generators == ("a", "b", "c", "z")
    assert len(p.relators) == 5
    with pytest.raises(BadParameter):
        gen_Gn_truncation(3, [], 0, 13)


# ── torsion schedule ──────────────────────────────────────────────────

def test_two_step_schedule():
    sched = schedule_torsion_params(3, [0, 1, 2], [1, 1], 2)
    assert sched.d == [1, 2, 8]
    assert sched.i == [0, 2, 16]
    assert {e.exponent for e in sched.exponents} == {243}
    assert sched.n_A(1) == 243
    with pytest.raises(BadParameter):
        sched.n_A(17)


def test_schedule_rejects_bad_phi():
    with pytest.raises(PhiInadmissible):
        schedule_torsion_params(3, [0, 2, 2], [1, 1], 2)
    with pytest.raises(PhiInadmissible):
        schedule_torsion_params(3, [0, 1, 1], [1, 1], 2)
    with pytest.raises(PhiInadmissible):
        schedule_torsion_params(3, [0, 1], [1, 1], 2)
    with pytest.raises(BadParameter):
        schedule_torsion_params(3, [0, 1, 2], [1, 1], 2, n0=100)


def test_overlapping_intervals_are_refused():
    with pytest.raises(IntervalOverlap):
        _check_disjoint([(Fraction(1), Fraction(5)), (Fraction(3), Fraction(7))])
    _check_disjoint([(Fraction(2), Fraction(2)), (Fraction(1), Fraction(3))])


def _random_admissible_phi(rng: random.Random, r_max: int) -> list[Fraction]:
    phi = [Fraction(0), Fraction(1)]
    for _ in range(2, r_max + 1):
        phi.append(max(Fraction(2), phi[-1]) + Fraction(rng.randint(0, 2), rng.randint(1, 3)))
    return phi


@pytest.mark.parametrize("seed", range(6))
def test_random_schedules_follow_the_recursion(seed):
    rng = random.Random(seed)
    r_max = 3
    phi = _random_admissible_phi(rng, r_max)
    deltas = [Fraction(rng.randint(1, 15), rng.randint(1, 4)) for _ in range(r_max)]
    sched = schedule_torsion_params(3, phi, deltas, r_max, n0=3)

    assert sched.d[0] == 1 and sched.i[0] == 0
    for r in range(1, r_max + 1):
        f2 = phi[r] ** 2
        assert sched.d[r] == math.ceil(max(f2 * sched.d[r - 1], f2 * deltas[r - 1], 2))
        assert sched.i[r] == math.ceil(phi[r] * sched.d[r])

    live = sorted((lo, hi) for lo, hi in sched.intervals if lo < hi)
    assert all(hi1 <= lo2 for (_, hi1), (lo2, _) in zip(live, live[1:]))

    assert [e.rank for e in sched.exponents] == list(range(1, sched.i[-1] + 1))
    for e in sched.exponents:
        cut = Fraction(sched.d[e.r]) / phi[e.r]
        assert sched.i[e.r - 1] < e.rank <= sched.i[e.r]
        if e.rank >= cut:
            assert (e.regime, e.exponent) == ("upper", 3)
        else:
            assert e.regime == "lower"
            assert e.exponent >= Fraction(sched.d[e.r], e.rank)
            assert e.exponent // 3 < max(3, Fraction(sched.d[e.r], e.rank))
            assert sched.n_A(e.rank) == e.exponent
