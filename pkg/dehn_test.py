"""dehn_test.py - Dehn's algorithm and the area checks on its traces"""

from fractions import Fraction

import numpy as np
import pytest

from cayley import AbelianOracle, make_oracle
from dehn import (
    DehnSolver,
    check_area_inequality,
    check_cell_bound,
    dehn_reduce,
    equal,
    is_trivial,
    solver_for,
)
from errors import NotSmallCancellation, TraceNotClosed
from freeword import Alphabet, free_reduce, invert, iter_reduced_words, symmetrize
from presentation import parse

R = "abABcdCD"


@pytest.fixture(scope="module")
def s(genus2):
    return symmetrize(genus2.relators)


def test_relator_reduces_in_one_step(s):
    trace = dehn_reduce(R, s)
    assert trace.trivial
    assert trace.cells_used == 1
    assert trace.perimeter_sum == 8


def test_conjugate_of_relator_is_trivial(s):
    trace = dehn_reduce("ab" + R + "BA", s)
    assert trace.trivial
    assert trace.cells_used == 1


def test_nontrivial_words_keep_a_remainder(s):
    for w in ["a", "ab", "abAB", "abABcd"]:
        trace = dehn_reduce(w, s)
        assert not trace.trivial
        assert trace.final


def test_each_step_shortens_the_word(s):
    trace = dehn_reduce(R + R + "a" + R + "A", s)
    assert trace.trivial
    for step in trace.steps:
        assert step.replacement_length < step.replaced_length


def test_equality_through_the_relator(s):
    # abAB · cdCD = 1, so abAB = (cdCD)^-1
    assert equal("abAB", invert("cdCD"), s)
    assert not equal("abAB", "cdCD", s)
    assert is_trivial("", s)


def test_solver_refuses_mu_above_one_sixth(s):
    with pytest.raises(NotSmallCancellation):
        DehnSolver(s, Fraction(1, 5))


def test_solver_refuses_non_small_cancellation(z2):
    with pytest.raises(NotSmallCancellation):
        DehnSolver(symmetrize(z2.relators))


def test_solver_is_cached(s):
    assert solver_for(s) is solver_for(s)


def test_random_products_of_conjugates_are_trivial(s):
    rng = np.random.default_rng(7)
    letters = np.array(list("aAbBcCdD"))
    for _ in range(20):
        g = free_reduce("".join(rng.choice(letters, size=3)))
        w = free_reduce(g + R + invert(g))
        assert is_trivial(w, s)


def test_random_words_with_unbalanced_exponents_are_nontrivial(s):
    rng = np.random.default_rng(11)
    letters = np.array(list("aAbBcCdD"))
    for _ in range(20):
        w = free_reduce("".join(rng.choice(letters, size=6)) + "a")
        if sum(1 if c == "a" else -1 if c == "A" else 0 for c in w) != 0:
            assert not is_trivial(w, s)


def test_trace_describe_lists_every_step(s):
    trace = dehn_reduce(R + R, s)
    text = trace.describe()
    assert text.splitlines()[0].startswith("start")
    assert text.splitlines()[-1] == "final  1"
    assert len(text.splitlines()) == trace.cells_used + 2


# ── exhaustive soundness on short words ───────────────────────────────

# (generators, relators, letter map into a free group, max word length):
# each group is free on the image letters, so a word is trivial exactly
# when its image reduces to the empty word
EXACT_CASES = [
    (("a", "b"), ["aB"], {"a": "x", "b": "x"}, 8),
    (("a", "b", "c", "d"), ["aB", "cD"], {"a": "x", "b": "x", "c": "y", "d": "y"}, 5),
    (("a", "b", "c"), ["aB"], {"a": "x", "b": "x", "c": "y"}, 6),
]


def _image(w: str, letters: dict[str, str]) -> str:
    return free_reduce("".join(letters[c] if c.islower() else letters[c.lower()].upper() for c in w))


@pytest.mark.parametrize("generators, relators, letters, max_length", EXACT_CASES)
def test_dehn_decides_every_short_word(generators, relators, letters, max_length):
    rs = symmetrize(relators)
    solver = DehnSolver(rs)
    for w in iter_reduced_words(Alphabet(generators), max_length):
        assert solver.is_trivial(w) == (_image(w, letters) == ""), w


def test_dehn_agrees_with_a_finite_quotient_up_to_length_ten():
    # exponent sums of words up to length 10 stay below 16, so Z/16 separates them
    z = parse("alphabet: a b\nrel: aB\n")
    z16 = parse("alphabet: a b\nrel: aB\nrel: aaaaaaaaaaaaaaaa\n")
    solver = DehnSolver(symmetrize(z.relators))
    quotient = make_oracle("coset", z16)
    assert quotient.order == 16
    for w in iter_reduced_words(z.alphabet, 10):
        assert solver.is_trivial(w) == quotient.is_trivial(w), w


def test_genus2_kills_no_word_shorter_than_its_relator(s, genus2):
    solver = solver_for(s)
    abelian = AbelianOracle(genus2.alphabet)
    for w in iter_reduced_words(genus2.alphabet, 5):
        assert solver.is_trivial(w) == (w == ""), w
        if solver.is_trivial(w):
            assert abelian.is_trivial(w)
    for shift in s.words:
        assert solver.is_trivial(shift)


# ── area checks ───────────────────────────────────────────────────────

def test_area_inequality_holds_for_two_cells(s):
    w = R + R
    trace = dehn_reduce(w, s, Fraction(1, 7))
    check = check_area_inequality(trace, w, Fraction(1, 7))
    assert check.holds
    assert check.lhs == 16
    assert check.rhs == Fraction(trace.perimeter_sum, 7)


def test_area_inequality_fails_on_a_mismatched_trace(s, caplog):
    # three cells charged against a word that needs one
    trace = dehn_reduce(R * 3, s)
    check = check_area_inequality(trace, R, Fraction(1, 100))
    assert not check.holds
    assert check.lhs == 8
    assert check.rhs == Fraction(94, 100) * 24
    assert "area inequality fails" in caplog.text


def test_cell_bound_reports_the_weakest_cell(s):
    trace = dehn_reduce(R, s)
    check = check_cell_bound(trace, R, Fraction(1, 6))
    assert check.holds
    assert check.rhs == Fraction(1, 2) * 8
    assert check.weakest_cell is not None


def test_area_checks_need_a_closed_trace(s):
    trace = dehn_reduce("ab", s)
    with pytest.raises(TraceNotClosed):
        check_area_inequality(trace, "ab", Fraction(1, 6))
    with pytest.raises(TraceNotClosed):
        check_cell_bound(trace, "ab", Fraction(1, 6))
