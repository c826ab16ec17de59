"""freeword_test.py - word algebra and symmetrized sets"""

from itertools import product

import pytest

from errors import EmptyRelator, NotCyclicallyReduced, NotSymmetrized, PresentationSyntaxError
from freeword import (
    Alphabet,
    SymmetrizedSet,
    commutator,
    cyclic_reduce,
    cyclic_shifts,
    free_reduce,
    invert,
    is_cyclically_reduced,
    iter_reduced_words,
    left_normed_commutator,
    parse_word,
    power,
    primitive_root,
    render,
    symmetrize,
)


def test_free_reduce_cancels_adjacent_inverses():
    assert free_reduce("aAbB") == ""
    assert free_reduce("abBA") == ""
    assert free_reduce("abAB") == "abAB"
    assert free_reduce("aabBAc") == "ac"


def test_cyclic_reduce_returns_core_and_conjugator():
    assert cyclic_reduce("ab") == ("ab", "")
    core, g = cyclic_reduce("abcBA")
    assert core == "c"
    assert g == "ab"
    assert free_reduce(g + core + invert(g)) == "abcBA"


def test_cyclic_reduce_of_trivial_word():
    assert cyclic_reduce("aA") == ("", "")


def test_invert_and_render():
    assert invert("abC") == "cBA"
    assert render("") == "1"
    assert parse_word("1") == ""
    assert parse_word(" a b ") == "ab"


def test_parse_word_rejects_foreign_letters():
    with pytest.raises(PresentationSyntaxError):
        parse_word("ac", Alphabet(("a", "b")))
    with pytest.raises(PresentationSyntaxError):
        parse_word("a2")


def test_alphabet_order_is_shortlex():
    abc = Alphabet.of("ab")
    assert abc.letters == ("a", "A", "b", "B")
    assert abc.shortlex_key("A") < abc.shortlex_key("b")
    assert abc.exponent_sums("abAAb") == (-1, 2)
    assert Alphabet.of("a b") == Alphabet.of(["a", "b"])


def test_reduced_words_are_counted_by_length():
    words = list(iter_reduced_words(Alphabet.of("ab"), 3))
    assert words[0] == ""
    # 1 + 4 + 12 + 36
    assert len(words) == 53
    assert all(free_reduce(w) == w for w in words)


def test_commutators_and_powers():
    assert commutator("a", "b") == "ABab"
    assert left_normed_commutator(["a", "b", "a"]) == free_reduce(invert("ABab") + "A" + "ABab" + "a")
    assert power("ab", 3) == "ababab"
    assert power("ab", -1) == "BA"
    assert primitive_root("abab") == ("ab", 2)
    assert primitive_root("aab") == ("aab", 1)


def test_cyclic_shifts():
    assert cyclic_shifts("abc") == ["abc", "bca", "cab"]


def test_symmetrize_of_commutator():
    s = symmetrize(["abAB"])
    expected = set(cyclic_shifts("abAB")) | set(cyclic_shifts(invert("abAB")))
    assert set(s.words) == expected
    assert len(s) == 8
    s.verify()


def test_symmetrize_is_minimal_closure():
    for r in ["a", "ab", "aab", "abAB", "abABcdCD"]:
        s = symmetrize([r])
        closure = set()
        for base in (r, invert(r)):
            closure |= set(cyclic_shifts(base))
        assert set(s.words) == closure
        assert len(set(s.words)) == len(s.words)


def test_symmetrize_keeps_origins():
    s = symmetrize(["abAB"])
    assert s.origin("bABa") == (0, 1, False)
    assert s.origin("baBA") == (0, 0, True)


def test_symmetrize_rejects_bad_relators():
    with pytest.raises(EmptyRelator):
        symmetrize([""])
    with pytest.raises(NotCyclicallyReduced):
        symmetrize(["abA"])


def test_verify_rejects_open_sets():
    with pytest.raises(NotSymmetrized):
        SymmetrizedSet(("ab",)).verify()
    with pytest.raises(NotSymmetrized):
        SymmetrizedSet(()).verify()


@pytest.mark.parametrize("w", ["".join(t) for t in product("aAbB", repeat=4)])
def test_cyclic_reduce_output_is_cyclically_reduced(w):
    core, g = cyclic_reduce(w)
    assert is_cyclically_reduced(core)
    assert free_reduce(g + core + invert(g)) == free_reduce(w)
