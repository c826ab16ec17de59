"""presentation_test.py - .pres format, length spectra, coset enumeration"""

from fractions import Fraction

import pytest

import presentation
from errors import BadLambda, BadParameter, EmptyRelator, NotCyclicallyReduced, PresentationSyntaxError
from presentation import (
    LengthSpectrum,
    Presentation,
    coset_enumerate,
    coset_table,
    describe,
    length_spectrum,
    parse,
    serialize,
    sparseness_sweep,
    sparseness_witness,
)

TIERED = """\
# two tiers
alphabet: a b
name: sample
tier 1:
rel: ab
tier 2:
rel: aabb
rel: abAB
"""


def test_parse_tiers_and_name():
    p = parse(TIERED)
    assert p.generators == ("a", "b")
    assert p.relators == ("ab", "aabb", "abAB")
    assert p.tiers == (1, 2, 2)
    assert p.name == "sample"
    assert p.tier_groups() == {1: ["ab"], 2: ["aabb", "abAB"]}
    assert p.up_to_tier(1).relators == ("ab",)


def test_serialize_then_parse_is_stable():
    p = parse(TIERED)
    text = serialize(p)
    assert parse(text) == p
    assert serialize(parse(text)) == text


def test_parse_accepts_bytes_and_identity_free_files():
    p = parse(b"alphabet: a b\n")
    assert p.relators == ()
    assert describe(p) == "<a b | ->"


@pytest.mark.parametrize(
    "text, line",
    [
        ("rel: ab\n", 1),
        ("alphabet: a b\nrel ab\n", 2),
        ("alphabet: a b\nrel: ac\n", 2),
        ("alphabet: a b\ncolour: red\n", 2),
        ("alphabet: a b\nalphabet: a b\n", 2),
    ],
)
def test_syntax_errors_carry_line_numbers(text, line):
    with pytest.raises(PresentationSyntaxError) as info:
        parse(text)
    assert info.value.line == line


def test_relators_must_be_cyclically_reduced():
    with pytest.raises(NotCyclicallyReduced):
        parse("alphabet: a b\nrel: abA\n")
    with pytest.raises(EmptyRelator):
        parse("alphabet: a b\nrel: 1\n")


def test_model_validation_matches_parser():
    with pytest.raises(NotCyclicallyReduced):
        Presentation(generators=("a", "b"), relators=("aA",))


def test_sample_files_load(data_dir):
    genus2 = presentation.load(data_dir / "genus2.pres")
    assert genus2.max_relator_length == 8
    assert len(genus2.alphabet) == 4


def test_length_spectrum_is_sorted():
    p = Presentation(generators=("a", "b"), relators=("abab", "ab", "aab"))
    assert tuple(length_spectrum(p)) == (2, 3, 4)
    with pytest.raises(BadParameter):
        LengthSpectrum((3, 2))


def test_sparseness_witness_prefers_smallest_ratio():
    w = sparseness_witness([2, 16, 256], Fraction(1, 10), (1, 256))
    assert (w.a, w.b) == (17, 255)
    assert w.ratio == Fraction(17, 255)


def test_sparseness_witness_none_when_too_dense():
    assert sparseness_witness([1, 2, 3, 4], Fraction(1, 2), (1, 4)) is None


def test_sparseness_rejects_bad_lambda():
    with pytest.raises(BadLambda):
        sparseness_witness([2], Fraction(1), (1, 4))


def test_sparseness_sweep_reports_sparse_up_to():
    sweep = sparseness_sweep([2, 16, 65536], Fraction(1, 64))
    assert [e.lam for e in sweep.entries] == [Fraction(1, 2 ** k) for k in range(1, 7)]
    assert sweep.ok
    assert sweep.sparse_up_to == 65536

    dense = sparseness_sweep([1, 2, 3, 4, 5, 6], Fraction(1, 4))
    assert not dense.ok


# ── coset enumeration ─────────────────────────────────────────────────

def _cayley_table_order(gens: dict[str, tuple[int, ...]]) -> int:
    """Closure of permutation generators, counted by brute force."""
    identity = tuple(range(len(next(iter(gens.values())))))
    seen = {identity}
    frontier = [identity]
    while frontier:
        nxt = []
        for g in frontier:
            for perm in gens.values():
                h = tuple(perm[i] for i in g)
                if h not in seen:
                    seen.add(h)
                    nxt.append(h)
        frontier = nxt
    return len(seen)


def test_coset_enumeration_of_s3_matches_permutations(data_dir):
    result = coset_enumerate(presentation.load(data_dir / "s3.pres"))
    assert result.status == "COMPLETE"
    assert result.order == 6 == _cayley_table_order({"a": (1, 2, 0), "b": (1, 0, 2)})


def test_coset_enumeration_of_finite_abelian_groups(data_dir):
    assert coset_enumerate(presentation.load(data_dir / "torus_mod4.pres")).order == 16
    assert coset_enumerate(presentation.load(data_dir / "cyclic16.pres")).order == 16


def test_subgroup_index():
    p = parse("alphabet: a b\nrel: aaa\nrel: bb\nrel: abab\n")
    assert coset_enumerate(p, ["a"]).order == 2


def test_coset_table_traces_words(data_dir):
    table = coset_table(presentation.load(data_dir / "s3.pres"))
    assert table.index == 6
    assert table.trace("aaa") == 0
    assert table.trace("abab") == 0
    assert table.trace("a") != 0


def test_infinite_group_is_inconclusive(data_dir):
    result = coset_enumerate(presentation.load(data_dir / "z2.pres"), max_cosets=200)
    assert result.status == "INCONCLUSIVE"
    assert result.order is None


def test_single_coset_limit_is_inconclusive(data_dir):
    result = coset_enumerate(presentation.load(data_dir / "s3.pres"), max_cosets=1)
    assert result.status == "INCONCLUSIVE"
    assert result.order is None
    assert result.max_cosets == 1
