"""
zoo.py - Generators for example presentations and parameter schedules

    gen_aperiodic_words       positive words in {a, b} with no 6th-power subword
    gen_lacunary_family       tiered C'(λ) family with a sparse length spectrum
    gen_central_extension     [R_n, a], [R_n, b], R_n^k_n per base relator
    gen_Gpc_finite_quotient   finite p-group quotients H_m of G(p, c)
    gen_Gn_truncation         finite index window of the virtually free G_n
    schedule_torsion_params   d_r, i_r and the period-exponent rule of a torsion family

Generators return Presentation objects; with_provenance() renders one as a
.pres file headed by a JSON provenance comment.
"""

import json
import logging
import math
from fractions import Fraction
from itertools import product
from typing import Callable, Literal, Optional, Sequence, Union

from pydantic import BaseModel
from sympy import isprime

from cancellation import ClassicalCheck, check_classical
from config import SETTINGS, __version__
from errors import BadExponent, BadParameter, BudgetExceeded, IntervalOverlap, PhiInadmissible
from exact import Rational, RationalLike, parse_rational
from freeword import (
    Alphabet,
    Word,
    cyclic_reduce,
    invert,
    left_normed_commutator,
    power,
    symmetrize,
)
from presentation import (
    LengthSpectrum,
    Presentation,
    SparsenessWitness,
    SparseSweep,
    serialize,
    sparseness_sweep,
    sparseness_witness,
)

logger = logging.getLogger(__name__)

T_LETTER = "z"

# Symmetrizing a relator costs 2|R| words; beyond this total the classical check is skipped.
CLASSICAL_CHECK_LIMIT = 20_000


def with_provenance(p: Presentation, generator: str, params: dict) -> str:
    header = json.dumps(
        {"generator": generator, "params": params, "version": __version__},
        sort_keys=True,
        default=str,
    )
    return f"# provenance: {header}\n{serialize(p)}"


# ═══════════════════════════════════════════════════════════════════════
#  Aperiodic words
# ═══════════════════════════════════════════════════════════════════════

class AperiodicWords(BaseModel):
    length: int
    power: int
    count: int
    meets_bound: bool
    words: list[str]


def _ends_in_power(w: str, k: int) -> bool:
    for period in range(1, len(w) // k + 1):
        if w[-period * k:] == w[-period:] * k:
            return True
    return False


def gen_aperiodic_words(length: int, power: int = 6) -> AperiodicWords:
    """All words of the given length over {a, b} with no subword u^power, in lexicographic order.

    Counts are checked against (3/2)^length; a shortfall is logged, not raised.
    """
    if length < 1 or power < 2:
        raise BadParameter("length must be >= 1 and power >= 2")
    words: list[str] = []

    def grow(w: str) -> None:
        if len(w) == length:
            words.append(w)
            return
        for letter in "ab":
            nxt = w + letter
            if not _ends_in_power(nxt, power):
                grow(nxt)

    grow("")
    meets = len(words) * 2 ** length >= 3 ** length
    if not meets:
        logger.warning("[Zoo] %d aperiodic words of length %d, below (3/2)^%d", len(words), length, length)
    return AperiodicWords(length=length, power=power, count=len(words), meets_bound=meets, words=words)


# ═══════════════════════════════════════════════════════════════════════
#  Lacunary families
# ═══════════════════════════════════════════════════════════════════════

def thue_morse(n: int) -> Word:
    """First n letters of the Thue-Morse word over {a, b}; it has no cube subwords."""
    return "".join("b" if bin(k).count("1") % 2 else "a" for k in range(n))


def aperiodic_word(n: int) -> Word:
    """Length-n relator whose tier-1 quotient keeps every longer one nontrivial.

    Length 2 gives aB, which marks Z by a = b; a positive word of length n
    then maps to t^n there. Longer lengths are Thue-Morse prefixes. The
    length-2 choice ab would invert b into a and kill every balanced
    prefix, the length-16 one included.
    """
    if n == 1:
        return "a"
    if n == 2:
        return "aB"
    return thue_morse(n)


WORD_SOURCES: dict[str, Callable[[int], Word]] = {
    "aperiodic": aperiodic_word,
    "thue-morse": thue_morse,
}


def index_set(name: str, count: int) -> list[int]:
    """First `count` members of a named index set."""
    if name == "tower":
        return [2 ** (4 ** k) for k in range(count)]
    if name == "all":
        return list(range(1, count + 1))
    raise BadParameter(f"unknown index set {name!r}")


class TierGap(BaseModel):
    tier: int
    a: int
    b: int
    injectivity_floor: int


class LacunaryReport(BaseModel):
    spectrum: LengthSpectrum
    witness: Optional[SparsenessWitness]
    sweep: SparseSweep
    classical: Optional[ClassicalCheck]
    gaps: list[TierGap]
    notes: list[str]


class LacunaryFamily(BaseModel):
    presentation: Presentation
    report: LacunaryReport


def gen_lacunary_family(
    word_source: Union[str, Callable[[int], Word]] = "aperiodic",
    indices: Union[str, Sequence[int]] = "tower",
    count: int = 3,
    lam: RationalLike = Fraction(1, 10),
    mu: RationalLike = Fraction(1, 6),
) -> LacunaryFamily:
    """Relators w_i for the first `count` indices, one per tier (1-based).

    The companion report carries the sparseness witness at lam and a sweep
    down to it, C'(mu) on the union when it is small enough to symmetrize,
    and the gap between consecutive relator lengths. A relator of length
    2 shares a letter with every other relator, so a union holding one is
    never C'(mu) for mu ≤ 1/2; tier 1 alone still is.
    """
    if isinstance(word_source, str) and word_source not in WORD_SOURCES:
        raise BadParameter(f"unknown word source {word_source!r}")
    source = WORD_SOURCES[word_source] if isinstance(word_source, str) else word_source
    chosen = index_set(indices, count) if isinstance(indices, str) else list(indices)[:count]
    if any(b <= a for a, b in zip(chosen, chosen[1:])):
        raise BadParameter("index set must be strictly increasing")

    relators = []
    for i in chosen:
        w = source(i)
        if len(w) != i:
            raise BadParameter(f"word source returned length {len(w)} for index {i}")
        relators.append(w)
    p = Presentation(
        generators=("a", "b"),
        relators=tuple(relators),
        tiers=tuple(range(1, len(relators) + 1)),
        name=f"lacunary ({word_source if isinstance(word_source, str) else 'custom'})",
    )

    lengths = [len(r) for r in relators]
    window = (1, max(lengths, default=1))
    notes = []
    classical = None
    if relators and 2 * sum(lengths) <= CLASSICAL_CHECK_LIMIT:
        classical = check_classical(symmetrize(relators), mu)
        if not classical.ok and min(lengths) <= 2:
            notes.append("union is not C'(mu): a length-2 relator shares a letter with every other relator")
    elif relators:
        notes.append(f"classical check skipped: total relator length {sum(lengths)} too large to symmetrize")
    gaps = [
        TierGap(tier=t, a=x + 1, b=y - 1, injectivity_floor=(y - 1) // 2)
        for t, (x, y) in enumerate(zip(lengths, lengths[1:]), start=1)
    ]
    report = LacunaryReport(
        spectrum=LengthSpectrum.of(lengths),
        witness=sparseness_witness(lengths, lam, window) if relators else None,
        sweep=sparseness_sweep(lengths, lam, window),
        classical=classical,
        gaps=gaps,
        notes=notes,
    )
    logger.info("[Zoo] lacunary family with spectrum %s", lengths)
    return LacunaryFamily(presentation=p, report=report)


# ═══════════════════════════════════════════════════════════════════════
#  Central extensions
# ═══════════════════════════════════════════════════════════════════════

def gen_central_extension(base_relators: Sequence[Word], k: Sequence[int]) -> Presentation:
    """Per n: R a R⁻¹ a⁻¹, R b R⁻¹ b⁻¹ and R^k_n, reduced; tier n holds the three of them."""
    if len(base_relators) != len(k):
        raise BadParameter("one exponent per base relator")
    alphabet = Alphabet(("a", "b"))
    relators: list[Word] = []
    tiers: list[int] = []
    for n, (R, kn) in enumerate(zip(base_relators, k), start=1):
        alphabet.check_word(R)
        if kn < 2:
            raise BadExponent(f"k_{n} = {kn}; exponents must be at least 2")
        for candidate in (R + "a" + invert(R) + "A", R + "b" + invert(R) + "B", power(R, kn)):
            core, _ = cyclic_reduce(candidate)
            if core:
                relators.append(core)
                tiers.append(n)
    return Presentation(
        generators=("a", "b"),
        relators=tuple(relators),
        tiers=tuple(tiers) if relators else None,
        name="central extension",
    )


# ═══════════════════════════════════════════════════════════════════════
#  G(p, c): finite quotients and truncations
# ═══════════════════════════════════════════════════════════════════════

def _check_prime(p: int) -> None:
    if p < 3 or not isprime(p):
        raise BadParameter(f"p must be an odd prime, got {p}")


def _check_schedule(c_schedule: Sequence[int], upto: int) -> None:
    if len(c_schedule) < upto:
        raise BadParameter(f"c schedule needs {upto} entries, got {len(c_schedule)}")
    values = list(c_schedule[:upto])
    if any(c < 1 for c in values) or any(y < x for x, y in zip(values, values[1:])):
        raise BadParameter("c schedule must be positive and nondecreasing")


def circular_distance(i: int, m: int) -> int:
    """Least s ≥ 0 with i − s or i + s divisible by m."""
    r = i % m
    return min(r, m - r)


def _commutator_relators(
    indices: Sequence[int],
    letter: Callable[[int], str],
    c_schedule: Sequence[int],
    window: int,
    spread: Callable[[tuple[int, ...]], int],
    budget: int,
) -> list[Word]:
    out: dict[Word, None] = {}
    for n in range(1, window + 1):
        weight = c_schedule[n - 1] + 1
        for tup in product(indices, repeat=weight):
            if tup[0] == tup[1] or spread(tup) > n:
                continue
            core, _ = cyclic_reduce(left_normed_commutator(letter(i) for i in tup))
            if core and core not in out:
                out[core] = None
                if len(out) > budget:
                    raise BudgetExceeded(f"more than {budget} commutator relators")
    return list(out)


def gen_Gpc_finite_quotient(
    p: int,
    s: int,
    c_schedule: Sequence[int],
    window: int,
    budget: Optional[int] = None,
) -> Presentation:
    """H_m, m = p^s: b_i^p, windowed commutators, t⁻¹ b_i t = b_(i+1 mod m), t^m."""
    _check_prime(p)
    if s < 1:
        raise BadParameter("s must be at least 1")
    m = p ** s
    if m > 25:
        raise BadParameter(f"m = {m} needs more than 25 generator letters")
    if not 0 <= window <= m:
        raise BadParameter(f"window must lie in [0, {m}]")
    _check_schedule(c_schedule, window)
    budget = budget if budget is not None else SETTINGS.eps_budget

    def letter(i: int) -> str:
        return chr(97 + i % m)

    def spread(tup: tuple[int, ...]) -> int:
        return max(circular_distance(x - y, m) for x in tup for y in tup)

    relators = [letter(i) * p for i in range(m)]
    relators += _commutator_relators(range(m), letter, c_schedule, window, spread, budget)
    relators += [T_LETTER.upper() + letter(i) + T_LETTER + letter(i + 1).upper() for i in range(m)]
    relators.append(T_LETTER * m)
    logger.info("[Zoo] H_%d for p=%d: %d relators", m, p, len(relators))
    return Presentation(
        generators=tuple(letter(i) for i in range(m)) + (T_LETTER,),
        relators=tuple(relators),
        name=f"H_{m} for G({p}, c)",
    )


def gen_Gn_truncation(
    p: int,
    c_schedule: Sequence[int],
    n: int,
    N: int,
    budget: Optional[int] = None,
) -> Presentation:
    """G_n restricted to a_-N..a_N: a_i^p, commutators of spread ≤ l for l ≤ n, a_i^t = a_(i+1)."""
    _check_prime(p)
    if not 0 <= N <= 12:
        raise BadParameter("N must lie in [0, 12]")
    if n < 0:
        raise BadParameter("n must be nonnegative")
    _check_schedule(c_schedule, n)
    budget = budget if budget is not None else SETTINGS.eps_budget

    def letter(i: int) -> str:
        return chr(97 + i + N)

    def spread(tup: tuple[int, ...]) -> int:
        return max(tup) - min(tup)

    indices = range(-N, N + 1)
    relators = [letter(i) * p for i in indices]
    relators += _commutator_relators(indices, letter, c_schedule, n, spread, budget)
    relators += [T_LETTER.upper() + letter(i) + T_LETTER + letter(i + 1).upper() for i in range(-N, N)]
    return Presentation(
        generators=tuple(letter(i) for i in indices) + (T_LETTER,),
        relators=tuple(relators),
        name=f"G_{n} truncation to [-{N}, {N}]",
    )


# ═══════════════════════════════════════════════════════════════════════
#  Torsion schedule
# ═══════════════════════════════════════════════════════════════════════

class RankExponent(BaseModel):
    rank: int
    r: int
    exponent: int
    regime: Literal["lower", "upper"]


class TorsionSchedule(BaseModel):
    p: int
    n0: int
    phi: list[Rational]
    delta_estimates: list[Rational]
    d: list[int]
    i: list[int]
    intervals: list[tuple[Rational, Rational]]
    exponents: list[RankExponent]

    def n_A(self, rank: int) -> int:
        for e in self.exponents:
            if e.rank == rank:
                return e.exponent
        raise BadParameter(f"rank {rank} is outside the materialized schedule (1..{self.i[-1]})")


def _least_power_at_least(p: int, bound: Fraction) -> int:
    value = 1
    while value < bound:
        value *= p
    return value


def _check_disjoint(intervals: Sequence[tuple[Fraction, Fraction]]) -> None:
    """Open intervals, pairwise disjoint; empty ones (lo ≥ hi) never overlap."""
    live = sorted((lo, hi, r) for r, (lo, hi) in enumerate(intervals, start=1) if lo < hi)
    for (lo1, hi1, r1), (lo2, hi2, r2) in zip(live, live[1:]):
        if lo2 < hi1:
            raise IntervalOverlap(f"ranks {r1} and {r2}: ({lo1}, {hi1}) meets ({lo2}, {hi2})")


def schedule_torsion_params(
    p: int,
    phi: Sequence[RationalLike],
    delta_estimates: Sequence[RationalLike],
    r_max: int,
    n0: int = 243,
) -> TorsionSchedule:
    """d_0 = 1, d_r = ⌈max(φ(r)²d_(r−1), φ(r)²δ_r, 2)⌉, i_r = ⌈φ(r)·d_r⌉.

    phi[r] is φ(r) for r = 0..r_max; delta_estimates[r − 1] is the supplied
    hyperbolicity estimate used at step r. Ranks i in (i_(r−1), i_r] get the
    least power of p above max(n0, d_r/i) while i < d_r/φ(r), and n0 above.
    """
    _check_prime(p)
    if n0 < p or _least_power_at_least(p, Fraction(n0)) != n0:
        raise BadParameter(f"n0 = {n0} is not a power of {p}")
    if r_max < 1:
        raise BadParameter("r_max must be at least 1")
    phi = [parse_rational(x) for x in phi]
    deltas = [parse_rational(x) for x in delta_estimates]
    if len(phi) < r_max + 1:
        raise PhiInadmissible(f"phi needs values for r = 0..{r_max}")
    if len(deltas) < r_max:
        raise BadParameter(f"delta estimates needed for r = 1..{r_max}")
    phi, deltas = phi[:r_max + 1], deltas[:r_max]
    if phi[0] != 0 or phi[1] != 1:
        raise PhiInadmissible("phi(0) must be 0 and phi(1) must be 1")
    if any(x < 2 for x in phi[2:]):
        raise PhiInadmissible("phi(r) must be at least 2 for r >= 2")
    if any(y < x for x, y in zip(phi, phi[1:])):
        raise PhiInadmissible("phi must be nondecreasing")

    d = [1]
    ranks = [0]
    for r in range(1, r_max + 1):
        f2 = phi[r] ** 2
        d.append(math.ceil(max(f2 * d[r - 1], f2 * deltas[r - 1], Fraction(2))))
        ranks.append(math.ceil(phi[r] * d[r]))

    intervals = [(Fraction(d[r]) / phi[r], phi[r] * d[r]) for r in range(1, r_max + 1)]
    _check_disjoint(intervals)

    exponents = []
    for r in range(1, r_max + 1):
        cut = Fraction(d[r]) / phi[r]
        for rank in range(ranks[r - 1] + 1, ranks[r] + 1):
            if rank < cut:
                exponents.append(RankExponent(
                    rank=rank, r=r, regime="lower",
                    exponent=_least_power_at_least(p, max(Fraction(n0), Fraction(d[r], rank))),
                ))
            else:
                exponents.append(RankExponent(rank=rank, r=r, regime="upper", exponent=n0))
    logger.info("[Zoo] torsion schedule d=%s i=%s", d, ranks)
    return TorsionSchedule(
        p=p,
        n0=n0,
        phi=phi,
        delta_estimates=deltas,
        d=d,
        i=ranks,
        intervals=intervals,
        exponents=exponents,
    )
