"""
presentation.py - Group presentations as data

A Presentation is an alphabet plus cyclically reduced relators, optionally
split into numbered tiers for graded families. This module owns:
    - the line-oriented .pres file format (parse / serialize)
    - length spectra and sparseness witnesses for them
    - coset enumeration (Todd-Coxeter, via sympy) as a ground-truth oracle
      for finite quotients

File format:
    # comment
    alphabet: a b
    name: genus-1 surface
    tier 1:
    rel: abAB
"""

import logging
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, RootModel, model_validator
from sympy.combinatorics.fp_groups import FpGroup, coset_enumeration_r
from sympy.combinatorics.free_groups import free_group

from config import SETTINGS
from errors import (
    BadLambda,
    BadParameter,
    EmptyRelator,
    NotCyclicallyReduced,
    PresentationSyntaxError,
)
from exact import Rational, RationalLike, parse_rational
from freeword import Alphabet, Word, is_cyclically_reduced, parse_word, render

logger = logging.getLogger(__name__)


# ═══════════════════════════════════════════════════════════════════════
#  Presentation
# ═══════════════════════════════════════════════════════════════════════

class Presentation(BaseModel):
    """⟨S | R⟩ with optional tiers R_0, R_1, ... aligned with the relators."""

    model_config = ConfigDict(frozen=True)

    generators: tuple[str, ...]
    relators: tuple[str, ...] = ()
    tiers: Optional[tuple[int, ...]] = None
    name: str = ""

    @model_validator(mode="after")
    def _check_relators(self):
        alphabet = Alphabet(self.generators)
        for i, r in enumerate(self.relators):
            if not r:
                raise EmptyRelator(f"relator {i} is empty")
            alphabet.check_word(r)
            if not is_cyclically_reduced(r):
                raise NotCyclicallyReduced(f"relator {i} ({r}) is not cyclically reduced")
        if self.tiers is not None and len(self.tiers) != len(self.relators):
            raise BadParameter("every relator needs exactly one tier index")
        return self

    @cached_property
    def alphabet(self) -> Alphabet:
        return Alphabet(self.generators)

    @property
    def max_relator_length(self) -> int:
        return max((len(r) for r in self.relators), default=0)

    def tier_groups(self) -> dict[int, list[Word]]:
        """Relators by tier, tiers ascending; untiered presentations are tier 0."""
        tiers = self.tiers if self.tiers is not None else (0,) * len(self.relators)
        groups: dict[int, list[Word]] = {}
        for t, r in sorted(zip(tiers, self.relators), key=lambda pair: pair[0]):
            groups.setdefault(t, []).append(r)
        return groups

    def up_to_tier(self, tier: int) -> "Presentation":
        """Relators of tiers ≤ tier, i.e. the group G_tier of a graded family."""
        if self.tiers is None:
            return self
        kept = [(t, r) for t, r in zip(self.tiers, self.relators) if t <= tier]
        return Presentation(
            generators=self.generators,
            relators=tuple(r for _, r in kept),
            tiers=tuple(t for t, _ in kept),
            name=f"{self.name} (tiers <= {tier})".strip(),
        )


def parse(text: str | bytes) -> Presentation:
    """Parse the .pres format; errors carry the 1-based line number."""
    if isinstance(text, bytes):
        text = text.decode("utf-8")

    generators: Optional[tuple[str, ...]] = None
    alphabet: Optional[Alphabet] = None
    name = ""
    relators: list[str] = []
    tiers: list[Optional[int]] = []
    current_tier: Optional[int] = None
    saw_tier = False

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        head, sep, rest = line.partition(":")
        if not sep:
            raise PresentationSyntaxError(f"expected 'key: value', got {line!r}", lineno)
        head = head.strip().lower()
        rest = rest.strip()

        if head == "alphabet":
            if generators is not None:
                raise PresentationSyntaxError("alphabet declared twice", lineno)
            generators = tuple(rest.split())
            alphabet = Alphabet(generators)
            continue
        if alphabet is None:
            raise PresentationSyntaxError("the first entry must be 'alphabet:'", lineno)
        if head == "name":
            name = rest
        elif head.startswith("tier"):
            parts = head.split()
            if len(parts) != 2 or not parts[1].isdigit() or rest:
                raise PresentationSyntaxError(f"bad tier header {line!r}", lineno)
            current_tier = int(parts[1])
            saw_tier = True
        elif head == "rel":
            w = parse_word(rest, alphabet, lineno)
            if not w:
                raise EmptyRelator(f"line {lineno}: relator is empty")
            if not is_cyclically_reduced(w):
                raise NotCyclicallyReduced(f"line {lineno}: {w} is not cyclically reduced")
            relators.append(w)
            tiers.append(current_tier)
        else:
            raise PresentationSyntaxError(f"unknown key {head!r}", lineno)

    if generators is None:
        raise PresentationSyntaxError("missing 'alphabet:' line", 1)
    return Presentation(
        generators=generators,
        relators=tuple(relators),
        tiers=tuple(t if t is not None else 0 for t in tiers) if saw_tier else None,
        name=name,
    )


def serialize(p: Presentation) -> str:
    lines = [f"alphabet: {' '.join(p.generators)}"]
    if p.name:
        lines.append(f"name: {p.name}")
    if p.tiers is None:
        lines.extend(f"rel: {r}" for r in p.relators)
    else:
        for tier, rels in p.tier_groups().items():
            lines.append(f"tier {tier}:")
            lines.extend(f"rel: {r}" for r in rels)
    return "\n".join(lines) + "\n"


def load(path) -> Presentation:
    with open(path, "rb") as fh:
        return parse(fh.read())


# ═══════════════════════════════════════════════════════════════════════
#  Length spectra and sparseness
# ═══════════════════════════════════════════════════════════════════════

class LengthSpectrum(RootModel[tuple[int, ...]]):
    """Sorted multiset of relator lengths; serializes as a JSON array."""

    @model_validator(mode="after")
    def _sorted(self):
        if any(n < 1 for n in self.root):
            raise BadParameter("lengths must be positive")
        if list(self.root) != sorted(self.root):
            raise BadParameter("a length spectrum is sorted ascending")
        return self

    @classmethod
    def of(cls, lengths: Iterable[int]) -> "LengthSpectrum":
        return cls(tuple(sorted(lengths)))

    def __iter__(self):
        return iter(self.root)

    def __len__(self) -> int:
        return len(self.root)


def length_spectrum(p: Presentation) -> LengthSpectrum:
    return LengthSpectrum.of(len(r) for r in p.relators)


class SparsenessWitness(BaseModel):
    a: int
    b: int
    ratio: Rational


def sparseness_witness(
    lengths: LengthSpectrum | Iterable[int],
    lam: RationalLike,
    window: tuple[int, int],
) -> Optional[SparsenessWitness]:
    """An integer interval [a, b] ⊆ window avoiding the lengths with a/b < lam.

    Among the maximal gaps of the window the one with the smallest ratio is
    returned (ties: leftmost); None when even that one is too wide a ratio.
    """
    lam = parse_rational(lam)
    if not 0 < lam < 1:
        raise BadLambda(f"lambda must lie in (0, 1), got {lam}")
    lo, hi = window
    if lo < 1 or hi < lo:
        raise BadParameter(f"window [{lo}, {hi}] must satisfy 1 <= lo <= hi")

    inside = sorted({n for n in lengths if lo <= n <= hi})
    fences = [lo - 1, *inside, hi + 1]
    best: Optional[SparsenessWitness] = None
    for left, right in zip(fences, fences[1:]):
        a, b = left + 1, right - 1
        if a > b:
            continue
        ratio = Fraction(a, b)
        if best is None or ratio < best.ratio:
            best = SparsenessWitness(a=a, b=b, ratio=ratio)
    if best is None or best.ratio >= lam:
        return None
    return best


class SweepEntry(BaseModel):
    lam: Rational
    witness: Optional[SparsenessWitness]


class SparseSweep(BaseModel):
    window: tuple[int, int]
    lambda_floor: Rational
    entries: list[SweepEntry]
    sparse_up_to: Optional[int] = Field(
        description="hi of the window when every tested lambda has a witness, else null"
    )

    @property
    def ok(self) -> bool:
        return self.sparse_up_to is not None


def sparseness_sweep(
    lengths: LengthSpectrum | Iterable[int],
    lambda_floor: RationalLike,
    window: Optional[tuple[int, int]] = None,
) -> SparseSweep:
    """Test lambda = 1/2, 1/4, 1/8, ... down to lambda_floor."""
    lengths = list(lengths)
    floor = parse_rational(lambda_floor)
    if not 0 < floor < 1:
        raise BadLambda(f"lambda floor must lie in (0, 1), got {floor}")
    if window is None:
        window = (1, max(lengths, default=1))

    entries = []
    lam = Fraction(1, 2)
    while lam >= floor:
        entries.append(SweepEntry(lam=lam, witness=sparseness_witness(lengths, lam, window)))
        lam /= 2
    sparse = all(e.witness is not None for e in entries)
    logger.info("[Sparse] %d lambdas tested, sparse=%s", len(entries), sparse)
    return SparseSweep(
        window=window,
        lambda_floor=floor,
        entries=entries,
        sparse_up_to=window[1] if sparse else None,
    )


# ═══════════════════════════════════════════════════════════════════════
#  Coset enumeration
# ═══════════════════════════════════════════════════════════════════════

class CosetTable:
    """A closed, standardized coset table; columns follow alphabet.letters."""

    def __init__(self, alphabet: Alphabet, table: list[list[int]]):
        self.alphabet = alphabet
        self.table = table

    @property
    def index(self) -> int:
        return len(self.table)

    def trace(self, w: Word, start: int = 0) -> int:
        coset = start
        rank = self.alphabet.rank
        for letter in w:
            coset = self.table[coset][rank[letter]]
        return coset


def _to_sympy(p: Presentation):
    F, *gens = free_group(", ".join(p.generators))
    lookup = {}
    for g, sym in zip(p.generators, gens):
        lookup[g] = sym
        lookup[g.upper()] = sym**-1

    def element(w: Word):
        out = F.identity
        for letter in w:
            out = out * lookup[letter]
        return out

    return F, element


def coset_table(
    p: Presentation,
    subgroup_gens: Iterable[Word] = (),
    max_cosets: Optional[int] = None,
) -> Optional[CosetTable]:
    """Run HLT enumeration; None when it needs more than max_cosets cosets."""
    max_cosets = max_cosets if max_cosets is not None else SETTINGS.max_cosets
    if max_cosets < 1:
        raise BadParameter("max_cosets must be at least 1")
    for w in subgroup_gens:
        p.alphabet.check_word(w)

    F, element = _to_sympy(p)
    group = FpGroup(F, [element(r) for r in p.relators])
    try:
        C = coset_enumeration_r(group, [element(w) for w in subgroup_gens], max_cosets=max_cosets)
    except ValueError as exc:
        # sympy signals an exhausted coset limit with ValueError
        logger.info("[Coset] inconclusive: %s", exc)
        return None
    C.compress()
    C.standardize()
    table = [list(row) for row in C.table]
    logger.info("[Coset] index %d", len(table))
    return CosetTable(p.alphabet, table)


class CosetResult(BaseModel):
    status: Literal["COMPLETE", "INCONCLUSIVE"]
    order: Optional[int] = Field(description="subgroup index; the group order for a trivial subgroup")
    max_cosets: int


def coset_enumerate(
    p: Presentation,
    subgroup_gens: Iterable[Word] = (),
    max_cosets: Optional[int] = None,
) -> CosetResult:
    max_cosets = max_cosets if max_cosets is not None else SETTINGS.max_cosets
    table = coset_table(p, subgroup_gens, max_cosets)
    if table is None:
        return CosetResult(status="INCONCLUSIVE", order=None, max_cosets=max_cosets)
    return CosetResult(status="COMPLETE", order=table.index, max_cosets=max_cosets)


def describe(p: Presentation) -> str:
    rels = ", ".join(render(r) for r in p.relators) or "-"
    return f"<{' '.join(p.generators)} | {rels}>"
