"""
freeword.py - Words in a finite alphabet with formal inverses

Generators are lowercase ASCII letters and the inverse of a generator is the
same letter in uppercase, so a word is a plain ``str``: "abAB" is the
commutator of a and b. The empty word renders as "1".

Everything here is pure and works on immutable values:
    - free_reduce / cyclic_reduce / invert / cyclic_shifts
    - symmetrize, which closes a relator set under inverses and cyclic shifts
    - small helpers used by the generators (powers, left-normed commutators)
"""

import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, NamedTuple

from errors import (
    BadParameter,
    EmptyRelator,
    NotCyclicallyReduced,
    NotSymmetrized,
    PresentationSyntaxError,
)

logger = logging.getLogger(__name__)

Word = str
IDENTITY_TEXT = "1"


def inverse_letter(letter: str) -> str:
    return letter.swapcase()


# ═══════════════════════════════════════════════════════════════════════
#  Alphabet
# ═══════════════════════════════════════════════════════════════════════

@dataclass(frozen=True)
class Alphabet:
    """Ordered generators S; the letters are S and S⁻¹ interleaved."""

    generators: tuple[str, ...]

    def __post_init__(self):
        gens = tuple(self.generators)
        object.__setattr__(self, "generators", gens)
        if not gens:
            raise BadParameter("an alphabet needs at least one generator")
        for g in gens:
            if len(g) != 1 or not ("a" <= g <= "z"):
                raise PresentationSyntaxError(f"generator {g!r} is not a lowercase ASCII letter")
        if len(set(gens)) != len(gens):
            raise PresentationSyntaxError(f"duplicate generators in {' '.join(gens)}")

    @classmethod
    def of(cls, spec: str | Iterable[str]) -> "Alphabet":
        """Alphabet.of("ab"), Alphabet.of("a b") and Alphabet.of(["a", "b"]) agree."""
        if isinstance(spec, str):
            spec = spec.replace(",", " ").split()
            if len(spec) == 1 and len(spec[0]) > 1:
                spec = list(spec[0])
        return cls(tuple(spec))

    @cached_property
    def letters(self) -> tuple[str, ...]:
        """Letters in shortlex order: a < A < b < B < ..."""
        out = []
        for g in self.generators:
            out.extend((g, inverse_letter(g)))
        return tuple(out)

    @cached_property
    def rank(self) -> dict[str, int]:
        return {letter: i for i, letter in enumerate(self.letters)}

    def __len__(self) -> int:
        return len(self.generators)

    def __contains__(self, letter: str) -> bool:
        return letter in self.rank

    def generator_index(self, letter: str) -> int:
        return self.rank[letter] // 2

    def check_word(self, w: Word, line: int | None = None) -> Word:
        for letter in w:
            if letter not in self.rank:
                raise PresentationSyntaxError(
                    f"letter {letter!r} of {render(w)!r} is not in alphabet "
                    f"{' '.join(self.generators)}",
                    line,
                )
        return w

    def shortlex_key(self, w: Word) -> tuple:
        rank = self.rank
        return (len(w), tuple(rank[c] for c in w))

    def exponent_sums(self, w: Word) -> tuple[int, ...]:
        sums = [0] * len(self.generators)
        for letter in w:
            i = self.generator_index(letter)
            sums[i] += 1 if letter.islower() else -1
        return tuple(sums)


# ═══════════════════════════════════════════════════════════════════════
#  Text form
# ═══════════════════════════════════════════════════════════════════════

def parse_word(text: str, alphabet: Alphabet | None = None, line: int | None = None) -> Word:
    """Parse the text form; "1" (or nothing) is the empty word. Spaces are ignored."""
    w = "".join(text.split())
    if w in ("", IDENTITY_TEXT):
        return ""
    for letter in w:
        if not ("a" <= letter.lower() <= "z"):
            raise PresentationSyntaxError(f"bad letter {letter!r} in word {text!r}", line)
    if alphabet is not None:
        alphabet.check_word(w, line)
    return w


def render(w: Word) -> str:
    return w if w else IDENTITY_TEXT


# ═══════════════════════════════════════════════════════════════════════
#  Free-group algebra
# ═══════════════════════════════════════════════════════════════════════

def invert(w: Word) -> Word:
    return w[::-1].swapcase()


def free_reduce(w: Word) -> Word:
    stack: list[str] = []
    for letter in w:
        if stack and stack[-1] == inverse_letter(letter):
            stack.pop()
        else:
            stack.append(letter)
    return "".join(stack)


def is_reduced(w: Word) -> bool:
    return all(w[i] != inverse_letter(w[i + 1]) for i in range(len(w) - 1))


def is_cyclically_reduced(w: Word) -> bool:
    if not is_reduced(w):
        return False
    return len(w) < 2 or w[0] != inverse_letter(w[-1])


def cyclic_reduce(w: Word) -> tuple[Word, Word]:
    """Return (core, conjugator) with conjugator·core·conjugator⁻¹ freely equal to w."""
    r = free_reduce(w)
    i = 0
    while len(r) - 2 * i >= 2 and r[i] == inverse_letter(r[len(r) - 1 - i]):
        i += 1
    return r[i:len(r) - i], r[:i]


def cyclic_shifts(w: Word) -> list[Word]:
    return [w[i:] + w[:i] for i in range(len(w))] if w else [""]


def multiply(*words: Word) -> Word:
    return free_reduce("".join(words))


def power(w: Word, k: int) -> Word:
    if k < 0:
        return free_reduce(invert(w) * (-k))
    return free_reduce(w * k)


def commutator(x: Word, y: Word) -> Word:
    """[x, y] = x⁻¹y⁻¹xy, freely reduced."""
    return multiply(invert(x), invert(y), x, y)


def left_normed_commutator(words: Iterable[Word]) -> Word:
    """[...[[w0, w1], w2], ..., wk]."""
    it = iter(words)
    try:
        acc = next(it)
    except StopIteration:
        return ""
    for w in it:
        acc = commutator(acc, w)
    return acc


def primitive_root(w: Word) -> tuple[Word, int]:
    """Shortest u with w ≡ u^k; k > 1 exactly when w is a proper power."""
    n = len(w)
    for p in range(1, n + 1):
        if n % p == 0 and w[:p] * (n // p) == w:
            return w[:p], n // p
    return w, 1


def iter_reduced_words(alphabet: Alphabet, max_length: int) -> Iterator[Word]:
    """All reduced words of length ≤ max_length, in shortlex order."""
    layer = [""]
    yield ""
    for _ in range(max_length):
        nxt = []
        for w in layer:
            for letter in alphabet.letters:
                if w and w[-1] == inverse_letter(letter):
                    continue
                nxt.append(w + letter)
        yield from nxt
        layer = nxt


# ═══════════════════════════════════════════════════════════════════════
#  Symmetrized relator sets
# ═══════════════════════════════════════════════════════════════════════

class Origin(NamedTuple):
    """Where a word of a symmetrized set comes from: shift `offset` of R or R⁻¹."""

    relator: int
    offset: int
    inverse: bool


@dataclass(frozen=True)
class SymmetrizedSet:
    """Relators closed under inversion and cyclic shift, deduplicated letter for letter."""

    words: tuple[Word, ...]
    origins: tuple[Origin, ...] = field(default=(), compare=False)
    relators: tuple[Word, ...] = field(default=(), compare=False)

    def __len__(self) -> int:
        return len(self.words)

    def __iter__(self) -> Iterator[Word]:
        return iter(self.words)

    def __contains__(self, w: Word) -> bool:
        return w in self.position

    @cached_property
    def position(self) -> dict[Word, int]:
        return {w: i for i, w in enumerate(self.words)}

    @cached_property
    def max_length(self) -> int:
        return max((len(w) for w in self.words), default=0)

    def origin(self, w: Word) -> Origin:
        if self.origins:
            return self.origins[self.position[w]]
        return Origin(self.position[w], 0, False)

    def verify(self) -> None:
        """Raise NotSymmetrized unless the set is nonempty and closed."""
        if not self.words:
            raise NotSymmetrized("empty relator set")
        members = self.position
        for w in self.words:
            if not w or not is_cyclically_reduced(w):
                raise NotSymmetrized(f"{render(w)!r} is not a cyclically reduced nonempty word")
            if invert(w) not in members or (w[1:] + w[:1]) not in members:
                raise NotSymmetrized(f"set is not closed under inversion and shift at {w!r}")


def symmetrize(relators: Iterable[Word]) -> SymmetrizedSet:
    """Close relators under inversion and cyclic shift, keeping first-seen origins."""
    relators = tuple(relators)
    seen: dict[Word, Origin] = {}
    for i, r in enumerate(relators):
        if not r:
            raise EmptyRelator(f"relator {i} is empty")
        if not is_cyclically_reduced(r):
            raise NotCyclicallyReduced(f"relator {i} ({r}) is not cyclically reduced")
        for inverse, base in ((False, r), (True, invert(r))):
            for offset in range(len(base)):
                shifted = base[offset:] + base[:offset]
                if shifted not in seen:
                    seen[shifted] = Origin(i, offset, inverse)
    words = tuple(sorted(seen, key=lambda w: (len(w), w)))
    logger.debug("[Symmetrize] %d relators -> %d words", len(relators), len(words))
    return SymmetrizedSet(
        words=words,
        origins=tuple(seen[w] for w in words),
        relators=relators,
    )
