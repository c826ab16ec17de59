"""
dehn.py - Dehn's algorithm for C'(μ) presentations, μ ≤ 1/6

The word is treated cyclically: after free and cyclic reduction, the doubled
word is scanned for a prefix U of some relator R with |U| > |R|/2, U is
replaced by the inverse of the rest of R, and the loop repeats until no such
subword is left. The word is trivial in the group iff nothing remains.

Every applied relator is a cell of the implied van Kampen diagram, which
gives the area proxy used by the area and cell-bound checks.
"""

import logging
from fractions import Fraction
from functools import lru_cache
from typing import Optional

from pydantic import BaseModel

from cancellation import check_classical
from errors import NotSmallCancellation, TraceNotClosed
from exact import Rational, RationalLike, parse_rational
from freeword import SymmetrizedSet, Word, cyclic_reduce, free_reduce, invert, render

logger = logging.getLogger(__name__)

MU_LIMIT = Fraction(1, 6)


class DehnStep(BaseModel):
    position: int
    relator: int
    relator_word: str
    replaced_length: int
    replacement_length: int


class DehnTrace(BaseModel):
    original: str
    steps: list[DehnStep]
    cells_used: int
    perimeter_sum: int
    final: str

    @property
    def trivial(self) -> bool:
        return self.final == ""

    def describe(self) -> str:
        lines = [f"start  {render(cyclic_reduce(self.original)[0])}"]
        for i, st in enumerate(self.steps, start=1):
            lines.append(
                f"step {i}: at {st.position} replace {st.replaced_length} letters of "
                f"{st.relator_word} by {st.replacement_length}"
            )
        lines.append(f"final  {render(self.final)}")
        return "\n".join(lines)


class DehnSolver:
    """Prefix index over a symmetrized set; built once, read-only afterwards."""

    def __init__(self, s: SymmetrizedSet, mu: RationalLike = MU_LIMIT):
        mu = parse_rational(mu)
        if mu > MU_LIMIT:
            raise NotSmallCancellation(f"Dehn's algorithm is only sound for mu <= 1/6, got {mu}")
        verdict = check_classical(s, mu)
        if not verdict.ok:
            raise NotSmallCancellation(
                f"not C'({mu}): piece {verdict.violating_piece!r} in {verdict.violating_word!r}"
            )
        self.s = s
        self.mu = mu
        # prefix -> (gain 2|U| - |R|, index of R in s)
        self.index: dict[Word, tuple[int, int]] = {}
        for k, w in enumerate(s.words):
            for length in range(len(w) // 2 + 1, len(w) + 1):
                prefix = w[:length]
                gain = 2 * length - len(w)
                held = self.index.get(prefix)
                if held is None or (gain, -k) > (held[0], -held[1]):
                    self.index[prefix] = (gain, k)
        self.longest = s.max_length
        logger.debug("[Dehn] prefix index holds %d entries", len(self.index))

    def _best_match(self, c: Word) -> Optional[tuple[int, int, int]]:
        """(position, length, relator index) of the best match in the cyclic word c."""
        n = len(c)
        doubled = c + c
        best = None
        best_key = None
        for pos in range(n):
            for length in range(1, min(n, self.longest) + 1):
                hit = self.index.get(doubled[pos:pos + length])
                if hit is None:
                    continue
                gain, k = hit
                key = (gain, -pos, -k)
                if best_key is None or key > best_key:
                    best_key, best = key, (pos, length, k)
        return best

    def reduce(self, w: Word) -> DehnTrace:
        current, _ = cyclic_reduce(w)
        steps: list[DehnStep] = []
        perimeter = 0
        while current:
            match = self._best_match(current)
            if match is None:
                break
            pos, length, k = match
            relator = self.s.words[k]
            rotated = current[pos:] + current[:pos]
            replacement = invert(relator[length:])
            current, _ = cyclic_reduce(replacement + rotated[length:])
            steps.append(DehnStep(
                position=pos,
                relator=k,
                relator_word=relator,
                replaced_length=length,
                replacement_length=len(replacement),
            ))
            perimeter += len(relator)
            logger.debug("[Dehn] step %d at %d: %d letters left", len(steps), pos, len(current))
        return DehnTrace(
            original=w,
            steps=steps,
            cells_used=len(steps),
            perimeter_sum=perimeter,
            final=current,
        )

    def is_trivial(self, w: Word) -> bool:
        return self.reduce(w).trivial

    def equal(self, u: Word, v: Word) -> bool:
        return self.is_trivial(free_reduce(u + invert(v)))


@lru_cache(maxsize=64)
def solver_for(s: SymmetrizedSet, mu: Fraction = MU_LIMIT) -> DehnSolver:
    return DehnSolver(s, mu)


def dehn_reduce(w: Word, s: SymmetrizedSet, mu: RationalLike = MU_LIMIT) -> DehnTrace:
    return solver_for(s, parse_rational(mu)).reduce(w)


def is_trivial(w: Word, s: SymmetrizedSet, mu: RationalLike = MU_LIMIT) -> bool:
    return solver_for(s, parse_rational(mu)).is_trivial(w)


def equal(u: Word, v: Word, s: SymmetrizedSet, mu: RationalLike = MU_LIMIT) -> bool:
    return solver_for(s, parse_rational(mu)).equal(u, v)


# ═══════════════════════════════════════════════════════════════════════
#  Area checks on closed traces
# ═══════════════════════════════════════════════════════════════════════

class AreaCheck(BaseModel):
    holds: bool
    lhs: int
    rhs: Rational


class CellBoundCheck(BaseModel):
    holds: bool
    lhs: int
    rhs: Rational
    weakest_cell: Optional[int] = None


def _require_closed(trace: DehnTrace) -> None:
    if trace.final:
        raise TraceNotClosed(f"trace ends in {trace.final!r}, not the empty word")


def check_area_inequality(trace: DehnTrace, original: Word, mu: RationalLike) -> AreaCheck:
    """Advisory: |original| > (1 − 6μ)·(sum of cell perimeters)."""
    _require_closed(trace)
    mu = parse_rational(mu)
    rhs = (1 - 6 * mu) * trace.perimeter_sum
    holds = len(original) > rhs
    if not holds:
        logger.warning(
            "[Dehn] area inequality fails (%d <= %s); the trace's diagram may not be reduced",
            len(original), rhs,
        )
    return AreaCheck(holds=holds, lhs=len(original), rhs=rhs)


def check_cell_bound(trace: DehnTrace, original: Word, mu: RationalLike) -> CellBoundCheck:
    """Advisory: |original| > (1 − 3μ)·|∂Π| for every applied cell Π."""
    _require_closed(trace)
    mu = parse_rational(mu)
    if not trace.steps:
        return CellBoundCheck(holds=True, lhs=len(original), rhs=Fraction(0))
    weakest = max(trace.steps, key=lambda st: len(st.relator_word))
    rhs = (1 - 3 * mu) * len(weakest.relator_word)
    holds = len(original) > rhs
    if not holds:
        logger.warning("[Dehn] cell bound fails for %s", weakest.relator_word)
    return CellBoundCheck(
        holds=holds, lhs=len(original), rhs=rhs, weakest_cell=weakest.relator,
    )
