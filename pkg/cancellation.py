"""
cancellation.py - Small-cancellation analysis

Classical pieces and the C'(μ) condition, ε-pieces and C(ε, μ, ρ) over a base
group given by an equality oracle, and validation of finite prefixes of
graded schedules Q(α, K).

All arithmetic on ratios is exact (fractions.Fraction).
"""

import logging
import os
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from itertools import groupby
from typing import TYPE_CHECKING, Literal, Optional

from pydantic import BaseModel, Field

from config import SETTINGS
from errors import BadParameter, BudgetExceeded, MuTooLarge, NotSmallCancellation
from exact import Rational, RationalLike, parse_rational
from freeword import (
    SymmetrizedSet,
    Word,
    invert,
    iter_reduced_words,
    primitive_root,
    symmetrize,
)
from presentation import Presentation

if TYPE_CHECKING:
    from cayley import EqualityOracle

logger = logging.getLogger(__name__)

PROPER_POWER_NOTE = (
    "proper-power relators present: a cyclic shift equal to the word itself "
    "yields no piece under the distinct-words reading"
)


# ═══════════════════════════════════════════════════════════════════════
#  Report models
# ═══════════════════════════════════════════════════════════════════════

class Occurrence(BaseModel):
    relator: int
    offset: int
    inverse: bool = False


class PieceRecord(BaseModel):
    piece: str
    word_a: str
    word_b: str
    occurrence_a: Occurrence
    occurrence_b: Occurrence


class PieceReport(BaseModel):
    pieces: list[PieceRecord]
    max_ratio: Rational
    max_piece_length: int
    relator_count: int
    piece_count: int
    listed: int
    notes: list[str] = []


class ClassicalCheck(BaseModel):
    ok: bool
    mu: Rational
    max_ratio: Rational
    violating_piece: Optional[str] = None
    violating_word: Optional[str] = None
    notes: list[str] = []


# ═══════════════════════════════════════════════════════════════════════
#  Classical pieces
# ═══════════════════════════════════════════════════════════════════════

def _lcp(u: Word, v: Word) -> int:
    n = min(len(u), len(v))
    i = 0
    while i < n and u[i] == v[i]:
        i += 1
    return i


def _occurrence(s: SymmetrizedSet, w: Word) -> Occurrence:
    origin = s.origin(w)
    return Occurrence(relator=origin.relator, offset=origin.offset, inverse=origin.inverse)


def _bucket_pairs(bucket: list[Word], limit: Optional[int]) -> tuple[int, list[tuple[Word, Word, int]]]:
    """All pairs of one first-letter bucket with their common prefix length."""
    adjacent = [_lcp(bucket[i], bucket[i + 1]) for i in range(len(bucket) - 1)]
    pairs = []
    count = 0
    for i in range(len(bucket)):
        run = None
        for j in range(i + 1, len(bucket)):
            step = adjacent[j - 1]
            run = step if run is None else min(run, step)
            count += 1
            if limit is None or len(pairs) < limit:
                pairs.append((bucket[i], bucket[j], run))
    return count, pairs


def longest_pieces(s: SymmetrizedSet) -> dict[Word, int]:
    """For each word W of s, the length of the longest piece that is a prefix of W.

    In lexicographic order the longest common prefix of W with any other word
    is attained at a neighbour, so two comparisons per word suffice.
    """
    ordered = sorted(s.words)
    best = {w: 0 for w in ordered}
    for u, v in zip(ordered, ordered[1:]):
        k = _lcp(u, v)
        if k > best[u]:
            best[u] = k
        if k > best[v]:
            best[v] = k
    return best


def _notes(s: SymmetrizedSet) -> list[str]:
    relators = s.relators or s.words
    if any(primitive_root(r)[1] > 1 for r in relators):
        logger.warning("[Pieces] %s", PROPER_POWER_NOTE)
        return [PROPER_POWER_NOTE]
    return []


def enumerate_pieces(
    s: SymmetrizedSet,
    threads: Optional[int] = None,
    list_limit: Optional[int] = None,
) -> PieceReport:
    """Maximal common prefixes of every unordered pair of distinct words of s.

    Pairs with an empty common prefix start with different letters, so the
    pair space splits into first-letter buckets scanned in parallel. Output
    order is bucket order regardless of the thread count.
    """
    s.verify()
    threads = threads or SETTINGS.threads or os.cpu_count() or 1
    ordered = sorted(s.words)
    buckets = [list(g) for _, g in groupby(ordered, key=lambda w: w[0])]

    with ThreadPoolExecutor(max_workers=threads) as pool:
        results = list(pool.map(lambda b: _bucket_pairs(b, list_limit), buckets))

    pieces: list[PieceRecord] = []
    piece_count = 0
    for count, pairs in results:
        piece_count += count
        for u, v, k in pairs:
            if list_limit is not None and len(pieces) >= list_limit:
                break
            pieces.append(PieceRecord(
                piece=u[:k],
                word_a=u,
                word_b=v,
                occurrence_a=_occurrence(s, u),
                occurrence_b=_occurrence(s, v),
            ))

    best = longest_pieces(s)
    max_ratio = max((Fraction(best[w], len(w)) for w in s.words), default=Fraction(0))
    logger.info("[Pieces] %d words, %d pieces, max ratio %s", len(s), piece_count, max_ratio)
    return PieceReport(
        pieces=pieces,
        max_ratio=max_ratio,
        max_piece_length=max(best.values(), default=0),
        relator_count=len(s.relators) if s.relators else len(s),
        piece_count=piece_count,
        listed=len(pieces),
        notes=_notes(s),
    )


def check_classical(s: SymmetrizedSet, mu: RationalLike) -> ClassicalCheck:
    """C'(μ): every piece inside a word R of s is strictly shorter than μ|R|."""
    mu = parse_rational(mu)
    if not 0 < mu < 1:
        raise BadParameter(f"mu must lie in (0, 1), got {mu}")
    s.verify()
    best = longest_pieces(s)

    worst_word, worst_ratio = None, Fraction(0)
    for w in s.words:
        ratio = Fraction(best[w], len(w))
        if ratio > worst_ratio:
            worst_word, worst_ratio = w, ratio

    ok = worst_ratio < mu
    return ClassicalCheck(
        ok=ok,
        mu=mu,
        max_ratio=worst_ratio,
        violating_piece=None if ok else worst_word[:best[worst_word]],
        violating_word=None if ok else worst_word,
        notes=_notes(s),
    )


def delta_bound(max_length: int, mu: Fraction) -> Fraction:
    """12·max|R| / (1 − 6μ)²."""
    return Fraction(12 * max_length) / (1 - 6 * mu) ** 2


def hyperbolicity_bound(p: Presentation, mu: RationalLike) -> Fraction:
    """Upper bound on the hyperbolicity constant of a C'(μ) presentation, μ < 1/6."""
    mu = parse_rational(mu)
    if mu >= Fraction(1, 6):
        raise MuTooLarge(f"the bound needs mu < 1/6, got {mu}")
    if mu <= 0:
        raise BadParameter(f"mu must be positive, got {mu}")
    if p.relators:
        verdict = check_classical(symmetrize(p.relators), mu)
        if not verdict.ok:
            raise NotSmallCancellation(
                f"piece {verdict.violating_piece!r} of {verdict.violating_word!r} "
                f"breaks C'({mu}) (ratio {verdict.max_ratio})"
            )
    return delta_bound(p.max_relator_length, mu)


# ═══════════════════════════════════════════════════════════════════════
#  Tiered classical check
# ═══════════════════════════════════════════════════════════════════════

class TierCheck(BaseModel):
    tier: int
    relators: int
    lam: Rational
    ok: bool
    max_ratio: Rational


class TieredCheck(BaseModel):
    ok: bool
    union: ClassicalCheck
    tiers: list[TierCheck]


def check_tiered_classical(
    p: Presentation,
    lam: RationalLike,
    tier_lams: Optional[dict[int, RationalLike]] = None,
) -> TieredCheck:
    """C'(λ) on the union of all tiers plus C'(λ_n) inside each tier."""
    union = check_classical(symmetrize(p.relators), lam)
    tier_lams = tier_lams or {}
    tiers = []
    for tier, rels in p.tier_groups().items():
        tier_lam = parse_rational(tier_lams.get(tier, lam))
        verdict = check_classical(symmetrize(rels), tier_lam)
        tiers.append(TierCheck(
            tier=tier, relators=len(rels), lam=tier_lam,
            ok=verdict.ok, max_ratio=verdict.max_ratio,
        ))
    return TieredCheck(ok=union.ok and all(t.ok for t in tiers), union=union, tiers=tiers)


# ═══════════════════════════════════════════════════════════════════════
#  Geodesic words and ε-pieces over a base group
# ═══════════════════════════════════════════════════════════════════════

class GeodesicVerdict(BaseModel):
    status: Literal["GEODESIC", "NOT_GEODESIC", "UNKNOWN"]
    word: str
    witness: Optional[str] = None


def is_geodesic_in(
    w: Word,
    base: "EqualityOracle",
    radius_cap: int,
    oracle_budget: Optional[int] = None,
) -> GeodesicVerdict:
    """Decide whether some shorter word equals w in the base group."""
    # cayley imports dehn, which imports this module
    from cayley import build_ball

    if len(w) > radius_cap:
        raise BadParameter(f"|w| = {len(w)} exceeds radius cap {radius_cap}")
    if not w:
        return GeodesicVerdict(status="GEODESIC", word=w)
    try:
        ball = build_ball(base, len(w) - 1, oracle_budget=oracle_budget)
    except BudgetExceeded:
        return GeodesicVerdict(status="UNKNOWN", word=w)
    for rep in ball.reps:
        if base.equal(w, rep):
            return GeodesicVerdict(status="NOT_GEODESIC", word=w, witness=rep)
    return GeodesicVerdict(status="GEODESIC", word=w)


class EpsPiece(BaseModel):
    piece: str
    word: str
    partner: str
    partner_prefix: str
    Y: str
    Z: str


class EpsPieceReport(BaseModel):
    eps: int
    mu: Rational
    rho: Optional[Rational] = None
    pieces: list[EpsPiece]
    max_ratio: Rational
    violation: bool
    violating: Optional[EpsPiece] = None
    rho_ok: Optional[bool] = None
    geodesic_failures: list[GeodesicVerdict] = []
    ok: bool
    oracle_calls: int


class _Budget:
    def __init__(self, limit: int):
        self.limit = limit
        self.used = 0

    def spend(self, n: int = 1) -> None:
        self.used += n
        if self.used > self.limit:
            raise BudgetExceeded(f"eps-piece search exceeded {self.limit} oracle calls")


def _longest_eps_piece(
    r: Word,
    r2: Word,
    conjugators: list[Word],
    base: "EqualityOracle",
    budget: _Budget,
) -> Optional[EpsPiece]:
    best: Optional[EpsPiece] = None
    prefixes2 = [r2[:k] for k in range(len(r2) + 1)]

    for y in conjugators:
        budget.spend()
        if base.equal(y + r + invert(y), r2):
            continue
        if base.exact_keys:
            budget.spend(len(prefixes2))
            by_key: dict = {}
            for u2 in prefixes2:
                by_key.setdefault(base.key(u2), u2)
        for z in conjugators:
            for k in range(len(r), 0, -1):
                if best is not None and k <= len(best.piece):
                    break
                u = r[:k]
                target = y + u + z
                match = None
                if base.exact_keys:
                    budget.spend()
                    match = by_key.get(base.key(target))
                else:
                    for u2 in prefixes2:
                        budget.spend()
                        if base.equal(u2, target):
                            match = u2
                            break
                if match is not None:
                    best = EpsPiece(piece=u, word=r, partner=r2, partner_prefix=match, Y=y, Z=z)
                    break
    return best


def find_eps_pieces(
    s: SymmetrizedSet,
    eps: int,
    mu: RationalLike,
    base: "EqualityOracle",
    rho: Optional[RationalLike] = None,
    budget: Optional[int] = None,
    check_geodesic: bool = False,
) -> EpsPieceReport:
    """ε-pieces of s over the base group and the C(ε, μ, ρ) verdict.

    For every ordered pair (R, R') the longest prefix U of R with
    U' = YUZ in the base group for a prefix U' of R' and |Y|, |Z| ≤ ε is
    kept, where YRY⁻¹ ≠ R' in the base group. Y and Z range over all reduced
    words of length ≤ ε.
    """
    mu = parse_rational(mu)
    if eps < 0:
        raise BadParameter("eps must be nonnegative")
    if not 0 < mu < 1:
        raise BadParameter(f"mu must lie in (0, 1), got {mu}")
    s.verify()
    spend = _Budget(budget if budget is not None else SETTINGS.eps_budget)
    conjugators = list(iter_reduced_words(base.alphabet, eps))
    calls_before = base.calls

    pieces = []
    for r in s.words:
        for r2 in s.words:
            found = _longest_eps_piece(r, r2, conjugators, base, spend)
            if found is not None:
                pieces.append(found)

    best_ratio, violating = Fraction(0), None
    for piece in pieces:
        ratio = Fraction(len(piece.piece), len(piece.word))
        if ratio > best_ratio:
            best_ratio = ratio
            if ratio >= mu and violating is None:
                violating = piece
    violation = best_ratio >= mu
    if violation and violating is None:
        violating = max(pieces, key=lambda e: Fraction(len(e.piece), len(e.word)))

    rho_value = parse_rational(rho) if rho is not None else None
    rho_ok = None if rho_value is None else all(len(w) >= rho_value for w in s.words)

    failures = []
    if check_geodesic:
        for w in s.words:
            verdict = is_geodesic_in(w, base, len(w))
            if verdict.status != "GEODESIC":
                failures.append(verdict)

    ok = not violation and rho_ok is not False and not failures
    logger.info("[EpsPieces] eps=%d: %d pieces, max ratio %s", eps, len(pieces), best_ratio)
    return EpsPieceReport(
        eps=eps,
        mu=mu,
        rho=rho_value,
        pieces=pieces,
        max_ratio=best_ratio,
        violation=violation,
        violating=violating,
        rho_ok=rho_ok,
        geodesic_failures=failures,
        ok=ok,
        oracle_calls=base.calls - calls_before,
    )


# ═══════════════════════════════════════════════════════════════════════
#  Graded schedules Q(α, K)
# ═══════════════════════════════════════════════════════════════════════

class ScheduleTier(BaseModel):
    epsilon: int = Field(ge=0)
    mu: Rational
    rho: Rational
    max_relator_len: int = Field(ge=1)


class GradedSchedule(BaseModel):
    """Finite prefix n = 1..N of a graded schedule."""

    alpha: Rational = Fraction(1, 100)
    K: Rational = Fraction(10**6)
    tiers: list[ScheduleTier] = Field(min_length=1)


class ScheduleViolation(BaseModel):
    tier: int
    clause: Literal["mu<=alpha", "mu*rho>K*eps", "eps_next>8*maxlen", "mu_range", "rho_positive"]
    detail: str


class ScheduleVerdict(BaseModel):
    ok: bool
    violations: list[ScheduleViolation]
    mu_nonincreasing: bool
    delta_estimates: list[int] = Field(description="per tier, the bound δ_n ≤ 4·max_relator_len_n")


def check_graded_schedule(g: GradedSchedule) -> ScheduleVerdict:
    violations = []
    tiers = g.tiers
    for n, t in enumerate(tiers, start=1):
        if not 0 < t.mu < 1:
            violations.append(ScheduleViolation(tier=n, clause="mu_range", detail=f"mu_{n} = {t.mu}"))
        if t.rho <= 0:
            violations.append(ScheduleViolation(tier=n, clause="rho_positive", detail=f"rho_{n} = {t.rho}"))
        if t.mu > g.alpha:
            violations.append(ScheduleViolation(
                tier=n, clause="mu<=alpha", detail=f"mu_{n} = {t.mu} > alpha = {g.alpha}",
            ))
        if not t.mu * t.rho > g.K * t.epsilon:
            violations.append(ScheduleViolation(
                tier=n, clause="mu*rho>K*eps",
                detail=f"mu_{n}*rho_{n} = {t.mu * t.rho} <= K*eps_{n} = {g.K * t.epsilon}",
            ))
        if n < len(tiers) and not tiers[n].epsilon > 8 * t.max_relator_len:
            violations.append(ScheduleViolation(
                tier=n, clause="eps_next>8*maxlen",
                detail=f"eps_{n + 1} = {tiers[n].epsilon} <= 8*maxlen_{n} = {8 * t.max_relator_len}",
            ))

    mu_nonincreasing = all(a.mu >= b.mu for a, b in zip(tiers, tiers[1:]))
    if not mu_nonincreasing:
        logger.warning("[Schedule] mu is not nonincreasing over the prefix")
    return ScheduleVerdict(
        ok=not violations,
        violations=violations,
        mu_nonincreasing=mu_nonincreasing,
        delta_estimates=[4 * t.max_relator_len for t in tiers],
    )


def schedule_from_presentation(
    p: Presentation,
    params: list[tuple[int, RationalLike, RationalLike]],
    alpha: RationalLike = Fraction(1, 100),
    K: RationalLike = 10**6,
) -> GradedSchedule:
    """Assemble a schedule from a tiered presentation and per-tier (ε, μ, ρ)."""
    groups = list(p.tier_groups().values())
    if len(params) != len(groups):
        raise BadParameter(f"{len(groups)} tiers but {len(params)} (eps, mu, rho) triples")
    tiers = [
        ScheduleTier(epsilon=e, mu=m, rho=r, max_relator_len=max(len(w) for w in rels))
        for (e, m, r), rels in zip(params, groups)
    ]
    return GradedSchedule(alpha=alpha, K=K, tiers=tiers)
