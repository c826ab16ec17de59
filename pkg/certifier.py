"""
certifier.py - Rips complexes, loop fillings and the local-to-global certificate

A RipsComplex at scale d keeps the 2-skeleton of the clique complex of a
finite metric set: edges between points within d, triangles on pairwise
close triples. Each simplex is regular of side d, so a loop of k edges has
length k·d and a disk of m triangles has area m·(√3/4)·d².

certify() applies the local-to-global hyperbolicity theorem with the fixed
constants C1 = 32, C2 = 32000, C3 = 400·√500 and c = 1/(4·C1·C2):
if every R-ball with R ≥ ρ = C2·D is cR-hyperbolic, the group is hyperbolic.
The R-balls of a Cayley graph are all isometric, so the identity-centered
one stands in for all of them unless all_centers is set.
"""

import logging
from collections import deque
from fractions import Fraction
from typing import Literal, Optional, Sequence

import networkx as nx
import numpy as np
from pydantic import BaseModel, ConfigDict
from tqdm import tqdm

from cayley import Ball
from config import SETTINGS
from errors import (
    BadParameter,
    BallTooSmall,
    BudgetExceeded,
    NoFillingFound,
    NonCayleyInput,
    PreconditionViolated,
)
from exact import Rational, RationalLike, Surd, parse_rational
from probes import distance_matrix, four_point_delta

logger = logging.getLogger(__name__)

Loop = tuple[int, ...]


# ═══════════════════════════════════════════════════════════════════════
#  Rips complexes
# ═══════════════════════════════════════════════════════════════════════

class RipsComplex(BaseModel):
    d: Rational
    points: list[str]
    edges: list[tuple[int, int]]
    triangles: list[tuple[int, int, int]]

    def graph(self) -> nx.Graph:
        G = nx.Graph()
        G.add_nodes_from(range(len(self.points)))
        G.add_edges_from(self.edges)
        return G

    def apexes(self) -> dict[tuple[int, int], list[int]]:
        """edge (u < v) -> third vertices w of triangles on it, sorted."""
        out: dict[tuple[int, int], list[int]] = {}
        for tri in self.triangles:
            for i in range(3):
                u, v = sorted((tri[i], tri[(i + 1) % 3]))
                out.setdefault((u, v), []).append(tri[(i + 2) % 3])
        return {e: sorted(ws) for e, ws in out.items()}

    def summary(self) -> dict:
        return {
            "d": str(self.d),
            "vertices": len(self.points),
            "edges": len(self.edges),
            "triangles": len(self.triangles),
        }


def build_rips(points: Sequence[str], distances, d: RationalLike) -> RipsComplex:
    """Clique complex up to dimension 2 of an exact metric at scale d."""
    d = parse_rational(d)
    if d <= 0:
        raise BadParameter(f"scale d must be positive, got {d}")
    n = len(points)
    G = nx.Graph()
    G.add_nodes_from(range(n))
    for i in range(n):
        for j in range(i + 1, n):
            if Fraction(distances[i][j]) <= d:
                G.add_edge(i, j)
    return _complex_from_graph(list(points), G, d)


def _complex_from_graph(points: list[str], G: nx.Graph, d: Fraction) -> RipsComplex:
    triangles = []
    for clique in nx.enumerate_all_cliques(G):
        if len(clique) > 3:
            break
        if len(clique) == 3:
            triangles.append(tuple(sorted(clique)))
    edges = sorted((min(u, v), max(u, v)) for u, v in G.edges())
    logger.info("[Rips] d=%s: %d vertices, %d edges, %d triangles", d, len(points), len(edges), len(triangles))
    return RipsComplex(d=d, points=points, edges=edges, triangles=sorted(triangles))


def rips_from_ball(b: Ball, d: RationalLike, vertices: Optional[list[int]] = None) -> RipsComplex:
    """Rips complex on ball vertices; by default those whose d-neighbourhood is measured exactly.

    Two vertices with dist0 ≤ radius − ⌊d/2⌋ are within d in the group iff
    they are within d in the ball.
    """
    d = parse_rational(d)
    if d <= 0:
        raise BadParameter(f"scale d must be positive, got {d}")
    reach = int(d)
    if vertices is None:
        vertices = [v for v, h in enumerate(b.dist0) if h <= b.radius - reach // 2]
    slot = {v: i for i, v in enumerate(vertices)}
    G = nx.Graph()
    G.add_nodes_from(range(len(vertices)))
    for v in vertices:
        for u, h in b.bfs_from(v, cutoff=reach).items():
            if u != v and u in slot:
                G.add_edge(slot[v], slot[u])
    return _complex_from_graph([b.label(v) for v in vertices], G, d)


# ═══════════════════════════════════════════════════════════════════════
#  Loop filling
# ═══════════════════════════════════════════════════════════════════════

class Filling(BaseModel):
    cells: int
    area: Surd
    disk: list[tuple[str, str, str]]


def reduce_loop(loop: Sequence[int]) -> Loop:
    """Drop repeated vertices and backtracks, cyclically; loops of length ≤ 2 are trivial."""
    stack: list[int] = []
    for v in loop:
        if stack and stack[-1] == v:
            continue
        if len(stack) >= 2 and stack[-2] == v:
            stack.pop()
            continue
        stack.append(v)
    # the seam between the end and the start
    changed = True
    while changed and len(stack) > 2:
        changed = False
        if stack[0] == stack[-1]:
            stack.pop()
            changed = True
        elif stack[1] == stack[-1]:
            stack.pop(0)
            changed = True
        elif stack[0] == stack[-2]:
            stack.pop()
            changed = True
    return tuple(stack) if len(stack) > 2 else ()


def canonical_loop(loop: Loop) -> Loop:
    """Least rotation of the loop or its reverse."""
    if not loop:
        return ()
    candidates = []
    for seq in (loop, loop[::-1]):
        for i in range(len(seq)):
            candidates.append(seq[i:] + seq[:i])
    return min(candidates)


def _check_cycle(rc: RipsComplex, loop: Sequence[int]) -> None:
    edges = set(rc.edges)
    for i, v in enumerate(loop):
        u = loop[(i + 1) % len(loop)]
        if u != v and (min(u, v), max(u, v)) not in edges:
            raise BadParameter(f"{rc.points[v]} - {rc.points[u]} is not an edge of the d={rc.d} Rips complex")


def _moves(loop: Loop, triangles: set[tuple[int, int, int]], apexes: dict) -> list[tuple[Loop, tuple[int, int, int]]]:
    out = []
    n = len(loop)
    for i in range(n):
        x, y, z = loop[i - 1], loop[i], loop[(i + 1) % n]
        tri = tuple(sorted((x, y, z)))
        if len(set(tri)) == 3 and tri in triangles:
            out.append((loop[:i] + loop[i + 1:], tri))
    for i in range(n):
        x, y = loop[i], loop[(i + 1) % n]
        for w in apexes.get((min(x, y), max(x, y)), ()):
            out.append((loop[:i + 1] + (w,) + loop[i + 1:], tuple(sorted((x, y, w)))))
    return out


def filling_area_bruteforce(
    rc: RipsComplex,
    loop: Sequence[int],
    max_cells: int,
    budget: Optional[int] = None,
) -> Optional[Filling]:
    """Least number of triangles in a simplicial disk spanning the loop.

    Breadth-first over reduced loops: each step either cuts a corner x-y-z
    across a triangle or pushes an edge x-y out over a triangle x-y-w, one
    cell either way. None when nothing within max_cells closes the loop.
    """
    budget = budget if budget is not None else SETTINGS.fill_budget
    loop = tuple(loop)
    if loop:
        _check_cycle(rc, loop)
    d = rc.d
    triangles = set(rc.triangles)
    apexes = rc.apexes()
    labels = rc.points

    def filling(cells: int, disk: list[tuple[int, int, int]]) -> Filling:
        return Filling(
            cells=cells,
            area=Surd(coefficient=Fraction(cells) * d * d / 4, radicand=3),
            disk=[tuple(labels[v] for v in tri) for tri in disk],
        )

    start = canonical_loop(reduce_loop(loop))
    if not start:
        return filling(0, [])

    seen = {start}
    frontier = deque([(start, [])])
    while frontier:
        current, disk = frontier.popleft()
        if len(disk) >= max_cells:
            continue
        for nxt, tri in _moves(current, triangles, apexes):
            reduced = canonical_loop(reduce_loop(nxt))
            if not reduced:
                logger.debug("[Fill] closed with %d cells", len(disk) + 1)
                return filling(len(disk) + 1, disk + [tri])
            if reduced in seen:
                continue
            seen.add(reduced)
            if len(seen) > budget:
                raise BudgetExceeded(f"filling search explored more than {budget} loops")
            frontier.append((reduced, disk + [tri]))
    return None


# ═══════════════════════════════════════════════════════════════════════
#  Isoperimetric checks
# ═══════════════════════════════════════════════════════════════════════

LARGE_AREA_LOW = 4_000_000            # 3m² at A = 500·d²
LARGE_AREA_HIGH = 16 * 32_000 ** 2    # 3m² at A = 64·500·d²
LARGE_LENGTH_SQUARED = 4000 * 64 * 500


class LargeLoopCheck(BaseModel):
    in_window: bool
    holds: Optional[bool] = None


def large_loop_condition(edges: int, cells: int) -> LargeLoopCheck:
    """For L = edges·d and A = cells·(√3/4)·d²: if 500d² ≤ A ≤ 64·500·d², is L ≥ d·√(4000·64·500)?"""
    three_m2 = 3 * cells * cells
    if not LARGE_AREA_LOW <= three_m2 <= LARGE_AREA_HIGH:
        return LargeLoopCheck(in_window=False)
    return LargeLoopCheck(in_window=True, holds=edges * edges >= LARGE_LENGTH_SQUARED)


class IsoperimetricCheck(BaseModel):
    holds: bool
    L: Rational
    A: Surd
    cells: int
    bound: Rational
    large_loop: LargeLoopCheck


def check_isoperimetric(
    rc: RipsComplex,
    loop: Sequence[int],
    delta: RationalLike,
    max_cells: int = 8,
    budget: Optional[int] = None,
) -> IsoperimetricCheck:
    """L(loop) ≥ (d/(4√3))·A(loop); with A = m·(√3/4)·d² the right side is m·d³/16."""
    delta = parse_rational(delta)
    d = rc.d
    if d < 8 * delta:
        raise PreconditionViolated(f"needs d >= 8*delta, got d = {d}, delta = {delta}")
    found = filling_area_bruteforce(rc, loop, max_cells, budget)
    if found is None:
        raise NoFillingFound(f"no filling with at most {max_cells} triangles")
    L = len(loop) * d if len(loop) > 1 else Fraction(0)
    bound = Fraction(found.cells) * d ** 3 / 16
    holds = L >= bound
    if not holds:
        logger.warning("[Iso] loop of length %s needs %d cells: %s < %s", L, found.cells, L, bound)
    return IsoperimetricCheck(
        holds=holds,
        L=L,
        A=found.area,
        cells=found.cells,
        bound=bound,
        large_loop=large_loop_condition(len(loop), found.cells),
    )


class FillabilityReport(BaseModel):
    max_length: int
    checked: int
    filled: int
    unfilled: list[list[str]]
    max_cells_used: int
    isoperimetric_failures: Optional[int] = None


def closed_loops(rc: RipsComplex, max_length: int) -> list[Loop]:
    """Non-backtracking closed edge loops of length 3..max_length, one per rotation/reversal class."""
    G = rc.graph()
    adjacency = {v: sorted(G.neighbors(v)) for v in G.nodes}
    found: set[Loop] = set()

    def extend(path: list[int]) -> None:
        start, last = path[0], path[-1]
        if len(path) >= 3 and start in adjacency[last] and path[1] != last and path[-2] != start:
            found.add(canonical_loop(tuple(path)))
        if len(path) == max_length:
            return
        for w in adjacency[last]:
            if w <= start or (len(path) >= 2 and w == path[-2]):
                continue
            path.append(w)
            extend(path)
            path.pop()

    for v in sorted(adjacency):
        extend([v])
    return sorted(found, key=lambda lp: (len(lp), lp))


def check_loops_fillable(
    rc: RipsComplex,
    max_length: int,
    max_cells: int = 8,
    budget: Optional[int] = None,
    delta: Optional[RationalLike] = None,
    progress: bool = False,
) -> FillabilityReport:
    """Fill every short closed loop; with delta, also test the isoperimetric bound on each."""
    if delta is not None:
        delta = parse_rational(delta)
        if rc.d < 8 * delta:
            raise PreconditionViolated(f"needs d >= 8*delta, got d = {rc.d}, delta = {delta}")
    loops = closed_loops(rc, max_length)
    unfilled: list[list[str]] = []
    failures = 0
    most = 0
    for lp in tqdm(loops, desc="fill", disable=not progress, leave=False):
        found = filling_area_bruteforce(rc, lp, max_cells, budget)
        if found is None:
            unfilled.append([rc.points[v] for v in lp])
            continue
        most = max(most, found.cells)
        if delta is not None and len(lp) * rc.d < Fraction(found.cells) * rc.d ** 3 / 16:
            failures += 1
    logger.info("[Fill] %d loops up to length %d, %d unfilled", len(loops), max_length, len(unfilled))
    return FillabilityReport(
        max_length=max_length,
        checked=len(loops),
        filled=len(loops) - len(unfilled),
        unfilled=unfilled,
        max_cells_used=most,
        isoperimetric_failures=failures if delta is not None else None,
    )


# ═══════════════════════════════════════════════════════════════════════
#  Local hyperbolicity and the certificate
# ═══════════════════════════════════════════════════════════════════════

def local_hyperbolicity_scan(
    b: Ball,
    R: int,
    all_centers: bool = False,
    all_basepoints: bool = False,
) -> Fraction:
    """Four-point δ of the R-ball at the identity (or the max over every exactly measured center)."""
    if R < 0:
        raise BadParameter("R must be nonnegative")
    if 2 * R > b.radius:
        raise BallTooSmall(f"R = {R} needs a ball of radius at least {2 * R}, got {b.radius}")
    centers = [0]
    if all_centers:
        centers = [v for v, h in enumerate(b.dist0) if 2 * (h + R) <= b.radius]
    worst = Fraction(0)
    for y in centers:
        members = sorted(u for u, h in b.bfs_from(y, cutoff=R).items())
        D = distance_matrix(b, members)
        bases = range(len(members)) if all_basepoints else [members.index(y)]
        for p in bases:
            worst = max(worst, four_point_delta(D, p))
    logger.info("[Local] R=%d over %d centers: delta %s", R, len(centers), worst)
    return worst


class CertificateConstants(BaseModel):
    model_config = ConfigDict(frozen=True)

    mode: Literal["theorem", "test"]
    C1: Rational
    C2: Rational
    C3: Surd
    c: Rational


THEOREM_CONSTANTS = CertificateConstants(
    mode="theorem",
    C1=32,
    C2=64 * 500,
    C3=Surd(coefficient=400, radicand=500),
    c=Fraction(1, 4 * 32 * 64 * 500),
)

# C2 and c scaled down so that desk-sized balls reach PASS; C1 and the
# scale relation d = 4·C1·c·R are kept.
TEST_CONSTANTS = CertificateConstants(
    mode="test",
    C1=32,
    C2=2,
    C3=Surd(coefficient=400, radicand=500),
    c=Fraction(1, 256),
)

HOMOGENEITY_CAVEAT = (
    "identity-centered scan: stands in for every R-ball because Cayley graphs are "
    "vertex-transitive; PASS at these constants implies the group is hyperbolic"
)


class Certificate(BaseModel):
    D: int
    C1: Rational
    C2: Rational
    C3: Surd
    c: Rational
    rho: Rational
    R_tested: int
    local_delta: Optional[Rational] = None
    verdict: Literal["PASS", "FAIL", "INCONCLUSIVE"]
    reason: Optional[str] = None
    scale_d: Rational
    target_delta: Rational
    scale_matches: bool
    constants_mode: Literal["theorem", "test"]
    centers: Literal["identity", "all"]
    caveat: str


def certify(
    b: Ball,
    D: int,
    R: int,
    constants: CertificateConstants = THEOREM_CONSTANTS,
    all_centers: bool = False,
) -> Certificate:
    """Local-to-global hyperbolicity test: PASS iff 4·δ(R-ball) ≤ c·R for some R ≥ ρ."""
    if not b.cayley and not all_centers:
        raise NonCayleyInput("a non-Cayley graph needs all_centers: its R-balls are not all alike")
    if D < 0 or R < 0:
        raise BadParameter("D and R must be nonnegative")
    D = max(D, 1)
    rho = constants.C2 * D
    scale_d = Fraction(R) / constants.C2
    target = constants.c * R
    common = dict(
        D=D,
        C1=constants.C1,
        C2=constants.C2,
        C3=constants.C3,
        c=constants.c,
        rho=rho,
        R_tested=R,
        scale_d=scale_d,
        target_delta=target,
        scale_matches=scale_d == 4 * constants.C1 * target,
        constants_mode=constants.mode,
        centers="all" if all_centers else "identity",
        caveat=HOMOGENEITY_CAVEAT if not all_centers else "every exactly measured center scanned",
    )
    if R < rho:
        return Certificate(verdict="INCONCLUSIVE", reason="R below rho", **common)
    local = local_hyperbolicity_scan(b, R, all_centers=all_centers)
    verdict = "PASS" if 4 * local <= target else "FAIL"
    if verdict == "PASS" and not all_centers:
        logger.warning("[Certify] %s", HOMOGENEITY_CAVEAT)
    logger.info("[Certify] R=%d rho=%s local delta %s -> %s", R, rho, local, verdict)
    return Certificate(verdict=verdict, local_delta=local, **common)


def matrix_for(b: Ball, vertices: list[int]) -> np.ndarray:
    """Exact distance matrix for build_rips over chosen ball vertices."""
    for u in vertices:
        for v in vertices:
            if not b.is_exact(u, v):
                raise PreconditionViolated(f"dist({b.label(u)}, {b.label(v)}) is not exact")
    return distance_matrix(b, vertices)
