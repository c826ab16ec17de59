"""
probes.py - Metric measurements on Cayley balls

    gromov_delta_4pt     four-point δ at a basepoint, over the exact core
    thin_triangle_delta  Rips thinness of geodesic triangles
    divergence           shortest detour around a ball centered on c
    divergence_profile   Div(n) = sup of divergence over pairs with dist ≤ n
    floyd_distance       edge e weighted by (1 + dist(e, 1))^-2

Only distances that the ball certifies as exact enter a sup or a max: triple
scans run over the core dist0 ≤ radius // 2 (triangle corners over radius // 4,
so that every point on every side still lies in that core).
"""

import logging
import os
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from itertools import combinations, islice, product
from typing import Literal, Optional, Union

import networkx as nx
import numpy as np
from pydantic import BaseModel
from tqdm import tqdm

from cayley import Ball
from config import SETTINGS
from errors import BadParameter, BallTooSmall, BudgetExceeded, NotExact, TooFewExactPairs
from exact import Rational, RationalLike, parse_rational

logger = logging.getLogger(__name__)

INFINITE_IN_BALL = "INFINITE_IN_BALL"
DivergenceValue = Union[int, Literal["INFINITE_IN_BALL"]]


def distance_matrix(b: Ball, vertices: list[int]) -> np.ndarray:
    """In-ball BFS distances between the listed vertices (int64)."""
    index = {v: i for i, v in enumerate(vertices)}
    D = np.zeros((len(vertices), len(vertices)), dtype=np.int64)
    for i, v in enumerate(vertices):
        for u, d in b.bfs_from(v).items():
            j = index.get(u)
            if j is not None:
                D[i, j] = d
    return D


# ═══════════════════════════════════════════════════════════════════════
#  Four-point δ
# ═══════════════════════════════════════════════════════════════════════

def gromov_delta_4pt(b: Ball, basepoint: int | str = 0, scan_radius: Optional[int] = None) -> Fraction:
    """max over (x, y, z) of min((x,z)_p, (y,z)_p) − (x,y)_p, clamped at 0."""
    scan_radius = b.radius // 2 if scan_radius is None else scan_radius
    if 2 * scan_radius > b.radius:
        raise TooFewExactPairs(
            f"scan radius {scan_radius} exceeds half the ball radius {b.radius}; distances would not be exact"
        )
    p = b.vertex(basepoint)
    core = b.core(scan_radius)
    if p not in core:
        raise TooFewExactPairs(f"basepoint {b.label(p)} lies outside the exact core")
    if len(core) == 1:
        return Fraction(0)

    value = four_point_delta(distance_matrix(b, core), core.index(p))
    logger.info("[Delta] four-point scan over %d vertices at %s: δ = %s", len(core), b.label(p), value)
    return value


def four_point_delta(D: np.ndarray, p: int) -> Fraction:
    """δ_p of a finite metric given as an integer distance matrix."""
    dp = D[p]
    # twice the Gromov products, to stay in integers
    G2 = dp[:, None] + dp[None, :] - D
    worst = 0
    for z in range(len(D)):
        col = G2[:, z]
        worst = max(worst, int((np.minimum(col[:, None], col[None, :]) - G2).max()))
    return Fraction(worst, 2)


# ═══════════════════════════════════════════════════════════════════════
#  Thin triangles
# ═══════════════════════════════════════════════════════════════════════

def _side_thinness(D: np.ndarray, side: list[int], others: list[int]) -> int:
    return int(D[np.ix_(side, others)].min(axis=1).max())


def _triangle_thinness(D: np.ndarray, sides: tuple[list[int], list[int], list[int]]) -> int:
    xy, yz, zx = sides
    return max(
        _side_thinness(D, xy, yz + zx),
        _side_thinness(D, yz, xy + zx),
        _side_thinness(D, zx, xy + yz),
    )


def thin_triangle_delta(
    b: Ball,
    scan_radius: Optional[int] = None,
    all_geodesics: bool = False,
    geodesic_limit: int = 8,
    budget: int = 1_000_000,
    threads: Optional[int] = None,
) -> Fraction:
    """Least R making every scanned geodesic triangle R-thin, at vertex resolution.

    Sides are the canonical BFS geodesics unless all_geodesics is set; then up
    to geodesic_limit geodesics per side are combined, within budget triangles.
    """
    scan_radius = b.radius // 4 if scan_radius is None else scan_radius
    if 4 * scan_radius > b.radius:
        raise TooFewExactPairs(
            f"triangle corners at radius {scan_radius} put sides outside the exact core of a radius-{b.radius} ball"
        )
    corners = b.core(scan_radius)
    if len(corners) < 3:
        return Fraction(0)

    region = b.core(b.radius // 2)
    slot = {v: i for i, v in enumerate(region)}
    D = distance_matrix(b, region)
    G = b.graph

    def sides_between(u: int, v: int) -> list[list[int]]:
        if not all_geodesics:
            lo, hi = min(u, v), max(u, v)
            return [[slot[x] for x in nx.shortest_path(G, lo, hi)]]
        return [[slot[x] for x in path] for path in islice(nx.all_shortest_paths(G, u, v), geodesic_limit)]

    paths = {}
    for u, v in combinations(corners, 2):
        paths[(u, v)] = sides_between(u, v)

    spent = 0
    triangles = list(combinations(corners, 3))
    if all_geodesics:
        for x, y, z in triangles:
            spent += len(paths[(x, y)]) * len(paths[(y, z)]) * len(paths[(x, z)])
            if spent > budget:
                raise BudgetExceeded(f"all-geodesics thin-triangle scan exceeds {budget} triangles")

    def measure(tri: tuple[int, int, int]) -> int:
        x, y, z = tri
        worst = 0
        for xy, yz, xz in product(paths[(x, y)], paths[(y, z)], paths[(x, z)]):
            worst = max(worst, _triangle_thinness(D, (xy, yz, xz[::-1])))
        return worst

    threads = threads or SETTINGS.threads or os.cpu_count() or 1
    with ThreadPoolExecutor(max_workers=threads) as pool:
        worst = max(pool.map(measure, triangles), default=0)
    logger.info("[Delta] %d triangles scanned, thinness %d", len(triangles), worst)
    return Fraction(worst)


# ═══════════════════════════════════════════════════════════════════════
#  Hyperbolicity estimate
# ═══════════════════════════════════════════════════════════════════════

class HyperbolicityEstimate(BaseModel):
    gromov_delta_p: Rational
    basepoint: str
    thin_triangle_delta: Union[Rational, Literal["SKIPPED"]]
    exact_pair_fraction: Rational
    scan_vertices: int


def exact_triple_fraction(b: Ball) -> Fraction:
    """Share of ordered vertex triples whose three pairwise distances are all exact."""
    sizes = b.layer_sizes()
    r = b.radius
    good = 0
    for d1, n1 in enumerate(sizes):
        for d2, n2 in enumerate(sizes):
            if d1 + d2 > r:
                break
            for d3, n3 in enumerate(sizes):
                if d1 + d3 > r or d2 + d3 > r:
                    break
                good += n1 * n2 * n3
    return Fraction(good, len(b) ** 3)


def estimate_hyperbolicity(
    b: Ball,
    basepoint: int | str = 0,
    thin: bool = True,
    all_geodesics: bool = False,
    threads: Optional[int] = None,
) -> HyperbolicityEstimate:
    p = b.vertex(basepoint)
    return HyperbolicityEstimate(
        gromov_delta_p=gromov_delta_4pt(b, p),
        basepoint=b.label(p),
        thin_triangle_delta=thin_triangle_delta(b, all_geodesics=all_geodesics, threads=threads) if thin else "SKIPPED",
        exact_pair_fraction=exact_triple_fraction(b),
        scan_vertices=len(b.core()),
    )


# ═══════════════════════════════════════════════════════════════════════
#  Divergence
# ═══════════════════════════════════════════════════════════════════════

def _check_divergence_params(delta: Fraction, lam: Fraction) -> None:
    if not 0 < delta < 1:
        raise BadParameter(f"delta must lie in (0, 1), got {delta}")
    if lam < 0:
        raise BadParameter(f"lambda must be nonnegative, got {lam}")


def _forbidden_radius(delta: Fraction, lam: Fraction, r: int) -> int:
    """floor(δr − λ), or −1 when the forbidden ball is empty."""
    rho = delta * r - lam
    return -1 if rho <= 0 else int(rho)


def _avoiding_lengths(b: Ball, source: int, center_dist: dict[int, int], k: int) -> dict[int, int]:
    if k < 0:
        return b.bfs_from(source)
    view = nx.subgraph_view(b.graph, filter_node=lambda n: center_dist.get(n, k + 1) > k)
    return nx.single_source_shortest_path_length(view, source)


def divergence(
    b: Ball,
    a: int | str,
    b2: int | str,
    c: int | str,
    delta: RationalLike,
    lam: RationalLike,
) -> DivergenceValue:
    """Length of the shortest a–b2 path avoiding Ball(c, δr − λ), r = min(d(c,a), d(c,b2))."""
    delta, lam = parse_rational(delta), parse_rational(lam)
    _check_divergence_params(delta, lam)
    a, b2, c = b.vertex(a), b.vertex(b2), b.vertex(c)
    for v in (a, b2):
        if not b.is_exact(c, v):
            raise NotExact(f"dist({b.label(c)}, {b.label(v)}) is not exact in a radius-{b.radius} ball")
    center_dist = b.bfs_from(c)
    r = min(center_dist[a], center_dist[b2])
    k = _forbidden_radius(delta, lam, r)
    lengths = _avoiding_lengths(b, a, center_dist, k)
    value = lengths.get(b2)
    return INFINITE_IN_BALL if value is None else value


class DivergenceEntry(BaseModel):
    n: int
    value: DivergenceValue
    witness: Optional[tuple[str, str, str]] = None


class SamplingMode(BaseModel):
    kind: Literal["EXHAUSTIVE", "SAMPLED"]
    seed: Optional[int] = None
    count: Optional[int] = None


class DivergenceProfile(BaseModel):
    delta: Rational
    lam: Rational
    entries: list[DivergenceEntry]
    mode: SamplingMode
    centers: int
    fitted_linear_constant: Optional[Rational] = None

    def to_csv(self) -> str:
        rows = ["n,value,a,b,c"]
        for e in self.entries:
            a, b2, c = e.witness if e.witness else ("", "", "")
            rows.append(f"{e.n},{e.value},{a},{b2},{c}")
        return "\n".join(rows) + "\n"


def _rank(value: DivergenceValue) -> float:
    return float("inf") if value == INFINITE_IN_BALL else value


def divergence_profile(
    b: Ball,
    n_max: int,
    delta: RationalLike = Fraction(1, 3),
    lam: RationalLike = 2,
    mode: Literal["EXHAUSTIVE", "SAMPLED"] = "EXHAUSTIVE",
    samples: Optional[int] = None,
    seed: Optional[int] = None,
    all_centers: bool = False,
    threads: Optional[int] = None,
    progress: bool = False,
) -> DivergenceProfile:
    """Div(n) for n = 1..n_max over the exact core, centered at the identity.

    One punctured BFS per (source, forbidden radius) gives the divergence of
    the source against every target at once. SAMPLED draws `samples` sources
    from the core with a seeded generator.
    """
    delta, lam = parse_rational(delta), parse_rational(lam)
    _check_divergence_params(delta, lam)
    if n_max < 1:
        raise BadParameter("n_max must be at least 1")
    if 3 * n_max > b.radius:
        raise BallTooSmall(f"n_max = {n_max} needs a ball of radius at least {3 * n_max}, got {b.radius}")

    core = b.core()
    if mode == "SAMPLED":
        seed = SETTINGS.seed if seed is None else seed
        count = min(samples or len(core), len(core))
        rng = np.random.default_rng(seed)
        sources = sorted(int(v) for v in rng.choice(core, size=count, replace=False))
        sampling = SamplingMode(kind="SAMPLED", seed=seed, count=count)
    else:
        sources = core
        sampling = SamplingMode(kind="EXHAUSTIVE")
    centers = core if all_centers else [0]
    in_core = set(core)

    def scan(job: tuple[int, int]) -> list[tuple[int, DivergenceValue, int, int, int]]:
        c, a = job
        center_dist = b.bfs_from(c)
        near = {t: d for t, d in b.bfs_from(a, cutoff=n_max).items() if t in in_core and t != a}
        by_radius: dict[int, list[int]] = {}
        for t in near:
            r = min(center_dist[a], center_dist[t])
            by_radius.setdefault(_forbidden_radius(delta, lam, r), []).append(t)
        out = []
        for k in sorted(by_radius):
            lengths = _avoiding_lengths(b, a, center_dist, k)
            for t in by_radius[k]:
                value = lengths.get(t, INFINITE_IN_BALL)
                out.append((near[t], value, a, t, c))
        return out

    jobs = [(c, a) for c in centers for a in sources]
    threads = threads or SETTINGS.threads or os.cpu_count() or 1
    best: dict[int, tuple[DivergenceValue, int, int, int]] = {}
    with ThreadPoolExecutor(max_workers=threads) as pool:
        for rows in tqdm(pool.map(scan, jobs), total=len(jobs), desc="div", disable=not progress, leave=False):
            for m, value, a, t, c in rows:
                held = best.get(m)
                if held is None or _rank(value) > _rank(held[0]):
                    best[m] = (value, a, t, c)

    entries: list[DivergenceEntry] = []
    running: Optional[tuple[DivergenceValue, int, int, int]] = None
    for n in range(1, n_max + 1):
        here = best.get(n)
        if here is not None and (running is None or _rank(here[0]) > _rank(running[0])):
            running = here
        if running is None:
            entries.append(DivergenceEntry(n=n, value=0))
            continue
        value, a, t, c = running
        entries.append(DivergenceEntry(n=n, value=value, witness=(b.label(a), b.label(t), b.label(c))))

    finite = [Fraction(e.value, e.n) for e in entries if e.value != INFINITE_IN_BALL]
    logger.info("[Div] %d sources x %d centers, n_max %d", len(sources), len(centers), n_max)
    return DivergenceProfile(
        delta=delta,
        lam=lam,
        entries=entries,
        mode=sampling,
        centers=len(centers),
        fitted_linear_constant=max(finite) if finite else None,
    )


# ═══════════════════════════════════════════════════════════════════════
#  Floyd metric
# ═══════════════════════════════════════════════════════════════════════

def _floyd_weight(b: Ball):
    dist0 = b.dist0

    def weight(x: int, y: int, _data: dict) -> Fraction:
        return Fraction(1, (1 + min(dist0[x], dist0[y])) ** 2)

    return weight


def floyd_distance(b: Ball, u: int | str, v: int | str) -> Fraction:
    u, v = b.vertex(u), b.vertex(v)
    if u == v:
        return Fraction(0)
    return Fraction(nx.dijkstra_path_length(b.graph, u, v, weight=_floyd_weight(b)))


def floyd_distances_from(b: Ball, u: int | str) -> dict[int, Fraction]:
    u = b.vertex(u)
    lengths = nx.single_source_dijkstra_path_length(b.graph, u, weight=_floyd_weight(b))
    return {v: Fraction(d) for v, d in lengths.items()}
