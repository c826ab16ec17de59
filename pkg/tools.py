"""
tools.py - lacuna analysis tools

Every command of the toolkit is a @tool from langchain_core.tools with a
pydantic input schema, so the same registry serves the CLI (lacuna.py) and
any agent framework that binds tools. Rationals are passed as "p/q" strings
and every tool returns its result as a JSON string with sorted keys.

Tools that work on a ball take either a saved ball (`ball`, a JSON export)
or a presentation plus radius and oracle to build one on the spot.
"""

import json
import logging
from fractions import Fraction
from typing import Literal, Optional

from langchain_core.tools import tool
from pydantic import BaseModel, Field

import presentation as pres_mod
from cancellation import (
    GradedSchedule,
    check_classical,
    check_graded_schedule,
    check_tiered_classical,
    enumerate_pieces,
    find_eps_pieces,
    hyperbolicity_bound,
    schedule_from_presentation,
)
from cayley import (
    Ball,
    build_ball,
    dist as ball_dist,
    geodesics,
    injectivity_radius,
    load_ball,
    make_oracle,
)
from certifier import (
    THEOREM_CONSTANTS,
    TEST_CONSTANTS,
    certify,
    check_isoperimetric,
    check_loops_fillable,
    filling_area_bruteforce,
    rips_from_ball,
)
from dehn import MU_LIMIT, check_area_inequality, check_cell_bound, solver_for
from errors import BadParameter, NotSmallCancellation
from exact import Rational
from freeword import free_reduce, invert, parse_word, render, symmetrize
from probes import divergence, divergence_profile, estimate_hyperbolicity, floyd_distance, floyd_distances_from
from zoo import (
    gen_aperiodic_words,
    gen_central_extension,
    gen_Gn_truncation,
    gen_Gpc_finite_quotient,
    gen_lacunary_family,
    schedule_torsion_params,
    with_provenance,
)

logger = logging.getLogger(__name__)

OracleName = Literal["free", "dehn", "coset", "abelian"]


def _dump(result) -> str:
    if isinstance(result, BaseModel):
        result = result.model_dump(mode="json")
    return json.dumps(result, sort_keys=True)


def _ball_from(
    ball: Optional[str],
    pres: Optional[str],
    radius: Optional[int],
    oracle: str,
    mu: Fraction,
    progress: bool = False,
) -> Ball:
    if ball is not None:
        return load_ball(ball)
    if pres is None or radius is None:
        raise BadParameter("give either a ball file or a presentation with a radius")
    p = pres_mod.load(pres)
    return build_ball(make_oracle(oracle, p, mu), radius, progress=progress)


class BallSourceInput(BaseModel):
    """Where a ball comes from: a JSON export, or a presentation to build one from."""
    ball: Optional[str] = Field(default=None, description="Path to a ball JSON export")
    pres: Optional[str] = Field(default=None, description="Presentation file to build the ball from")
    radius: Optional[int] = Field(default=None, ge=0, description="Radius when building from a presentation")
    oracle: OracleName = Field(default="dehn", description="Equality oracle for building")
    mu: Rational = Field(default=MU_LIMIT, description="Small-cancellation parameter for the dehn oracle")


# ═══════════════════════════════════════════════════════════════════════
#  Small cancellation
# ═══════════════════════════════════════════════════════════════════════

class CheckSCInput(BaseModel):
    """Input schema for the C'(μ) check."""
    pres: str = Field(description="Path to a .pres file")
    mu: Rational = Field(default=MU_LIMIT, description="Piece ratio bound as p/q")
    tiered: bool = Field(default=False, description="Also check each tier against its own bound")
    tier_mus: Optional[dict[int, Rational]] = Field(default=None, description="Per-tier bounds, tier -> p/q")


@tool(args_schema=CheckSCInput)
def check_sc(pres: str, mu: Fraction = MU_LIMIT, tiered: bool = False, tier_mus: Optional[dict] = None) -> str:
    """Check the C'(μ) small-cancellation condition, with the hyperbolicity bound when it applies."""
    p = pres_mod.load(pres)
    if tiered:
        verdict = check_tiered_classical(p, mu, tier_mus)
        result = verdict.model_dump(mode="json")
        ok = verdict.ok
    else:
        verdict = check_classical(symmetrize(p.relators), mu)
        result = verdict.model_dump(mode="json")
        ok = verdict.ok
    result["ok"] = ok
    if ok and mu < MU_LIMIT:
        result["delta_bound"] = str(hyperbolicity_bound(p, mu))
    return _dump(result)


class PiecesInput(BaseModel):
    """Input schema for piece enumeration."""
    pres: str = Field(description="Path to a .pres file")
    list_limit: Optional[int] = Field(default=None, ge=0, description="List at most this many pieces")
    threads: Optional[int] = Field(default=None, ge=1, description="Worker threads")


@tool(args_schema=PiecesInput)
def pieces(pres: str, list_limit: Optional[int] = None, threads: Optional[int] = None) -> str:
    """List the classical pieces of the symmetrized relators and the largest piece ratio."""
    p = pres_mod.load(pres)
    return _dump(enumerate_pieces(symmetrize(p.relators), threads=threads, list_limit=list_limit))


class EpsPiecesInput(BaseModel):
    """Input schema for ε-pieces over a base group."""
    pres: str = Field(description="Relators to test")
    base: str = Field(description="Presentation of the base group")
    base_oracle: OracleName = Field(default="free", description="Equality oracle for the base group")
    eps: int = Field(ge=0, description="Conjugator length bound")
    mu: Rational = Field(description="Piece ratio bound")
    rho: Optional[Rational] = Field(default=None, description="Minimal relator length")
    budget: Optional[int] = Field(default=None, ge=1, description="Oracle-call budget")
    check_geodesic: bool = Field(default=False, description="Also require relators to be geodesic in the base")


@tool(args_schema=EpsPiecesInput)
def eps_pieces(
    pres: str,
    base: str,
    eps: int,
    mu: Fraction,
    base_oracle: str = "free",
    rho: Optional[Fraction] = None,
    budget: Optional[int] = None,
    check_geodesic: bool = False,
) -> str:
    """Find ε-pieces over a base group and decide C(ε, μ, ρ)."""
    p = pres_mod.load(pres)
    oracle = make_oracle(base_oracle, pres_mod.load(base))
    if oracle.alphabet != p.alphabet:
        raise BadParameter("relators and base group must share one alphabet")
    report = find_eps_pieces(symmetrize(p.relators), eps, mu, oracle, rho, budget, check_geodesic)
    return _dump(report)


class GradedCheckInput(BaseModel):
    """Input schema for graded schedule validation."""
    schedule: str = Field(description="Schedule JSON, inline or a file path")
    pres: Optional[str] = Field(default=None, description="Tiered presentation supplying max relator lengths")


@tool(args_schema=GradedCheckInput)
def graded_check(schedule: str, pres: Optional[str] = None) -> str:
    """Validate a finite graded small-cancellation schedule.

    With a presentation the schedule JSON holds {"params": [[eps, mu, rho], ...],
    "alpha", "K"}; otherwise it is a full schedule with explicit tiers.
    """
    text = schedule.strip()
    if not text.startswith("{"):
        with open(text, "r", encoding="utf-8") as fh:
            text = fh.read()
    data = json.loads(text)
    if pres is not None:
        g = schedule_from_presentation(
            pres_mod.load(pres),
            [tuple(t) for t in data["params"]],
            data.get("alpha", Fraction(1, 100)),
            data.get("K", 10**6),
        )
    else:
        g = GradedSchedule.model_validate(data)
    return _dump(check_graded_schedule(g))


class SparseCheckInput(BaseModel):
    """Input schema for the sparseness sweep."""
    pres: str = Field(description="Path to a .pres file")
    lambda_floor: Rational = Field(default=Fraction(1, 64), description="Smallest λ tested")
    window: Optional[tuple[int, int]] = Field(default=None, description="Length window [lo, hi]")


@tool(args_schema=SparseCheckInput)
def sparse_check(pres: str, lambda_floor: Fraction = Fraction(1, 64), window: Optional[tuple] = None) -> str:
    """Sweep λ = 1/2, 1/4, ... and report a sparseness witness of the length spectrum for each."""
    p = pres_mod.load(pres)
    spectrum = pres_mod.length_spectrum(p)
    sweep = pres_mod.sparseness_sweep(spectrum, lambda_floor, window)
    result = sweep.model_dump(mode="json")
    result["spectrum"] = list(spectrum)
    result["ok"] = sweep.ok
    return _dump(result)


class CosetInput(BaseModel):
    """Input schema for coset enumeration."""
    pres: str = Field(description="Path to a .pres file")
    subgroup: list[str] = Field(default_factory=list, description="Subgroup generators as words")
    max_cosets: Optional[int] = Field(default=None, ge=1, description="Coset limit")


@tool(args_schema=CosetInput)
def coset(pres: str, subgroup: Optional[list] = None, max_cosets: Optional[int] = None) -> str:
    """Enumerate cosets of a subgroup (the trivial one gives the group order)."""
    p = pres_mod.load(pres)
    gens = [parse_word(w, p.alphabet) for w in subgroup or []]
    return _dump(pres_mod.coset_enumerate(p, gens, max_cosets))


# ═══════════════════════════════════════════════════════════════════════
#  Dehn's algorithm
# ═══════════════════════════════════════════════════════════════════════

class DehnInput(BaseModel):
    """Input schema for the word problem."""
    pres: str = Field(description="Path to a C'(1/6) .pres file")
    word: str = Field(description="Word to reduce, e.g. abAB; 1 is the identity")
    equal: Optional[str] = Field(default=None, description="Second word: decide word = equal instead")
    mu: Rational = Field(default=MU_LIMIT, description="Small-cancellation parameter, at most 1/6")
    trace: bool = Field(default=False, description="Include every reduction step")


@tool(args_schema=DehnInput)
def dehn(pres: str, word: str, equal: Optional[str] = None, mu: Fraction = MU_LIMIT, trace: bool = False) -> str:
    """Solve the word problem of a C'(1/6) presentation with Dehn's algorithm."""
    p = pres_mod.load(pres)
    if not p.relators:
        raise NotSmallCancellation("Dehn's algorithm needs at least one relator")
    w = parse_word(word, p.alphabet)
    if equal is not None:
        w = free_reduce(w + invert(parse_word(equal, p.alphabet)))
    run = solver_for(symmetrize(p.relators), mu).reduce(w)
    result = {
        "word": render(w),
        "trivial": run.trivial,
        "final": render(run.final),
        "cells_used": run.cells_used,
        "perimeter_sum": run.perimeter_sum,
    }
    if equal is not None:
        result["equal"] = run.trivial
    if trace:
        result["steps"] = [s.model_dump(mode="json") for s in run.steps]
        result["trace_text"] = run.describe()
    if run.trivial and run.steps:
        result["area_check"] = check_area_inequality(run, w, mu).model_dump(mode="json")
        result["cell_bound"] = check_cell_bound(run, w, mu).model_dump(mode="json")
    return _dump(result)


# ═══════════════════════════════════════════════════════════════════════
#  Balls and measurements
# ═══════════════════════════════════════════════════════════════════════

class BallInput(BaseModel):
    """Input schema for ball construction."""
    pres: str = Field(description="Path to a .pres file")
    radius: int = Field(ge=0, description="Ball radius")
    oracle: OracleName = Field(default="dehn", description="Equality oracle")
    mu: Rational = Field(default=MU_LIMIT, description="Small-cancellation parameter for the dehn oracle")
    max_vertices: Optional[int] = Field(default=None, ge=1, description="Vertex budget")
    oracle_budget: Optional[int] = Field(default=None, ge=1, description="Oracle-call budget")
    max_cosets: Optional[int] = Field(default=None, ge=1, description="Coset limit for the coset oracle")
    progress: bool = Field(default=False, description="Show a progress bar on stderr")


@tool(args_schema=BallInput)
def ball(
    pres: str,
    radius: int,
    oracle: str = "dehn",
    mu: Fraction = MU_LIMIT,
    max_vertices: Optional[int] = None,
    oracle_budget: Optional[int] = None,
    max_cosets: Optional[int] = None,
    progress: bool = False,
) -> str:
    """Build the radius-n ball of the Cayley graph around the identity."""
    p = pres_mod.load(pres)
    b = build_ball(
        make_oracle(oracle, p, mu, max_cosets),
        radius,
        max_vertices=max_vertices,
        oracle_budget=oracle_budget,
        progress=progress,
    )
    return _dump({"vertices": len(b), "sizes": b.sizes_by_radius(), "ball": b.to_dict()})


class DistInput(BallSourceInput):
    """Input schema for ball distances."""
    u: str = Field(description="First vertex, as a word")
    v: str = Field(description="Second vertex, as a word")
    geodesic_limit: int = Field(default=0, ge=0, description="List up to this many geodesics when exact")


@tool(args_schema=DistInput)
def dist(
    u: str,
    v: str,
    ball: Optional[str] = None,
    pres: Optional[str] = None,
    radius: Optional[int] = None,
    oracle: str = "dehn",
    mu: Fraction = MU_LIMIT,
    geodesic_limit: int = 0,
) -> str:
    """Distance between two ball vertices, flagged EXACT or UNCERTAIN."""
    b = _ball_from(ball, pres, radius, oracle, mu)
    d = ball_dist(b, u, v)
    result = d.model_dump(mode="json")
    if geodesic_limit and d.status == "EXACT":
        result["geodesics"] = [[b.label(x) for x in path] for path in geodesics(b, u, v, geodesic_limit)]
    return _dump(result)


class InjInput(BaseModel):
    """Input schema for injectivity radii."""
    g: str = Field(description="Presentation of G")
    g_oracle: OracleName = Field(default="dehn", description="Equality oracle for G")
    q: str = Field(description="Presentation of the quotient Q")
    q_oracle: OracleName = Field(default="coset", description="Equality oracle for Q")
    cap: int = Field(ge=0, description="Largest radius examined")
    mu: Rational = Field(default=MU_LIMIT, description="Small-cancellation parameter for dehn oracles")


@tool(args_schema=InjInput)
def inj(g: str, q: str, cap: int, g_oracle: str = "dehn", q_oracle: str = "coset", mu: Fraction = MU_LIMIT) -> str:
    """Largest radius on which the map G -> Q is injective, up to cap."""
    G, Q = pres_mod.load(g), pres_mod.load(q)
    if G.generators != Q.generators:
        raise BadParameter("G and Q must be marked by the same generators")
    report = injectivity_radius(make_oracle(g_oracle, G, mu), make_oracle(q_oracle, Q, mu), cap)
    return _dump(report)


class DivInput(BallSourceInput):
    """Input schema for divergence."""
    nmax: Optional[int] = Field(default=None, ge=1, description="Profile up to this n")
    delta: Rational = Field(default=Fraction(1, 3), description="δ in (0, 1)")
    lam: Rational = Field(default=Fraction(2), description="λ ≥ 0")
    mode: Literal["EXHAUSTIVE", "SAMPLED"] = Field(default="EXHAUSTIVE", description="Scan mode")
    samples: Optional[int] = Field(default=None, ge=1, description="Sources drawn in SAMPLED mode")
    seed: Optional[int] = Field(default=None, description="Seed for SAMPLED mode")
    all_centers: bool = Field(default=False, description="Scan every core vertex as a center")
    a: Optional[str] = Field(default=None, description="Single triple: first endpoint")
    b: Optional[str] = Field(default=None, description="Single triple: second endpoint")
    c: Optional[str] = Field(default=None, description="Single triple: center")
    threads: Optional[int] = Field(default=None, ge=1, description="Worker threads")
    progress: bool = Field(default=False, description="Show a progress bar on stderr")


@tool(args_schema=DivInput)
def div(
    ball: Optional[str] = None,
    pres: Optional[str] = None,
    radius: Optional[int] = None,
    oracle: str = "dehn",
    mu: Fraction = MU_LIMIT,
    nmax: Optional[int] = None,
    delta: Fraction = Fraction(1, 3),
    lam: Fraction = Fraction(2),
    mode: str = "EXHAUSTIVE",
    samples: Optional[int] = None,
    seed: Optional[int] = None,
    all_centers: bool = False,
    a: Optional[str] = None,
    b: Optional[str] = None,
    c: Optional[str] = None,
    threads: Optional[int] = None,
    progress: bool = False,
) -> str:
    """Divergence of one triple (a, b, c), or the Div(n) profile up to nmax."""
    bl = _ball_from(ball, pres, radius, oracle, mu, progress)
    if a is not None or b is not None or c is not None:
        if a is None or b is None or c is None:
            raise BadParameter("a single divergence needs all of a, b and c")
        return _dump({"value": divergence(bl, a, b, c, delta, lam), "delta": str(delta), "lam": str(lam)})
    if nmax is None:
        raise BadParameter("give nmax for a profile, or a, b and c for one triple")
    profile = divergence_profile(
        bl, nmax, delta, lam, mode=mode, samples=samples, seed=seed,
        all_centers=all_centers, threads=threads, progress=progress,
    )
    return _dump({"profile": profile.model_dump(mode="json")})


class DeltaInput(BallSourceInput):
    """Input schema for hyperbolicity estimates."""
    basepoint: str = Field(default="1", description="Basepoint of the four-point condition")
    thin: bool = Field(default=True, description="Also scan geodesic triangles")
    all_geodesics: bool = Field(default=False, description="Use every geodesic per side, within a budget")
    threads: Optional[int] = Field(default=None, ge=1, description="Worker threads")


@tool(args_schema=DeltaInput)
def delta(
    ball: Optional[str] = None,
    pres: Optional[str] = None,
    radius: Optional[int] = None,
    oracle: str = "dehn",
    mu: Fraction = MU_LIMIT,
    basepoint: str = "1",
    thin: bool = True,
    all_geodesics: bool = False,
    threads: Optional[int] = None,
) -> str:
    """Four-point δ at a basepoint and thin-triangle δ over the exact core of a ball."""
    b = _ball_from(ball, pres, radius, oracle, mu)
    return _dump(estimate_hyperbolicity(b, basepoint, thin=thin, all_geodesics=all_geodesics, threads=threads))


class FloydInput(BallSourceInput):
    """Input schema for Floyd distances."""
    u: str = Field(default="1", description="Source vertex")
    v: Optional[str] = Field(default=None, description="Target vertex; omit for the farthest vertex from u")


@tool(args_schema=FloydInput)
def floyd(
    ball: Optional[str] = None,
    pres: Optional[str] = None,
    radius: Optional[int] = None,
    oracle: str = "dehn",
    mu: Fraction = MU_LIMIT,
    u: str = "1",
    v: Optional[str] = None,
) -> str:
    """Floyd distance with edge weights (1 + dist(e, 1))^-2, as an exact rational."""
    b = _ball_from(ball, pres, radius, oracle, mu)
    if v is not None:
        return _dump({"u": u, "v": v, "value": str(floyd_distance(b, u, v))})
    lengths = floyd_distances_from(b, u)
    far = max(sorted(lengths), key=lambda x: lengths[x])
    return _dump({"u": u, "v": b.label(far), "value": str(lengths[far]), "diameter_from_u": True})


# ═══════════════════════════════════════════════════════════════════════
#  Rips complexes, fillings and the certificate
# ═══════════════════════════════════════════════════════════════════════

class RipsInput(BallSourceInput):
    """Input schema for Rips complexes."""
    d: Rational = Field(description="Scale d > 0")
    simplices: bool = Field(default=False, description="List edges and triangles")


@tool(args_schema=RipsInput)
def rips(
    d: Fraction,
    ball: Optional[str] = None,
    pres: Optional[str] = None,
    radius: Optional[int] = None,
    oracle: str = "dehn",
    mu: Fraction = MU_LIMIT,
    simplices: bool = False,
) -> str:
    """Rips complex of a ball at scale d (vertices measured exactly at that scale)."""
    rc = rips_from_ball(_ball_from(ball, pres, radius, oracle, mu), d)
    if simplices:
        return _dump(rc)
    return _dump(rc.summary())


class FillInput(BallSourceInput):
    """Input schema for loop filling."""
    d: Rational = Field(description="Scale d > 0")
    loop: list[str] = Field(default_factory=list, description="Closed loop as ball vertices (words)")
    all_loops: bool = Field(default=False, description="Fill every closed loop up to max_length")
    max_length: int = Field(default=6, ge=3, description="Loop length bound for all_loops")
    max_cells: int = Field(default=8, ge=0, description="Largest filling searched")
    budget: Optional[int] = Field(default=None, ge=1, description="Loop states explored")
    iso_delta: Optional[Rational] = Field(default=None, description="δ for the isoperimetric check")
    progress: bool = Field(default=False, description="Show a progress bar on stderr")


@tool(args_schema=FillInput)
def fill(
    d: Fraction,
    ball: Optional[str] = None,
    pres: Optional[str] = None,
    radius: Optional[int] = None,
    oracle: str = "dehn",
    mu: Fraction = MU_LIMIT,
    loop: Optional[list] = None,
    all_loops: bool = False,
    max_length: int = 6,
    max_cells: int = 8,
    budget: Optional[int] = None,
    iso_delta: Optional[Fraction] = None,
    progress: bool = False,
) -> str:
    """Least-area filling of a loop in a Rips complex, or a fillability sweep over all short loops."""
    b = _ball_from(ball, pres, radius, oracle, mu)
    rc = rips_from_ball(b, d)
    if all_loops:
        report = check_loops_fillable(rc, max_length, max_cells, budget, iso_delta, progress)
        result = report.model_dump(mode="json")
        result["ok"] = not report.unfilled and not report.isoperimetric_failures
        return _dump(result)
    slot = {name: i for i, name in enumerate(rc.points)}
    try:
        cycle = [slot[b.label(b.vertex(w))] for w in loop or []]
    except KeyError as exc:
        raise BadParameter(f"loop vertex {exc.args[0]} is outside the Rips vertex set") from exc
    if iso_delta is not None:
        check = check_isoperimetric(rc, cycle, iso_delta, max_cells, budget)
        result = check.model_dump(mode="json")
        result["ok"] = check.holds
        return _dump(result)
    found = filling_area_bruteforce(rc, cycle, max_cells, budget)
    return _dump({"filling": None if found is None else found.model_dump(mode="json"), "max_cells": max_cells})


class CertifyInput(BallSourceInput):
    """Input schema for the hyperbolicity certificate."""
    D: int = Field(ge=0, description="Longest relator length")
    R: int = Field(ge=0, description="Radius of the local balls")
    test_constants: bool = Field(default=False, description="Use the scaled-down test constants")
    all_centers: bool = Field(default=False, description="Scan every exactly measured center")


@tool(args_schema=CertifyInput)
def certify_ball(
    D: int,
    R: int,
    ball: Optional[str] = None,
    pres: Optional[str] = None,
    radius: Optional[int] = None,
    oracle: str = "dehn",
    mu: Fraction = MU_LIMIT,
    test_constants: bool = False,
    all_centers: bool = False,
) -> str:
    """Local-to-global hyperbolicity certificate for a Cayley ball."""
    b = _ball_from(ball, pres, radius, oracle, mu)
    cert = certify(b, D, R, TEST_CONSTANTS if test_constants else THEOREM_CONSTANTS, all_centers)
    result = cert.model_dump(mode="json")
    result["ok"] = cert.verdict != "FAIL"
    return _dump(result)


# ═══════════════════════════════════════════════════════════════════════
#  Generators
# ═══════════════════════════════════════════════════════════════════════

class GenAperiodicInput(BaseModel):
    """Input schema for aperiodic words."""
    length: int = Field(ge=1, description="Word length")
    power: int = Field(default=6, ge=2, description="Forbidden power")


@tool(args_schema=GenAperiodicInput)
def gen_aperiodic(length: int, power: int = 6) -> str:
    """Every positive word of the given length over {a, b} with no subword u^power."""
    return _dump(gen_aperiodic_words(length, power))


class GenLacunaryInput(BaseModel):
    """Input schema for lacunary families."""
    source: Literal["aperiodic", "thue-morse"] = Field(default="aperiodic", description="Word source i -> w_i")
    indices: str = Field(default="tower", description="Named index set (tower, all) or comma-separated integers")
    count: int = Field(default=3, ge=0, description="Number of relators")
    lam: Rational = Field(default=Fraction(1, 10), description="Sparseness λ of the companion report")
    mu: Rational = Field(default=MU_LIMIT, description="C'(μ) bound of the companion report")


@tool(args_schema=GenLacunaryInput)
def gen_lacunary(
    source: str = "aperiodic",
    indices: str = "tower",
    count: int = 3,
    lam: Fraction = Fraction(1, 10),
    mu: Fraction = MU_LIMIT,
) -> str:
    """Tiered family with relators w_i for a sparse index set, plus its sparseness report."""
    chosen = indices if indices in ("tower", "all") else [int(x) for x in indices.split(",") if x.strip()]
    family = gen_lacunary_family(source, chosen, count, lam, mu)
    params = {"source": source, "indices": indices, "count": count}
    return _dump({
        "presentation": with_provenance(family.presentation, "lacunary", params),
        "report": family.report.model_dump(mode="json"),
    })


class GenCentralInput(BaseModel):
    """Input schema for central extensions."""
    relators: list[str] = Field(description="Base relators R_1..R_m over {a, b}")
    k: list[int] = Field(description="Exponents k_1..k_m, each at least 2")


@tool(args_schema=GenCentralInput)
def gen_central(relators: list, k: list) -> str:
    """Central extension: R_n commutes with a and b and has order k_n."""
    p = gen_central_extension([parse_word(r) for r in relators], k)
    return _dump({"presentation": with_provenance(p, "central", {"relators": relators, "k": k})})


class GenGpcInput(BaseModel):
    """Input schema for finite quotients H_m."""
    p: int = Field(description="Odd prime")
    s: int = Field(ge=1, description="m = p^s")
    c: list[int] = Field(description="Nondecreasing c_1, c_2, ...")
    window: int = Field(ge=0, description="Commutator laws for n up to window")
    budget: Optional[int] = Field(default=None, ge=1, description="Commutator relator budget")


@tool(args_schema=GenGpcInput)
def gen_gpc(p: int, s: int, c: list, window: int, budget: Optional[int] = None) -> str:
    """Finite p-group quotient H_m of G(p, c)."""
    pr = gen_Gpc_finite_quotient(p, s, c, window, budget)
    params = {"p": p, "s": s, "c": c, "window": window}
    return _dump({"presentation": with_provenance(pr, "gpc", params), "relators": len(pr.relators)})


class GenGnInput(BaseModel):
    """Input schema for G_n truncations."""
    p: int = Field(description="Odd prime")
    c: list[int] = Field(default_factory=list, description="Nondecreasing c_1, c_2, ...")
    n: int = Field(ge=0, description="Stage n")
    N: int = Field(ge=0, le=12, description="Index range [-N, N]")


@tool(args_schema=GenGnInput)
def gen_gn(p: int, n: int, N: int, c: Optional[list] = None) -> str:
    """Truncation of G_n to the generators a_-N..a_N and t (a labeled truncation, not G_n itself)."""
    pr = gen_Gn_truncation(p, c or [], n, N)
    params = {"p": p, "c": c or [], "n": n, "N": N}
    return _dump({"presentation": with_provenance(pr, "gn-truncation", params), "relators": len(pr.relators)})


class GenTorsionInput(BaseModel):
    """Input schema for torsion schedules."""
    p: int = Field(description="Odd prime")
    n0: int = Field(default=243, description="Base exponent, a power of p")
    phi: list[Rational] = Field(description="φ(0), φ(1), ..., φ(r_max)")
    deltas: list[Rational] = Field(description="Hyperbolicity estimates for r = 1..r_max")
    r_max: int = Field(ge=1, description="Last step")


@tool(args_schema=GenTorsionInput)
def gen_torsion(p: int, phi: list, deltas: list, r_max: int, n0: int = 243) -> str:
    """Schedule d_r, i_r and the exponent rule n_A of a torsion family."""
    return _dump(schedule_torsion_params(p, phi, deltas, r_max, n0))


# ═══════════════════════════════════════════════════════════════════════
#  TOOL REGISTRY
# ═══════════════════════════════════════════════════════════════════════

TOOLS_BY_COMMAND = {
    "check-sc": check_sc,
    "pieces": pieces,
    "eps-pieces": eps_pieces,
    "graded-check": graded_check,
    "sparse-check": sparse_check,
    "coset": coset,
    "dehn": dehn,
    "ball": ball,
    "dist": dist,
    "inj": inj,
    "div": div,
    "delta": delta,
    "floyd": floyd,
    "rips": rips,
    "fill": fill,
    "certify": certify_ball,
    "gen-aperiodic": gen_aperiodic,
    "gen-lacunary": gen_lacunary,
    "gen-central": gen_central,
    "gen-gpc": gen_gpc,
    "gen-gn": gen_gn,
    "gen-torsion": gen_torsion,
}

ALL_TOOLS = list(TOOLS_BY_COMMAND.values())
