"""cayley_test.py - oracles, ball construction, distances and injectivity radii"""

import json
import struct
from math import comb

import numpy as np
import pytest

import presentation
from cayley import (
    BINARY_MAGIC,
    AbelianOracle,
    Ball,
    CosetOracle,
    DehnOracle,
    FreeOracle,
    NormalFormOracle,
    build_ball,
    dist,
    geodesics,
    growth_intersection,
    injectivity_radius,
    load_ball,
    make_oracle,
    shortest_path_avoiding,
)
from errors import (
    BadParameter,
    MemoryBudgetExceeded,
    NotAQuotient,
    NotExact,
    NotInBall,
    OracleBudgetExceeded,
)
from freeword import Alphabet
from zoo import gen_lacunary_family


# ── oracles ───────────────────────────────────────────────────────────

def test_oracles_count_calls(ab):
    oracle = FreeOracle(ab)
    assert oracle.equal("aA", "")
    oracle.key("ab")
    assert oracle.calls == 2


def test_abelian_oracle_with_torsion(ab):
    oracle = AbelianOracle(ab, [4, 0])
    assert oracle.equal("aaaa", "")
    assert oracle.equal("ab", "ba")
    assert not oracle.equal("b", "")


def test_coset_oracle_knows_the_order(data_dir):
    oracle = CosetOracle(presentation.load(data_dir / "s3.pres"))
    assert oracle.order == 6
    assert oracle.is_trivial("abab")
    assert not oracle.is_trivial("ab")


def test_coset_oracle_needs_a_closed_table(data_dir):
    with pytest.raises(OracleBudgetExceeded):
        CosetOracle(presentation.load(data_dir / "z2.pres"), max_cosets=100)


def test_dehn_oracle_uses_exponent_keys(genus2):
    oracle = DehnOracle(genus2)
    assert oracle.moduli == (0, 0, 0, 0)
    assert oracle.equal("abAB", "dcDC")
    assert not oracle.equal("a", "b")


def test_make_oracle_guards_its_backends(genus2, z2, data_dir):
    free = presentation.load(data_dir / "free2.pres")
    assert make_oracle("free", free).name == "free"
    with pytest.raises(BadParameter):
        make_oracle("free", z2)
    assert make_oracle("abelian", z2).moduli == (0, 0)
    with pytest.raises(BadParameter):
        make_oracle("abelian", genus2)
    assert make_oracle("abelian", presentation.load(data_dir / "torus_mod4.pres")).moduli == (4, 4)
    with pytest.raises(BadParameter):
        make_oracle("magic", z2)


# ── balls ─────────────────────────────────────────────────────────────

def test_free_ball_sizes(free_ball):
    # |S(k)| = 4 * 3^(k-1)
    assert free_ball.layer_sizes() == [1] + [4 * 3 ** (k - 1) for k in range(1, 9)]
    assert len(free_ball) == 1 + 2 * (3 ** 8 - 1)
    assert free_ball.graph.number_of_edges() == len(free_ball) - 1


def test_z2_ball_sizes_match_lattice_count(z2_ball):
    # |x| + |y| <= n has 2n^2 + 2n + 1 points
    assert z2_ball.sizes_by_radius() == [2 * n * n + 2 * n + 1 for n in range(9)]


def test_z2_ball_sizes_hold_out_to_radius_thirty(ab):
    ball = build_ball(AbelianOracle(ab), 30)
    assert ball.sizes_by_radius() == [2 * n * n + 2 * n + 1 for n in range(31)]
    assert ball.layer_sizes()[1:] == [4 * n for n in range(1, 31)]


def test_normal_forms_are_shortlex_least(z2_small):
    assert z2_small.label(z2_small.locate("ba")) == "ab"
    assert z2_small.label(z2_small.vertex("BA")) == "AB"
    assert z2_small.vertex("1") == 0


def test_boundary_edges_are_collected():
    # in Z/3 the two vertices at distance 1 are joined by an edge
    oracle = AbelianOracle(Alphabet(("a",)), [3])
    ball = build_ball(oracle, 1)
    assert len(ball) == 3
    assert ball.graph.number_of_edges() == 3


def test_genus2_ball_through_dehn_oracle(genus2):
    ball = build_ball(DehnOracle(genus2), 3)
    # no relation shorter than 8 letters, so the 3-ball is the free one
    assert ball.layer_sizes() == [1, 8, 56, 392]


def test_torus_quotient_ball_reaches_the_whole_group(data_dir):
    p = presentation.load(data_dir / "torus_mod4.pres")
    ball = build_ball(make_oracle("coset", p), 6)
    assert len(ball) == 16
    assert ball.layer_sizes()[-1] == 0


def test_budgets(ab):
    with pytest.raises(MemoryBudgetExceeded):
        build_ball(FreeOracle(ab), 5, max_vertices=50)
    with pytest.raises(OracleBudgetExceeded):
        build_ball(FreeOracle(ab), 5, oracle_budget=20)
    with pytest.raises(BadParameter):
        build_ball(FreeOracle(ab), -1)


def test_locate_leaves_the_ball(z2_small):
    with pytest.raises(NotInBall):
        z2_small.locate("aaaaa")


def test_json_export_reloads(z2_small, tmp_path):
    path = tmp_path / "ball.json"
    path.write_text(z2_small.to_json())
    again = load_ball(path)
    assert again.reps == z2_small.reps
    assert again.edges() == z2_small.edges()
    assert again.cayley


def test_report_envelope_reloads(z2_small, tmp_path):
    path = tmp_path / "report.json"
    path.write_text(json.dumps({"tool": "lacuna", "result": {"ball": z2_small.to_dict()}}))
    assert len(load_ball(path)) == len(z2_small)


def test_generic_graph_input_gets_bfs_distances():
    ball = Ball.from_dict({"vertices": ["p", "q", "r"], "edges": [[0, 1], [1, 2]]})
    assert ball.dist0 == [0, 1, 2]
    assert ball.radius == 2
    assert not ball.cayley
    assert ball.vertex("q") == 1


def test_binary_layout(z2_small):
    blob = z2_small.to_binary()
    assert blob[:4] == BINARY_MAGIC
    radius, count = struct.unpack_from("<II", blob, 4)
    assert (radius, count) == (4, len(z2_small))
    offset = 12
    for w in z2_small.reps:
        (n,) = struct.unpack_from("<I", blob, offset)
        assert blob[offset + 4:offset + 4 + n].decode() == w
        offset += 4 + n
    (edges,) = struct.unpack_from("<I", blob, offset)
    pairs = np.frombuffer(blob, dtype="<u4", offset=offset + 4).reshape(-1, 2)
    assert edges == len(pairs) == len(z2_small.edges())


# ── distances ─────────────────────────────────────────────────────────

def test_exact_and_uncertain_distances(z2_ball):
    d = dist(z2_ball, "aa", "bb")
    assert (d.value, d.status) == (4, "EXACT")
    far = dist(z2_ball, "aaaaaaa", "BBBBBBB")
    assert far.status == "UNCERTAIN"


def test_geodesic_count_matches_lattice_paths(z2_ball):
    paths = geodesics(z2_ball, "1", "aaabb", limit=100)
    assert len(paths) == comb(5, 2)
    with pytest.raises(NotExact):
        geodesics(z2_ball, "aaaaa", "BBBBB")


def test_free_group_has_unique_geodesics(free_ball):
    assert len(geodesics(free_ball, "ab", "Ab")) == 1


def test_path_avoiding_a_vertex(z2_ball, free_ball):
    origin = z2_ball.vertex("1")
    detour = shortest_path_avoiding(z2_ball, "a", "A", [origin])
    assert detour.length == 4
    assert shortest_path_avoiding(free_ball, "a", "A", [free_ball.vertex("1")]) is None
    with pytest.raises(BadParameter):
        shortest_path_avoiding(z2_ball, "1", "a", [origin])


def test_growth_intersection_with_a_subgroup(z2_ball):
    counts = growth_intersection(z2_ball, lambda w: "b" not in w.lower())
    assert counts == [2 * n + 1 for n in range(9)]


# ── injectivity radius ────────────────────────────────────────────────

def test_injectivity_into_a_finite_cyclic_quotient(data_dir):
    G = presentation.load(data_dir / "infinite_cyclic.pres")
    Q = presentation.load(data_dir / "cyclic16.pres")
    report = injectivity_radius(make_oracle("dehn", G), make_oracle("coset", Q), 10)
    assert report.value == 7
    assert not report.at_least
    assert report.witness is not None


def test_injectivity_reaches_the_cap_under_a_normal_form(data_dir, ab):
    # <a, b | ab> is Z with a^(sum_a - sum_b) as normal form
    G = presentation.load(data_dir / "infinite_cyclic.pres")
    Q = NormalFormOracle(ab, lambda w: ab.exponent_sums(w)[0] - ab.exponent_sums(w)[1])
    report = injectivity_radius(make_oracle("dehn", G), Q, 6)
    assert report.value == 6
    assert report.at_least
    assert report.witness is None


def test_lacunary_second_tier_injects_the_radius_seven_ball():
    family = gen_lacunary_family(count=2)
    p = family.presentation
    # G_1 = <a, b | aB> is Z and the length-16 relator cuts it to Z/16
    G = make_oracle("dehn", p.up_to_tier(1))
    Q = make_oracle("coset", p.up_to_tier(2))
    assert Q.order == 16
    report = injectivity_radius(G, Q, 8)
    assert report.value == 7
    assert report.value >= family.report.gaps[0].injectivity_floor
    assert not report.at_least
    assert set(report.witness) == {"aaaaaaaa", "AAAAAAAA"}


def test_injectivity_needs_a_quotient(ab):
    with pytest.raises(NotAQuotient):
        injectivity_radius(AbelianOracle(ab), FreeOracle(ab), 2)


def test_injectivity_from_free_group_into_torsion(ab):
    report = injectivity_radius(FreeOracle(ab), AbelianOracle(ab, [3, 0]), 4)
    # aa and A agree in Z/3 x Z
    assert report.value == 1
    assert set(report.witness) == {"A", "aa"}
