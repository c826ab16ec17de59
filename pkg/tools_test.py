"""tools_test.py - the tool registry, invoked the way an agent or the CLI does"""

import json

import pytest
from pydantic import ValidationError

from errors import BadParameter, NotSmallCancellation
from tools import ALL_TOOLS, TOOLS_BY_COMMAND


def run(command: str, **kwargs) -> dict:
    return json.loads(TOOLS_BY_COMMAND[command].invoke(kwargs))


@pytest.fixture
def pres(data_dir):
    return lambda name: str(data_dir / f"{name}.pres")


def test_registry_names_are_unique():
    names = [t.name for t in ALL_TOOLS]
    assert len(names) == len(set(names))
    assert all(t.description for t in ALL_TOOLS)


# ── presentations ─────────────────────────────────────────────────────

def test_check_sc(pres):
    out = run("check-sc", pres=pres("genus2"))
    assert out["ok"]
    assert "delta_bound" not in out
    tighter = run("check-sc", pres=pres("genus2"), mu="1/7")
    assert tighter["delta_bound"] == str(12 * 8 * 49)
    assert not run("check-sc", pres=pres("z2"))["ok"]


def test_check_sc_per_tier(pres):
    out = run("check-sc", pres=pres("lacunary_small"), tiered=True, tier_mus={"2": "1/2"})
    assert [t["tier"] for t in out["tiers"]] == [1, 2]
    assert out["tiers"][1]["lam"] == "1/2"
    assert out["ok"] is False


def test_bad_rational_is_a_validation_error(pres):
    with pytest.raises(ValidationError):
        run("check-sc", pres=pres("genus2"), mu="one sixth")


def test_pieces_listing(pres):
    out = run("pieces", pres=pres("genus2"), list_limit=2)
    assert out["listed"] == 2
    assert out["max_ratio"] == "1/8"


def test_eps_pieces_need_a_shared_alphabet(pres):
    out = run("eps-pieces", pres=pres("z2"), base=pres("free2"), eps=0, mu="1/6")
    assert out["max_ratio"] == "1/4"
    assert not out["ok"]
    with pytest.raises(BadParameter):
        run("eps-pieces", pres=pres("genus2"), base=pres("free2"), eps=0, mu="1/6")


def test_graded_check_from_file_and_inline(data_dir, pres):
    assert run("graded-check", schedule=str(data_dir / "schedule.json"))["ok"]
    inline = json.dumps({"params": [[0, "1/100", 10], [17, "1/200", 10**10]], "alpha": "1/100", "K": 1000000})
    assert run("graded-check", schedule=inline, pres=pres("lacunary_small"))["ok"]


def test_sparse_check(pres):
    out = run("sparse-check", pres=pres("lacunary_small"), lambda_floor="1/4")
    assert out["spectrum"] == [2, 16]
    assert out["ok"]


def test_coset(pres):
    assert run("coset", pres=pres("s3"))["order"] == 6
    assert run("coset", pres=pres("s3"), subgroup=["a"])["order"] == 2
    assert run("coset", pres=pres("z2"), max_cosets=100)["status"] == "INCONCLUSIVE"


# ── Dehn ──────────────────────────────────────────────────────────────

def test_dehn_reduces_the_relator(pres):
    out = run("dehn", pres=pres("genus2"), word="abABcdCD", trace=True)
    assert out["trivial"]
    assert out["final"] == "1"
    assert out["cells_used"] == 1
    assert out["area_check"]["holds"]
    assert out["trace_text"].splitlines()[-1] == "final  1"


def test_dehn_decides_equality(pres):
    out = run("dehn", pres=pres("genus2"), word="abAB", equal="dcDC")
    assert out["equal"] is True
    assert run("dehn", pres=pres("genus2"), word="ab", equal="ba")["equal"] is False


def test_dehn_refuses_non_small_cancellation(pres):
    with pytest.raises(NotSmallCancellation):
        run("dehn", pres=pres("z2"), word="abAB")
    with pytest.raises(NotSmallCancellation):
        run("dehn", pres=pres("free2"), word="ab")


# ── balls and measurements ────────────────────────────────────────────

def test_ball_export_feeds_the_measurements(pres, tmp_path):
    out = run("ball", pres=pres("z2"), radius=4, oracle="abelian")
    assert out["vertices"] == 41
    assert out["sizes"] == [1, 5, 13, 25, 41]
    path = tmp_path / "z2.json"
    path.write_text(json.dumps(out["ball"]))

    d = run("dist", ball=str(path), u="1", v="ab", geodesic_limit=5)
    assert (d["value"], d["status"]) == (2, "EXACT")
    assert len(d["geodesics"]) == 2
    assert run("delta", ball=str(path), thin=False)["gromov_delta_p"] == "1"
    assert run("rips", ball=str(path), d="1")["triangles"] == 0


def test_ball_tools_need_a_source():
    with pytest.raises(BadParameter):
        run("delta")


def test_injectivity_tool(pres):
    out = run("inj", g=pres("infinite_cyclic"), q=pres("cyclic16"), cap=10)
    assert out["value"] == 7
    with pytest.raises(BadParameter):
        run("inj", g=pres("genus2"), q=pres("cyclic16"), cap=2)


def test_divergence_single_and_profile(pres):
    single = run("div", pres=pres("free2"), radius=6, oracle="free", a="aa", b="bb", c="1", delta="1/2", lam="0")
    assert single["value"] == "INFINITE_IN_BALL"
    profile = run("div", pres=pres("free2"), radius=3, oracle="free", nmax=1)["profile"]
    assert profile["entries"][0]["value"] == 1
    with pytest.raises(BadParameter):
        run("div", pres=pres("free2"), radius=3, oracle="free", a="aa")
    with pytest.raises(BadParameter):
        run("div", pres=pres("free2"), radius=3, oracle="free")


def test_floyd_tool(pres):
    out = run("floyd", pres=pres("free2"), radius=2, oracle="free", v="aa")
    assert out["value"] == "5/4"
    far = run("floyd", pres=pres("free2"), radius=2, oracle="free")
    assert far["value"] == "5/4"
    assert far["diameter_from_u"]


def test_fill_and_isoperimetry(pres):
    source = dict(pres=pres("z2"), radius=4, oracle="abelian", d="2")
    out = run("fill", loop=["1", "a", "ab", "b"], **source)
    assert out["filling"]["cells"] == 2
    iso = run("fill", loop=["1", "a", "ab", "b"], iso_delta="1/4", **source)
    assert iso["ok"]
    with pytest.raises(BadParameter):
        run("fill", loop=["1", "aaaa", "b"], **source)


def test_certify_tool(pres):
    out = run("certify", pres=pres("free2"), radius=8, oracle="free", D=1, R=4, test_constants=True)
    assert out["verdict"] == "PASS"
    assert out["ok"]
    lattice = run("certify", pres=pres("z2"), radius=8, oracle="abelian", D=1, R=4, test_constants=True)
    assert lattice["verdict"] == "FAIL"
    assert not lattice["ok"]


# ── generators ────────────────────────────────────────────────────────

def test_generators():
    assert run("gen-aperiodic", length=6)["count"] == 62
    family = run("gen-lacunary", count=2)
    assert family["presentation"].startswith("# provenance:")
    assert family["report"]["spectrum"] == [2, 16]
    custom = run("gen-lacunary", indices="2,16", count=2)
    assert custom["presentation"].splitlines()[1:] == family["presentation"].splitlines()[1:]
    assert run("gen-gn", p=3, n=0, N=1)["relators"] == 5
    assert run("gen-gpc", p=3, s=1, c=[1], window=1)["relators"] == 13
    central = run("gen-central", relators=["ab"], k=[2])["presentation"]
    assert "rel: abab" in central
    torsion = run("gen-torsion", p=3, phi=["0", "1", "2"], deltas=["1", "1"], r_max=2)
    assert torsion["i"] == [0, 2, 16]
