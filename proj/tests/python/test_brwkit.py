import json
import math

import pytest

import brwkit


def test_version():
    assert brwkit.__version__.count(".") == 2


def test_neighbours_and_distance():
    assert len(brwkit.neighbors("RegularTree", 4, "e")) == 4
    assert brwkit.neighbors("FreeGroup", 2, "1")[1] == "e"
    assert brwkit.neighbors("lattice", 1, "(0)") == ["(1)", "(-1)"]
    assert brwkit.distance("RegularTree", 3, "1.2", "1") == 1
    assert brwkit.distance("RegularTree", 3, "1.2", "2") == 3
    with pytest.raises(brwkit.InvalidElement):
        brwkit.distance("RegularTree", 3, "1.1", "e")


def test_return_probabilities():
    assert brwkit.return_probability("RegularTree", 4, 2) == pytest.approx(0.25)
    assert brwkit.return_probability("RegularTree", 4, 4) == pytest.approx(7 / 64)
    assert brwkit.return_probability("IntegerLattice", 1, 4, "(0)", "(0)") == pytest.approx(0.375)
    p = brwkit.return_probabilities("RegularTree", 4, 10)
    assert len(p) == 11 and p[1] == 0.0


def test_spectral_radius():
    est, closed = brwkit.spectral_radius("RegularTree", 4, 2000)
    assert closed == pytest.approx(math.sqrt(3) / 2)
    assert abs(est - closed) < 0.01


def test_visits_series():
    s = brwkit.visits_series("RegularTree", 4, 1.1, 4)
    assert s[4] == pytest.approx(1.4626359375)


def test_offspring_helpers():
    assert brwkit.thin([0, 0, 1], 0.5) == pytest.approx([0.25, 0.5, 0.25])
    assert brwkit.extinction_probability([0.25, 0.25, 0.5]) == pytest.approx(0.5)
    with pytest.raises(brwkit.DomainError):
        brwkit.thin([0.5, 0.2], 0.5)


def test_trees_and_walks():
    t = brwkit.sample_gw([0, 0, 1], seed=3, max_depth=4)
    assert len(t["parents"]) == 31 and t["parents"][0] == -1
    u = brwkit.sample_gw([0.5, 0, 0.5], seed=3, max_depth=4, unimodular=True)
    assert u["parents"][0] == -1
    values = brwkit.run_walk(t["parents"], "RegularTree", 4, "e", seed=2)
    assert values[0] == "e"
    for v, p in enumerate(t["parents"][1:], start=1):
        assert brwkit.distance("RegularTree", 4, values[v], values[p]) == 1


def test_branching():
    star = [-1, 0, 0, 0]
    assert brwkit.branching_vertices(star, [1, 2, 3], 1, 1) == [0]
    assert brwkit.supported_vertices(star, [1, 2, 3], 3, 1) == [0]
    assert brwkit.magic_bound(10, 4, 2) == 8
    qualifying, comps = brwkit.ends_profile(star, [1, 2, 3], 0, 0, 1)
    assert qualifying == 3 and comps == [(1, 1)] * 3


def test_transport():
    lhs, rhs, equal = brwkit.exact_mtp_check(3, [(0, 1), (1, 2)], [0, 1, 2], "leaf-target", 5)
    assert equal and lhs == pytest.approx(2.0)
    reports = brwkit.pullback_mtp_test("RegularTree", 4, [0.45, 0, 0.55], samples=2000, depth=10)
    assert [r["transport"] for r in reports] == ["leaf-target", "nearest-marked", "degree-ratio"]
    assert all(r["pass"] for r in reports)


def test_intersections():
    assert brwkit.expected_pairs(1.0, 1.0, "RegularTree", 4, 1) == pytest.approx(1.25)
    rec = brwkit.sample_intersections([1.0], [1.0], "RegularTree", 4, 3)
    assert rec["pair_count"] == 1 and rec["I"] == ["e"]


def test_run_experiment(tmp_path):
    code, files, summary = brwkit.run_experiment(
        json.dumps({"experiment": "magic-fuzz", "trees": 20, "max_vertices": 40}), str(tmp_path))
    assert code == 0
    assert "magic.csv" in files and (tmp_path / "manifest.json").exists()
    assert json.loads(summary)["bound_violations"] == 0
    with pytest.raises(brwkit.ConfigError):
        brwkit.run_experiment(json.dumps({"experiment": "nope"}), str(tmp_path))
