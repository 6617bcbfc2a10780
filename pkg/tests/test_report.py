import json
import random
from fractions import Fraction

import pytest

from latcoh.cli import EXIT_INVALID, EXIT_OK, EXIT_RESOURCE, main
from latcoh.corpus import SWTable, bundled_sw, load_graph
from latcoh.lattice import add, scale
from latcoh.report import (Report, ReportError, conjecture_check, property_A_row, run_analyze, sw_rhs)

from conftest import canonical, lattice


@pytest.fixture(scope="module")
def nv1_report():
    return run_analyze(load_graph("nv1"))


def test_nv1_conjecture_row(nv1_report):
    o = nv1_report.orbits[0]
    assert (o.eu0, o.eu_star, o.d) == (4, 3, 0)
    c = o.conjecture
    assert c["rhs"] == "3" and c["sw"] == "-2"
    assert c["hf5_match"] and not c["hf4_match"] and not c["hf4_is_theorem"]
    assert o.paths["bound"] == 4


def test_report_json_roundtrip(nv1_report):
    d = nv1_report.to_dict()
    text = json.dumps(d)
    again = Report.from_dict(json.loads(text))
    assert again.to_dict() == d
    assert d["schema"] == "latcoh-report/1"
    assert again.text() == nv1_report.text()


def test_c4_sw_from_rhs():
    lat = lattice("c4")
    entry = bundled_sw().get(lat.graph.digest(), 0)
    sw = entry.sw_value(lat.square(lat.K) + lat.s)
    assert sw == Fraction(-5, 2)
    assert sw_rhs(lat, lat.K, sw) == 8
    row = conjecture_check(canonical("c4").module, Fraction(8), False)
    assert row["hf5_match"] and not row["hf4_match"]


@pytest.mark.parametrize("name", ["e8", "a3", "tree_rat", "star_235"])
def test_rational_rhs_is_zero(name):
    rep = run_analyze(load_graph(name), spinc="all", paths="off")
    for o in rep.orbits:
        assert o.conjecture["rhs"] == "0"
        assert o.conjecture["hf4_match"] and o.conjecture["hf5_match"]


def test_non_qhs_has_no_sw_row():
    rep = run_analyze(load_graph("el4"), paths="off")
    assert rep.orbits[0].conjecture is None and rep.orbits[0].d is None
    assert any("rational homology sphere" in n for n in rep.notes)
    with pytest.raises(ReportError):
        sw_rhs(lattice("el4"), lattice("el4").K, 0)


def test_sw_file_needs_one_datum():
    with pytest.raises(ValueError):
        SWTable.from_json('{"entries": [{"digest": "x", "sw": "1", "rhs": "2"}]}')


def test_reduction_identity_on_random_classes():
    rng = random.Random(17)
    for name in ("nv1", "tree_rat", "star_334", "c4"):
        lat = lattice(name)
        reps = lat.discriminant.reps
        for _ in range(12):
            h = reps[rng.randrange(len(reps))]
            lp = add(scale(-1, lat.lift_antinef(h)), tuple(-rng.randint(0, 2) for _ in range(lat.s)))
            row = property_A_row(lat, lp)
            assert row["reduction_ok"], row


def test_property_A_rhs_for_nv1():
    lat = lattice("nv1")
    row = property_A_row(lat, [0] * 7, sw=-2, h1=3)
    assert row["member"] and row["rhs"] == "3" and row["match"]


def test_select_orbit_errors():
    with pytest.raises(ReportError):
        run_analyze(load_graph("a3"), spinc="9")
    with pytest.raises(ReportError):
        run_analyze(load_graph("a3"), spinc="most")


def test_parallel_orbits_match_serial():
    g = load_graph("star_334")
    a = run_analyze(g, spinc="all", paths="off")
    b = run_analyze(g, spinc="all", paths="off", jobs=2)
    assert a.to_dict() == b.to_dict()


# ---- command line

def test_cli_analyze_json(capsys):
    assert main(["analyze", "@nv1", "--format", "json"]) == EXIT_OK
    data = json.loads(capsys.readouterr().out)
    assert data["orbits"][0]["module_text"] == canonical("nv1").module.text()


def test_cli_classify(capsys):
    assert main(["classify", "@x2y3z7"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "kind=elliptic" in out and "almost rational: true" in out


def test_cli_moves(capsys):
    assert main(["moves", "@a3", "--blowup", load_graph("a3").ids[1], "--check"]) == EXIT_OK
    assert "equal up to shift: True" in capsys.readouterr().out


def test_cli_path(capsys):
    assert main(["path", "@nv1", "--format", "json"]) == EXIT_OK
    data = json.loads(capsys.readouterr().out)
    assert data["bound"] == 4 and data["exact"]


def test_cli_oracle(capsys):
    assert main(["oracle", "@el4"]) == EXIT_OK
    assert "FAIL" not in capsys.readouterr().out


def test_cli_invalid_input(tmp_path, capsys):
    bad = tmp_path / "bad.graph"
    bad.write_text("v a -1\nv b -1\ne a b\n")
    assert main(["analyze", str(bad)]) == EXIT_INVALID
    assert main(["analyze", str(tmp_path / "missing.graph")]) == EXIT_INVALID
    assert main(["path", "@a3", "--l-prime", "1/3,0,0"]) == EXIT_INVALID
    assert main(["analyze", "@nosuchgraph"]) == EXIT_INVALID
    assert "invalid input" in capsys.readouterr().err


def test_cli_resource_limit(capsys):
    assert main(["analyze", "@e8", "--region", "full", "--nmax", "60", "--budget", "1000", "--paths", "off"]) == EXIT_RESOURCE
    assert "resource limit" in capsys.readouterr().err
