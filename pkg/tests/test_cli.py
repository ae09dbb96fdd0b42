from __future__ import annotations

import json
from pathlib import Path

import pytest

from foliation_lab import scenarios as builders
from foliation_lab.cli import parse_partition, run
from foliation_lab.documents import (
    parse_scenario,
    parse_scenario_text,
    scenario_digest,
    scenario_to_document,
    write_scenario,
)
from foliation_lab.errors import OrbitNotClosed, ParseError, ValidationError
from foliation_lab.eta import Method

SCENARIOS = Path(__file__).resolve().parent.parent / "scenarios"


def doc_of(name: str) -> dict:
    return json.loads((SCENARIOS / f"{name}.scenario").read_text())


def write_doc(tmp_path, doc, name="s.scenario") -> Path:
    path = tmp_path / name
    path.write_text(json.dumps(doc, indent=2))
    return path


# ---- documents --------------------------------------------------------------

@pytest.mark.parametrize("name", ["iz_quartic", "iz_quartic_over_square", "identity_z", "compact_leaf"])
def test_shipped_scenarios_match_builders(name):
    assert parse_scenario(SCENARIOS / f"{name}.scenario") == getattr(builders, name)()


@pytest.mark.parametrize("name", ["iz_quartic", "iz_quartic_over_square", "identity_z", "compact_leaf"])
def test_round_trip(name, tmp_path):
    first = parse_scenario(SCENARIOS / f"{name}.scenario")
    out = tmp_path / "copy.scenario"
    write_scenario(first, out)
    second = parse_scenario(out)
    assert second == first
    assert scenario_digest(second) == scenario_digest(first)
    assert scenario_to_document(second) == scenario_to_document(first)


def test_degenerate_phi_is_a_validation_error():
    doc = doc_of("iz_quartic")
    doc["phi"] = {"a": [1, 0], "b": [2, 0], "c": [2, 0], "d": [4, 0]}
    with pytest.raises(ValidationError) as info:
        parse_scenario_text(json.dumps(doc))
    assert (info.value.field, info.value.reason) == ("phi", "degenerate")


def test_perturbed_multiplier_is_a_validation_error():
    with pytest.raises(ValidationError) as info:
        parse_scenario(SCENARIOS / "perturbed_mu.scenario")
    assert (info.value.field, info.value.reason) == ("family", "NotProjectivelyInvariant")


def test_non_invariant_function_with_auto_multiplier():
    doc = doc_of("iz_quartic")
    doc["family"]["g_num"] = [[-1, 0], [1, 0]]
    doc["family"]["g_den"] = [[1, 0]]
    doc["family"]["mu"] = "auto"
    with pytest.raises(ValidationError) as info:
        parse_scenario_text(json.dumps(doc))
    assert info.value.field == "family"


def test_common_factor_is_a_validation_error():
    doc = doc_of("identity_z")
    doc["family"]["g_num"] = [[0, 0], [1, 0]]
    doc["family"]["g_den"] = [[0, 0], [2, 0]]
    with pytest.raises(ValidationError) as info:
        parse_scenario_text(json.dumps(doc))
    assert (info.value.field, info.value.reason) == ("family.g", "InvalidRationalFunction")


def test_negative_speed_is_a_validation_error():
    doc = doc_of("identity_z")
    doc["speed"] = {"a0": 0.2, "terms": [{"k": 1, "sin": 1.0}]}
    with pytest.raises(ValidationError) as info:
        parse_scenario_text(json.dumps(doc))
    assert (info.value.field, info.value.reason) == ("speed", "NegativeSpeed")


def test_hyperbolic_file_raises_orbit_not_closed():
    with pytest.raises(OrbitNotClosed):
        parse_scenario(SCENARIOS / "hyperbolic_bad.scenario")


def test_parse_errors_name_the_field_and_line():
    doc = doc_of("identity_z")
    doc["speed"]["a0"] = "fast"
    text = json.dumps(doc, indent=2)
    with pytest.raises(ParseError) as info:
        parse_scenario_text(text)
    assert info.value.field == "speed.a0"
    assert '"a0"' in text.splitlines()[info.value.line - 1]

    del doc["phi"]
    with pytest.raises(ParseError) as info:
        parse_scenario_text(json.dumps(doc))
    assert info.value.field == "phi"

    with pytest.raises(ParseError) as info:
        parse_scenario_text("{\n  \"phi\": \n")
    assert info.value.line == 3


def test_unknown_tolerance_rejected():
    doc = doc_of("identity_z")
    doc["tolerances"]["speed"] = 1.0
    with pytest.raises(ParseError):
        parse_scenario_text(json.dumps(doc))


def test_partition_parsing():
    assert parse_partition("A,B") == {0: Method.ARGUMENT_PRINCIPLE, 1: Method.SURFACE_QUADRATURE}
    assert parse_partition("1:b") == {1: Method.SURFACE_QUADRATURE}
    assert parse_partition(None) is None


# ---- run --------------------------------------------------------------------

def test_verify_passes(capsys):
    assert run(["verify", str(SCENARIOS / "iz_quartic.scenario")]) == 0
    out = capsys.readouterr().out
    assert "PASSED" in out
    residual = float(out.split("residual = ")[1].split()[0])
    assert residual < 1e-9


def test_verify_hyperbolic_exit_code(capsys):
    assert run(["verify", str(SCENARIOS / "hyperbolic_bad.scenario")]) == 1
    err = capsys.readouterr().err
    assert "OrbitNotClosed: zero at 1+0i not periodic under phi (n_max=64)" in err


def test_verify_perturbed_exit_code(capsys):
    assert run(["verify", str(SCENARIOS / "perturbed_mu.scenario")]) == 1
    assert "NotProjectivelyInvariant" in capsys.readouterr().err


def test_formula_failure_exits_2_and_still_writes_report(tmp_path, capsys):
    doc = doc_of("iz_quartic")
    doc["tolerances"]["residual"] = 0.0     # nothing can pass a zero threshold
    path = write_doc(tmp_path, doc)
    out = tmp_path / "report.json"
    assert run(["verify", str(path), "--json", str(out)]) == 2
    report = json.loads(out.read_text())
    assert report["passed"] is False
    assert report["diagnostic_code"] is None
    assert len(report["orbits"]) == 2


def test_usage_error_exits_1(capsys):
    assert run(["verify"]) == 1
    assert run(["order", "--num", "-1,1", "--center", "0,0", "--radius", "1"]) == 1


def test_missing_file_exits_1(tmp_path, capsys):
    assert run(["verify", str(tmp_path / "nope.scenario")]) == 1


def test_parse_error_exits_1(tmp_path, capsys):
    path = tmp_path / "bad.scenario"
    path.write_text("{ not json")
    assert run(["verify", str(path)]) == 1
    assert "ParseError" in capsys.readouterr().err


def test_json_report_shape(tmp_path, capsys):
    out = tmp_path / "r.json"
    assert run(["verify", str(SCENARIOS / "iz_quartic_over_square.scenario"), "--json", str(out)]) == 0
    report = json.loads(out.read_text())
    assert report["version"] == "1"
    assert [(o["period_n"], o["order"]) for o in report["orbits"]] == [(1, -2), (1, -2), (4, 1)]
    assert any(p["chart"] == "infinity" and p["z"] is None for o in report["orbits"] for p in o["points"])


def test_orbits_command(capsys):
    assert run(["orbits", str(SCENARIOS / "iz_quartic.scenario")]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0].startswith("0: n=1") and "ord=+4" in lines[0]
    assert lines[1].startswith("1: n=4") and "ord=-1" in lines[1]


@pytest.mark.parametrize("center,expected", [("1,0", "3"), ("0,0", "0"), ("-2,0", "-1")])
def test_order_command(center, expected, capsys):
    radius = "0.1" if center == "0,0" else "0.5"
    assert run(["order", "--num=-1,3,-3,1", "--den", "2,1", f"--center={center}", "--radius", radius]) == 0
    assert capsys.readouterr().out.strip() == expected


def test_arith_commands(capsys):
    assert run(["arith", "--rational", "12/5"]) == 0
    out = capsys.readouterr().out
    assert float(out.split("residual = ")[1].split()[0]) < 1e-13
    assert run(["arith", "--gaussian", "3+4i"]) == 0
    assert "(2+i)" in capsys.readouterr().out
    assert run(["arith", "--rational", "0"]) == 1


def test_analogy_command(capsys):
    assert run(["analogy", str(SCENARIOS / "iz_quartic.scenario"), "--rational", "12/5"]) == 0
    out = capsys.readouterr().out
    assert "g1" in out and "(2)" in out


def test_compact_leaf_verify(capsys):
    assert run(["verify", str(SCENARIOS / "compact_leaf.scenario")]) == 0
    assert "boundary balance residual" in capsys.readouterr().out
