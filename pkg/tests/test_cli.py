import json

import pytest

from cmstar.cli import EXIT_INPUT, EXIT_OK, main, validate_report


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, json.loads(out) if out.strip() else None


def test_classgroup_running_example(capsys):
    code, rep = run(capsys, "classgroup", "--field", "53,500", "--m", "2")
    assert code == EXIT_OK
    assert rep["invariants"] == [8, 4] and rep["order"] == "32"
    assert len(rep["generators"]) == 2


def test_classgroup_reflex_and_narrow(capsys):
    assert run(capsys, "classgroup", "--field", "106,809", "--m", "1")[1]["invariants"] == [8]
    code, rep = run(capsys, "classgroup", "--quadratic", "809", "--narrow", "--m", "1")
    assert code == EXIT_OK and rep["invariants"] == []


def test_shimura_report_and_unit_round_trip(capsys):
    from cmstar.nfield import CMField
    from cmstar.units import unit_group
    code, rep = run(capsys, "shimura", "--field", "53,500", "--m", "2")
    assert code == EXIT_OK
    assert rep["invariants"] == [8, 4]
    assert rep["order_identity"]["holds"]
    assert rep["units"]["eps0"] == "30506849866*a0 + 374579495409"
    assert rep["units"]["eps0"] == str(unit_group(CMField(53, 500)).eps0)


def test_star_commands(capsys):
    code, rep = run(capsys, "star", "--field", "65,425", "--m", "8")
    assert code == EXIT_OK and rep["verdict"]["holds"]
    assert rep["reflex"] == {"A": 130, "B": 2525}
    assert not run(capsys, "star", "--field", "65,425", "--m", "4")[1]["verdict"]["holds"]
    sel = run(capsys, "star", "--field", "65,425", "--find-ms")[1]["selection"]
    assert sel["m_S"] == 8 and sel["theorem_check"]
    assert run(capsys, "star", "--field", "65,425", "--mixed", "8,4")[1]["mixed"]["holds"] is False
    assert run(capsys, "star", "--field", "65,425", "--minimal", "--bound", "6")[1]["minimal_m"] == 5


def test_analytic_from_ideal_and_from_matrix(capsys):
    code, rep = run(capsys, "analytic", "--field", "53,500", "--ideal", "49,alpha+5", "--theta-table")
    assert code == EXIT_OK
    assert len(rep["theta"]) == 16
    assert float(rep["omega"][0][1]["re"]) == pytest.approx(-0.160357, abs=1e-6)
    code, rep2 = run(capsys, "analytic", "--omega", "1.5852i,-0.16036,-0.16036,0.5+1.7723i")
    assert code == EXIT_OK
    a, b = float(rep["igusa"][0]["re"]), float(rep2["igusa"][0]["re"])
    assert abs(a - b) / abs(a) < 1e-2
    code, rep3 = run(capsys, "analytic", "--omega", "[[1.5852i,-0.16036],[-0.16036,0.5+1.7723i]]")
    assert code == EXIT_OK and rep3["igusa"] == rep2["igusa"]


def test_reports_are_deterministic(capsys):
    main(["classgroup", "--field", "106,809", "--m", "3"])
    first = capsys.readouterr().out
    main(["classgroup", "--field", "106,809", "--m", "3"])
    assert capsys.readouterr().out == first


def test_reports_are_identical_across_processes():
    import subprocess
    import sys
    cmd = [sys.executable, "-m", "cmstar.cli", "--seed", "3", "classgroup", "--field", "106,809", "--m", "2"]
    outs = [subprocess.run(cmd, capture_output=True, text=True, check=True).stdout for _ in range(2)]
    assert outs[0] == outs[1] and json.loads(outs[0])["seed"] == 3


@pytest.mark.parametrize("argv", [
    ["classgroup", "--field", "4,1"],             # biquadratic
    ["classgroup", "--field", "53"],              # malformed
    ["classgroup", "--field", "-5,4"],            # not CM
    ["classgroup", "--field", "53,500", "--m", "0"],
    ["classgroup", "--quadratic", "49"],          # square
    ["classgroup"],                               # no field
    ["star", "--field", "53,500"],                # no mode
    ["star", "--field", "53,500", "--minimal"],   # no bound
    ["analytic", "--field", "53,500", "--ideal", "0"],
    ["analytic", "--omega", "1j,0.5,0.2,1j"],     # not symmetric
    ["nonsense"],
])
def test_bad_input_exit_code(capsys, argv):
    code = main(argv)
    capsys.readouterr()
    assert code == EXIT_INPUT


def test_error_reports_are_structured(capsys):
    code, rep = run(capsys, "classgroup", "--field", "4,1")
    assert code == EXIT_INPUT
    assert rep["command"] == "classgroup" and "biquadratic" in rep["error"]
    validate_report(rep)


def test_schema_rejects_malformed_reports():
    import jsonschema
    with pytest.raises(jsonschema.ValidationError):
        validate_report({"command": "classgroup", "invariants": [-1]})
    with pytest.raises(jsonschema.ValidationError):
        validate_report({"invariants": [2]})
