import io
import json
import subprocess
import sys

import pytest

from toricconn import library
from toricconn.cli import main
from toricconn.errors import ParseError
from toricconn.pipeline import PipelineOptions, parse_controls, run_pipeline


def run(argv):
    out = io.StringIO()
    code = main(argv, out=out)
    return code, out.getvalue()


def report_for(tmp_path, argv):
    path = tmp_path / "report.json"
    code, text = run(argv + ["--report", str(path)])
    return code, text, json.loads(path.read_text(encoding="utf-8")), path.read_bytes()


def test_p1_o2_passes(tmp_path):
    code, text, rep, _ = report_for(tmp_path, ["verify", "--fan", "builtin:p1", "--bundle", "builtin:O(2)"])
    assert code == 0 and rep["verdict"] == "pass"
    traces = rep["checks"]["first_chern"]["residue_traces"]
    # sum of traces is sign * degree
    assert sum(int(t) for t in traces) == -2
    assert "verdict: PASS" in text


def test_p2_tangent_passes(tmp_path):
    code, _, rep, _ = report_for(tmp_path, ["verify", "--fan", "builtin:p2", "--bundle", "builtin:tangent"])
    assert code == 0
    assert rep["checks"]["curvature"]["charts"] == [0, 1, 2]
    assert rep["checks"]["gauge"]["distinct_pairs"] == 6
    assert rep["checks"]["prop3"]["status"] == "skipped"


def test_corrupted_cocycle_named_pair(tmp_path):
    code, _, rep, _ = report_for(tmp_path, ["verify", "--bundle", "builtin:p1/corrupted-cocycle"])
    assert code == 13
    assert rep["verdict"] == "fail"
    assert rep["checks"]["cocycle"]["error"] == "CocycleFailure"
    assert "pair (0, 1)" in rep["checks"]["cocycle"]["message"]


def test_report_is_byte_identical(tmp_path):
    argv = ["verify", "--fan", "builtin:f2", "--bundle", "builtin:tangent"]
    a = report_for(tmp_path, argv)[3]
    b = report_for(tmp_path, argv)[3]
    assert a == b


@pytest.mark.parametrize("fx", library.CONTROLS, ids=lambda fx: fx.key)
def test_controls_fail_with_documented_error(fx):
    fan = library.get_fan(fx.fan)
    rep = run_pipeline(fan, library.build(fx), PipelineOptions(controls=parse_controls(fx.controls)))
    assert not rep.passed and rep.exit_code != 0
    errors = {c.get("error") for c in rep.checks.values()}
    assert fx.expected_error in errors


@pytest.mark.parametrize("fx", library.LIBRARY, ids=lambda fx: fx.key)
def test_library_bundles_pass(fx):
    rep = run_pipeline(library.get_fan(fx.fan), library.build(fx))
    assert rep.passed, rep.to_text()
    assert rep.exit_code == 0
    assert (rep.checks["prop3"]["status"] == "pass") == fx.split


def test_checks_subset(tmp_path):
    code, _, rep, _ = report_for(tmp_path, ["verify", "--bundle", "builtin:p2/O(1)", "--checks", "lemma1"])
    assert code == 0
    assert set(rep["checks"]) == {"fan", "lemma1", "decomposition"}


def test_unknown_check_group():
    code, _ = run(["verify", "--bundle", "builtin:p2/O(1)", "--checks", "lemma1,bogus"])
    assert code == ParseError.exit_code


def test_list_builtins():
    code, text = run(["verify", "--list-builtins"])
    assert code == 0
    for name in library.FANS:
        assert name in text
    assert "p1/corrupted-cocycle" in text


def test_json_file_inputs(tmp_path):
    fan = tmp_path / "p1.json"
    fan.write_text(json.dumps({"rank": 1, "rays": [[1], [-1]], "cones": [[0], [1]]}), encoding="utf-8")
    bundle = tmp_path / "o3.json"
    bundle.write_text(json.dumps({"cartier": {"0": [0], "1": [-3]}}), encoding="utf-8")
    code, text = run(["verify", "--fan", str(fan), "--bundle", str(bundle)])
    assert code == 0, text


def test_json_controls_in_file(tmp_path):
    fan = tmp_path / "p1.json"
    fan.write_text(json.dumps({"rank": 1, "rays": [[1], [-1]], "cones": [[0], [1]]}), encoding="utf-8")
    bundle = tmp_path / "bad.json"
    bundle.write_text(
        json.dumps({"cartier": {"0": [0], "1": [-1]}, "controls": {"corrupt_cocycle": {"pair": [1, 0], "factor": "1/3"}}}),
        encoding="utf-8",
    )
    code, _ = run(["verify", "--fan", str(fan), "--bundle", str(bundle)])
    assert code == 13


def test_float_input_rejected(tmp_path):
    fan = tmp_path / "fan.json"
    fan.write_text('{"rank": 1, "rays": [[1.0], [-1]], "cones": [[0], [1]]}', encoding="utf-8")
    code, _ = run(["verify", "--fan", str(fan), "--bundle", "builtin:O(1)"])
    assert code == ParseError.exit_code


def test_malformed_json(tmp_path):
    fan = tmp_path / "fan.json"
    fan.write_text('{"rank": 1,', encoding="utf-8")
    assert run(["verify", "--fan", str(fan), "--bundle", "x"])[0] == ParseError.exit_code


def test_missing_file():
    assert run(["verify", "--fan", "/nonexistent/fan.json", "--bundle", "b"])[0] == ParseError.exit_code


def test_bundle_from_other_fan():
    assert run(["verify", "--fan", "builtin:p1", "--bundle", "builtin:p2/tangent"])[0] == ParseError.exit_code


def test_nonsmooth_fan_exit_code():
    code, text = run(["verify", "--bundle", "builtin:p2_nonsmooth/trivial"])
    assert code == 5
    assert "NonSmoothCone" in text


def test_distinct_exit_codes():
    from toricconn import errors

    classes = [c for c in vars(errors).values() if isinstance(c, type) and issubclass(c, errors.ToricError)]
    codes = [c.exit_code for c in classes if c is not errors.ToricError]
    assert len(codes) == len(set(codes))
    assert 0 not in codes


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "toricconn", "verify", "--bundle", "builtin:p1/O(1)"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert "verdict: PASS" in proc.stdout
