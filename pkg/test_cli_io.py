"""
Tests for problem and report files, configuration layering and the command line.
"""

import json
import math

import pytest

from app import main
from controller.app_controller import AppController
from controller.construction_controller import ConstructionController, RunFlags
from model.config import Tolerances, load_tolerances
from model.errors import ProblemParseError
from model.problem_io import (
    Report,
    emit_problem,
    generate_problem,
    parse_problem,
    problem_hash,
    report_digest,
)

PROBLEM = {
    "space": {"dim": 4, "norm": {"p": 2}},
    "chain": {"mode": "random", "dims": [1, 2], "seed": 3},
    "targets": [1.0, 0.5],
}


def write_problem(tmp_path, data=None, name="problem.json"):
    path = tmp_path / name
    path.write_text(json.dumps(data or PROBLEM), encoding="utf-8")
    return path


def test_parse_problem_from_text():
    spec = parse_problem(json.dumps(PROBLEM))
    assert spec.space.dim == 4
    assert spec.norm_spec().p == 2.0
    assert spec.build_chain().dims == [1, 2]


def test_parse_problem_explicit_chain_with_inf_norm():
    data = {
        "space": {"dim": 3, "norm": {"p": "inf"}},
        "chain": {"mode": "explicit", "bases": [[], [[1, 0, 0]]]},
        "targets": [2.0, 1.0],
    }
    spec = parse_problem(json.dumps(data))
    assert math.isinf(spec.norm_spec().p)
    chain = spec.build_chain()
    assert chain.spaces[0].is_zero
    assert '"p": "inf"' in emit_problem(spec)


def test_syntax_error_reports_position():
    with pytest.raises(ProblemParseError) as info:
        parse_problem('{"space": {"dim": 3,\n  "norm": }}')
    assert info.value.line == 2
    assert info.value.column is not None


@pytest.mark.parametrize("patch, message", [
    ({"targets": [0.5, 1.0]}, "targets not non-increasing"),
    ({"space": {"dim": 4, "norm": {"p": 0.5}}}, "p must be ≥ 1 or inf"),
    ({"targets": [1.0]}, "1 targets for a chain of length 2"),
    ({"extra": True}, "Extra inputs are not permitted"),
])
def test_semantic_errors_name_the_problem(patch, message):
    with pytest.raises(ProblemParseError) as info:
        parse_problem(json.dumps({**PROBLEM, **patch}))
    assert any(message in fe["message"] for fe in info.value.field_errors)
    assert info.value.exit_code == 2


def test_emitted_problem_parses_back():
    spec = parse_problem(json.dumps(PROBLEM))
    again = parse_problem(emit_problem(spec))
    assert again == spec
    assert problem_hash(again) == problem_hash(spec)


def test_generate_problem_defaults_to_geometric_targets():
    spec = generate_problem(5, [1, 2, 3], seed=4)
    assert spec.targets == [0.5, 0.25, 0.125]
    assert spec.chain.mode == "random"


def test_report_digest_ignores_timestamp():
    first = Report(command="construct", passed=True, x=[1.0, 0.1], timestamp="2024-01-01T00:00:00")
    second = first.model_copy(update={"timestamp": "2025-06-01T12:00:00"})
    assert report_digest(first) == report_digest(second)


def test_tolerance_precedence(monkeypatch):
    monkeypatch.setenv("LETHARGY_TOL_VERIFY", "1e-5")
    monkeypatch.setenv("LETHARGY_TOL_ROOT", "1e-9")
    base = load_tolerances()
    assert base.verify == 1e-5
    spec = parse_problem(json.dumps({**PROBLEM, "tolerances": {"verify": 1e-4}}))
    controller = ConstructionController(base)
    resolved = controller.resolve_tolerances(spec, RunFlags(tol_verify=1e-3))
    assert resolved.verify == 1e-3
    assert resolved.root == 1e-9
    assert controller.resolve_tolerances(spec, RunFlags()).verify == 1e-4


def test_app_controller_is_a_singleton():
    assert AppController() is AppController()
    assert isinstance(AppController().tolerances, Tolerances)


def test_cli_construct_writes_report(tmp_path, capsys):
    problem = write_problem(tmp_path)
    out = tmp_path / "report.json"
    assert main(["construct", str(problem), "--out", str(out)]) == 0
    report = json.loads(out.read_text(encoding="utf-8"))
    assert report["passed"] is True
    assert report["command"] == "construct"
    assert len(report["residuals"]) == 2
    assert "construct: PASS" in capsys.readouterr().out


def test_cli_output_is_deterministic(tmp_path):
    problem = write_problem(tmp_path)
    digests = []
    for name in ("a.json", "b.json"):
        assert main(["construct", str(problem), "--out", str(tmp_path / name)]) == 0
        digests.append(report_digest(Report.model_validate(json.loads((tmp_path / name).read_text()))))
    assert digests[0] == digests[1]


def test_cli_verify_exit_codes(tmp_path):
    problem = write_problem(tmp_path)
    out = tmp_path / "report.json"
    assert main(["construct", str(problem), "--out", str(out)]) == 0
    x = json.loads(out.read_text())["x"]
    good = ",".join(repr(v) for v in x)
    assert main(["verify", str(problem), f"--x={good}"]) == 0
    assert main(["verify", str(problem), "--x=0,0,0,0"]) == 1


def test_cli_parse_error_exits_2(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json", encoding="utf-8")
    assert main(["construct", str(bad)]) == 2
    assert main(["construct", str(tmp_path / "missing.json")]) == 2


def test_cli_usage_error_exits_2():
    assert main(["frobnicate"]) == 2
    assert main(["audit", "--lemma", "unknown"]) == 2


def test_cli_gen_then_construct(tmp_path):
    problem = tmp_path / "gen.json"
    assert main(["gen", "--dim", "5", "--dims", "1,2,3", "--seed", "2", "--p", "inf", "--out", str(problem)]) == 0
    spec = parse_problem(problem)
    assert spec.space.norm.p == "inf"
    assert main(["construct", str(problem)]) == 0


def test_cli_audit_and_james(capsys):
    assert main(["audit", "--lemma", "kernel", "--trials", "3", "--dim", "4"]) == 0
    assert "passes=3/3" in capsys.readouterr().out
    assert main(["james", "--functional", "1,2,-2", "--p", "2", "--json"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["details"]["pairing_ratio"] == pytest.approx(1.0, abs=2e-6)


def test_cli_construct_surfaces_estimate_checks(tmp_path, capsys):
    data = {
        "space": {"dim": 16, "norm": {"p": 2}},
        "chain": {"mode": "random", "dims": [1, 3, 5, 7, 9, 11], "seed": 16},
        "targets": [1.0, 0.5, 0.25, 0.125, 0.0625, 0.03125],
    }
    problem = write_problem(tmp_path, data)
    assert main(["construct", str(problem), "--json"]) == 0
    report = json.loads(capsys.readouterr().out)
    diagnostics = report["details"]["diagnostics"]
    checks = [w for w in report["warnings"] if w.startswith("estimate check:")]
    assert any("functional windows" in w for w in checks) == (diagnostics["window_violations"] > 0)
    assert any("λ bounds" in w for w in checks) == (diagnostics["lambda_bound_violations"] > 0)

    assert main(["construct", str(problem)]) == 0
    text = capsys.readouterr().out
    assert all(f"warning: {w}" in text for w in checks)
