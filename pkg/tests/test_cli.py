import json
import subprocess
import sys

import pytest

from csystems.cli import EXIT_FAIL, EXIT_OK, EXIT_USAGE, main


@pytest.fixture
def fx(fixture_dir):
    return lambda *parts: str(fixture_dir.joinpath(*parts))


def run_json(tmp_path, argv):
    out = tmp_path / "report.json"
    code = main([*argv, "--format", "json", "--out", str(out)])
    return code, json.loads(out.read_text())


def test_check_sound_instance_exits_zero(fx, tmp_path):
    code, body = run_json(tmp_path, ["check", "--instance", fx("instances", "unit.json"), "--max-len", "3"])
    assert code == EXIT_OK
    assert [s["suite"] for s in body["suites"]] == ["c0_c", "prop_pullback"]
    assert body["totals"]["fail"] == 0


def test_check_mutant_exits_one_with_counterexample(fx, tmp_path):
    code, body = run_json(tmp_path, ["check", "--instance", fx("mutants", "permuted_q.json"), "--max-len", "2"])
    assert code == EXIT_FAIL
    failed = [c for s in body["suites"] for c in s["checks"] if c["status"] == "fail"]
    assert failed and failed[0]["counterexamples"]


def test_report_schema(fx, tmp_path):
    _, body = run_json(tmp_path, ["check", "--instance", fx("instances", "context_2.json"), "--max-len", "1"])
    assert set(body) == {"suites", "totals"}
    for suite in body["suites"]:
        assert set(suite) == {"suite", "checks", "totals"}
        for check in suite["checks"]:
            assert set(check) == {"name", "status", "counterexamples", "cases", "stats"}
            assert check["status"] in ("pass", "fail", "skipped")


def test_flags_after_subcommand_and_before(fx, tmp_path):
    inst = fx("instances", "unit.json")
    a = tmp_path / "a.json"
    b = tmp_path / "b.json"
    assert main(["--instance", inst, "--format", "json", "--out", str(a), "check", "--max-len", "2"]) == EXIT_OK
    assert main(["check", "--instance", inst, "--max-len", "2", "--format", "json", "--out", str(b)]) == EXIT_OK
    assert a.read_bytes() == b.read_bytes()


def test_missing_instance_file_is_usage_error(tmp_path, capsys):
    assert main(["check", "--instance", str(tmp_path / "nope.json")]) == EXIT_USAGE
    assert "cannot read" in capsys.readouterr().err


def test_bad_instance_config_is_usage_error(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{"kind": "context", "base_sizes": []}')
    assert main(["check", "--instance", str(path)]) == EXIT_USAGE


def test_invalid_max_len_is_usage_error(fx):
    assert main(["check", "--instance", fx("instances", "unit.json"), "--max-len", "-1"]) == EXIT_USAGE


def test_close_emits_window(fx, tmp_path):
    code, body = run_json(
        tmp_path,
        ["close", fx("seeds", "context_object.json"), "--instance", fx("instances", "context_2.json"), "--max-len", "2"],
    )
    assert code == EXIT_OK
    assert body["artifacts"]["window"]["B"] == [[], [0], [0, 0]]


def test_close_malformed_seed_is_usage_error(fx):
    argv = ["close", fx("seeds", "malformed.json"), "--instance", fx("instances", "context_2.json")]
    assert main(argv) == EXIT_USAGE


def test_quotient_collapse_relation(fx, tmp_path):
    code, body = run_json(
        tmp_path,
        ["quotient", fx("relations", "context_2_2_collapse.json"),
         "--instance", fx("instances", "context_2_2.json"), "--max-len", "2"],
    )
    assert code == EXIT_OK
    assert body["artifacts"]["quotient"]
    assert body["artifacts"]["relation"]["ob_classes"]


def test_quotient_length_mismatch_fails(fx, tmp_path):
    code, body = run_json(
        tmp_path,
        ["quotient", fx("relations", "length_mismatch.json"),
         "--instance", fx("instances", "context_2_2.json"), "--max-len", "2"],
    )
    assert code == EXIT_FAIL
    assert body["suites"][0]["checks"][0]["counterexamples"][0]["condition"] == "prop_2_length"


def test_text_output_lists_checks(fx, capsys):
    assert main(["check", "--instance", fx("mutants", "mutated_sf.json"), "--max-len", "2"]) == EXIT_FAIL
    text = capsys.readouterr().out
    assert "== c0_c" in text and "counterexample [s_2_section]" in text


def test_suite_all_single_instance(fx, tmp_path):
    code, body = run_json(tmp_path, ["suite-all", "--instance", fx("instances", "unit.json"), "--max-len", "2"])
    assert code == EXIT_OK
    assert all(s["suite"].startswith("unit/") for s in body["suites"])


def test_console_entry_point_runs(fx):
    proc = subprocess.run(
        [sys.executable, "-m", "csystems.cli", "check", "--instance", fx("instances", "unit.json"), "--max-len", "2"],
        capture_output=True, text=True,
    )
    assert proc.returncode == EXIT_OK and "c0_c" in proc.stdout
