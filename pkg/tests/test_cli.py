import json
from pathlib import Path

import pytest
from click.testing import CliRunner

from safespect.cli import (
    EXIT_DIVERGED,
    EXIT_MISMATCH,
    EXIT_PARSE,
    EXIT_VIOLATIONS,
    main,
)
from safespect.stock import stock_document
from safespect.telemetry import canonical_line

SCRIPT_PATH = (
    Path(__file__).resolve().parent.parent
    / "src"
    / "safespect"
    / "data"
    / "scripts"
    / "short_a_perfect.script.jsonl"
)


@pytest.fixture
def runner():
    return CliRunner()


class TestValidate:
    def test_stock_name_ok(self, runner):
        result = runner.invoke(main, ["validate", "short_a"])
        assert result.exit_code == 0
        assert "ok" in result.output

    def test_file_path_ok(self, runner, tmp_path):
        path = tmp_path / "s.scenario.json"
        path.write_text(stock_document("long_a"))
        result = runner.invoke(main, ["validate", str(path)])
        assert result.exit_code == 0

    def test_violations_exit_code(self, runner, tmp_path):
        doc = json.loads(stock_document("short_a"))
        doc["standoff_distance_m"] = -1.0
        path = tmp_path / "bad.scenario.json"
        path.write_text(json.dumps(doc))
        result = runner.invoke(main, ["validate", str(path)])
        assert result.exit_code in (EXIT_VIOLATIONS, EXIT_PARSE)
        assert result.exit_code != 0

    def test_parse_error_exit_code(self, runner, tmp_path):
        path = tmp_path / "broken.scenario.json"
        path.write_text("{nope")
        result = runner.invoke(main, ["validate", str(path)])
        assert result.exit_code == EXIT_PARSE

    def test_missing_file(self, runner):
        result = runner.invoke(main, ["validate", "nowhere.json"])
        assert result.exit_code != 0


@pytest.fixture(scope="module")
def flown(tmp_path_factory):
    """One full scripted flight shared by the fly/metrics/replay tests."""
    out = tmp_path_factory.mktemp("fly") / "run.telemetry.jsonl"
    runner = CliRunner()
    result = runner.invoke(
        main,
        ["fly", "--scenario", "short_a", "--script", str(SCRIPT_PATH), "--out", str(out)],
    )
    assert result.exit_code == 0, result.output
    return out, json.loads(result.output)


class TestFly:
    def test_perfect_metrics(self, flown):
        _, metrics = flown
        assert metrics["marked_pct"] == 100.0
        assert metrics["coverage_pct"] == 100.0
        assert metrics["false_marks"] == 0
        assert metrics["end_reason"] == "landed"

    def test_scenario_mismatch_exit_code(self, runner):
        result = runner.invoke(
            main, ["fly", "--scenario", "long_a", "--script", str(SCRIPT_PATH)]
        )
        assert result.exit_code == EXIT_MISMATCH


class TestMetrics:
    def test_recompute_from_log(self, runner, flown):
        out, metrics = flown
        result = runner.invoke(main, ["metrics", str(out)])
        assert result.exit_code == 0
        assert json.loads(result.output) == metrics

    def test_corrupt_log(self, runner, tmp_path):
        path = tmp_path / "junk.telemetry.jsonl"
        path.write_text("garbage\n")
        result = runner.invoke(main, ["metrics", str(path)])
        assert result.exit_code == EXIT_PARSE


class TestReplay:
    def test_clean_log_verifies(self, runner, flown):
        out, _ = flown
        result = runner.invoke(main, ["replay", str(out)])
        assert result.exit_code == 0
        assert "replay ok" in result.output

    def test_tampered_log_diverges(self, runner, flown, tmp_path):
        out, _ = flown
        lines = out.read_text().splitlines()
        rec = json.loads(lines[3000])
        rec["input"]["axes"][0] = 0.9
        lines[3000] = canonical_line(rec)
        tampered = tmp_path / "tampered.telemetry.jsonl"
        tampered.write_text("\n".join(lines) + "\n")
        result = runner.invoke(main, ["replay", str(tampered)])
        assert result.exit_code == EXIT_DIVERGED
        assert "2999" in result.output
