"""Command-line tests: golden outputs, exit-code contract, file
round-trips, and output determinism."""

import json

import pytest

from voipqoe.cli import main
from voipqoe.dataio import load_codec_profiles, records_to_csv
from voipqoe.datasets import expand_reference_votes


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestPredict:
    def test_simplified_golden_row(self, capsys):
        code, out, _ = run(capsys, "predict", "--loss", "3", "--delay", "400",
                           "--model", "simplified")
        assert code == 0
        assert "r_value: 37.160" in out
        assert "mos: 1.927" in out

    def test_enhanced_golden_row(self, capsys):
        code, out, _ = run(capsys, "predict", "--loss", "3", "--delay", "400",
                           "--model", "enhanced")
        assert code == 0
        assert "r_value: 74.671" in out
        assert "mos: 3.808" in out

    def test_out_of_domain_exits_2_and_names_bound(self, capsys):
        code, _, err = run(capsys, "predict", "--loss", "12", "--delay", "0",
                           "--model", "enhanced")
        assert code == 2
        assert "loss_percent" in err

    def test_extrapolate_flag(self, capsys):
        code, out, _ = run(capsys, "predict", "--loss", "12", "--delay", "0",
                           "--model", "enhanced", "--extrapolate")
        assert code == 0
        assert "extrapolated: true" in out

    def test_json_format(self, capsys):
        code, out, _ = run(capsys, "predict", "--loss", "0", "--delay", "0",
                           "--model", "simplified", "--format", "json")
        assert code == 0
        doc = json.loads(out)
        assert doc["r_value"] == pytest.approx(83.200, abs=0.01)
        assert doc["model"] == "simplified"
        assert doc["extrapolated"] is False

    def test_subjective_model(self, capsys):
        code, out, _ = run(capsys, "predict", "--loss", "0", "--delay", "0",
                           "--model", "subjective", "--format", "json")
        assert code == 0
        assert json.loads(out)["mos"] == pytest.approx(4.113, abs=1e-9)


class TestSweep:
    def test_fig6_first_block_endpoints(self, capsys):
        code, out, _ = run(capsys, "sweep", "--loss", "0:12:1", "--delay", "0",
                           "--extrapolate", "--format", "json")
        assert code == 0
        rows = json.loads(out)["rows"]
        assert len(rows) == 13
        last = rows[-1]
        assert last["loss_percent"] == 12.0
        assert last["simplified_r"] == pytest.approx(52.0, abs=1.0)
        assert 63.0 <= last["enhanced_r"] <= 66.0
        assert 63.0 <= last["subjective_r"] <= 66.0

    def test_delay_major_row_order(self, capsys):
        code, out, _ = run(capsys, "sweep", "--loss", "0,5", "--delay", "0,400",
                           "--format", "json")
        assert code == 0
        rows = json.loads(out)["rows"]
        assert [(r["delay_ms"], r["loss_percent"]) for r in rows] == [
            (0.0, 0.0), (0.0, 5.0), (400.0, 0.0), (400.0, 5.0)
        ]

    def test_empty_loss_range_is_usage_error(self, capsys):
        code, _, err = run(capsys, "sweep", "--loss", "5:4:1", "--delay", "0")
        assert code == 1
        assert "empty loss range" in err

    def test_domain_violation_without_flag(self, capsys):
        code, _, _ = run(capsys, "sweep", "--loss", "0:12:1", "--delay", "0")
        assert code == 2

    def test_csv_header(self, capsys):
        code, out, _ = run(capsys, "sweep", "--loss", "0:2:1", "--delay", "0",
                           "--format", "csv")
        assert code == 0
        assert out.splitlines()[0] == (
            "delay_ms,loss_percent,simplified_r,simplified_mos,"
            "enhanced_r,enhanced_mos,subjective_r,subjective_mos"
        )


class TestDeriveBias:
    def test_default_report(self, capsys):
        code, out, _ = run(capsys, "derive-bias", "--format", "json")
        assert code == 0
        doc = json.loads(out)
        assert doc["r_squared"] >= 0.99
        assert doc["rmse"] <= 1.0
        assert doc["max_abs_difference_vs_builtin_bias"] <= 2.5
        assert doc["n_samples"] == 99

    def test_explicit_grid_equals_default(self, capsys):
        code_a, out_a, _ = run(capsys, "derive-bias", "--format", "json")
        code_b, out_b, _ = run(capsys, "derive-bias", "--grid-loss", "0:10:1",
                               "--grid-delay", "0:400:50", "--format", "json")
        assert code_a == code_b == 0
        assert out_a == out_b

    def test_single_delay_grid_exits_2(self, capsys):
        code, _, err = run(capsys, "derive-bias", "--grid-delay", "100")
        assert code == 2
        assert "dependent terms" in err

    def test_fragment_is_loadable_profile(self, capsys, tmp_path):
        path = tmp_path / "derived.json"
        code, _, _ = run(capsys, "derive-bias", "--output", str(path))
        assert code == 0
        profiles = load_codec_profiles(path.read_text())
        derived = profiles["g729-derived"]
        assert derived.bias is not None
        assert derived.bias.coefficients[0] == pytest.approx(0.4327, abs=1e-3)

    def test_out_of_domain_grid_rejected(self, capsys):
        code, _, _ = run(capsys, "derive-bias", "--grid-loss", "0:12:1")
        assert code == 2


class TestEvaluate:
    def test_embedded_scenario_mean(self, capsys):
        code, out, _ = run(capsys, "evaluate", "--embedded", "--models",
                           "simplified,enhanced", "--mode", "scenario-mean",
                           "--format", "json")
        assert code == 0
        doc = json.loads(out)
        assert 24.0 <= doc["averages"]["simplified"]["mape"] <= 32.0
        assert doc["averages"]["simplified"]["band"] == "reasonable forecast"

    def test_embedded_bounds_mode(self, capsys):
        code, out, _ = run(capsys, "evaluate", "--embedded",
                           "--mode", "per-record-bounds", "--format", "json")
        assert code == 0
        doc = json.loads(out)
        cell = doc["per_testset"]["TS1"]["simplified"]
        assert cell["mape_low"] <= cell["mape_high"]
        assert doc["notes"]

    def test_records_file(self, capsys, tmp_path):
        path = tmp_path / "votes.csv"
        path.write_text(records_to_csv(expand_reference_votes()))
        code, out, _ = run(capsys, "evaluate", "--records", str(path),
                           "--mode", "per-record", "--format", "json")
        assert code == 0
        doc = json.loads(out)
        assert doc["record_counts"] == {"TS1": 67, "TS2": 67, "TS3": 67, "TS4": 67}
        assert 9.0 <= doc["averages"]["enhanced"]["mape"] <= 15.0

    def test_missing_file_exits_3(self, capsys):
        code, _, _ = run(capsys, "evaluate", "--records", "/no/such/file.csv")
        assert code == 3

    def test_embedded_and_records_conflict(self, capsys):
        code, _, _ = run(capsys, "evaluate", "--embedded", "--records", "x.csv")
        assert code == 1

    def test_neither_source_is_usage_error(self, capsys):
        code, _, _ = run(capsys, "evaluate")
        assert code == 1


class TestMonitor:
    @staticmethod
    def _write_stream(tmp_path, lines):
        path = tmp_path / "stream.ndjson"
        path.write_text("".join(lines))
        return str(path)

    def test_count_windows(self, capsys, tmp_path):
        lines = ['{"ts":%d,"loss_percent":0,"delay_ms":0}\n' % i for i in range(4)]
        path = self._write_stream(tmp_path, lines)
        code, out, _ = run(capsys, "monitor", "--source", path, "--window", "2",
                           "--format", "json")
        assert code == 0
        docs = [json.loads(line) for line in out.splitlines()]
        assert len(docs) == 2
        assert docs[0]["mos_enhanced"] == pytest.approx(4.149, abs=0.005)

    def test_worst_case_window(self, capsys, tmp_path):
        lines = ['{"ts":0,"loss_percent":10,"delay_ms":400}\n']
        path = self._write_stream(tmp_path, lines)
        code, out, _ = run(capsys, "monitor", "--source", path, "--window", "1",
                           "--format", "json")
        assert code == 0
        doc = json.loads(out.splitlines()[0])
        assert doc["mos_enhanced"] == pytest.approx(3.326, abs=0.005)
        assert doc["mos_simplified"] == pytest.approx(1.290, abs=0.005)
        assert doc["extrapolated"] is False

    def test_duration_windows_skip_empty(self, capsys, tmp_path):
        # Records at t=0,1 then a gap past t=10: the empty middle windows
        # produce no output lines.
        lines = [
            '{"ts":0,"loss_percent":1,"delay_ms":100}\n',
            '{"ts":1,"loss_percent":1,"delay_ms":100}\n',
            '{"ts":10.5,"loss_percent":2,"delay_ms":200}\n',
        ]
        path = self._write_stream(tmp_path, lines)
        code, out, _ = run(capsys, "monitor", "--source", path,
                           "--window-seconds", "2", "--format", "json")
        assert code == 0
        docs = [json.loads(line) for line in out.splitlines()]
        assert len(docs) == 2
        assert docs[0]["records"] == 2
        assert docs[1]["records"] == 1

    def test_malformed_line_skipped_and_reported(self, capsys, tmp_path):
        lines = [
            '{"ts":0,"loss_percent":0,"delay_ms":0}\n',
            "not json\n",
            '{"ts":1,"loss_percent":0,"delay_ms":0}\n',
        ]
        path = self._write_stream(tmp_path, lines)
        code, out, err = run(capsys, "monitor", "--source", path, "--window", "2",
                             "--format", "json")
        assert code == 0
        assert len(out.splitlines()) == 1
        assert "skipped line 2" in err

    def test_strict_aborts(self, capsys, tmp_path):
        path = self._write_stream(tmp_path, ["junk\n"])
        code, _, _ = run(capsys, "monitor", "--source", path, "--window", "1",
                         "--strict")
        assert code == 3

    def test_window_flags_are_exclusive(self, capsys, tmp_path):
        path = self._write_stream(tmp_path, [])
        code, _, _ = run(capsys, "monitor", "--source", path)
        assert code == 1
        code, _, _ = run(capsys, "monitor", "--source", path, "--window", "2",
                         "--window-seconds", "5")
        assert code == 1


class TestReproduce:
    @pytest.mark.parametrize("target", ["table3", "table4", "table6", "fig6"])
    def test_targets_pass(self, capsys, target):
        code, out, _ = run(capsys, "reproduce", target)
        assert code == 0
        assert f"{target}: PASS" in out

    def test_table7_mismatch_is_honest(self, capsys):
        # The published evaluation table cannot be reproduced from the
        # published aggregates; the command says so and exits 4.
        code, out, _ = run(capsys, "reproduce", "table7")
        assert code == 4
        assert "table7: FAIL" in out
        assert "PASS  scenario-mean simplified average in [24, 32]" in out

    def test_fig6_blocks(self, capsys):
        code, out, _ = run(capsys, "reproduce", "fig6")
        assert code == 0
        assert out.count("delay_ms=") == 9
        assert "loss_percent,simplified_r,enhanced_r,subjective_r" in out

    def test_json_document(self, capsys):
        code, out, _ = run(capsys, "reproduce", "table6", "--format", "json")
        assert code == 0
        doc = json.loads(out)
        assert doc["passed"] is True
        assert len(doc["rows"]) == 10

    def test_unknown_target_usage_error(self, capsys):
        code, _, _ = run(capsys, "reproduce", "table99")
        assert code == 1


class TestCliContract:
    def test_unknown_command(self, capsys):
        assert run(capsys, "frobnicate")[0] == 1

    def test_version(self, capsys):
        code, out, _ = run(capsys, "--version")
        assert code == 0
        assert out.startswith("voipqoe ")

    def test_deterministic_output(self, capsys):
        _, first, _ = run(capsys, "sweep", "--loss", "0:10:1", "--delay",
                          "0,200,400", "--format", "csv")
        _, second, _ = run(capsys, "sweep", "--loss", "0:10:1", "--delay",
                           "0,200,400", "--format", "csv")
        assert first == second

    def test_profiles_env_var(self, capsys, tmp_path, monkeypatch):
        config = tmp_path / "profiles.json"
        config.write_text(json.dumps({"profiles": [
            {"name": "wide", "ro": 95.0, "loss_a": 5.0, "loss_b": 20.0, "loss_c": 15.0}
        ]}))
        monkeypatch.setenv("VOIPQOE_PROFILES", str(config))
        code, out, _ = run(capsys, "predict", "--loss", "0", "--delay", "0",
                           "--codec", "wide", "--model", "simplified",
                           "--format", "json")
        assert code == 0
        assert json.loads(out)["r_value"] == pytest.approx(90.0, abs=1e-9)

    def test_unknown_codec_exits_3(self, capsys):
        code, _, err = run(capsys, "predict", "--loss", "0", "--delay", "0",
                           "--codec", "g711")
        assert code == 3
        assert "unknown codec" in err
