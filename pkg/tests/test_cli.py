"""Command line behavior: artifacts, exit codes, scenario files."""

import json
import os

import pytest

from czest import simharness
from czest.cli import main


def write_scenario(tmp_path, name="pair1d", **extra):
    if name == "pair1d":
        doc = simharness.build_pair1d_scenario(horizon=3)
    else:
        doc = simharness.build_uav_scenario(horizon=3)
    doc.update(extra)
    path = tmp_path / "scenario.json"
    path.write_text(json.dumps(doc))
    return str(path)


class TestRun:
    def test_run_writes_artifacts(self, tmp_path, capsys):
        scn = write_scenario(tmp_path)
        out = str(tmp_path / "out")
        rc = main(["run", scn, "--trials", "2", "--out", out])
        assert rc == 0
        assert sorted(os.listdir(out)) == [
            "metrics.csv",
            "trial_000.jsonl",
            "trial_001.jsonl",
        ]
        text = capsys.readouterr().out
        assert "containment violations: 0" in text

    def test_run_builtin_name(self, tmp_path):
        out = str(tmp_path / "out")
        rc = main(
            [
                "run",
                "pair1d",
                "--out",
                out,
                "--metrics",
                "containment",
                "--algorithms",
                "centralized",
            ]
        )
        assert rc == 0
        assert os.path.exists(os.path.join(out, "metrics.csv"))

    def test_svg_emission(self, tmp_path):
        scn = write_scenario(tmp_path)
        out = str(tmp_path / "out")
        rc = main(["run", scn, "--out", out, "--svg"])
        assert rc == 0
        plots = sorted(os.listdir(os.path.join(out, "plots")))
        assert plots == [
            "diameter_agent1.svg",
            "diameter_agent2.svg",
            "trajectory_agent1.svg",
            "trajectory_agent2.svg",
        ]
        body = open(os.path.join(out, "plots", "trajectory_agent1.svg")).read()
        assert body.startswith("<svg ") and body.rstrip().endswith("</svg>")

    def test_svg_does_not_change_other_outputs(self, tmp_path):
        scn = write_scenario(tmp_path)
        out_a = str(tmp_path / "a")
        out_b = str(tmp_path / "b")
        assert main(["run", scn, "--out", out_a]) == 0
        assert main(["run", scn, "--out", out_b, "--svg"]) == 0
        for name in ("metrics.csv", "trial_000.jsonl"):
            a = open(os.path.join(out_a, name), "rb").read()
            b = open(os.path.join(out_b, name), "rb").read()
            assert a == b

    def test_seed_override_changes_output(self, tmp_path):
        scn = write_scenario(tmp_path)
        out_a = str(tmp_path / "a")
        out_b = str(tmp_path / "b")
        assert main(["run", scn, "--out", out_a, "--seed", "1"]) == 0
        assert main(["run", scn, "--out", out_b, "--seed", "2"]) == 0
        a = open(os.path.join(out_a, "trial_000.jsonl"), "rb").read()
        b = open(os.path.join(out_b, "trial_000.jsonl"), "rb").read()
        assert a != b

    def test_malformed_file_exit_1(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text('{"agents": [,]}')
        rc = main(["run", str(bad)])
        assert rc == 1
        err = capsys.readouterr().err
        assert "bad.json:1:" in err

    def test_schema_error_exit_1(self, tmp_path, capsys):
        scn = write_scenario(tmp_path, horizon=-3)
        assert main(["run", scn]) == 1
        assert "horizon" in capsys.readouterr().err

    def test_unknown_scenario_exit_1(self, capsys):
        assert main(["run", "atlantis"]) == 1
        assert "atlantis" in capsys.readouterr().err

    def test_contradictory_flags_exit_1(self, tmp_path, capsys):
        scn = write_scenario(tmp_path)
        rc = main(["run", scn, "--metrics", "containment", "--svg"])
        assert rc == 1
        assert "svg" in capsys.readouterr().err.lower()

    def test_undeclared_noise_exit_2(self, tmp_path, capsys):
        scn = write_scenario(
            tmp_path, injected_noise_scale=4.0, noise_grid=None
        )
        out = str(tmp_path / "out")
        rc = main(["run", scn, "--trials", "2", "--out", out])
        assert rc == 2
        text = capsys.readouterr().out
        assert "violation" in text or "aborted" in text


class TestVerify:
    def test_single_suite_pass(self, capsys):
        rc = main(["verify", "--filter", "oracle"])
        assert rc == 0
        out = capsys.readouterr().out
        assert "oracle.grid" in out and "pass" in out

    def test_injected_fault_detected(self, capsys):
        rc = main(["verify", "--filter", "stacking", "--inject-fault"])
        assert rc == 2
        assert "FAIL" in capsys.readouterr().out

    def test_fault_flag_does_not_leak(self):
        from czest import filters

        main(["verify", "--filter", "stacking", "--inject-fault"])
        assert filters._COUPLING_SIGN == 1.0


class TestScenarioInit:
    def test_round_trip_run(self, tmp_path, monkeypatch):
        monkeypatch.chdir(tmp_path)
        rc = main(["scenario-init", "pair1d"])
        assert rc == 0
        doc = json.loads((tmp_path / "pair1d.json").read_text())
        assert doc["name"] == "pair1d"
        assert "description" in doc
        doc["horizon"] = 2
        (tmp_path / "pair1d.json").write_text(json.dumps(doc))
        assert main(["run", "pair1d.json", "--out", "out"]) == 0

    def test_uav5_parameters_present(self, tmp_path):
        out = str(tmp_path / "u.json")
        assert main(["scenario-init", "uav5", "--out", out]) == 0
        doc = json.loads(open(out).read())
        dyn = doc["agents"][0]["dynamics"]
        assert dyn["kind"] == "coordinated-turn"
        assert dyn["omega"] == 1.0
        assert dyn["T"] == pytest.approx(3.141592653589793 / 12)
        assert doc["agents"][0]["process_noise"] == {"lo": [-1.0, -1.0], "hi": [1.0, 1.0]}

    def test_unknown_name_exit_1(self, capsys):
        assert main(["scenario-init", "warpdrive"]) == 1
        assert "warpdrive" in capsys.readouterr().err
