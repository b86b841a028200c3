import json
import math
from pathlib import Path

import numpy as np
import pytest
import yaml

from superlum.cli import main as cli_main
from superlum.errors import ConfigError
from superlum.presets import fig1_configurations, fig1_scenarios, fig2_scenarios
from superlum.runner import (
    Scenario,
    execute_scenario,
    normalized_dump,
    parse_scenario,
    run_scenario,
    sweep,
    write_run,
)

QUBIT_DOC = {
    "model": "qubit-rabi",
    "name": "t",
    "rabi": {"omega_q": 1.0, "g": 0.02},
    "trajectory": {"kind": "oscillatory", "omega": 2.0},
    "noise": {"kappa": 0.001, "gamma": 0.002, "gamma_phi": 0.003},
    "time": {"t_final": 10.0, "samples": 41},
}


def scenario(**overrides):
    doc = json.loads(json.dumps(QUBIT_DOC))
    for key, val in overrides.items():
        if isinstance(val, dict) and key in doc:
            doc[key].update(val)
        else:
            doc[key] = val
    return doc


class TestParsing:
    def test_round_trip_identity(self):
        s = parse_scenario(QUBIT_DOC)
        s2 = parse_scenario(normalized_dump(s))
        assert s.data == s2.data

    def test_unknown_key_named(self):
        with pytest.raises(ConfigError, match="bogus"):
            parse_scenario(scenario(bogus=1))
        with pytest.raises(ConfigError, match="rabi.frequency"):
            parse_scenario(scenario(rabi={"frequency": 2.0}))

    def test_all_missing_fields_listed_at_once(self):
        doc = {"model": "qubit-rabi", "trajectory": {"kind": "static"}}
        with pytest.raises(ConfigError) as err:
            parse_scenario(doc)
        msg = str(err.value)
        for field in ("rabi.omega_q", "rabi.g", "time.t_final", "time.samples"):
            assert field in msg

    def test_missing_velocity_for_constant_velocity(self):
        doc = scenario()
        doc["trajectory"] = {"kind": "constant-velocity"}
        with pytest.raises(ConfigError) as err:
            parse_scenario(doc)
        assert "trajectory.v" in str(err.value)

    def test_missing_kind_rejected(self):
        with pytest.raises(ConfigError, match="trajectory.kind"):
            parse_scenario(scenario(trajectory={"kind": None}))

    def test_out_of_range_quotes_bound(self):
        with pytest.raises(ConfigError, match=r"violates bound"):
            parse_scenario(scenario(time={"t_final": -1.0, "samples": 41}))
        with pytest.raises(ConfigError, match=r"violates bound"):
            parse_scenario(scenario(rabi={"n_max": 1, "omega_q": 1.0, "g": 0.02}))

    def test_two_mode_exactly_one_speed_spec(self):
        doc = {"model": "mirror-two-mode", "mirror": {}, "time": {"t_final": 1.0, "samples": 5}}
        with pytest.raises(ConfigError, match="exactly one"):
            parse_scenario(doc)

    def test_engine_availability_by_model(self):
        with pytest.raises(ConfigError, match="gaussian"):
            parse_scenario(scenario(engines=["gaussian"]))

    def test_model_required(self):
        with pytest.raises(ConfigError, match="model"):
            parse_scenario({"name": "x"})

    def test_yaml_file_and_text_sources(self, tmp_path):
        path = tmp_path / "s.yaml"
        path.write_text(yaml.safe_dump(QUBIT_DOC))
        s_file = parse_scenario(path)
        s_text = parse_scenario(yaml.safe_dump(QUBIT_DOC))
        assert s_file.data == s_text.data

    def test_example_configs_parse(self):
        root = Path(__file__).resolve().parents[1] / "configs"
        for name in ("qubit_rabi.yaml", "mirror_two_mode.yaml", "mirror_multimode.yaml"):
            s = parse_scenario(root / name)
            assert isinstance(s, Scenario)


class TestExecution:
    def test_track_selection(self):
        s = parse_scenario(scenario(tracks=["P_e", "n1"]))
        res = execute_scenario(s)
        assert sorted(res.columns) == ["P_e", "n1"]

    def test_unknown_track_rejected(self):
        s = parse_scenario(scenario(tracks=["P_e", "bogus"]))
        with pytest.raises(ConfigError, match="bogus"):
            execute_scenario(s)

    def test_unitary_engine_tracks(self):
        s = parse_scenario(scenario(engines=["unitary"], noise={}))
        res = execute_scenario(s)
        assert "norm" in res.columns and "trace" not in res.columns

    def test_multimode_time_domain_checked(self):
        doc = {
            "model": "mirror-multimode",
            "mirror": {"n_modes": 2, "n_max": 4},
            "profile": {"kind": "linear", "v": 2.0},
            "time": {"t_final": 10.0, "samples": 11},  # beyond pi/v
        }
        with pytest.raises(ConfigError, match="domain"):
            execute_scenario(parse_scenario(doc))


class TestOutput:
    def test_written_files_and_header(self, tmp_path):
        s = parse_scenario(QUBIT_DOC)
        run_scenario(s, tmp_path)
        csv = (tmp_path / "t.csv").read_text().splitlines()
        assert csv[0].startswith("# units:")
        header = csv[2].split(",")
        assert header[0] == "t"
        assert set(header[1:]) == {"trace", "purity", "P_e", "P_g", "n1"}
        assert (tmp_path / "t_scenario.yaml").exists()
        summary = json.loads((tmp_path / "t_summary.json").read_text())
        assert summary["model"] == "qubit-rabi"

    def test_byte_identical_reruns(self, tmp_path):
        s = parse_scenario(QUBIT_DOC)
        run_scenario(s, tmp_path / "a")
        run_scenario(s, tmp_path / "b")
        for name in ("t.csv", "t_scenario.yaml", "t_summary.json"):
            assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()

    def test_partial_outputs_removed_on_failure(self, tmp_path, monkeypatch):
        s = parse_scenario(QUBIT_DOC)
        res = execute_scenario(s)

        real_savetxt = np.savetxt

        def boom(*args, **kwargs):
            raise RuntimeError("disk on fire")

        monkeypatch.setattr(np, "savetxt", boom)
        with pytest.raises(RuntimeError):
            write_run(res, tmp_path)
        assert list(tmp_path.glob("*")) == []
        monkeypatch.setattr(np, "savetxt", real_savetxt)


class TestSweep:
    def test_single_value_matches_run(self):
        s = parse_scenario(QUBIT_DOC)
        rows = sweep(s, "trajectory.omega", [2.0], workers=1)
        direct = execute_scenario(s)
        assert rows[0]["lindblad.peak_P_e"] == pytest.approx(
            direct.summary["lindblad"]["peak_P_e"], rel=1e-12)

    def test_rows_in_input_order(self, tmp_path):
        s = parse_scenario(scenario(time={"t_final": 5.0, "samples": 11}))
        values = [2.2, 1.8, 2.0]
        rows = sweep(s, "trajectory.omega", values, outdir=tmp_path, workers=2)
        assert [r["value"] for r in rows] == values
        table = (tmp_path / "t_sweep_trajectory_omega.csv").read_text().splitlines()
        assert len(table) == 4

    def test_non_numeric_axis_rejected(self):
        s = parse_scenario(QUBIT_DOC)
        with pytest.raises(ConfigError, match="numeric"):
            sweep(s, "trajectory.kind", [1.0], workers=1)
        with pytest.raises(ConfigError, match="field"):
            sweep(s, "nope.nothing", [1.0], workers=1)

    def test_stability_flag_flips_once_across_critical(self):
        doc = {
            "model": "mirror-two-mode",
            "mirror": {"coupling": 0.5, "variant": "dicke-form", "n_max": 4},
            "time": {"t_final": 0.5, "samples": 3},
            "engines": ["gaussian"],
        }
        s = parse_scenario(doc)
        omega_c = math.sqrt(2.0) / 2.0
        values = list(np.linspace(0.6, 0.8, 9))
        rows = sweep(s, "mirror.coupling", values, workers=1)
        flags = [r["stable"] for r in rows]
        flips = sum(1 for a, b in zip(flags, flags[1:]) if a != b)
        assert flips == 1
        boundary = max(v for v, f in zip(values, flags) if f == 1)
        assert boundary < omega_c < boundary + 0.025 + 1e-12


class TestPresetDefinitions:
    def test_fig1_expands_to_six_configurations(self):
        assert len(fig1_configurations()) == 6

    def test_preset_tag_detection(self):
        from superlum.presets import preset_tag_of

        assert preset_tag_of({"preset": "fig1"}) == "fig1"
        assert preset_tag_of(QUBIT_DOC) is None
        with pytest.raises(ConfigError, match="unknown preset"):
            preset_tag_of({"preset": "fig9"})
        with pytest.raises(ConfigError, match="other sections"):
            preset_tag_of({"preset": "fig1", "noise": {"kappa": 0.1}})

    def test_cli_run_dispatches_preset_documents(self, tmp_path, monkeypatch, capsys):
        import superlum.cli as cli
        import superlum.presets as presets

        calls = {}

        def fake_run_preset(name, outdir, workers=None, **kw):
            calls["name"] = name
            return presets.PresetReport(name, [], {}, {})

        monkeypatch.setattr(cli, "run_preset", fake_run_preset)
        doc = tmp_path / "p.yaml"
        doc.write_text("preset: fig2\n")
        assert cli.main(["run", str(doc), "--out", str(tmp_path)]) == 0
        assert calls["name"] == "fig2"

    def test_fig1_twelve_runs(self):
        scenarios = fig1_scenarios()
        assert len(scenarios) == 12
        names = {s.name for s in scenarios}
        assert len(names) == 12
        oscs = [s for s in scenarios if s.name.endswith("osc")]
        cvs = [s for s in scenarios if s.name.endswith("cv")]
        assert len(oscs) == len(cvs) == 6
        # constant-velocity runs carry the Bessel-reduced coupling
        assert all(s.section("rabi")["g"] == pytest.approx(-1.1336481778117478 * 0.02)
                   for s in cvs)
        assert all(s.section("trajectory")["v"] == 2.0 for s in cvs)

    def test_fig2_four_velocities(self):
        scenarios = fig2_scenarios()
        vels = [s.section("mirror")["v"] for s in scenarios]
        assert vels == pytest.approx([0.1, 1.0, 2.0, 3 * math.pi / 2])
        assert all(s.engines == ("lindblad", "gaussian") for s in scenarios)


class TestCli:
    def test_validate_echo(self, tmp_path, capsys):
        path = tmp_path / "s.yaml"
        path.write_text(yaml.safe_dump(QUBIT_DOC))
        assert cli_main(["validate", str(path)]) == 0
        out = capsys.readouterr().out
        assert parse_scenario(out).data == parse_scenario(QUBIT_DOC).data

    def test_run_and_exit_codes(self, tmp_path, capsys):
        path = tmp_path / "s.yaml"
        doc = scenario(time={"t_final": 2.0, "samples": 9})
        path.write_text(yaml.safe_dump(doc))
        assert cli_main(["run", str(path), "--out", str(tmp_path / "out")]) == 0
        assert (tmp_path / "out" / "t.csv").exists()

    def test_config_error_exit_code(self, tmp_path, capsys):
        bad = tmp_path / "bad.yaml"
        bad.write_text(yaml.safe_dump(scenario(bogus=1)))
        assert cli_main(["run", str(bad), "--out", str(tmp_path)]) == 2

    def test_numerical_error_exit_code(self, tmp_path, capsys):
        # valid config, infeasible time domain for the linear profile
        doc = {
            "model": "mirror-multimode",
            "mirror": {"n_modes": 2, "n_max": 3},
            "profile": {"kind": "linear", "v": 2.0},
            "time": {"t_final": 10.0, "samples": 5},
        }
        path = tmp_path / "dom.yaml"
        path.write_text(yaml.safe_dump(doc))
        # domain violation is caught at config level here
        assert cli_main(["run", str(path), "--out", str(tmp_path)]) == 2

    def test_sweep_cli(self, tmp_path, capsys):
        path = tmp_path / "s.yaml"
        path.write_text(yaml.safe_dump(scenario(time={"t_final": 2.0, "samples": 9})))
        code = cli_main(["sweep", str(path), "--axis", "trajectory.omega",
                         "--values", "1.9,2.1", "--out", str(tmp_path / "sw"),
                         "--workers", "1"])
        assert code == 0
        assert (tmp_path / "sw" / "t_sweep_trajectory_omega.csv").exists()

    def test_bad_values_list(self, tmp_path):
        path = tmp_path / "s.yaml"
        path.write_text(yaml.safe_dump(QUBIT_DOC))
        assert cli_main(["sweep", str(path), "--axis", "trajectory.omega",
                         "--values", "a,b"]) == 2
