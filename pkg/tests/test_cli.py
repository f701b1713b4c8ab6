import json
import os
from pathlib import Path

import numpy as np
import pytest

from dnullsim import cli, evolve, experiments
from dnullsim.core import RunParams

GOLDEN = Path(__file__).parent / "data" / "golden_20x20.csv"


class TestConfig:
    def test_file_round_trip(self, tmp_path):
        cfg_path = tmp_path / "run.cfg"
        cfg_path.write_text(
            "# comment\n"
            "kind=charging\n"
            "a=48\n"
            "coupling=0.02\n"
            "n_u=30\n"
            "n_v=40\n"
            "pulse_v0=0.2\n"
            "pulse_v1=0.85\n"
            "plot=false\n")
        cfg = experiments.config_from_mapping(
            experiments.load_config_file(str(cfg_path)))
        assert cfg.kind == "charging"
        assert cfg.params.a == 48
        assert cfg.params.coupling == 0.02
        assert cfg.params.n_u == 30 and cfg.params.n_v == 40
        assert cfg.params.pulse.support == (0.2, 0.85)
        assert cfg.plot is False

    def test_unknown_key_is_rejected(self, tmp_path):
        cfg_path = tmp_path / "run.cfg"
        cfg_path.write_text("bogus=1\n")
        with pytest.raises(ValueError, match="unknown key"):
            experiments.load_config_file(str(cfg_path))

    def test_flags_override_file(self, tmp_path):
        cfg_path = tmp_path / "run.cfg"
        cfg_path.write_text("a=48\nn_u=30\nn_v=30\n")
        args = cli.build_parser().parse_args(
            ["run", "minkowski", "--config", str(cfg_path), "--a", "52",
             "--out-dir", str(tmp_path)])
        mapping = cli._mapping_from_args(args, "minkowski")
        cfg = experiments.config_from_mapping(mapping)
        assert cfg.params.a == 52
        assert cfg.params.n_u == 30

    def test_unknown_kind(self):
        with pytest.raises(ValueError, match="unknown experiment kind"):
            experiments.config_from_mapping({"kind": "warpdrive"})


class TestRunExperiment:
    def test_minkowski_preset_small_grid(self, tmp_path):
        mapping = {"kind": "minkowski", "a": 40.0, "n_u": 24, "n_v": 24,
                   "out_dir": str(tmp_path)}
        cfg = experiments.config_from_mapping(mapping)
        assert experiments.run_experiment(cfg) == 0
        summary = json.loads((tmp_path / "summary.json").read_text())
        assert summary["pass"] is True
        assert summary["max_errors"]["trchi"] <= 1e-6
        assert (tmp_path / "solution.csv").exists()

    def test_siglint_preset(self, tmp_path):
        cfg = experiments.config_from_mapping(
            {"kind": "siglint", "out_dir": str(tmp_path)})
        assert experiments.run_experiment(cfg) == 0
        summary = json.loads((tmp_path / "summary.json").read_text())
        assert summary["n_failed"] == 0
        assert summary["mutations"]["all_detected"] is True

    def test_cli_entry_point_runs(self, tmp_path, capsys):
        rc = cli.main(["run", "minkowski", "--a", "40", "--n-u", "16",
                       "--n-v", "16", "--out-dir", str(tmp_path)])
        assert rc == 0
        out = capsys.readouterr().out
        assert "ok" in out

    def test_cli_siglint_text_output(self, capsys):
        rc = cli.main(["siglint", "--no-mutations"])
        assert rc == 0
        out = capsys.readouterr().out
        assert "equations homogeneous" in out
        assert "pair" in out

    def test_cli_siglint_json(self, capsys):
        rc = cli.main(["siglint", "--json", "--no-mutations"])
        assert rc == 0
        report = json.loads(capsys.readouterr().out)
        assert report["n_failed"] == 0


class TestGoldenOutputs:
    def test_csv_schema(self):
        header = GOLDEN.read_text().splitlines()[0].split(",")
        assert header == experiments.CSV_COLUMNS

    def test_csv_reproduces_bit_exactly(self, tmp_path):
        params = experiments.calibrated_params(40.0, coupling=0.01, n=20)
        sol = evolve.run(params)
        out = tmp_path / "solution.csv"
        experiments.write_solution_csv(sol, out)
        assert out.read_text() == GOLDEN.read_text()

    def test_checkpoint_round_trip_on_golden_run(self, tmp_path):
        params = experiments.calibrated_params(40.0, coupling=0.01, n=20)
        sol = evolve.run(params)
        path = tmp_path / "run.npz"
        evolve.checkpoint(sol, path)
        assert evolve.solutions_equal(sol, evolve.restore(path))


class TestPlots:
    def test_expansion_map_flags_trapped_corner(self, pulse_solution_40):
        from dnullsim import plots
        data = plots.expansion_map(pulse_solution_40)
        assert np.any(data["trapped"])
        # the trapped set reaches the final sphere at the far corner
        assert data["trapped"][-1, -1]

    def test_flat_map_is_everywhere_positive(self):
        from dnullsim import plots
        from dataclasses import replace
        params = RunParams(a=40, n_u=16, n_v=16)
        params = replace(params, pulse=replace(params.pulse, amp=0.0))
        sol = evolve.run(params)
        data = plots.expansion_map(sol)
        assert np.all(data["exp_out"] > 0)
        assert not np.any(data["trapped"])

    def test_emit_plots_writes_files(self, tmp_path, small_pulse_solution):
        from dnullsim import plots
        written = plots.emit_plots(small_pulse_solution, out_dir=str(tmp_path))
        assert len(written) == 3
        for path in written:
            assert os.path.getsize(path) > 0

    def test_empty_selection_writes_nothing(self, tmp_path,
                                            small_pulse_solution):
        from dnullsim import plots
        assert plots.emit_plots(small_pulse_solution, out_dir=str(tmp_path),
                                which=()) == []
