"""Tests for the command-line front end."""

import io
import json

import pytest

from bundle_spectra.cli import (
    EXIT_CONFIG,
    EXIT_DISCRETIZATION,
    EXIT_FORMULA,
    EXIT_OK,
    ExperimentConfig,
    main,
    parse_config_text,
    run,
)
from bundle_spectra.errors import ConfigError


@pytest.fixture
def write_config(tmp_path):
    def write(data):
        path = tmp_path / "config.json"
        path.write_text(json.dumps(data), encoding="utf-8")
        return str(path)
    return write


class TestExperimentConfig:
    """Tests for config parsing and validation."""

    def test_defaults(self):
        config = ExperimentConfig.from_dict({})
        assert config == ExperimentConfig()
        assert config.index is None

    def test_lists_become_tuples(self):
        config = ExperimentConfig.from_dict({"weights": [0, [1, 2]], "steps": [1e-3]})
        assert config.weights == (0, (1, 2))
        assert config.steps == (1e-3,)

    def test_integer_amplitude_accepted(self):
        assert ExperimentConfig.from_dict({"amplitude": 1}).amplitude == 1.0

    @pytest.mark.parametrize("data", [
        {"resolution": "8"},
        {"m": True},
        {"weights": 1},
        {"synthetic": 1},
        {"scenario": "heat_trace"},
        {"resolution": 0},
        {"steps": [1e-3, 5e-4, 1e-4]},
        {"ensemble_size": -1},
    ])
    def test_invalid_values(self, data):
        with pytest.raises(ConfigError):
            ExperimentConfig.from_dict(data)

    def test_unknown_key(self):
        with pytest.raises(ConfigError) as info:
            ExperimentConfig.from_dict({"resolutoin": 8})
        assert "resolutoin" in str(info.value)

    def test_byte_offset_counts_utf8(self):
        with pytest.raises(ConfigError) as info:
            parse_config_text('{"preset": "é", x}')
        assert info.value.offset == 17

    def test_top_level_must_be_object(self):
        with pytest.raises(ConfigError):
            parse_config_text("[1, 2]")


class TestExitCodes:
    """Tests for main() exit codes."""

    def test_print_config(self, capsys):
        assert main(["spectrum", "--print-config", "--seed", "5"]) == EXIT_OK
        data = json.loads(capsys.readouterr().out)
        assert data["seed"] == 5
        assert data["resolution"] == 32

    def test_malformed_json(self, tmp_path, capsys):
        path = tmp_path / "bad.json"
        path.write_text('{"resolution": 8,,}', encoding="utf-8")
        assert main(["spectrum", "--config", str(path)]) == EXIT_CONFIG
        assert "byte" in capsys.readouterr().err

    def test_missing_config_file(self, tmp_path):
        assert main(["spectrum", "--config", str(tmp_path / "absent.json")]) == EXIT_CONFIG

    def test_unknown_key(self, write_config):
        assert main(["spectrum", "--config", write_config({"colour": 1})]) == EXIT_CONFIG

    def test_unknown_command(self):
        assert main(["heat-trace"]) == EXIT_CONFIG

    def test_invalid_override(self):
        assert main(["ensemble", "--workers", "0"]) == EXIT_CONFIG

    def test_indivisible_theta_resolution(self, write_config, capsys):
        config = write_config({"euler": 2, "resolution": 8, "n_theta": 20, "synthetic": True})
        assert main(["nodal", "--config", config]) == EXIT_DISCRETIZATION
        assert "minimal admissible value 16" in capsys.readouterr().err

    def test_nodal_needs_circle_bundle(self, write_config):
        assert main(["nodal", "--config", write_config({"d": 2, "resolution": 6})]) == EXIT_DISCRETIZATION

    def test_weyl_beyond_trust_threshold(self, write_config):
        config = write_config({"scenario": "weyl", "resolutions": [8], "lambdas": [1.0, 100.0], "alpha_max": 1})
        assert main(["convergence", "--config", config]) == EXIT_DISCRETIZATION

    def test_degenerate_branch(self, write_config, capsys):
        config = write_config({"preset": "flat", "resolution": 8, "alpha": 1, "index": 1})
        assert main(["perturb-check", "--config", config]) == EXIT_FORMULA
        assert "degenerate" in capsys.readouterr().err


class TestCommands:
    """End-to-end runs of each verb on small grids."""

    def test_spectrum_to_directory(self, write_config, tmp_path):
        config = write_config({"preset": "flat_g3", "resolution": 16, "weights": [1, 2], "m": 5})
        out = tmp_path / "results"
        assert run(["spectrum", "--config", config, "--out", str(out)]) == EXIT_OK
        spectrum = (out / "spectrum.csv").read_bytes().decode("utf-8")
        assert spectrum.startswith("# generated")
        assert "\r\n" in spectrum
        assert spectrum.split("\r\n")[1] == "alpha,index,lambda,residual,cluster_id,multiplicity,real_dimension"
        collisions = (out / "collisions.csv").read_bytes().decode("utf-8").split("\r\n")
        assert collisions[1] == "alpha,beta,lambda_alpha,lambda_beta"
        assert len([line for line in collisions[2:] if line]) == 4

    def test_spectrum_without_timestamp(self, write_config):
        stream = io.StringIO()
        config = write_config({"preset": "flat", "resolution": 8, "weights": [0, 1], "m": 2})
        assert run(["spectrum", "--config", config, "--no-timestamp"], stream=stream) == EXIT_OK
        lines = stream.getvalue().split("\r\n")
        assert lines[0].startswith("alpha,index,lambda")
        assert len([line for line in lines if line]) == 5

    def test_perturb_check(self, write_config):
        stream = io.StringIO()
        config = write_config({"euler": 1, "resolution": 8, "amplitude": 0.2, "seed": 7, "timestamp": False})
        assert run(["perturb-check", "--config", config], stream=stream) == EXIT_OK
        header = stream.getvalue().split("\r\n")[0]
        assert header.startswith("formula_id,analytic,numeric")

    def test_nodal_writes_json_and_signs(self, write_config, tmp_path):
        config = write_config({"preset": "flat", "resolution": 8, "synthetic": True})
        out = tmp_path / "nodal"
        assert run(["nodal", "--config", config, "--out", str(out)]) == EXIT_OK
        report = json.loads((out / "nodal.json").read_text(encoding="utf-8"))
        assert report["domain_count"] == 2
        assert report["n_theta"] == 16
        assert (out / "signs.bin").exists()

    def test_empty_ensemble(self, write_config):
        stream = io.StringIO()
        config = write_config({"ensemble_size": 0, "resolution": 8})
        assert run(["ensemble", "--config", config], stream=stream) == EXIT_OK
        data = json.loads(stream.getvalue())
        assert data["aggregates"]["size"] == 0
        assert data["aggregates"]["collision_fraction"] is None
        assert data["rows"] == []

    def test_convergence_with_svg(self, write_config, tmp_path):
        stream = io.StringIO()
        config = write_config({"resolutions": [8, 12], "timestamp": False})
        svg = tmp_path / "convergence.svg"
        assert run(["convergence", "--config", config, "--svg", str(svg)], stream=stream) == EXIT_OK
        assert stream.getvalue().startswith("N,value,reference,error,order")
        assert "<svg" in svg.read_text(encoding="utf-8")
