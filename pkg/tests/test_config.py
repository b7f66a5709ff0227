"""Tests for configuration parsing, validation and precedence."""

import json
import math

import pytest
from pydantic import ValidationError

from oscint.config import (
    EigenOptions,
    EigenScanConfig,
    PhaseOptions,
    PlaneWaveOptions,
    ReportFormat,
    RunConfig,
    Subcommand,
    load_config_file,
    load_curve,
    merge_options,
    parse_curve,
    parse_lambda_grid,
    parse_window,
    resolve_threads,
    validation_message,
)
from oscint.errors import ConfigError, CurveFormatError, NonConvexError
from oscint.models import BoundaryKind, CurveKind


class TestLambdaGrid:
    def test_geometric(self):
        assert parse_lambda_grid("100:800:*2") == [100.0, 200.0, 400.0, 800.0]

    def test_arithmetic(self):
        assert parse_lambda_grid("1:2:+0.5") == [1.0, 1.5, 2.0]

    def test_list(self):
        assert parse_lambda_grid(" 3, 1.5 ,7 ") == [3.0, 1.5, 7.0]

    @pytest.mark.parametrize(
        "text",
        ["100:800", "100:800:/2", "100:800:*1", "800:100:*2", "1:2:+0", "a,b", "", "1,-2", "1,nan"],
    )
    def test_rejected(self, text):
        with pytest.raises(ConfigError):
            parse_lambda_grid(text)


class TestWindow:
    def test_parse(self):
        assert parse_window("14:16") == (14.0, 16.0)

    @pytest.mark.parametrize("text", ["14", "16:14", "0:1", "a:b", "1:2:3"])
    def test_rejected(self, text):
        with pytest.raises(ConfigError):
            parse_window(text)


class TestCurveFiles:
    def test_registry_name(self):
        assert load_curve("disk").kind is CurveKind.SUPPORT_FOURIER

    def test_fourier_file(self, curve_file):
        path = curve_file(json.dumps({"type": "support_fourier", "a0": 1.0, "cos": [0, 0, 0.05]}))
        curve = load_curve(path)
        assert curve.perimeter == pytest.approx(2 * math.pi)

    def test_ellipse_file(self, curve_file):
        path = curve_file('{"type": "ellipse", "a": 2.0, "b": 1.0}')
        curve = load_curve(path)
        assert curve.kind is CurveKind.ELLIPSE
        assert curve.area == pytest.approx(2 * math.pi)

    def test_missing_file(self, tmp_path):
        with pytest.raises(CurveFormatError):
            load_curve(tmp_path / "nope.json")

    def test_bad_json(self, curve_file):
        with pytest.raises(CurveFormatError):
            load_curve(curve_file("{not json"))

    @pytest.mark.parametrize(
        "data",
        [
            {"type": "polygon"},
            {"type": "ellipse", "a": -1.0, "b": 1.0},
            {"type": "support_fourier", "a0": 1.0, "extra": 1},
            {"type": "support_fourier"},
        ],
    )
    def test_invalid_descriptions(self, data):
        with pytest.raises(CurveFormatError):
            parse_curve(data)

    def test_nonconvex_description(self):
        with pytest.raises(NonConvexError):
            parse_curve({"type": "support_fourier", "a0": 1.0, "cos": [0, 0, 0.2]})


class TestEigenScanConfig:
    def test_derived_counts(self):
        cfg = EigenScanConfig(alpha_min=5.0, alpha_max=7.0, basis_order=10)
        assert cfg.boundary_points == 40
        assert cfg.interior_points == 20
        assert cfg.window == (5.0, 7.0)

    def test_with_window(self):
        cfg = EigenScanConfig(alpha_min=5.0, alpha_max=7.0, seed=3).with_window(14.0, 16.0)
        assert cfg.window == (14.0, 16.0)
        assert cfg.seed == 3

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"alpha_min": 7.0, "alpha_max": 5.0},
            {"alpha_min": 5.0, "alpha_max": 7.0, "boundary_points": 50},
            {"alpha_min": 5.0, "alpha_max": 7.0, "interior_points": 10},
            {"alpha_min": 5.0, "alpha_max": 7.0, "scan_step": 3.0},
            {"alpha_min": 5.0, "alpha_max": 7.0, "unknown": 1},
        ],
    )
    def test_rejected(self, kwargs):
        with pytest.raises(ValidationError):
            EigenScanConfig(**kwargs)


class TestOptions:
    def test_phase_grid_needs_four_values(self):
        with pytest.raises(ValidationError):
            PhaseOptions(lambda_grid="100,200,400")
        assert len(PhaseOptions(lambda_grid="100:800:*2").lambdas) == 4
        assert PhaseOptions().lambdas[:3] == [100.0, 200.0, 400.0]

    def test_planewave_t_list(self):
        opts = PlaneWaveOptions(alpha=5.0, t="1, 2.5")
        assert opts.t == [1.0, 2.5]
        assert PlaneWaveOptions(alpha=5.0, t=2).t == [2.0]

    def test_planewave_level_needs_real_lambda(self):
        with pytest.raises(ValidationError):
            PlaneWaveOptions(alpha=-5.0, t="1")

    def test_eigen_scan_config(self):
        opts = EigenOptions(kind="neumann", alpha_window="14:16", basis_order=20)
        cfg = opts.scan_config(seed=9)
        assert opts.kind is BoundaryKind.NEUMANN
        assert cfg.window == (14.0, 16.0)
        assert cfg.basis_order == 20
        assert cfg.boundary_points == 80
        assert cfg.seed == 9


class TestRunConfig:
    def test_curve_required(self):
        with pytest.raises(ValidationError):
            RunConfig(subcommand=Subcommand.GEOMETRY)

    def test_unknown_curve(self):
        with pytest.raises(ValidationError):
            RunConfig(subcommand=Subcommand.GEOMETRY, curve="nowhere.json")

    def test_options_validated(self):
        with pytest.raises(ValidationError) as excinfo:
            RunConfig(subcommand=Subcommand.LEIBNIZ, options={"nmax": 0})
        assert "nmax" in validation_message(excinfo.value)

    def test_parsed_options(self):
        config = RunConfig(subcommand=Subcommand.EIGEN, curve="disk", options={"kind": "neumann"})
        assert config.format is ReportFormat.CSV
        assert config.parsed_options().kind is BoundaryKind.NEUMANN


class TestPrecedence:
    def test_flags_override_file(self):
        merged = merge_options({"nmax": 4, "check": True}, {"nmax": 6, "check": None})
        assert merged == {"nmax": 6, "check": True}

    def test_no_file(self):
        assert merge_options(None, {"a": None, "b": 1}) == {"b": 1}

    def test_toml_file(self, tmp_path):
        path = tmp_path / "oscint.toml"
        path.write_text('[eigen]\nkind = "neumann"\nalpha_window = "14:16"\n', encoding="utf-8")
        assert load_config_file(path) == {"eigen": {"kind": "neumann", "alpha_window": "14:16"}}

    def test_json_file(self, tmp_path):
        path = tmp_path / "oscint.json"
        path.write_text('{"global": {"seed": 7}, "leibniz": {"nmax": 3}}', encoding="utf-8")
        assert load_config_file(path)["global"] == {"seed": 7}

    @pytest.mark.parametrize("text", ['{"bogus": {}}', "[1, 2]", "{broken"])
    def test_bad_files(self, tmp_path, text):
        path = tmp_path / "oscint.json"
        path.write_text(text, encoding="utf-8")
        with pytest.raises(ConfigError):
            load_config_file(path)


class TestThreads:
    def test_flag_wins(self, monkeypatch):
        monkeypatch.setenv("OSCINT_THREADS", "8")
        assert resolve_threads(2) == 2

    def test_environment(self, monkeypatch):
        monkeypatch.setenv("OSCINT_THREADS", "3")
        assert resolve_threads() == 3

    def test_default(self, monkeypatch):
        monkeypatch.delenv("OSCINT_THREADS", raising=False)
        assert resolve_threads() == 1

    @pytest.mark.parametrize("raw", ["zero", "0", "-2"])
    def test_invalid_environment(self, monkeypatch, raw):
        monkeypatch.setenv("OSCINT_THREADS", raw)
        with pytest.raises(ConfigError):
            resolve_threads()

    def test_invalid_flag(self):
        with pytest.raises(ConfigError):
            resolve_threads(0)
