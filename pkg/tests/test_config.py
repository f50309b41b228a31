import numpy as np
import pytest

from fracdg.config import ConfigError, RunConfig, parse_config, parse_modes


class TestModes:
    def test_presets(self):
        assert parse_modes("two_mode") == [(1, 0.0, 1.0), (2, 0.5, 0.0)]
        assert parse_modes("sin") == [(1, 0.0, 1.0)]

    def test_explicit_list(self):
        assert parse_modes("1:0:1, 3:0.2:0.1") == [(1, 0.0, 1.0), (3, 0.2, 0.1)]

    def test_malformed(self):
        with pytest.raises(ConfigError):
            parse_modes("1:2")
        with pytest.raises(ConfigError):
            parse_modes("1:a:b")
        with pytest.raises(ConfigError):
            parse_modes("0:1:1")


class TestDefaults:
    def test_minimal_call_fills_defaults(self):
        cfg = parse_config("convergence")
        assert cfg.flux == "linear" and cfg.k == 1 and cfg.lam == 0.5
        assert cfg.grids == (32, 64, 128, 256)
        assert cfg.T == 0.5 and cfg.seed == 0
        assert "flux" in cfg.defaulted and "k" in cfg.defaulted

    def test_to_dict_echoes_defaults_applied(self):
        cfg = parse_config("solve", overrides={"k": "2"})
        d = cfg.to_dict()
        assert d["k"] == 2
        assert "k" not in d["defaults_applied"]
        assert "lambda" in d["defaults_applied"]

    def test_unknown_study_kind(self):
        with pytest.raises(ConfigError):
            parse_config("frobnicate")


class TestValidation:
    def test_lambda_range_cited(self):
        with pytest.raises(ConfigError, match=r"\(0,1\)"):
            parse_config("solve", overrides={"lambda": "1.5"})

    def test_k_and_T_and_grids(self):
        with pytest.raises(ConfigError, match="k"):
            parse_config("solve", overrides={"k": "0"})
        with pytest.raises(ConfigError, match="t"):
            parse_config("solve", overrides={"t": "-1"})
        with pytest.raises(ConfigError, match="grids"):
            parse_config("solve", overrides={"grids": "64,32"})
        with pytest.raises(ConfigError, match="grids"):
            parse_config("solve", overrides={"grids": "1,2"})

    def test_flux_and_nflux_names(self):
        with pytest.raises(ConfigError, match="flux"):
            parse_config("solve", overrides={"flux": "cubic"})
        cfg = parse_config("solve", overrides={"flux": "burgers"})
        assert cfg.flux == "burgers"

    def test_malformed_number_names_key(self):
        with pytest.raises(ConfigError, match="cfl"):
            parse_config("solve", overrides={"cfl": "fast"})

    def test_unknown_override(self):
        with pytest.raises(ConfigError, match="unknown override"):
            parse_config("solve", overrides={"velocity": "2"})

    def test_unknown_checks(self):
        with pytest.raises(ConfigError, match="checks"):
            parse_config("diagnostics", overrides={"checks": "identity,bogus"})


class TestFileAndPrecedence:
    def _write(self, tmp_path, text):
        path = tmp_path / "study.ini"
        path.write_text(text)
        return str(path)

    def test_file_values_read(self, tmp_path):
        path = self._write(tmp_path, """
[problem]
flux = linear
lambda = 0.25
t = 0.1

[discretization]
k = 2
grids = 16, 32
""")
        cfg = parse_config("convergence", path=path)
        assert cfg.lam == 0.25 and cfg.k == 2 and cfg.grids == (16, 32)
        assert "lambda" not in cfg.defaulted

    def test_flag_overrides_file(self, tmp_path):
        path = self._write(tmp_path, "[discretization]\nk = 1\n")
        cfg = parse_config("solve", path=path, overrides={"k": "2"})
        assert cfg.k == 2

    def test_none_override_is_ignored(self, tmp_path):
        path = self._write(tmp_path, "[discretization]\nk = 3\n")
        cfg = parse_config("solve", path=path, overrides={"k": None})
        assert cfg.k == 3

    def test_unknown_key_and_section(self, tmp_path):
        path = self._write(tmp_path, "[problem]\nviscosity = 1\n")
        with pytest.raises(ConfigError, match="viscosity"):
            parse_config("solve", path=path)
        path = self._write(tmp_path, "[extras]\nfoo = 1\n")
        with pytest.raises(ConfigError, match="extras"):
            parse_config("solve", path=path)

    def test_missing_file(self):
        with pytest.raises(ConfigError, match="not found"):
            parse_config("solve", path="/nonexistent/study.ini")
