import json
import os

import numpy as np
import pytest
import jsonschema

from fracdg.config import parse_config
from fracdg.studies import run_convergence, run_diagnostics
from fracdg.reports import (CSV_HEADER, load_schema, validate_summary,
                            write_records_csv, write_curve, write_study,
                            render_figure, sha256_file)


def _records():
    return [
        {"h": 0.5, "tau": 0.05, "N": 8, "k": 1, "lambda": 0.5,
         "l2_error": 0.25, "energy_error": 0.5, "jump": 0.1, "eoc": None},
        {"h": 0.25, "tau": 0.025, "N": 16, "k": 1, "lambda": 0.5,
         "l2_error": 0.0625, "energy_error": 0.125, "jump": 0.025, "eoc": 2.0},
    ]


class TestWriters:
    def test_csv_golden(self, tmp_path):
        path = tmp_path / "records.csv"
        write_records_csv(str(path), _records())
        expected = (CSV_HEADER + "\n"
                    "0.5,0.05,8,1,0.5,0.25,0.5,0.1,\n"
                    "0.25,0.025,16,1,0.5,0.0625,0.125,0.025,2.0\n")
        assert path.read_text() == expected

    def test_curve_format(self, tmp_path):
        path = tmp_path / "curve.txt"
        write_curve(str(path), {"x": np.array([0.5, 0.25]),
                                "y": np.array([1e-2, 2.5e-3]),
                                "xlabel": "h", "ylabel": "err"})
        lines = path.read_text().splitlines()
        assert lines[0] == "# h err"
        assert lines[1] == "0.5 0.01"
        assert lines[2] == "0.25 0.0025"


class TestSchema:
    def test_schema_loads(self):
        schema = load_schema()
        assert schema["required"] == ["study", "ok", "config"]

    def test_valid_summary_passes(self):
        cfg = parse_config("convergence", overrides={"grids": "16,32", "t": "0.1"})
        summary, _ = run_convergence(cfg)
        validate_summary(summary)

    def test_corrupted_summary_fails(self):
        cfg = parse_config("convergence", overrides={"grids": "16,32", "t": "0.1"})
        summary, _ = run_convergence(cfg)
        bad = dict(summary)
        bad["ok"] = "yes"
        with pytest.raises(jsonschema.ValidationError):
            validate_summary(bad)
        bad = dict(summary)
        del bad["study"]
        with pytest.raises(jsonschema.ValidationError):
            validate_summary(bad)
        bad = json.loads(json.dumps(summary))
        bad["records"][0]["lambda"] = 2.0
        with pytest.raises(jsonschema.ValidationError):
            validate_summary(bad)


class TestWriteStudy:
    def test_full_artifact_set_and_manifest(self, tmp_path):
        cfg = parse_config("convergence", overrides={"grids": "16,32", "t": "0.1"})
        summary, extras = run_convergence(cfg)
        outdir = str(tmp_path / "out")
        manifest = write_study(outdir, summary, extras)

        names = {e["name"] for e in manifest["files"]}
        assert names == {"summary.json", "records.csv", "convergence.png",
                         "curve_energy_error.txt", "curve_l2_error.txt",
                         "curve_jump.txt"}
        for entry in manifest["files"]:
            path = os.path.join(outdir, entry["name"])
            assert sha256_file(path) == entry["sha256"]
            assert os.path.getsize(path) == entry["bytes"]
        on_disk = json.loads(open(os.path.join(outdir, "manifest.json")).read())
        assert on_disk == manifest

    def test_rewrite_is_byte_identical(self, tmp_path):
        cfg = parse_config("diagnostics", overrides={
            "grids": "16", "checks": "lemma31,switch"})
        summary, extras = run_diagnostics(cfg)
        out1, out2 = str(tmp_path / "a"), str(tmp_path / "b")
        write_study(out1, summary, extras)
        write_study(out2, summary, extras)
        for name in os.listdir(out1):
            b1 = open(os.path.join(out1, name), "rb").read()
            b2 = open(os.path.join(out2, name), "rb").read()
            assert b1 == b2, name

    def test_figure_skipped_without_curves(self, tmp_path):
        cfg = parse_config("diagnostics", overrides={"checks": ""})
        summary, extras = run_diagnostics(cfg)
        manifest = write_study(str(tmp_path / "out"), summary, extras)
        names = {e["name"] for e in manifest["files"]}
        assert names == {"summary.json"}
