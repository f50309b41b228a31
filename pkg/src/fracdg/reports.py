"""Artifact writers for study output directories.

Every study emits, under its output directory:
  - summary.json       schema-validated JSON payload (schemas/run_summary.schema.json)
  - records.csv        fixed header h,tau,N,k,lambda,l2_error,energy_error,jump,eoc
                       (when the study produces error records; the eoc column
                       is the energy-norm order, null on the first row)
  - curve_<name>.txt   plain two-column text per curve, plot-tool agnostic
  - <study>.png        rendered figure of the same curves
  - manifest.json      file list with sha256 content hashes (written last)

All writers are deterministic: floats are serialized with shortest
round-trip repr, JSON keys are sorted, and figures carry pinned metadata
instead of timestamps.
"""

import hashlib
import json
import os
from importlib import resources

import numpy as np
import jsonschema
from matplotlib.figure import Figure

CSV_HEADER = "h,tau,N,k,lambda,l2_error,energy_error,jump,eoc"

_PNG_META = {"Software": "fracdg"}


def _fmt(x):
    return repr(float(x))


def load_schema():
    path = resources.files("fracdg").joinpath("schemas/run_summary.schema.json")
    return json.loads(path.read_text())


def validate_summary(summary):
    """Raise jsonschema.ValidationError if the payload is malformed."""
    jsonschema.validate(summary, load_schema())


def write_records_csv(path, records):
    lines = [CSV_HEADER]
    for r in records:
        eoc = "" if r["eoc"] is None else _fmt(r["eoc"])
        lines.append(",".join([
            _fmt(r["h"]), _fmt(r["tau"]), str(r["N"]), str(r["k"]),
            _fmt(r["lambda"]), _fmt(r["l2_error"]), _fmt(r["energy_error"]),
            _fmt(r["jump"]), eoc]))
    with open(path, "w") as f:
        f.write("\n".join(lines) + "\n")


def write_summary(path, summary):
    validate_summary(summary)
    with open(path, "w") as f:
        json.dump(summary, f, indent=2, sort_keys=True)
        f.write("\n")


def write_curve(path, curve):
    with open(path, "w") as f:
        f.write("# %s %s\n" % (curve["xlabel"], curve["ylabel"]))
        for x, y in zip(curve["x"], curve["y"]):
            f.write("%s %s\n" % (_fmt(x), _fmt(y)))


def _slope_guide(ax, x, y, order, label):
    x = np.asarray(x, dtype=float)
    anchor = y[0] * 1.2
    ax.loglog(x, anchor * (x / x[0]) ** order, "k--", linewidth=0.8,
              label=label)


def render_figure(path, summary, extras):
    """One PNG per study; returns False when the study has nothing to draw."""
    study = summary["study"]
    curves = extras.get("curves", {})
    if not curves:
        return False

    if study == "solve":
        fig = Figure(figsize=(9, 3.5))
        ax1, ax2 = fig.subplots(1, 2)
        c = curves["final_state"]
        ax1.plot(c["x"], c["y"], linewidth=1.0)
        ax1.set_xlabel(c["xlabel"]); ax1.set_ylabel(c["ylabel"])
        ax1.set_title("final state")
        for name in ("l2_history", "seminorm_history"):
            if name in curves:
                c = curves[name]
                ax2.plot(c["x"], c["y"], label=c["ylabel"])
        ax2.set_xlabel("t"); ax2.legend(); ax2.set_title("norm history")
    elif study in ("convergence", "temporal-order", "operator-check"):
        fig = Figure(figsize=(5.5, 4.2))
        ax = fig.subplots()
        for name, c in curves.items():
            ax.loglog(c["x"], c["y"], "o-", label=name)
        first = next(iter(curves.values()))
        if study == "convergence":
            cfg = summary["config"]
            order = cfg["k"] + 1 - cfg["lambda"] / 2.0
            _slope_guide(ax, first["x"], first["y"], order,
                         "slope %.2f" % order)
        elif study == "temporal-order":
            _slope_guide(ax, first["x"], first["y"], 2.0, "slope 2")
        ax.set_xlabel(first["xlabel"]); ax.set_ylabel("error")
        ax.legend(); ax.grid(True, which="both", alpha=0.3)
    elif study == "diagnostics":
        fig = Figure(figsize=(5.5, 3.5))
        ax = fig.subplots()
        c = curves["margins"]
        names = extras.get("check_names", [str(int(i)) for i in c["x"]])
        ax.bar(names, c["y"])
        ax.axhline(0.0, color="k", linewidth=0.8)
        ax.set_ylabel("worst margin (>= 0 passes)")
    else:
        return False

    fig.suptitle(study)
    fig.savefig(path, dpi=110, metadata=_PNG_META)
    return True


def sha256_file(path):
    digest = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 16), b""):
            digest.update(chunk)
    return digest.hexdigest()


def write_manifest(outdir, names):
    entries = []
    for name in sorted(names):
        path = os.path.join(outdir, name)
        entries.append({"name": name, "sha256": sha256_file(path),
                        "bytes": os.path.getsize(path)})
    manifest = {"files": entries}
    path = os.path.join(outdir, "manifest.json")
    with open(path, "w") as f:
        json.dump(manifest, f, indent=2, sort_keys=True)
        f.write("\n")
    return manifest


def write_study(outdir, summary, extras):
    """Write all artifacts for one study; returns the manifest."""
    os.makedirs(outdir, exist_ok=True)
    names = []

    write_summary(os.path.join(outdir, "summary.json"), summary)
    names.append("summary.json")

    if summary.get("records"):
        write_records_csv(os.path.join(outdir, "records.csv"),
                          summary["records"])
        names.append("records.csv")

    for name, curve in extras.get("curves", {}).items():
        fname = "curve_%s.txt" % name
        write_curve(os.path.join(outdir, fname), curve)
        names.append(fname)

    figname = "%s.png" % summary["study"]
    if render_figure(os.path.join(outdir, figname), summary, extras):
        names.append(figname)

    return write_manifest(outdir, names)
