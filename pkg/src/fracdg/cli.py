"""Command line front end.

    fracdg <study> [--config file.ini] [flags]

Studies: solve, convergence, temporal-order, operator-check, diagnostics.
Flags override config-file values; everything has a default, so
`fracdg convergence` alone runs the stock linear study. Artifacts land in
the --out directory (summary.json, records.csv, curve_*.txt, a PNG figure,
manifest.json). Exit code 0 iff all requested checks pass and nothing blew
up. Set FRACDG_CACHE_DIR to reuse assembled operator blocks across runs.
"""

import argparse
import sys

from .config import ConfigError, parse_config
from .reports import write_study
from .studies import STUDIES, StudyError

_HELP = {
    "solve": "single run: trajectory, final state, mass drift",
    "convergence": "grid refinement study in the space-time energy norm",
    "temporal-order": "time-step refinement against an extrapolated reference",
    "operator-check": "structural checks of the assembled nonlocal operator",
    "diagnostics": "flux, identity, switch-count, and inverse-inequality checks",
}


def build_parser():
    parser = argparse.ArgumentParser(
        prog="fracdg",
        description="RKDG2 solver and studies for fractional conservation laws")
    sub = parser.add_subparsers(dest="command", required=True)
    for kind, text in _HELP.items():
        p = sub.add_parser(kind, help=text)
        p.add_argument("--config", default=None, metavar="PATH",
                       help="INI config file; flags override its values")
        p.add_argument("--flux", default=None, help="linear or burgers")
        p.add_argument("--lambda", dest="lam", default=None,
                       help="fractional order in (0,1)")
        p.add_argument("--k", default=None, help="polynomial degree >= 1")
        p.add_argument("--grids", default=None,
                       help="comma-separated cell counts, e.g. 32,64,128")
        p.add_argument("--cfl", default=None, help="CFL constant")
        p.add_argument("--T", dest="T", default=None, help="final time")
        p.add_argument("--out", default=None, help="output directory")
        p.add_argument("--seed", default=None, help="RNG seed")
    return parser


def _print_report(summary):
    print("study: %s  ok: %s" % (summary["study"], summary["ok"]))
    if summary.get("records"):
        print(" " + "  ".join("%-12s" % c for c in
                              ("N", "tau", "l2_error", "energy_error", "eoc")))
        for r in summary["records"]:
            eoc = "-" if r["eoc"] is None else "%.3f" % r["eoc"]
            print(" " + "  ".join("%-12s" % v for v in
                                  (r["N"], "%.4g" % r["tau"],
                                   "%.4e" % r["l2_error"],
                                   "%.4e" % r["energy_error"], eoc)))
    if summary["study"] == "operator-check":
        for name, passed in summary["checks"].items():
            print("  %-18s %s" % (name, "pass" if passed else "FAIL"))
    if summary["study"] == "diagnostics":
        for check in summary["checks"]:
            print("  %-18s %s  (worst margin %.3e)"
                  % (check["name"], "pass" if check["passed"] else "FAIL",
                     check["worst_margin"]))
    if summary["study"] == "solve":
        print("  n_steps %d  mass drift %.3e  final l2 %.6g"
              % (summary["n_steps"], summary["mass_drift"],
                 summary["final_l2"]))
        if "l2_error" in summary:
            print("  l2 error vs exact %.6e" % summary["l2_error"])


def main(argv=None):
    args = build_parser().parse_args(argv)
    overrides = {"flux": args.flux, "lambda": args.lam, "k": args.k,
                 "grids": args.grids, "cfl": args.cfl, "t": args.T,
                 "out": args.out, "seed": args.seed}
    try:
        cfg = parse_config(args.command, path=args.config, overrides=overrides)
    except ConfigError as exc:
        print("configuration error: %s" % exc, file=sys.stderr)
        return 2
    try:
        summary, extras = STUDIES[args.command](cfg)
    except StudyError as exc:
        print("study failed: %s" % exc, file=sys.stderr)
        return 1
    manifest = write_study(cfg.out, summary, extras)
    _print_report(summary)
    print("wrote %d files to %s" % (len(manifest["files"]) + 1, cfg.out))
    return 0 if summary["ok"] else 1


if __name__ == "__main__":
    sys.exit(main())
