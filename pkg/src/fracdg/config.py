"""Study configuration: flat INI sections plus command-line overrides.

A config file looks like

    [problem]
    flux = linear
    lambda = 0.5
    u0 = two_mode
    T = 0.5

    [discretization]
    k = 1
    grids = 32, 64, 128, 256
    cfl = 0.1

    [study]
    out = out
    seed = 0

Every key has a default; values supplied on the command line override the
file. Unknown keys and out-of-range values raise ConfigError naming the
offending key. The set of keys that fell back to defaults is recorded so
reports can echo it.
"""

import configparser

import numpy as np


class ConfigError(ValueError):
    pass


STUDY_KINDS = ("solve", "convergence", "temporal-order", "operator-check",
               "diagnostics")

PRESETS = {
    "sin": [(1, 0.0, 1.0)],
    "two_mode": [(1, 0.0, 1.0), (2, 0.5, 0.0)],
}

_PROBLEM_KEYS = ("flux", "speed", "lambda", "length", "u0", "t", "omega", "offset")
_DISC_KEYS = ("k", "grids", "cfl", "nflux", "eps_asm", "taus")
_STUDY_KEYS = ("out", "seed", "checks")

_DEFAULTS = {
    "flux": "linear",
    "speed": 1.0,
    "lambda": 0.5,
    "length": 2.0 * np.pi,
    "u0": "two_mode",
    "t": 0.5,
    "omega": 1.0,
    "offset": 0.0,
    "k": 1,
    "grids": (32, 64, 128, 256),
    "cfl": 0.1,
    "nflux": "godunov",
    "eps_asm": 1e-10,
    "taus": (),
    "out": "out",
    "seed": 0,
    "checks": ("lemma31", "identity", "switch", "inverse"),
}


def parse_modes(text, key="u0"):
    """Mode list 'k:a:b, ...' or a named preset; returns [(k, a, b), ...]."""
    text = text.strip()
    if text in PRESETS:
        return list(PRESETS[text])
    modes = []
    for part in text.split(","):
        fields = part.strip().split(":")
        if len(fields) != 3:
            raise ConfigError("%s: expected preset %r or 'k:a:b' list, got %r"
                              % (key, sorted(PRESETS), text))
        try:
            kk, a, b = int(fields[0]), float(fields[1]), float(fields[2])
        except ValueError:
            raise ConfigError("%s: malformed mode entry %r" % (key, part.strip()))
        if kk < 1:
            raise ConfigError("%s: mode number must be >= 1, got %d" % (key, kk))
        modes.append((kk, a, b))
    return modes


class RunConfig:
    """Validated study settings with defaults filled in."""

    def __init__(self, kind, values, defaulted):
        if kind not in STUDY_KINDS:
            raise ConfigError("study kind %r not one of %r" % (kind, STUDY_KINDS))
        self.kind = kind
        self.defaulted = sorted(defaulted)

        self.flux = values["flux"]
        self.speed = values["speed"]
        self.lam = values["lambda"]
        self.length = values["length"]
        self.u0_text = values["u0"]
        self.modes = parse_modes(values["u0"])
        self.T = values["t"]
        self.omega = values["omega"]
        self.offset = values["offset"]
        self.k = values["k"]
        self.grids = tuple(values["grids"])
        self.cfl = values["cfl"]
        self.nflux = values["nflux"]
        self.eps_asm = values["eps_asm"]
        self.taus = tuple(values["taus"])
        self.out = values["out"]
        self.seed = values["seed"]
        self.checks = tuple(values["checks"])

        if self.flux not in ("linear", "burgers"):
            raise ConfigError("flux: expected linear or burgers, got %r" % self.flux)
        if not 0.0 < self.lam < 1.0:
            raise ConfigError("lambda: %g outside the supported range (0,1)"
                              % self.lam)
        if self.length <= 0:
            raise ConfigError("length: must be positive")
        if self.T < 0:
            raise ConfigError("t: final time must be >= 0")
        if self.k < 1:
            raise ConfigError("k: polynomial degree must be >= 1")
        if not self.grids:
            raise ConfigError("grids: need at least one grid")
        if any(n2 <= n1 for n1, n2 in zip(self.grids, self.grids[1:])):
            raise ConfigError("grids: must be strictly increasing, got %r"
                              % (self.grids,))
        if any(n < 2 for n in self.grids):
            raise ConfigError("grids: every N must be >= 2")
        if self.cfl <= 0:
            raise ConfigError("cfl: must be positive")
        if self.nflux not in ("godunov", "engquist_osher", "pure_upwind"):
            raise ConfigError("nflux: unknown numerical flux %r" % self.nflux)
        if self.eps_asm <= 0:
            raise ConfigError("eps_asm: must be positive")
        if any(t <= 0 for t in self.taus):
            raise ConfigError("taus: time steps must be positive")
        bad = [c for c in self.checks
               if c not in ("lemma31", "identity", "switch", "inverse")]
        if bad:
            raise ConfigError("checks: unknown diagnostic %r" % bad[0])

    def to_dict(self):
        return {
            "kind": self.kind,
            "flux": self.flux, "speed": self.speed, "lambda": self.lam,
            "length": self.length, "u0": self.u0_text,
            "modes": [list(m) for m in self.modes], "T": self.T,
            "omega": self.omega, "offset": self.offset,
            "k": self.k, "grids": list(self.grids), "cfl": self.cfl,
            "nflux": self.nflux, "eps_asm": self.eps_asm,
            "taus": list(self.taus),
            "out": self.out, "seed": self.seed, "checks": list(self.checks),
            "defaults_applied": self.defaulted,
        }


def _convert(key, raw):
    """Parse a raw string setting into its typed value."""
    try:
        if key in ("speed", "lambda", "length", "t", "cfl", "eps_asm",
                   "omega", "offset"):
            return float(raw)
        if key in ("k", "seed"):
            return int(raw)
        if key == "grids":
            return tuple(int(p) for p in raw.replace(",", " ").split())
        if key == "taus":
            return tuple(float(p) for p in raw.replace(",", " ").split())
        if key == "checks":
            parts = [p for p in raw.replace(",", " ").split()]
            return tuple(parts)
    except ValueError:
        raise ConfigError("%s: malformed value %r" % (key, raw))
    return raw.strip()


_SECTION_KEYS = {"problem": _PROBLEM_KEYS, "discretization": _DISC_KEYS,
                 "study": _STUDY_KEYS}


def parse_config(kind, path=None, overrides=None):
    """Build a RunConfig for a study kind from an optional file plus overrides.

    overrides maps bare key names (as from command-line flags) to raw string
    values and wins over file settings.
    """
    values = dict(_DEFAULTS)
    defaulted = set(values)

    if path is not None:
        parser = configparser.ConfigParser()
        read = parser.read(path)
        if not read:
            raise ConfigError("config file %r not found or unreadable" % path)
        for section in parser.sections():
            if section not in _SECTION_KEYS:
                raise ConfigError("unknown config section [%s]" % section)
            for key, raw in parser.items(section):
                if key not in _SECTION_KEYS[section]:
                    raise ConfigError("unknown key %r in section [%s]"
                                      % (key, section))
                values[key] = _convert(key, raw)
                defaulted.discard(key)

    for key, raw in (overrides or {}).items():
        if key not in values:
            raise ConfigError("unknown override %r" % key)
        if raw is None:
            continue
        values[key] = _convert(key, raw if isinstance(raw, str) else str(raw))
        defaulted.discard(key)

    return RunConfig(kind, values, defaulted)
