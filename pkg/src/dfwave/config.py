"""Strict experiment-config loading for the batch CLI.

Flat INI sections of key = value pairs. Unknown sections or keys are
fatal so that a config file is an unambiguous experiment record. Every
referenced input path must exist at load time. Overrides arrive as
SECTION.KEY=VALUE strings (the CLI's --set flag); the environment
variable DFWAVE_OUTPUT_DIR supplies the default output directory when
[run] output_dir is absent.
"""

import configparser
import os

from .exceptions import ConfigError

COMMANDS = (
    "kernel-eval",
    "fit",
    "evaluate",
    "hermite",
    "transform",
    "nodes-optimize",
    "study-converge",
    "study-edge",
)

ALLOWED = {
    "run": {"command", "output_dir", "seed", "threads"},
    "kernel": {"family", "n", "m", "shape", "power", "tensor"},
    "scales": {"kind", "values"},
    "input": {"points", "values", "grid", "radial", "boundary", "interior",
              "model", "csv", "start"},
    "fit": {"strategy"},
    "transform": {"op", "method", "s", "y", "beta", "q", "gamma", "n", "center",
                  "support_radius", "n_radial", "n_angular", "n_polar",
                  "breakpoints"},
    "study": {"target", "m_list", "n_list", "node_rule", "strategy",
              "grid_density", "lower", "upper", "error_map_m", "band_width",
              "samples", "interior_count"},
    "nodes": {"lower", "upper", "iterations", "count", "samples_per_axis"},
    "hermite": {"fd_step"},
    "plot": {"x", "y", "logx", "logy", "output"},
}

_PATH_KEYS = {("input", k) for k in ALLOWED["input"]} | {("kernel", "tensor")}


class ExperimentConfig:
    """Validated view over the parsed sections."""

    def __init__(self, sections, source_path):
        self.sections = sections
        self.source_path = source_path
        cmd = self.get("run", "command")
        if cmd is None:
            raise ConfigError("[run] command is required")
        if cmd not in COMMANDS:
            raise ConfigError(f"unknown command {cmd!r}; expected one of {COMMANDS}")
        self.command = cmd
        self.seed = self.getint("run", "seed", 0)
        out = self.get("run", "output_dir")
        if out is None:
            out = os.environ.get("DFWAVE_OUTPUT_DIR", ".")
        self.output_dir = out

    def get(self, section, key, default=None):
        return self.sections.get(section, {}).get(key, default)

    def require(self, section, key):
        v = self.get(section, key)
        if v is None:
            raise ConfigError(f"[{section}] {key} is required for command {self.command!r}")
        return v

    def getint(self, section, key, default=None):
        v = self.get(section, key)
        if v is None:
            return default
        try:
            return int(v)
        except ValueError as exc:
            raise ConfigError(f"[{section}] {key} must be an integer, got {v!r}") from exc

    def getfloat(self, section, key, default=None):
        v = self.get(section, key)
        if v is None:
            return default
        try:
            return float(v)
        except ValueError as exc:
            raise ConfigError(f"[{section}] {key} must be a number, got {v!r}") from exc

    def getbool(self, section, key, default=False):
        v = self.get(section, key)
        if v is None:
            return default
        low = str(v).strip().lower()
        if low in ("1", "true", "yes", "on"):
            return True
        if low in ("0", "false", "no", "off"):
            return False
        raise ConfigError(f"[{section}] {key} must be boolean, got {v!r}")

    def getfloats(self, section, key, default=None):
        v = self.get(section, key)
        if v is None:
            return default
        try:
            return [float(tok) for tok in v.replace(",", " ").split()]
        except ValueError as exc:
            raise ConfigError(f"[{section}] {key} must be a number list, got {v!r}") from exc

    def getints(self, section, key, default=None):
        vals = self.getfloats(section, key)
        if vals is None:
            return default
        out = []
        for v in vals:
            if v != int(v):
                raise ConfigError(f"[{section}] {key} must be integers")
            out.append(int(v))
        return out

    def resolved_items(self):
        """Sorted section.key = value pairs echoed into output comments."""
        out = []
        for sec in sorted(self.sections):
            for key in sorted(self.sections[sec]):
                out.append(f"{sec}.{key} = {self.sections[sec][key]}")
        return out


def _apply_override(sections, spec):
    head, _, value = spec.partition("=")
    if not _ or "." not in head:
        raise ConfigError(f"--set expects SECTION.KEY=VALUE, got {spec!r}")
    sec, _, key = head.partition(".")
    sec = sec.strip().lower()
    key = key.strip().lower()
    sections.setdefault(sec, {})[key] = value.strip()


def load_config(path, overrides=()):
    if not os.path.isfile(path):
        raise ConfigError(f"config file not found: {path}")
    parser = configparser.RawConfigParser()
    parser.optionxform = str.lower
    try:
        with open(path, "r", encoding="utf-8") as fh:
            parser.read_file(fh, source=path)
    except (configparser.Error, OSError, UnicodeDecodeError) as exc:
        raise ConfigError(f"cannot parse config {path}: {exc}") from exc
    sections = {}
    for sec in parser.sections():
        sections[sec.lower()] = {k: v for k, v in parser.items(sec)}
    for spec in overrides:
        _apply_override(sections, spec)
    for sec, kv in sections.items():
        if sec not in ALLOWED:
            raise ConfigError(f"unknown config section [{sec}]")
        for key in kv:
            if key not in ALLOWED[sec]:
                raise ConfigError(f"unknown key {key!r} in section [{sec}]")
    base = os.path.dirname(os.path.abspath(path))
    for sec, kv in sections.items():
        for key, value in list(kv.items()):
            if (sec, key) in _PATH_KEYS:
                resolved = value if os.path.isabs(value) else os.path.join(base, value)
                if not os.path.isfile(resolved):
                    raise ConfigError(f"[{sec}] {key} references missing file {value!r}")
                kv[key] = resolved
    return ExperimentConfig(sections, source_path=os.path.abspath(path))
