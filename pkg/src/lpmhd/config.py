"""Flat key = value run configuration files.

One assignment per line, ``#`` starts a comment, keys match SimConfig
fields exactly.  Unknown or duplicate keys are rejected outright so a
config diff always means what it says.  Example::

    # reference vortex run
    n = 128
    dt = 1e-3
    t_end = 1.0
    cadence = 0.01
    profile = orszag_tang
    epsilon = 0.1
    seed = 0
"""

from __future__ import annotations

import dataclasses
from pathlib import Path

from .dynamics import SimConfig
from .errors import ConfigurationError

_BOOL_WORDS = {"true": True, "yes": True, "on": True, "1": True,
               "false": False, "no": False, "off": False, "0": False}

_FIELDS = {f.name: f for f in dataclasses.fields(SimConfig)}
_REQUIRED = ("n", "dt", "t_end")


def _convert(key: str, raw: str):
    kind = _FIELDS[key].type
    if kind == "int":
        return int(raw)
    if kind == "float":
        return float(raw)
    if kind == "bool":
        word = raw.lower()
        if word not in _BOOL_WORDS:
            raise ConfigurationError(f"{key}: expected a boolean, got {raw!r}")
        return _BOOL_WORDS[word]
    return raw


def parse_config_text(text: str, source: str = "<string>") -> SimConfig:
    values = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise ConfigurationError(f"{source}:{lineno}: expected 'key = value', got {line!r}")
        key, _, raw = body.partition("=")
        key = key.strip()
        raw = raw.strip()
        if key not in _FIELDS:
            raise ConfigurationError(f"{source}:{lineno}: unknown key {key!r}")
        if key in values:
            raise ConfigurationError(f"{source}:{lineno}: duplicate key {key!r}")
        if not raw:
            raise ConfigurationError(f"{source}:{lineno}: empty value for {key!r}")
        try:
            values[key] = _convert(key, raw)
        except ValueError as exc:
            raise ConfigurationError(f"{source}:{lineno}: {key}: {exc}") from None
    missing = [k for k in _REQUIRED if k not in values]
    if missing:
        raise ConfigurationError(f"{source}: missing required keys {missing}")
    return SimConfig(**values)


def parse_config(path) -> SimConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigurationError(f"cannot read config file {path}: {exc}") from None
    return parse_config_text(text, source=str(path))
