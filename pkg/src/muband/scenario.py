"""Declarative scenario files (TOML) and their validation."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import tomli

from .errors import ParseError

KINDS = ("verify", "bubble", "sweep")
PRESETS = ("cone-caps", "hyperbolic-caps")

# allowed keys per section; values are (type-check, default)
_SCHEMA = {
    "scenario": {"name": str, "kind": str, "description": str},
    "band": {
        "n": int,
        "widths": list,
        "width_factor": (int, float),
        "scal_lower": list,
        "H_minus": (int, float),
        "H_plus": (int, float),
    },
    "models": {
        "preset": str,
        "kappa": (int, float),
        "sigma": (int, float),
        "d": (int, float),
        "delta": (int, float),
        "segments": list,
    },
    "solver": {
        "eps": (int, float),
        "points": int,
        "points_per_segment": int,
        "enforce_barrier": bool,
    },
    "output": {"dir": str, "format": str},
    "grid": {
        "mode": str,
        "length": (int, float),
        "height": (int, float),
        "nx": int,
        "ny": int,
        "topology": str,
        "h": str,
        "c": (int, float),
        "x0": (int, float),
        "value": (int, float),
        "H_minus": (int, float),
        "H_plus": (int, float),
        "scal_lower": (int, float),
        "ambient_family": str,
        "ambient_kappa": (int, float),
        "ambient_offset": (int, float),
        "dt": (int, float),
    },
    "sweep": {
        "n": list,
        "kappa": list,
        "sigma": list,
        "d": list,
        "d_fraction": list,
        "sigma_fraction": list,
        "jobs": int,
    },
}
_SEGMENT_KEYS = {"family": str, "kappa": (int, float), "sigma": (int, float), "interval": list}


@dataclass
class Scenario:
    name: str
    kind: str
    path: Path | None = None
    band: dict = field(default_factory=dict)
    models: dict = field(default_factory=dict)
    solver: dict = field(default_factory=dict)
    output: dict = field(default_factory=dict)
    grid: dict = field(default_factory=dict)
    sweep: dict = field(default_factory=dict)
    description: str = ""


def _check_section(name, table):
    allowed = _SCHEMA[name]
    if not isinstance(table, dict):
        raise ParseError(f"[{name}] must be a table")
    for key, value in table.items():
        if key not in allowed:
            raise ParseError(f"unknown key {key!r} in [{name}]")
        if isinstance(value, bool) and allowed[key] is not bool:
            raise ParseError(f"[{name}].{key} has the wrong type")
        if not isinstance(value, allowed[key]):
            raise ParseError(f"[{name}].{key} has the wrong type ({type(value).__name__})")


def _check_numbers(name, key, values):
    for v in values:
        if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
            raise ParseError(f"[{name}].{key} must hold finite numbers")


def parse_scenario(text: str, path: Path | None = None) -> Scenario:
    try:
        doc = tomli.loads(text)
    except tomli.TOMLDecodeError as exc:
        raise ParseError(f"invalid TOML: {exc}") from exc
    for section in doc:
        if section not in _SCHEMA:
            raise ParseError(f"unknown section [{section}]")
        _check_section(section, doc[section])
    head = doc.get("scenario", {})
    kind = head.get("kind")
    if kind not in KINDS:
        raise ParseError(f"[scenario].kind must be one of {KINDS}")
    sc = Scenario(
        name=head.get("name", path.stem if path else "scenario"),
        kind=kind,
        path=path,
        description=head.get("description", ""),
        **{s: dict(doc.get(s, {})) for s in ("band", "models", "solver", "output", "grid", "sweep")},
    )
    _validate(sc)
    return sc


def load_scenario(path) -> Scenario:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    return parse_scenario(text, path)


def _validate(sc: Scenario):
    for key in ("widths", "scal_lower"):
        if key in sc.band:
            _check_numbers("band", key, sc.band[key])
    for key, values in sc.sweep.items():
        if isinstance(values, list):
            _check_numbers("sweep", key, values)
    preset = sc.models.get("preset")
    if preset is not None and preset not in PRESETS:
        raise ParseError(f"[models].preset must be one of {PRESETS}")
    for seg in sc.models.get("segments", []):
        if not isinstance(seg, dict):
            raise ParseError("[models].segments entries must be tables")
        for key, value in seg.items():
            if key not in _SEGMENT_KEYS:
                raise ParseError(f"unknown key {key!r} in a [models] segment")
            if not isinstance(value, _SEGMENT_KEYS[key]):
                raise ParseError(f"segment key {key!r} has the wrong type")
        if "family" not in seg or "interval" not in seg:
            raise ParseError("every segment needs a family and an interval")
    if sc.kind == "verify":
        if "n" not in sc.band:
            raise ParseError("[band].n is required")
        if preset is None and not sc.models.get("segments"):
            raise ParseError("[models] needs a preset or explicit segments")
        if "widths" not in sc.band and "width_factor" not in sc.band:
            raise ParseError("[band] needs widths or width_factor")
    if sc.kind == "bubble":
        mode = sc.grid.get("mode")
        if mode not in ("grid-2d", "warped-1d"):
            raise ParseError("[grid].mode must be grid-2d or warped-1d")
        if mode == "grid-2d":
            for key in ("length", "height", "nx", "ny"):
                if key not in sc.grid:
                    raise ParseError(f"[grid].{key} is required")
            if sc.grid.get("h", "constant") not in ("constant", "linear"):
                raise ParseError("2D [grid].h must be constant or linear")
        elif sc.grid.get("h", "assembled") != "assembled":
            raise ParseError("1D [grid].h must be assembled")
    if sc.kind == "sweep":
        if "n" not in sc.sweep or not ("d" in sc.sweep or "d_fraction" in sc.sweep):
            raise ParseError("[sweep] needs n and d or d_fraction")
    fmt = sc.output.get("format", "csv")
    if fmt not in ("csv", "table"):
        raise ParseError("[output].format must be csv or table")
