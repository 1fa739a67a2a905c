"""Scenario configuration: YAML ingestion, defaults, validation.

A configuration file is a YAML mapping carrying the schema tag
``vflux-config/1``.  Every recognized key is optional except ``task``;
missing system parameters are filled from a defaults table keyed by the
reproduction target (see ``docs/config.md`` for the grammar and the full
table).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields, replace
from pathlib import Path

import yaml

from .errors import ConfigError
from .model import ENERGY, KINDS, SystemSpec, validate

SCHEMA_TAG = "vflux-config/1"

TASKS = ("steady", "currents", "cumulants", "rectify", "amplify", "sweep", "reproduce")

REPRODUCE_TARGETS = (
    "fig2a", "fig2b", "fig21a", "fig21b", "fig3", "fig4b", "fig5a", "fig5b",
)

OUTPUT_FORMATS = ("csv", "json")

_SPEC_FIELDS = tuple(f.name for f in fields(SystemSpec))

#: Two-bath resonant base system: both edge baths couple to both levels
#: with equal diagonal coefficients, interference off, middle bath off.
BASE_SYSTEM = {
    "eps1": 1.0, "eps2": 1.0,
    "tempL": 2.0, "tempM": 1.0, "tempR": 1.0,
    "gL11": 0.01, "gL22": 0.01, "gL12": 0.0,
    "gR11": 0.01, "gR22": 0.01, "gR12": 0.0,
    "gM": 0.0,
}

#: Three-bath cyclic base system: the left bath drives only the upper
#: transition, the right bath only the lower one, the middle bath the
#: excited-excited hop.
CYCLE_SYSTEM = {
    "eps1": 1.1, "eps2": 0.9,
    "tempL": 2.0, "tempM": 1.0, "tempR": 0.5,
    "gL11": 0.01, "gL22": 0.0, "gL12": 0.0,
    "gR11": 0.0, "gR22": 0.01, "gR12": 0.0,
    "gM": 0.01,
}


def interference_bound_of(system: dict, side: str) -> float:
    return math.sqrt(system[f"g{side}11"] * system[f"g{side}22"])


def reproduce_default_system(target: str) -> dict:
    """Defaults table: resolved system parameters for one reproduction target."""
    if target in ("fig2a", "fig21a", "fig21b", "fig3"):
        return dict(BASE_SYSTEM)
    if target == "fig2b":
        sys = dict(BASE_SYSTEM)
        sys["gL12"] = interference_bound_of(sys, "L")
        sys["gR12"] = 0.0
        sys["tempR"] = 0.5
        sys["tempL"] = 0.5
        return sys
    if target in ("fig4b", "fig5a"):
        return dict(CYCLE_SYSTEM)
    if target == "fig5b":
        sys = dict(CYCLE_SYSTEM)
        sys["gL22"] = 0.01
        sys["gR11"] = 0.01
        return sys
    raise ConfigError(f"unknown reproduce target {target!r}")


@dataclass(frozen=True)
class SweepAxis:
    field: str
    minimum: float
    maximum: float
    steps: int

    def values(self):
        import numpy as np

        return np.linspace(self.minimum, self.maximum, self.steps)


@dataclass(frozen=True)
class ScenarioConfig:
    task: str
    spec: SystemSpec
    sweep_axes: tuple[SweepAxis, ...] = ()
    reproduce_target: str | None = None
    out_path: str | None = None
    out_format: str = "csv"
    options: dict | None = None

    def option(self, key: str, default=None):
        if self.options is None:
            return default
        return self.options.get(key, default)


def _require_mapping(node, where: str) -> dict:
    if node is None:
        return {}
    if not isinstance(node, dict):
        raise ConfigError(f"{where}: expected a mapping, got {type(node).__name__}")
    return node


_KNOWN_TOP = {"schema", "task", "reproduce", "system", "sweep", "output",
              "rectify", "amplify", "cumulants", "steady"}


def build_config(raw: dict, source: str = "<config>") -> ScenarioConfig:
    """Validate a raw mapping and resolve it into a ScenarioConfig.

    Every violation is collected and reported in one exception.
    """
    problems: list[str] = []
    raw = _require_mapping(raw, source)

    unknown = sorted(set(raw) - _KNOWN_TOP)
    if unknown:
        problems.append(f"unknown top-level keys: {', '.join(unknown)}")

    schema = raw.get("schema", SCHEMA_TAG)
    if schema != SCHEMA_TAG:
        problems.append(f"schema: expected {SCHEMA_TAG!r}, got {schema!r}")

    task = raw.get("task")
    if task not in TASKS:
        problems.append(f"task: expected one of {TASKS}, got {task!r}")
        task = "steady"

    target = raw.get("reproduce")
    if task == "reproduce":
        if target not in REPRODUCE_TARGETS:
            problems.append(
                f"reproduce: expected one of {REPRODUCE_TARGETS}, got {target!r}"
            )
            target = None
    elif target is not None:
        problems.append("reproduce: only valid together with task: reproduce")
        target = None

    base = reproduce_default_system(target) if target else dict(BASE_SYSTEM)
    system_node = _require_mapping(raw.get("system"), "system")
    unknown_fields = sorted(set(system_node) - set(_SPEC_FIELDS))
    if unknown_fields:
        problems.append(f"system: unknown fields: {', '.join(unknown_fields)}")
    merged = dict(base)
    for key in _SPEC_FIELDS:
        if key in system_node:
            value = system_node[key]
            if not isinstance(value, (int, float)) or isinstance(value, bool):
                problems.append(f"system.{key}: expected a number, got {value!r}")
                continue
            merged[key] = float(value)
    spec = SystemSpec(**merged)
    for violation in validate(spec):
        problems.append(f"system: {violation}")

    axes: list[SweepAxis] = []
    sweep_node = _require_mapping(raw.get("sweep"), "sweep")
    axis_list = sweep_node.get("axes", [])
    if not isinstance(axis_list, list):
        problems.append("sweep.axes: expected a list")
        axis_list = []
    for pos, item in enumerate(axis_list):
        item = _require_mapping(item, f"sweep.axes[{pos}]")
        field = item.get("field")
        if field not in _SPEC_FIELDS:
            problems.append(f"sweep.axes[{pos}].field: unknown system field {field!r}")
            continue
        try:
            lo, hi = float(item["min"]), float(item["max"])
            steps = int(item["steps"])
        except (KeyError, TypeError, ValueError):
            problems.append(f"sweep.axes[{pos}]: needs numeric min, max and integer steps")
            continue
        if steps < 2:
            problems.append(f"sweep.axes[{pos}].steps: must be >= 2, got {steps}")
            continue
        axes.append(SweepAxis(field, lo, hi, steps))
    if task == "sweep" and not (1 <= len(axes) <= 2):
        problems.append(f"sweep: needs 1 or 2 axes, got {len(axes)}")
    if task != "sweep" and axes:
        problems.append("sweep.axes: only valid together with task: sweep")

    output_node = _require_mapping(raw.get("output"), "output")
    out_path = output_node.get("path")
    out_format = output_node.get("format", "csv")
    if out_format not in OUTPUT_FORMATS:
        problems.append(f"output.format: expected one of {OUTPUT_FORMATS}, got {out_format!r}")
        out_format = "csv"

    options: dict = {}
    for section in ("rectify", "amplify", "cumulants"):
        node = _require_mapping(raw.get(section), section)
        for key, value in node.items():
            options[f"{section}.{key}"] = value
    kind = options.get("cumulants.kind", ENERGY)
    if kind not in KINDS:
        problems.append(f"cumulants.kind: expected one of {KINDS}, got {kind!r}")
    bath = options.get("cumulants.bath", "R")
    if bath not in ("L", "R"):
        problems.append(f"cumulants.bath: expected L or R, got {bath!r}")

    if problems:
        raise ConfigError(f"{source}: " + "; ".join(problems))
    return ScenarioConfig(
        task=task,
        spec=spec,
        sweep_axes=tuple(axes),
        reproduce_target=target,
        out_path=out_path,
        out_format=out_format,
        options=options,
    )


def load_config(path: str | Path) -> ScenarioConfig:
    """Parse and validate a configuration file."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"{path}: cannot read config: {exc}") from exc
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"{path}: YAML parse error: {exc}") from exc
    return build_config(raw if raw is not None else {}, source=str(path))


def config_for_target(target: str, overrides: dict | None = None) -> ScenarioConfig:
    """Resolved reproduce configuration for a target, with optional overrides."""
    raw = {"schema": SCHEMA_TAG, "task": "reproduce", "reproduce": target}
    if overrides:
        raw.update(overrides)
    return build_config(raw, source=f"<target {target}>")


def spec_with(spec: SystemSpec, **kwargs) -> SystemSpec:
    return replace(spec, **kwargs)
