"""Experiment configuration: YAML/JSON documents with explicit unit tags.

Every frequency is written ``{value: <number>, unit: rad_per_s | two_pi_hz}``
and every time ``{value: <number>, unit: s | t_char}``; ``t_char`` means
multiples of the experiment's characteristic time ``2 pi / g``.
"""
from __future__ import annotations

import copy
import math
from pathlib import Path
from typing import Any, Mapping

import yaml

TWO_PI = 2 * math.pi
FREQUENCY_UNITS = {"rad_per_s": 1.0, "two_pi_hz": TWO_PI}
TIME_UNITS = ("s", "t_char")


class ConfigError(ValueError):
    """Schema violation; ``path`` names the offending field."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


def to_angular(value: float, unit: str) -> float:
    try:
        return value * FREQUENCY_UNITS[unit]
    except KeyError:
        raise ValueError(f"unknown frequency unit {unit!r}; use one of {sorted(FREQUENCY_UNITS)}") from None


def from_angular(omega: float, unit: str) -> float:
    return omega / FREQUENCY_UNITS[unit]


def frequency(value: float, unit: str = "two_pi_hz") -> dict[str, Any]:
    """Config node for a frequency."""
    return {"value": value, "unit": unit}


def time(value: float, unit: str = "s") -> dict[str, Any]:
    return {"value": value, "unit": unit}


def _number(node, path: str) -> float:
    # YAML 1.1 reads exponent literals without a dot (1e5) as strings
    if isinstance(node, str):
        try:
            node = float(node)
        except ValueError:
            raise ConfigError(path, f"expected a number, got {node!r}") from None
    if isinstance(node, bool) or not isinstance(node, (int, float)):
        raise ConfigError(path, f"expected a number, got {node!r}")
    if not math.isfinite(node):
        raise ConfigError(path, "value must be finite")
    return float(node)


def _tagged(node, path: str, units) -> tuple[float, str]:
    if not isinstance(node, Mapping) or set(node) != {"value", "unit"}:
        raise ConfigError(path, f"expected {{value, unit}} with unit in {sorted(units)}, got {node!r}")
    if node["unit"] not in units:
        raise ConfigError(f"{path}.unit", f"unknown unit {node['unit']!r}; expected one of {sorted(units)}")
    return _number(node["value"], f"{path}.value"), node["unit"]


def parse_field(kind: str, node, path: str):
    """Convert one raw config value; times stay ``(value, unit)`` for later resolution."""
    if kind == "frequency":
        value, unit = _tagged(node, path, FREQUENCY_UNITS)
        return to_angular(value, unit)
    if kind == "time":
        return _tagged(node, path, TIME_UNITS)
    if kind == "float":
        return _number(node, path)
    if kind == "int":
        if isinstance(node, bool) or not isinstance(node, int):
            raise ConfigError(path, f"expected an integer, got {node!r}")
        return node
    if kind == "str":
        if not isinstance(node, str):
            raise ConfigError(path, f"expected a string, got {node!r}")
        return node
    if kind in ("float_list", "int_list", "frequency_list", "str_list"):
        if not isinstance(node, list) or not node:
            raise ConfigError(path, "expected a non-empty list")
        inner = kind[: -len("_list")]
        return [parse_field(inner, x, f"{path}[{i}]") for i, x in enumerate(node)]
    if kind == "grid":
        return _parse_grid(node, path)
    raise AssertionError(f"unknown field kind {kind}")


def _parse_grid(node, path: str):
    if not isinstance(node, Mapping):
        raise ConfigError(path, "expected a mapping with start, end, points")
    missing = {"start", "end", "points"} - set(node)
    extra = set(node) - {"start", "end", "points"}
    if missing:
        raise ConfigError(path, f"missing {sorted(missing)}")
    if extra:
        raise ConfigError(path, f"unknown fields {sorted(extra)}")
    points = parse_field("int", node["points"], f"{path}.points")
    if points < 2:
        raise ConfigError(f"{path}.points", "time grid is empty; need at least 2 points")
    start = parse_field("time", node["start"], f"{path}.start")
    end = parse_field("time", node["end"], f"{path}.end")
    return {"start": start, "end": end, "points": points}


def resolve_time(t: tuple[float, str], t_char: float) -> float:
    value, unit = t
    return value * t_char if unit == "t_char" else value


def deep_merge(base: Mapping, override: Mapping) -> dict:
    out = copy.deepcopy(dict(base))
    for k, v in override.items():
        if isinstance(v, Mapping) and isinstance(out.get(k), Mapping) and set(v) != {"value", "unit"}:
            out[k] = deep_merge(out[k], v)
        else:
            out[k] = copy.deepcopy(v)
    return out


def parse_blocks(raw: Mapping, schema: Mapping[str, Any], path: str = "") -> dict[str, Any]:
    """Validate ``raw`` against ``{block: {field: kind}}`` and convert every field.

    A schema entry whose value is a kind string is a top-level field rather than a block.
    """
    out = {}
    for block, fields in schema.items():
        bpath = f"{path}{block}"
        if isinstance(fields, str):
            if block not in raw:
                raise ConfigError(bpath, "missing field")
            out[block] = parse_field(fields, raw[block], bpath)
            continue
        node = raw.get(block, {})
        if not isinstance(node, Mapping):
            raise ConfigError(bpath, "expected a mapping")
        unknown = set(node) - set(fields)
        if unknown:
            raise ConfigError(f"{bpath}.{sorted(unknown)[0]}", "unknown field")
        missing = set(fields) - set(node)
        if missing:
            raise ConfigError(f"{bpath}.{sorted(missing)[0]}", "missing field")
        out[block] = {k: parse_field(kind, node[k], f"{bpath}.{k}") for k, kind in fields.items()}
    unknown_blocks = set(raw) - set(schema)
    if unknown_blocks:
        raise ConfigError(f"{path}{sorted(unknown_blocks)[0]}", "unknown block")
    return out


def load_document(path) -> dict:
    text = Path(path).read_text()
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        where = f"line {mark.line + 1}" if mark is not None else "document"
        raise ConfigError(where, f"unparsable config ({exc.__class__.__name__})") from exc
    if not isinstance(doc, Mapping):
        raise ConfigError("<root>", "config must be a mapping")
    return dict(doc)


def line_of(path, field_path: str):
    """1-based line of a dotted field in a YAML file, or None if it cannot be located."""
    try:
        node = yaml.compose(Path(path).read_text())
    except (OSError, yaml.YAMLError):
        return None
    line = None
    for key in field_path.replace("[", ".").replace("]", "").split("."):
        if node is None:
            break
        if isinstance(node, yaml.MappingNode):
            match = [(k, v) for k, v in node.value if k.value == key]
            if not match:
                break
            line = match[0][0].start_mark.line + 1
            node = match[0][1]
        elif isinstance(node, yaml.SequenceNode) and key.isdigit() and int(key) < len(node.value):
            node = node.value[int(key)]
            line = node.start_mark.line + 1
        else:
            break
    return line
