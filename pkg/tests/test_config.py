import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from rabisim.config import (
    ConfigError,
    deep_merge,
    frequency,
    from_angular,
    line_of,
    load_document,
    parse_blocks,
    parse_field,
    resolve_time,
    time,
    to_angular,
)


@given(st.floats(1e-6, 1e12))
def test_two_pi_hz_roundtrip(value):
    omega = parse_field("frequency", frequency(value, "two_pi_hz"), "f")
    assert omega == pytest.approx(2 * math.pi * value, rel=1e-15)
    assert abs(from_angular(omega, "two_pi_hz") - value) <= 1e-15 * value


def test_rad_per_s_is_identity():
    assert to_angular(3.5, "rad_per_s") == 3.5
    assert from_angular(3.5, "rad_per_s") == 3.5


@pytest.mark.parametrize("node", [3.0, {"value": 3.0}, {"value": 3.0, "unit": "MHz"},
                                  {"value": "fast", "unit": "rad_per_s"}, {"value": float("inf"), "unit": "rad_per_s"}])
def test_frequency_needs_known_unit_tag(node):
    with pytest.raises(ConfigError):
        parse_field("frequency", node, "ion.nu")


def test_exponent_strings_accepted():
    # YAML 1.1 loads 1e5 as a string
    assert parse_field("float", "1e5", "x") == 1e5


def test_times_resolve_against_t_char():
    t = parse_field("time", time(2.5, "t_char"), "t")
    assert resolve_time(t, 4.0) == 10.0
    assert resolve_time(parse_field("time", time(2.5), "t"), 4.0) == 2.5


@pytest.mark.parametrize("points", [0, 1])
def test_empty_grid_is_schema_error(points):
    with pytest.raises(ConfigError, match="empty"):
        parse_field("grid", {"start": time(0), "end": time(1), "points": points}, "t_grid")


def test_parse_blocks_rejects_unknown_and_missing():
    schema = {"ion": {"eta": "float", "n_max": "int"}, "t_grid": "grid"}
    grid = {"start": time(0), "end": time(1), "points": 3}
    ok = parse_blocks({"ion": {"eta": 0.1, "n_max": 5}, "t_grid": grid}, schema)
    assert ok["ion"] == {"eta": 0.1, "n_max": 5}
    with pytest.raises(ConfigError, match="ion.eta_max"):
        parse_blocks({"ion": {"eta": 0.1, "n_max": 5, "eta_max": 1}, "t_grid": grid}, schema)
    with pytest.raises(ConfigError, match="ion.n_max"):
        parse_blocks({"ion": {"eta": 0.1}, "t_grid": grid}, schema)
    with pytest.raises(ConfigError, match="laser"):
        parse_blocks({"ion": {"eta": 0.1, "n_max": 5}, "t_grid": grid, "laser": {}}, schema)
    with pytest.raises(ConfigError, match="integer"):
        parse_blocks({"ion": {"eta": 0.1, "n_max": True}, "t_grid": grid}, schema)


def test_deep_merge_replaces_tagged_nodes_whole():
    base = {"ion": {"nu": frequency(3e6), "eta": 0.06}}
    merged = deep_merge(base, {"ion": {"nu": {"value": 1.0, "unit": "rad_per_s"}}})
    assert merged == {"ion": {"nu": {"value": 1.0, "unit": "rad_per_s"}, "eta": 0.06}}
    assert base["ion"]["nu"]["unit"] == "two_pi_hz"


def test_load_document_reports_line(tmp_path):
    p = tmp_path / "bad.yaml"
    p.write_text("experiment: x\nion:\n  nu: [1,\n")
    with pytest.raises(ConfigError, match="line"):
        load_document(p)
    good = tmp_path / "good.yaml"
    good.write_text("experiment: x\nion:\n  nu:\n    value: 1\n    unit: hz\n")
    assert line_of(good, "ion.nu.unit") == 5
    assert line_of(good, "ion.missing") == 2
