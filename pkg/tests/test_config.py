import pytest

from ncspectra.config import ConfigError, format_config, parse_config, parse_config_text
from ncspectra.model import ATermMode, ClosedFormMode, SpinBranch, Variant
from ncspectra.oracle import Spacing

MINIMAL = """\
[potential]
a = 2
b = 1
c = -1

[noncommutative]
theta = 0.01

[states]
m = 0..2
"""


def test_minimal_config_fills_defaults():
    cfg = parse_config_text(MINIMAL)
    assert (cfg.params.a, cfg.params.b, cfg.params.c) == (2.0, 1.0, -1.0)
    assert cfg.theta_values == (0.01,)
    assert cfg.m_range == (0, 1, 2)
    assert cfg.n_range == (0,)
    assert cfg.nc.variant is Variant.CANONICAL
    assert cfg.nc.a_term_mode is ATermMode.EXPANDED_EXACT
    assert cfg.nc.closed_form_mode is ClosedFormMode.QUADRATURE_ONLY
    assert cfg.branches == (SpinBranch.DOWN, SpinBranch.UP)
    assert cfg.outputs == ("csv", "svg", "report")
    assert not cfg.validate


def test_negative_theta_rejected_with_line():
    text = MINIMAL.replace("theta = 0.01", "theta = -0.1")
    with pytest.raises(ConfigError, match="theta must be ≥ 0") as info:
        parse_config_text(text)
    assert info.value.line == 7


def test_malformed_number_names_line():
    text = MINIMAL.replace("b = 1", "b = 1.0.3")
    with pytest.raises(ConfigError) as info:
        parse_config_text(text, "demo.ini")
    assert info.value.line == 3
    assert "demo.ini:3:" in str(info.value)
    assert "1.0.3" in str(info.value)


def test_unknown_key_rejected_with_line():
    text = MINIMAL + "colour = blue\n"
    with pytest.raises(ConfigError, match="unknown key 'colour'") as info:
        parse_config_text(text)
    assert info.value.line == 11


def test_unknown_section_rejected():
    with pytest.raises(ConfigError, match=r"unknown section \[extras\]") as info:
        parse_config_text(MINIMAL + "\n[extras]\nx = 1\n")
    assert info.value.line == 12


def test_missing_required_key():
    with pytest.raises(ConfigError, match="missing required key 'c'"):
        parse_config_text(MINIMAL.replace("c = -1\n", ""))


@pytest.mark.parametrize(
    "old, new, message",
    [
        ("b = 1", "b = 0", "b must be > 0"),
        ("a = 2", "a = -2", "a must be ≥ 0"),
        ("m = 0..2", "m = 3..1", "empty range"),
        ("m = 0..2", "m = 0, x", "malformed integer list"),
        ("theta = 0.01", "theta = 0.01\nvariant = sideways", "variant must be one of"),
    ],
)
def test_validation_errors(old, new, message):
    with pytest.raises(ConfigError, match=message):
        parse_config_text(MINIMAL.replace(old, new))


def test_syntax_error_has_line():
    with pytest.raises(ConfigError) as info:
        parse_config_text("[potential]\na = 1\nthis line is not a key\n")
    assert info.value.line == 3


def test_full_config_round_trip():
    text = MINIMAL.replace("theta = 0.01", "theta = 0, 0.5, 1e-3\nvariant = complex\na_term_mode = paper\n"
                                           "closed_form_mode = completed-square")
    text += "n = 0, 2\nbranches = +\n\n[output]\nformats = svg, csv\nvalidate = yes\n\n"
    text += "[grid]\nr_max = 12.5\npoints = 400\nspacing = log\n"
    cfg = parse_config_text(text)
    assert cfg.branches == (SpinBranch.UP,)
    assert cfg.outputs == ("csv", "svg")
    assert cfg.grid.spacing is Spacing.LOG
    again = parse_config_text(format_config(cfg))
    assert again == cfg
    assert format_config(again) == format_config(cfg)


def test_parse_config_file(tmp_path):
    path = tmp_path / "run.ini"
    path.write_text(MINIMAL, encoding="utf-8")
    assert parse_config(path).m_range == (0, 1, 2)
    with pytest.raises(ConfigError, match="cannot read config"):
        parse_config(tmp_path / "missing.ini")
