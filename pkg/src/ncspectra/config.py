"""Experiment configuration files.

Grammar: INI-style sections with ``key = value`` lines; ``#`` and ``;`` start
comments. Recognised sections and keys::

    [potential]        a, b, c                      (required)
    [noncommutative]   theta        comma list, every value ≥ 0 (required)
                       variant      canonical | complex          (canonical)
                       a_term_mode  expanded | paper             (expanded)
                       closed_form_mode  quadrature | completed-square | paper  (quadrature)
    [states]           n, m         "0", "0..3" or "0, 2, 5"     (n = 0, m = 0)
                       branches     "+, -"                       (both; complex only)
    [output]           formats      any of csv, svg, report      (all three)
                       validate     true | false                 (false)
    [grid]             r_max, points, spacing                    (sized per state)

Unknown sections or keys are rejected with the offending line number.
"""

from __future__ import annotations

import configparser
import math
import re
from dataclasses import dataclass, field
from pathlib import Path

from .model import (
    ATermMode,
    ClosedFormMode,
    InvalidParameters,
    NCConfig,
    PotentialParams,
    SpinBranch,
    Variant,
    validate_params,
)
from .oracle import Spacing

SCHEMA = {
    "potential": {"a", "b", "c"},
    "noncommutative": {"theta", "variant", "a_term_mode", "closed_form_mode"},
    "states": {"n", "m", "branches"},
    "output": {"formats", "validate"},
    "grid": {"r_max", "points", "spacing"},
}
REQUIRED = {"potential": ("a", "b", "c"), "noncommutative": ("theta",)}
FORMATS = ("csv", "svg", "report")


class ConfigError(ValueError):
    def __init__(self, message, line=None, path=None):
        self.line = line
        self.path = path
        where = ""
        if path is not None:
            where = f"{path}:"
        if line is not None:
            where += f"{line}:"
        super().__init__(f"{where} {message}" if where else message)


@dataclass(frozen=True)
class GridOverrides:
    r_max: float | None = None
    points: int | None = None
    spacing: Spacing | None = None


@dataclass(frozen=True)
class ExperimentConfig:
    params: PotentialParams
    nc: NCConfig
    theta_values: tuple[float, ...]
    n_range: tuple[int, ...] = (0,)
    m_range: tuple[int, ...] = (0,)
    branches: tuple[SpinBranch, ...] = (SpinBranch.DOWN, SpinBranch.UP)
    outputs: tuple[str, ...] = FORMATS
    validate: bool = False
    grid: GridOverrides = field(default_factory=GridOverrides)

    def __post_init__(self):
        if not self.theta_values:
            raise InvalidParameters("theta_values must be non-empty")
        for t in self.theta_values:
            if not (math.isfinite(t) and t >= 0):
                raise InvalidParameters(f"theta must be ≥ 0 (got {t})")
        if not self.n_range or not self.m_range:
            raise InvalidParameters("n and m ranges must be non-empty")
        if self.nc.variant is Variant.COMPLEX and not self.branches:
            raise InvalidParameters("complex variant needs at least one branch")
        bad = set(self.outputs) - set(FORMATS)
        if bad:
            raise InvalidParameters(f"unknown output formats {sorted(bad)}")

    def with_modes(self, a_term_mode, closed_form_mode) -> "ExperimentConfig":
        nc = NCConfig(self.nc.theta, self.nc.variant, a_term_mode, closed_form_mode)
        return ExperimentConfig(self.params, nc, self.theta_values, self.n_range, self.m_range,
                                self.branches, self.outputs, self.validate, self.grid)


def _line_index(text: str) -> dict:
    """Map (section, key) and (section, None) to 1-based line numbers."""
    index = {}
    section = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line[0] in "#;":
            continue
        head = re.fullmatch(r"\[([^\]]+)\]", line)
        if head:
            section = head.group(1).strip()
            index.setdefault((section, None), lineno)
            continue
        key = re.split(r"[=:]", line, maxsplit=1)[0].strip().lower()
        index.setdefault((section, key), lineno)
    return index


def _number(text, what, line, path):
    try:
        value = float(text)
    except ValueError:
        raise ConfigError(f"malformed number {text!r} for {what}", line, path) from None
    if not math.isfinite(value):
        raise ConfigError(f"{what} must be finite", line, path)
    return value


def _integers(text, what, line, path):
    text = text.strip()
    span = re.fullmatch(r"(-?\d+)\s*\.\.\s*(-?\d+)", text)
    if span:
        lo, hi = int(span.group(1)), int(span.group(2))
        if hi < lo:
            raise ConfigError(f"empty range {text!r} for {what}", line, path)
        values = tuple(range(lo, hi + 1))
    else:
        try:
            values = tuple(int(v) for v in text.split(",") if v.strip())
        except ValueError:
            raise ConfigError(f"malformed integer list {text!r} for {what}", line, path) from None
    if not values:
        raise ConfigError(f"{what} must not be empty", line, path)
    if any(v < 0 for v in values):
        raise ConfigError(f"{what} values must be ≥ 0", line, path)
    return tuple(sorted(set(values)))


def parse_config_text(text: str, path=None) -> ExperimentConfig:
    index = _line_index(text)
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"), interpolation=None)
    try:
        parser.read_string(text, source=str(path) if path else "<config>")
    except configparser.ParsingError as exc:
        line, content = exc.errors[0]
        raise ConfigError(f"cannot parse line {content.strip()!r}", line, path) from None
    except configparser.Error as exc:
        line = getattr(exc, "lineno", None)
        raise ConfigError(str(exc).splitlines()[0], line, path) from None

    for section in parser.sections():
        if section not in SCHEMA:
            raise ConfigError(f"unknown section [{section}]", index.get((section, None)), path)
        for key in parser[section]:
            if key not in SCHEMA[section]:
                raise ConfigError(f"unknown key {key!r} in [{section}]", index.get((section, key)), path)
    for section, keys in REQUIRED.items():
        for key in keys:
            if not parser.has_option(section, key):
                raise ConfigError(f"missing required key {key!r} in [{section}]",
                                  index.get((section, None)), path)

    def get(section, key, default=None):
        if parser.has_option(section, key):
            return parser.get(section, key).strip(), index.get((section, key))
        return default, None

    pot = {}
    for key in ("a", "b", "c"):
        raw, line = get("potential", key)
        pot[key] = _number(raw, key, line, path)
    params = PotentialParams(**pot)
    failures = validate_params(params).failures
    if failures:
        raise ConfigError("; ".join(failures), index.get(("potential", None)), path)

    raw, line = get("noncommutative", "theta")
    thetas = []
    for item in raw.split(","):
        if not item.strip():
            continue
        value = _number(item.strip(), "theta", line, path)
        if value < 0:
            raise ConfigError("theta must be ≥ 0", line, path)
        thetas.append(value)
    if not thetas:
        raise ConfigError("theta list must not be empty", line, path)

    def enum_value(key, enum_cls, default):
        raw, line = get("noncommutative", key)
        if raw is None:
            return default
        try:
            return enum_cls(raw.lower())
        except ValueError:
            choices = ", ".join(e.value for e in enum_cls)
            raise ConfigError(f"{key} must be one of {choices} (got {raw!r})", line, path) from None

    nc = NCConfig(
        0.0,
        enum_value("variant", Variant, Variant.CANONICAL),
        enum_value("a_term_mode", ATermMode, ATermMode.EXPANDED_EXACT),
        enum_value("closed_form_mode", ClosedFormMode, ClosedFormMode.QUADRATURE_ONLY),
    )

    raw, line = get("states", "n", "0")
    n_range = _integers(raw, "n", line, path)
    raw, line = get("states", "m", "0")
    m_range = _integers(raw, "m", line, path)
    raw, line = get("states", "branches", "-, +")
    try:
        branches = tuple(sorted({SpinBranch.parse(v) for v in raw.split(",") if v.strip()},
                                key=lambda br: br.value))
    except ValueError as exc:
        raise ConfigError(str(exc), line, path) from None
    if nc.variant is Variant.COMPLEX and not branches:
        raise ConfigError("complex variant needs at least one branch", line, path)

    raw, line = get("output", "formats", ", ".join(FORMATS))
    outputs = tuple(v.strip().lower() for v in raw.split(",") if v.strip())
    for fmt in outputs:
        if fmt not in FORMATS:
            raise ConfigError(f"unknown output format {fmt!r}", line, path)
    outputs = tuple(f for f in FORMATS if f in outputs)
    raw, line = get("output", "validate", "false")
    if raw.lower() not in ("true", "false", "yes", "no", "1", "0", "on", "off"):
        raise ConfigError(f"validate must be true or false (got {raw!r})", line, path)
    validate = raw.lower() in ("true", "yes", "1", "on")

    raw, line = get("grid", "r_max")
    r_max = _number(raw, "r_max", line, path) if raw is not None else None
    if r_max is not None and r_max <= 0:
        raise ConfigError("r_max must be > 0", line, path)
    raw, line = get("grid", "points")
    points = None
    if raw is not None:
        try:
            points = int(raw)
        except ValueError:
            raise ConfigError(f"malformed integer {raw!r} for points", line, path) from None
        if points < 100:
            raise ConfigError("points must be ≥ 100", line, path)
    raw, line = get("grid", "spacing")
    spacing = None
    if raw is not None:
        try:
            spacing = Spacing(raw.lower())
        except ValueError:
            raise ConfigError(f"spacing must be uniform or log (got {raw!r})", line, path) from None

    return ExperimentConfig(
        params=params,
        nc=nc,
        theta_values=tuple(thetas),
        n_range=n_range,
        m_range=m_range,
        branches=branches,
        outputs=outputs,
        validate=validate,
        grid=GridOverrides(r_max, points, spacing),
    )


def parse_config(path) -> ExperimentConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc.strerror}", None, path) from None
    return parse_config_text(text, path)


def format_config(config: ExperimentConfig) -> str:
    """Inverse of :func:`parse_config_text`."""
    lines = [
        "[potential]",
        f"a = {config.params.a!r}",
        f"b = {config.params.b!r}",
        f"c = {config.params.c!r}",
        "",
        "[noncommutative]",
        "theta = " + ", ".join(repr(float(t)) for t in config.theta_values),
        f"variant = {config.nc.variant.value}",
        f"a_term_mode = {config.nc.a_term_mode.value}",
        f"closed_form_mode = {config.nc.closed_form_mode.value}",
        "",
        "[states]",
        "n = " + ", ".join(str(n) for n in config.n_range),
        "m = " + ", ".join(str(m) for m in config.m_range),
        "branches = " + ", ".join(br.symbol for br in config.branches),
        "",
        "[output]",
        "formats = " + ", ".join(config.outputs),
        f"validate = {'true' if config.validate else 'false'}",
    ]
    g = config.grid
    if g.r_max is not None or g.points is not None or g.spacing is not None:
        lines += ["", "[grid]"]
        if g.r_max is not None:
            lines.append(f"r_max = {g.r_max!r}")
        if g.points is not None:
            lines.append(f"points = {g.points}")
        if g.spacing is not None:
            lines.append(f"spacing = {g.spacing.value}")
    return "\n".join(lines) + "\n"
