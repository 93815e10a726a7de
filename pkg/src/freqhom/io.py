"""Configuration files, measurement tables and curve CSVs."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import jsonschema

from .converter import PumpCurve
from .errors import ConfigError, DomainError
from .forward import CountRates
from .params import INPUT_KINDS, Bandwidths, ExperimentConfig, LossBudget, NoiseModel
from .spectra import CONVENTIONS

_width = {"anyOf": [{"type": "number", "exclusiveMinimum": 0}, {"const": "inf"}]}
_nonneg = {"type": "number", "minimum": 0}

CONFIG_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["bandwidths_ghz", "loss_budget", "pump_curve"],
    "properties": {
        "label": {"type": "string"},
        "repetition_rate_mhz": {"type": "number", "exclusiveMinimum": 0},
        "input_kind": {"enum": list(INPUT_KINDS)},
        "bandwidth_convention": {"enum": list(CONVENTIONS)},
        "bandwidths_ghz": {
            "type": "object",
            "additionalProperties": False,
            "required": ["in_u", "in_l", "wg", "out_u", "out_l"],
            "properties": {k: _width for k in ("in_u", "in_l", "wg", "out_u", "out_l")},
        },
        "loss_budget": {
            "type": "object",
            "additionalProperties": False,
            "required": ["tu", "tl", "mu"],
            "properties": {"tu": {**_nonneg, "maximum": 1}, "tl": {**_nonneg, "maximum": 1}, "mu": _nonneg},
        },
        "pump_curve": {
            "type": "object",
            "additionalProperties": False,
            "required": ["amplitude", "rate_per_mw"],
            "properties": {"amplitude": _nonneg, "rate_per_mw": _nonneg},
        },
        "noise": {
            "type": "object",
            "additionalProperties": False,
            "required": ["du", "dl"],
            "properties": {
                "unit": {"enum": ["probability", "percent"]},
                "du": {"type": "array", "items": {"type": "number"}, "minItems": 3, "maxItems": 3},
                "dl": {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2},
            },
        },
        "provenance": {"type": "object", "additionalProperties": {"type": "string"}},
    },
}

DEFAULT_REPETITION_MHZ = 82.0


@dataclass(frozen=True)
class ConfigFile:
    config: ExperimentConfig
    label: str = ""
    repetition_rate_mhz: float = DEFAULT_REPETITION_MHZ


def paper_config_text() -> str:
    return resources.files("freqhom").joinpath("data/paper.json").read_text(encoding="utf-8")


def parse_config(text: str, source: str = "<config>") -> ConfigFile:
    """Parse and schema-validate a JSON configuration document."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{source}:{exc.lineno}:{exc.colno}: invalid JSON: {exc.msg}") from None
    validator = jsonschema.Draft202012Validator(CONFIG_SCHEMA)
    errors = sorted(validator.iter_errors(doc), key=lambda e: list(e.absolute_path))
    if errors:
        first = errors[0]
        where = "/".join(str(p) for p in first.absolute_path) or "<root>"
        raise ConfigError(f"{source}: at {where}: {first.message}")

    bw = {k: math.inf if v == "inf" else float(v) for k, v in doc["bandwidths_ghz"].items()}
    noise = NoiseModel()
    if "noise" in doc:
        n = doc["noise"]
        build = NoiseModel.from_percent if n.get("unit", "probability") == "percent" else NoiseModel
        noise = build(tuple(n["du"]), tuple(n["dl"]))
    try:
        config = ExperimentConfig(
            bandwidths=Bandwidths(**bw),
            budget=LossBudget(**doc["loss_budget"]),
            pump=PumpCurve(doc["pump_curve"]["amplitude"], doc["pump_curve"]["rate_per_mw"]),
            noise=noise,
            input_kind=doc.get("input_kind", "coherent"),
            convention=doc.get("bandwidth_convention", "fwhm"),
        )
    except DomainError as exc:
        raise ConfigError(f"{source}: {exc}") from None
    return ConfigFile(config, doc.get("label", ""), float(doc.get("repetition_rate_mhz", DEFAULT_REPETITION_MHZ)))


def load_config(path) -> ConfigFile:
    """Load a configuration file; the name ``paper`` selects the bundled ``paper.json``."""
    path = Path(path)
    if str(path) == "paper" and not path.exists():
        return parse_config(paper_config_text(), "paper.json")
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from None
    return parse_config(text, str(path))


def paper_config() -> ExperimentConfig:
    return parse_config(paper_config_text(), "paper.json").config


# --- measurement tables --------------------------------------------------

RATE_COLUMNS = ("power_mW", "p_ut", "p_us", "p_lt", "p_ls")
NOISE_COLUMNS = ("d_u", "d_l")


@dataclass(frozen=True)
class MeasurementTable:
    rates: tuple
    d_u: tuple | None = None
    d_l: tuple | None = None

    @property
    def powers(self) -> tuple:
        return tuple(r.power for r in self.rates)


def parse_measurements(text: str, source: str = "<measurements>") -> MeasurementTable:
    """Parse a measurement CSV, reporting problems as ``source:line:column``."""
    lines = [ln for ln in text.splitlines()]
    reader = csv.reader(lines)
    header = None
    header_line = 0
    rows = []
    for lineno, fields in enumerate(reader, start=1):
        if not fields or not "".join(fields).strip() or fields[0].lstrip().startswith("#"):
            continue
        fields = [f.strip() for f in fields]
        if header is None:
            header, header_line = fields, lineno
            continue
        rows.append((lineno, fields))
    if header is None:
        raise ConfigError(f"{source}: empty measurement file")
    missing = [c for c in RATE_COLUMNS if c not in header]
    unknown = [c for c in header if c not in RATE_COLUMNS + NOISE_COLUMNS]
    if missing:
        raise ConfigError(f"{source}:{header_line}: missing column(s) {', '.join(missing)}")
    if unknown:
        raise ConfigError(f"{source}:{header_line}: unknown column(s) {', '.join(unknown)}")
    if len(set(header)) != len(header):
        raise ConfigError(f"{source}:{header_line}: duplicate column names")
    if not rows:
        raise ConfigError(f"{source}: no data rows")

    has_noise = [c for c in NOISE_COLUMNS if c in header]
    rates, noise = [], {c: [] for c in has_noise}
    last_power = -math.inf
    for lineno, fields in rows:
        if len(fields) != len(header):
            raise ConfigError(f"{source}:{lineno}: expected {len(header)} fields, found {len(fields)}")
        values = {}
        for col, (name, raw) in enumerate(zip(header, fields), start=1):
            try:
                values[name] = float(raw)
            except ValueError:
                raise ConfigError(f"{source}:{lineno}:{col}: {name} is not a number: {raw!r}") from None
            if not math.isfinite(values[name]):
                raise ConfigError(f"{source}:{lineno}:{col}: {name} must be finite")
            if name != "power_mW" and not 0.0 <= values[name] <= 1.0:
                raise ConfigError(f"{source}:{lineno}:{col}: {name} = {raw} is not a probability")
        power = values["power_mW"]
        if power < 0:
            raise ConfigError(f"{source}:{lineno}:1: negative pump power")
        if power <= last_power:
            raise ConfigError(f"{source}:{lineno}:{header.index('power_mW') + 1}: powers must be strictly increasing")
        last_power = power
        rates.append(CountRates(power, values["p_ut"], values["p_us"], values["p_lt"], values["p_ls"]))
        for c in has_noise:
            noise[c].append(values[c])
    return MeasurementTable(
        tuple(rates),
        tuple(noise["d_u"]) if "d_u" in noise else None,
        tuple(noise["d_l"]) if "d_l" in noise else None,
    )


def load_measurements(path) -> MeasurementTable:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from None
    return parse_measurements(text, str(path))


# --- curve CSVs ---------------------------------------------------------------


def fmt(x: float) -> str:
    """Decimal with 12 significant digits."""
    return format(float(x), ".12g")


def format_csv(header, rows, footer: dict | None = None) -> str:
    buf = io.StringIO()
    buf.write(",".join(header) + "\n")
    for row in rows:
        buf.write(",".join(fmt(v) for v in row) + "\n")
    for key, value in (footer or {}).items():
        buf.write(f"# {key}={fmt(value) if isinstance(value, (int, float)) else value}\n")
    return buf.getvalue()


def parse_curve_csv(text: str):
    """Inverse of :func:`format_csv`: ``(header, rows, footer)``."""
    header, rows, footer = None, [], {}
    for line in text.splitlines():
        if line.startswith("#"):
            key, _, value = line[1:].strip().partition("=")
            try:
                footer[key] = float(value)
            except ValueError:
                footer[key] = value
        elif header is None:
            header = line.split(",")
        elif line:
            rows.append(tuple(float(v) for v in line.split(",")))
    return header, rows, footer


def write_text(path, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
