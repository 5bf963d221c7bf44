"""TOML race configuration.

Every key is optional; missing keys take the default race values::

    [environment]
    temperature = 20.0          # degC
    air_pressure = 1013.25      # hPa
    relative_humidity = 0.5     # fraction
    gravity = 9.80665

    [constants]
    mechanical_efficiency = 0.977
    global_friction = 0.0025
    draft_coefficient_second = 0.7
    draft_coefficient_third = 0.6
    dt = 0.1

    [track]
    lap_length = 250.0
    laps = 12

    [race]
    max_hl = 3
    power_min = 100.0
    power_max = 1000.0
    transition_time = 0.12

    [bike]
    mass = 8.0

    [riders.A]                  # also riders.B, riders.C
    mass = 70.0
    cda = 0.190
    available_energy = 73500.0  # default: mass * 5 * 210

    [penalty]
    base_penalty = 1000.0
    energy_deficit_weight = 1.0
    power_violation_weight = 1.0
"""
from __future__ import annotations

import dataclasses
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .encoding import RIDERS, TrackGeometry
from .physics import BikeParams, Environment, ModelConstants, RiderParams
from .simulator import PenaltyConfig, RaceConfig, default_riders

_SECTIONS = {
    "environment": Environment,
    "constants": ModelConstants,
    "track": TrackGeometry,
    "bike": BikeParams,
    "penalty": PenaltyConfig,
}
_RACE_KEYS = ("max_hl", "power_min", "power_max", "transition_time")
_CONFIG_FIELD = {"track": "geometry"}


class ConfigError(ValueError):
    pass


def _build(cls, section: str, values: dict):
    names = {f.name for f in dataclasses.fields(cls)}
    unknown = sorted(set(values) - names)
    if unknown:
        raise ConfigError(f"[{section}] unknown field(s): {', '.join(unknown)}")
    try:
        return cls(**values)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"[{section}] {exc}") from exc


def config_from_dict(data: dict) -> RaceConfig:
    unknown = sorted(set(data) - set(_SECTIONS) - {"race", "riders"})
    if unknown:
        raise ConfigError(f"unknown section(s): {', '.join(unknown)}")
    kwargs = {}
    for section, cls in _SECTIONS.items():
        if section in data:
            kwargs[_CONFIG_FIELD.get(section, section)] = _build(cls, section, data[section])

    race = data.get("race", {})
    unknown = sorted(set(race) - set(_RACE_KEYS))
    if unknown:
        raise ConfigError(f"[race] unknown field(s): {', '.join(unknown)}")
    kwargs.update(race)

    riders = default_riders()
    rider_data = data.get("riders", {})
    unknown = sorted(set(rider_data) - set(RIDERS))
    if unknown:
        raise ConfigError(f"[riders] unknown rider(s): {', '.join(unknown)}")
    for name, values in rider_data.items():
        base = riders[name]
        merged = {"mass": base.mass, "cda": base.cda, **values}
        if "available_energy" not in values:
            merged["available_energy"] = merged["mass"] * 5.0 * 210.0
        riders[name] = _build(RiderParams, f"riders.{name}", merged)
    kwargs["riders"] = riders

    try:
        return RaceConfig(**kwargs)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"[race] {exc}") from exc


def load_config(path: str | Path | None = None) -> RaceConfig:
    """Read a TOML race configuration; ``None`` gives the default race."""
    if path is None:
        return RaceConfig()
    with open(path, "rb") as fh:
        try:
            data = tomllib.load(fh)
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError(f"{path}: {exc}") from exc
    return config_from_dict(data)
