"""Power/kinetic-energy model for riders in a single-file team.

Air density
-----------
Humid air is treated as an ideal-gas mixture of dry air and water vapour::

    e_s   = 6.1078 * 10 ** (7.5 * T / (T + 237.3))      [hPa, Magnus form, T in degC]
    p_v   = RH * e_s                                    [hPa]
    p_d   = p - p_v                                     [hPa]
    rho   = 100 * p_d / (R_d * T_K) + 100 * p_v / (R_v * T_K)

with ``R_d = 287.058`` and ``R_v = 461.495`` J/(kg K) and ``T_K = T + 273.15``.

Leader energy balance over one integration step::

    dKE = (P * E - CdA * 0.5 * rho * v**3 - mu * v * F_N) * dt

Follower power needed to hold the leader's speed::

    P = (CdA * C_draft * 0.5 * rho * v**3 + mu * v * F_N + dKE / dt) / E

``F_N`` is the weight (mass * g) of rider plus bicycle.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from numba import njit

R_DRY_AIR = 287.058
R_WATER_VAPOUR = 461.495
KELVIN_OFFSET = 273.15


def saturation_vapour_pressure(temperature: float) -> float:
    """Saturation vapour pressure over water in hPa (Magnus form)."""
    return 6.1078 * 10.0 ** (7.5 * temperature / (temperature + 237.3))


def humid_air_density(temperature: float, air_pressure: float,
                      relative_humidity: float) -> float:
    if air_pressure <= 0:
        raise ValueError(f"air_pressure must be positive, got {air_pressure}")
    if not 0.0 <= relative_humidity <= 1.0:
        raise ValueError(f"relative_humidity must be in [0, 1], got {relative_humidity}")
    t_kelvin = temperature + KELVIN_OFFSET
    if t_kelvin <= 0:
        raise ValueError(f"temperature below absolute zero: {temperature}")
    p_vapour = relative_humidity * saturation_vapour_pressure(temperature)
    p_dry = air_pressure - p_vapour
    return (100.0 * p_dry / (R_DRY_AIR * t_kelvin)
            + 100.0 * p_vapour / (R_WATER_VAPOUR * t_kelvin))


@dataclass(frozen=True)
class Environment:
    """Ambient conditions. Pressure in hPa, humidity as a fraction."""
    temperature: float = 20.0
    air_pressure: float = 1013.25
    relative_humidity: float = 0.5
    gravity: float = 9.80665

    def __post_init__(self):
        if self.gravity <= 0:
            raise ValueError(f"gravity must be positive, got {self.gravity}")
        # validates the remaining fields
        humid_air_density(self.temperature, self.air_pressure, self.relative_humidity)

    @property
    def air_density(self) -> float:
        return humid_air_density(self.temperature, self.air_pressure,
                                 self.relative_humidity)


@dataclass(frozen=True)
class RiderParams:
    mass: float
    cda: float
    available_energy: float

    def __post_init__(self):
        for name in ("mass", "cda", "available_energy"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ValueError(f"rider {name} must be positive, got {value}")

    @classmethod
    def from_mass(cls, mass: float, cda: float, watts_per_kg: float = 5.0,
                  duration: float = 210.0) -> RiderParams:
        """Rider whose energy budget is mass * watts_per_kg sustained for `duration` s."""
        return cls(mass, cda, mass * watts_per_kg * duration)


@dataclass(frozen=True)
class BikeParams:
    mass: float = 8.0

    def __post_init__(self):
        if not (math.isfinite(self.mass) and self.mass > 0):
            raise ValueError(f"bike mass must be positive, got {self.mass}")


@dataclass(frozen=True)
class ModelConstants:
    mechanical_efficiency: float = 0.977
    global_friction: float = 0.0025
    draft_coefficient_second: float = 0.7
    draft_coefficient_third: float = 0.6
    dt: float = 0.1

    def __post_init__(self):
        if not 0 < self.mechanical_efficiency <= 1:
            raise ValueError("mechanical_efficiency must be in (0, 1]")
        if self.global_friction < 0:
            raise ValueError("global_friction must be non-negative")
        for name in ("draft_coefficient_second", "draft_coefficient_third"):
            if not 0 < getattr(self, name) <= 1:
                raise ValueError(f"{name} must be in (0, 1]")
        if not self.dt > 0:
            raise ValueError("dt must be positive")


# Scalar kernels shared with the compiled race loop.

@njit(cache=True)
def _lead_delta_ke(power, speed, cda, total_mass, rho, mu, gravity, efficiency, dt):
    drag = cda * (0.5 * rho * speed ** 3)
    friction = mu * (speed * total_mass * gravity)
    return (power * efficiency - drag - friction) * dt


@njit(cache=True)
def _follower_power(delta_ke, speed, cda, draft, total_mass, rho, mu, gravity,
                    efficiency, dt):
    drag = cda * draft * 0.5 * rho * speed ** 3
    friction = mu * (speed * total_mass * gravity)
    return (drag + friction + delta_ke / dt) / efficiency


@njit(cache=True)
def _step_velocity(speed, delta_ke, total_mass):
    v2 = speed * speed + 2.0 * delta_ke / total_mass
    if v2 > 0.0:
        return math.sqrt(v2)
    return 0.0


def lead_delta_ke(power: float, speed: float, rider: RiderParams, bike: BikeParams,
                  env: Environment, k: ModelConstants, dt: float | None = None) -> float:
    """Kinetic energy gained by the leader over one step (J); negative means slowing."""
    if speed < 0 or power < 0:
        raise ValueError("speed and power must be non-negative")
    return _lead_delta_ke(float(power), float(speed), rider.cda, rider.mass + bike.mass,
                          env.air_density, k.global_friction, env.gravity,
                          k.mechanical_efficiency, k.dt if dt is None else dt)


def follower_power(delta_ke: float, speed: float, rider: RiderParams, bike: BikeParams,
                   draft_coeff: float, env: Environment, k: ModelConstants,
                   dt: float | None = None) -> float:
    """Power a drafting rider must produce to change their own kinetic energy by
    `delta_ke` over one step while riding at `speed`.

    The result can be negative when the group decelerates; callers that book
    energy expenditure clamp it at zero.
    """
    if speed < 0:
        raise ValueError("speed must be non-negative")
    return _follower_power(float(delta_ke), float(speed), rider.cda, draft_coeff,
                           rider.mass + bike.mass, env.air_density, k.global_friction,
                           env.gravity, k.mechanical_efficiency,
                           k.dt if dt is None else dt)


def follower_delta_ke(speed_before: float, speed_after: float, total_mass: float) -> float:
    """Kinetic energy change of a rider-bike system that follows a speed change."""
    return 0.5 * total_mass * (speed_after * speed_after - speed_before * speed_before)


def step_velocity(speed: float, delta_ke: float, total_mass: float) -> float:
    if total_mass <= 0:
        raise ValueError("total_mass must be positive")
    return _step_velocity(float(speed), float(delta_ke), float(total_mass))
