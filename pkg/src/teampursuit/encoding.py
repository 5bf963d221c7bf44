"""Solution representation: transition half-lap counts and leader power levels.

A race of ``n`` half-laps is cut into ``n - 1`` atomic units: the first and the
last unit cover 1.5 half-laps (riders cannot swap during the standing start or
the final 1.5 half-laps), every other unit covers one half-lap.  A transition
strategy stores, for every possible turn in front, how many atomic units the
leader rides before swinging off.  Only the prefix of length ``m`` (the
effective length) that reaches the finish is live; the tail is filler.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

import numpy as np

RIDERS = ("A", "B", "C")
EDGE_UNIT_HALF_LAPS = 1.5


@dataclass(frozen=True)
class TrackGeometry:
    lap_length: float = 250.0
    laps: int = 12

    def __post_init__(self):
        if self.lap_length <= 0:
            raise ValueError("lap_length must be positive")
        if self.laps < 1:
            raise ValueError("laps must be at least 1")

    @property
    def race_distance(self) -> float:
        return self.laps * self.lap_length

    @property
    def half_lap_length(self) -> float:
        return self.lap_length / 2

    @property
    def half_laps(self) -> int:
        return 2 * self.laps


def atomic_unit_count(geometry: TrackGeometry) -> int:
    """Number of atomic units, ``n - 2 * 1.5 + 2`` for ``n`` half-laps."""
    n = geometry.half_laps
    if n < 4:
        raise ValueError(f"a race needs at least 4 half-laps, got {n}")
    return int(n - 2 * EDGE_UNIT_HALF_LAPS + 2)


def unit_lengths(geometry: TrackGeometry) -> np.ndarray:
    """Length in metres of each atomic unit."""
    units = np.full(atomic_unit_count(geometry), geometry.half_lap_length)
    units[0] = units[-1] = EDGE_UNIT_HALF_LAPS * geometry.half_lap_length
    return units


@dataclass(frozen=True)
class TransitionStrategy:
    """Half-lap counts before each transition, stored at full length ``n - 1``."""
    hl: tuple[int, ...]
    max_hl: int = 3

    def __post_init__(self):
        hl = tuple(int(h) for h in self.hl)
        object.__setattr__(self, "hl", hl)
        if not hl:
            raise ValueError("empty transition strategy")
        bad = [h for h in hl if not 1 <= h <= self.max_hl]
        if bad:
            raise ValueError(f"half-lap counts must lie in [1, {self.max_hl}], got {bad}")

    def __len__(self) -> int:
        return len(self.hl)

    @property
    def effective_length(self) -> int:
        return effective_length(self)

    @property
    def live(self) -> tuple[int, ...]:
        return self.hl[:self.effective_length]

    def replace_live(self, live: Sequence[int]) -> TransitionStrategy:
        """Copy with the first ``len(live)`` entries replaced."""
        return TransitionStrategy(tuple(live) + self.hl[len(live):], self.max_hl)

    def __str__(self) -> str:
        return "[" + ", ".join(map(str, self.live)) + "]"


@dataclass(frozen=True)
class PowerProfile:
    """Leader power per transition slot (W), stored at full length ``n - 1``."""
    p: tuple[float, ...]

    def __post_init__(self):
        p = tuple(float(x) for x in self.p)
        object.__setattr__(self, "p", p)
        if not all(np.isfinite(p)):
            raise ValueError("power values must be finite")

    def __len__(self) -> int:
        return len(self.p)

    def as_array(self) -> np.ndarray:
        return np.array(self.p, dtype=float)

    @classmethod
    def constant(cls, value: float, length: int) -> PowerProfile:
        return cls((float(value),) * length)

    @classmethod
    def from_live(cls, live: Sequence[float], length: int,
                  filler: float = 400.0) -> PowerProfile:
        live = [float(x) for x in live]
        return cls(tuple(live) + (filler,) * (length - len(live)))


@dataclass(frozen=True)
class RiderOrder:
    riders: tuple[str, str, str] = RIDERS

    def __post_init__(self):
        riders = tuple(self.riders)
        object.__setattr__(self, "riders", riders)
        if sorted(riders) != sorted(RIDERS):
            raise ValueError(f"order must be a permutation of {RIDERS}, got {riders}")

    @classmethod
    def parse(cls, text: str) -> RiderOrder:
        return cls(tuple(text.strip().upper()))

    def rotate(self) -> RiderOrder:
        return rotate(self)

    @property
    def indices(self) -> tuple[int, int, int]:
        return tuple(RIDERS.index(r) for r in self.riders)

    def __str__(self) -> str:
        return "".join(self.riders)


ALL_ORDERS = tuple(RiderOrder(p) for p in itertools.permutations(RIDERS))


def rotate(order: RiderOrder) -> RiderOrder:
    """Leader swings off to the rear; second rider takes the front."""
    r1, r2, r3 = order.riders
    return RiderOrder((r2, r3, r1))


def effective_length(strategy: TransitionStrategy) -> int:
    target = len(strategy.hl)
    total = 0
    for m, h in enumerate(strategy.hl, start=1):
        total += h
        if total >= target:
            return m
    # unreachable for valid strategies: every entry is >= 1
    raise ValueError("strategy does not cover the race")


def segment_distances(strategy: TransitionStrategy, geometry: TrackGeometry) -> np.ndarray:
    """Distance ridden between consecutive transitions (m).

    The last live group is truncated so the segments cover the race exactly.
    """
    units = unit_lengths(geometry)
    if len(strategy) != len(units):
        raise ValueError(f"strategy has {len(strategy)} entries, geometry needs {len(units)}")
    m = effective_length(strategy)
    bounds = np.minimum(np.cumsum(strategy.hl[:m]), len(units))
    starts = np.concatenate(([0], bounds[:-1]))
    return np.array([units[a:b].sum() for a, b in zip(starts, bounds)])


def standard_strategy(geometry: TrackGeometry | None = None, max_hl: int = 3,
                      filler: int = 2) -> TransitionStrategy:
    """First swap after the opening 1.5 half-laps, then one swap per lap."""
    geometry = geometry or TrackGeometry()
    length = atomic_unit_count(geometry)
    hl = [1]
    while sum(hl) < length:
        hl.append(2)
    hl += [filler] * (length - len(hl))
    return TransitionStrategy(tuple(hl), max_hl)


def random_strategy(rng: np.random.Generator, geometry: TrackGeometry | None = None,
                    max_hl: int = 3) -> TransitionStrategy:
    """Every entry uniform in [1, max_hl]; any such vector is a valid strategy."""
    geometry = geometry or TrackGeometry()
    hl = rng.integers(1, max_hl + 1, size=atomic_unit_count(geometry))
    return TransitionStrategy(tuple(int(h) for h in hl), max_hl)
