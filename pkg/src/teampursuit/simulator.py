"""Forward-integration race simulation and the penalised fitness function."""
from __future__ import annotations

import csv
import io
import math
from dataclasses import asdict, dataclass, field

import numpy as np
from numba import njit

from .encoding import (RIDERS, PowerProfile, RiderOrder, TrackGeometry,
                       TransitionStrategy, atomic_unit_count, effective_length,
                       segment_distances)
from .physics import (BikeParams, Environment, ModelConstants, RiderParams,
                      _follower_power, _lead_delta_ke, _step_velocity)

TRACE_HEADER = ("time_s", "distance_m", "velocity_ms", "leader", "commanded_power_w",
                "p1_w", "p2_w", "p3_w", "e1_j", "e2_j", "e3_j")

# Safety net for degenerate inputs (e.g. zero power) that never reach the line.
MAX_STEPS = 1_000_000


def default_riders() -> dict[str, RiderParams]:
    return {
        "A": RiderParams.from_mass(70.0, 0.190),
        "B": RiderParams.from_mass(67.5, 0.175),
        "C": RiderParams.from_mass(65.0, 0.160),
    }


@dataclass(frozen=True)
class PenaltyConfig:
    base_penalty: float = 1000.0
    energy_deficit_weight: float = 1.0
    power_violation_weight: float = 1.0

    def __post_init__(self):
        for name, value in asdict(self).items():
            if not value >= 0:
                raise ValueError(f"penalty {name} must be non-negative, got {value}")


@dataclass(frozen=True)
class RaceConfig:
    environment: Environment = field(default_factory=Environment)
    riders: dict[str, RiderParams] = field(default_factory=default_riders)
    bike: BikeParams = field(default_factory=BikeParams)
    constants: ModelConstants = field(default_factory=ModelConstants)
    geometry: TrackGeometry = field(default_factory=TrackGeometry)
    max_hl: int = 3
    power_min: float = 100.0
    power_max: float = 1000.0
    transition_time: float = 0.12
    penalty: PenaltyConfig = field(default_factory=PenaltyConfig)

    def __post_init__(self):
        if set(self.riders) != set(RIDERS):
            raise ValueError(f"riders must be keyed {RIDERS}, got {sorted(self.riders)}")
        if not self.power_min < self.power_max:
            raise ValueError("power_min must be below power_max")
        if self.power_min < 0:
            raise ValueError("power_min must be non-negative")
        if self.max_hl < 1:
            raise ValueError("max_hl must be at least 1")
        if self.transition_time < 0:
            raise ValueError("transition_time must be non-negative")
        atomic_unit_count(self.geometry)

    @property
    def n_slots(self) -> int:
        """Length of the stored strategy and power vectors."""
        return atomic_unit_count(self.geometry)

    def to_dict(self) -> dict:
        out = asdict(self)
        out["environment"]["air_density"] = self.environment.air_density
        return out


@dataclass(frozen=True)
class RaceTrace:
    """Per-step samples. Row 0 is the standing start; every later row is the
    state at the end of one integration step, with the powers held during it.

    Rider columns (`rider_powers`, `rider_energies`) are indexed A, B, C.
    """
    time: np.ndarray
    distance: np.ndarray
    velocity: np.ndarray
    leader: np.ndarray
    commanded_power: np.ndarray
    rider_powers: np.ndarray
    rider_energies: np.ndarray
    duration: np.ndarray

    def __len__(self) -> int:
        return len(self.time)


@dataclass(frozen=True)
class RaceResult:
    total_time: float
    final_energies: dict[str, float]
    feasible: bool
    segment_times: np.ndarray
    trace: RaceTrace | None = None
    stalled: bool = False


@njit(cache=True)
def _race(seg_dist, powers, order0, masses, cdas, energy0, bike_mass, rho, gravity,
          efficiency, mu, dt, draft2, draft3, transition_time, record, n_rows, max_steps):
    m = seg_dist.shape[0]
    energies = energy0.copy()
    order = order0.copy()
    seg_times = np.zeros(m)
    rows = n_rows if record else 1
    tr_time = np.zeros(rows)
    tr_dist = np.zeros(rows)
    tr_vel = np.zeros(rows)
    tr_leader = np.zeros(rows, dtype=np.int64)
    tr_cmd = np.zeros(rows)
    tr_pow = np.zeros((rows, 3))
    tr_en = np.zeros((rows, 3))
    tr_dur = np.zeros(rows)
    if record:
        tr_leader[0] = order[0]
        tr_cmd[0] = powers[0]
        for r in range(3):
            tr_en[0, r] = energies[r]

    v = 0.0
    ride_time = 0.0
    covered = 0.0
    steps = 0
    stalled = False
    for i in range(m):
        d = seg_dist[i]
        p = powers[i]
        lead = order[0]
        f1 = order[1]
        f2 = order[2]
        m_lead = masses[lead] + bike_mass
        m_f1 = masses[f1] + bike_mass
        m_f2 = masses[f2] + bike_mass
        x = 0.0
        t_seg = 0.0
        while x < d:
            if steps >= max_steps:
                stalled = True
                break
            dke = _lead_delta_ke(p, v, cdas[lead], m_lead, rho, mu, gravity, efficiency, dt)
            v_new = _step_velocity(v, dke, m_lead)
            v_mean = 0.5 * (v + v_new)
            tau = dt
            if x + v_mean * dt >= d:
                # boundary falls inside this step: shorten it
                tau = (d - x) / v_mean
                v_new = v + (v_new - v) * tau / dt
                x = d
            else:
                x += v_mean * dt
            pf1 = _follower_power(0.5 * m_f1 * (v_new * v_new - v * v), v, cdas[f1],
                                  draft2, m_f1, rho, mu, gravity, efficiency, tau)
            pf2 = _follower_power(0.5 * m_f2 * (v_new * v_new - v * v), v, cdas[f2],
                                  draft3, m_f2, rho, mu, gravity, efficiency, tau)
            if pf1 < 0.0:
                pf1 = 0.0
            if pf2 < 0.0:
                pf2 = 0.0
            energies[lead] -= p * tau
            energies[f1] -= pf1 * tau
            energies[f2] -= pf2 * tau
            v = v_new
            t_seg += tau
            steps += 1
            if record:
                tr_time[steps] = ride_time + t_seg + i * transition_time
                tr_dist[steps] = covered + x
                tr_vel[steps] = v
                tr_leader[steps] = lead
                tr_cmd[steps] = p
                tr_pow[steps, lead] = p
                tr_pow[steps, f1] = pf1
                tr_pow[steps, f2] = pf2
                for r in range(3):
                    tr_en[steps, r] = energies[r]
                tr_dur[steps] = tau
        seg_times[i] = t_seg
        ride_time += t_seg
        covered += d
        if stalled:
            break
        if i < m - 1:
            lead0 = order[0]
            order[0] = order[1]
            order[1] = order[2]
            order[2] = lead0
    total = ride_time + (m - 1) * transition_time
    return (total, energies, seg_times, steps, stalled,
            tr_time, tr_dist, tr_vel, tr_leader, tr_cmd, tr_pow, tr_en, tr_dur)


class RaceModel:
    """Precomputed arrays for one (strategy, order, config) triple.

    Optimisers call this many thousands of times with different live power
    vectors, so all validation and unit mapping happens once here.
    """

    def __init__(self, strategy: TransitionStrategy, order: RiderOrder, config: RaceConfig):
        if len(strategy) != config.n_slots:
            raise ValueError(f"strategy has {len(strategy)} entries, race needs {config.n_slots}")
        if strategy.max_hl != config.max_hl:
            raise ValueError(f"strategy max_hl {strategy.max_hl} != config max_hl {config.max_hl}")
        self.strategy = strategy
        self.order = order
        self.config = config
        self.m = effective_length(strategy)
        self.segments = segment_distances(strategy, config.geometry)
        riders = [config.riders[r] for r in RIDERS]
        self._order0 = np.array(order.indices, dtype=np.int64)
        self._masses = np.array([r.mass for r in riders])
        self._cdas = np.array([r.cda for r in riders])
        self._energy0 = np.array([r.available_energy for r in riders])
        k = config.constants
        self._args = (config.bike.mass, config.environment.air_density,
                      config.environment.gravity, k.mechanical_efficiency,
                      k.global_friction, k.dt, k.draft_coefficient_second,
                      k.draft_coefficient_third, config.transition_time)

    def _run(self, live: np.ndarray, record: bool, n_rows: int = 1):
        return _race(self.segments, live, self._order0, self._masses, self._cdas,
                     self._energy0, *self._args, record, n_rows, MAX_STEPS)

    def live_powers(self, profile: PowerProfile | np.ndarray) -> np.ndarray:
        p = profile.as_array() if isinstance(profile, PowerProfile) else np.asarray(profile, float)
        if p.shape[0] < self.m:
            raise ValueError(f"profile has {p.shape[0]} entries, strategy needs {self.m}")
        return np.ascontiguousarray(p[:self.m], dtype=float)

    def simulate(self, live: np.ndarray, record_trace: bool = True) -> RaceResult:
        live = np.ascontiguousarray(live, dtype=float)
        if not np.all(np.isfinite(live)) or np.any(live < 0):
            raise ValueError("live power values must be finite and non-negative")
        out = self._run(live, False)
        total, energies, seg_times, steps, stalled = out[:5]
        trace = None
        if record_trace:
            out = self._run(live, True, steps + 1)
            trace = RaceTrace(*out[5:])
        final = {r: float(e) for r, e in zip(RIDERS, energies)}
        feasible = not stalled and all(e >= 0 for e in final.values())
        return RaceResult(float(total), final, feasible, seg_times, trace, bool(stalled))

    def fitness(self, live: np.ndarray) -> float:
        """Race time plus constraint penalties for a live power vector."""
        cfg = self.config
        live = np.asarray(live, dtype=float)
        if not np.all(np.isfinite(live)):
            return math.inf
        clipped = np.clip(live, cfg.power_min, cfg.power_max)
        violation = float(np.abs(live - clipped).sum())
        total, energies, _, _, stalled = self._run(np.ascontiguousarray(clipped), False)[:5]
        deficit = float(np.maximum(0.0, -energies).sum())
        if violation == 0.0 and deficit == 0.0 and not stalled:
            return float(total)
        pen = cfg.penalty
        return (float(total) + pen.base_penalty + pen.energy_deficit_weight * deficit
                + pen.power_violation_weight * violation)


def simulate(strategy: TransitionStrategy, profile: PowerProfile, order: RiderOrder,
             config: RaceConfig, record_trace: bool = True) -> RaceResult:
    """Simulate a race from a standing start.

    Never aborts on an exhausted rider: the race is ridden to the line and the
    result is flagged infeasible instead.
    """
    if len(profile) != len(strategy):
        raise ValueError(f"strategy ({len(strategy)}) and profile ({len(profile)}) lengths differ")
    model = RaceModel(strategy, order, config)
    return model.simulate(model.live_powers(profile), record_trace)


def penalized_fitness(strategy: TransitionStrategy, profile: PowerProfile, order: RiderOrder,
                      config: RaceConfig) -> float:
    """Race time, plus ``base + w_e * deficit + w_p * violation`` when infeasible.

    Live powers outside ``[power_min, power_max]`` are clipped for the
    simulation and their distance to the bounds is charged as violation.
    """
    if len(profile) != len(strategy):
        raise ValueError(f"strategy ({len(strategy)}) and profile ({len(profile)}) lengths differ")
    model = RaceModel(strategy, order, config)
    return model.fitness(model.live_powers(profile))


def velocity_trace_csv(result: RaceResult) -> str:
    if result.trace is None:
        raise ValueError("result carries no trace; simulate with record_trace=True")
    tr = result.trace
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(TRACE_HEADER)
    for i in range(len(tr)):
        writer.writerow([
            repr(float(tr.time[i])), repr(float(tr.distance[i])), repr(float(tr.velocity[i])),
            RIDERS[tr.leader[i]], repr(float(tr.commanded_power[i])),
            *(repr(float(x)) for x in tr.rider_powers[i]),
            *(repr(float(x)) for x in tr.rider_energies[i]),
        ])
    return buf.getvalue()
