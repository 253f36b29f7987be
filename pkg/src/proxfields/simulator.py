"""Deterministic scenario execution.

A run walks fixed ticks t = i / tick_rate_hz, samples each actor's trajectory,
optionally perturbs the tracked position, advances velocity smoothing and
heading retention, evaluates Potential Interest for every binding, and steps
the bound pattern machine. The result is an EventTrace that serializes to
JSONL byte-identically for a given configuration.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Any, Iterator

import numpy as np

from .engagement import (
    ActorState,
    potential_interest,
    resolve_heading,
    smooth_velocity,
    smoothing_alpha_for_dt,
)
from .geometry import Vec2
from .patterns import PatternEvent, PatternState, reset, step
from .scenario import (
    ActorSpec,
    NoiseModel,
    ScenarioConfig,
    Trajectory,
    config_hash,
    scenario_to_dict,
)

TRACE_SCHEMA_VERSION = 1


def sample_trajectory(trajectory: Trajectory, t: float) -> ActorState:
    """Position and velocity on a piecewise-linear path at time t.

    Before the first waypoint and at or after the last one the actor holds
    station: clamped position, zero velocity. The heading is the direction of
    motion, or 0 when stationary.
    """
    waypoints = trajectory.waypoints
    first_t, first_p = waypoints[0]
    last_t, last_p = waypoints[-1]
    if t < first_t:
        return ActorState(first_p, Vec2(0.0, 0.0))
    if t >= last_t:
        return ActorState(last_p, Vec2(0.0, 0.0))
    for (t0, p0), (t1, p1) in zip(waypoints, waypoints[1:]):
        if t0 <= t < t1:
            span = t1 - t0
            frac = (t - t0) / span
            position = Vec2(
                p0.x + frac * (p1.x - p0.x),
                p0.y + frac * (p1.y - p0.y),
            )
            velocity = Vec2((p1.x - p0.x) / span, (p1.y - p0.y) / span)
            heading = (
                math.atan2(velocity.y, velocity.x)
                if velocity.x != 0.0 or velocity.y != 0.0
                else 0.0
            )
            return ActorState(position, velocity, heading)
    raise AssertionError("unreachable: t bracketed by waypoint scan")


def inject_noise(actor: ActorState, model: NoiseModel, rng: np.random.Generator) -> ActorState:
    """Perturb tracked position in polar form about the arena origin.

    Range gets Gaussian noise in meters, bearing in degrees; velocity and
    heading are untouched (trajectory velocity is exact, only the position
    measurement is noisy). Draws two normals per call even when sigmas are 0
    so the stream stays aligned across configs with the same seed.
    """
    if not model.enabled:
        return actor
    range_noise, angle_noise = rng.standard_normal(2)
    r = math.hypot(actor.position.x, actor.position.y)
    theta = math.atan2(actor.position.y, actor.position.x)
    r_noisy = r + range_noise * model.range_sigma
    theta_noisy = theta + math.radians(angle_noise * model.angle_sigma)
    position = Vec2(r_noisy * math.cos(theta_noisy), r_noisy * math.sin(theta_noisy))
    return ActorState(position, actor.velocity, actor.heading)


@dataclass(frozen=True)
class TickInput:
    """Raw per-actor input for one tick.

    `velocity` is the velocity in effect over the interval that ended at this
    tick, not an instantaneous sample at the tick itself. For a piecewise
    trajectory that is the slope of the segment covering the interval; feeding
    the filter interval velocities keeps its step response identical across
    tick rates when waypoints land on the coarser grid.
    """

    position: Vec2
    velocity: Vec2


@dataclass
class ActorRuntime:
    """Per-actor mutable filter state carried across ticks."""

    spec: ActorSpec
    alpha: float  # per-step smoothing weight, already rescaled for dt
    smoothed: Vec2 | None = None
    heading: float = 0.0

    def advance(self, tick: TickInput) -> ActorState:
        if self.smoothed is None:
            # First sample: adopt the raw velocity so a run does not open
            # with a smoothing transient the trajectory never contained.
            velocity = tick.velocity
        else:
            velocity = smooth_velocity(self.smoothed, tick.velocity, self.alpha)
        self.smoothed = velocity
        self.heading = resolve_heading(
            self.heading, velocity, self.spec.params.heading_speed_floor
        )
        return ActorState(tick.position, velocity, self.heading)


@dataclass(frozen=True)
class TraceRecord:
    """One binding evaluated at one tick."""

    t: float
    actor: str
    device: str
    pi: float
    state: str
    events: tuple[PatternEvent, ...] = ()

    def to_dict(self) -> dict[str, Any]:
        return {
            "t": self.t,
            "actor": self.actor,
            "device": self.device,
            "pi": self.pi,
            "state": self.state,
            "events": [e.to_dict() for e in self.events],
        }


@dataclass(frozen=True)
class EventTrace:
    records: tuple[TraceRecord, ...]
    metadata: dict[str, Any] = field(default_factory=dict)

    def events(self) -> list[PatternEvent]:
        """All emitted events in tick order."""
        return [e for r in self.records for e in r.events]

    def records_for(self, actor: str, device: str) -> list[TraceRecord]:
        return [r for r in self.records if r.actor == actor and r.device == device]


def tick_times(duration_s: float, tick_rate_hz: float) -> Iterator[float]:
    """t = i/rate for i = 0..round(duration*rate), both endpoints included."""
    dt = 1.0 / tick_rate_hz
    for i in range(int(round(duration_s * tick_rate_hz)) + 1):
        yield i * dt


class SimulationEngine:
    """Tick-stepped core shared by offline runs and the live service.

    Owns actor filter state and one pattern machine per binding; step() maps
    per-actor tick inputs at time t to per-binding records. The latest actor
    states are kept on the engine so callers can snapshot poses and fields.
    """

    def __init__(self, cfg: ScenarioConfig, dt: float | None = None):
        self.cfg = cfg
        self.dt = dt if dt is not None else 1.0 / cfg.tick_rate_hz
        self.runtimes = {
            spec.name: ActorRuntime(
                spec,
                smoothing_alpha_for_dt(spec.params.velocity_smoothing_alpha, self.dt),
            )
            for spec in cfg.actors
        }
        self.machines: list[PatternState] = [
            reset(b.kind, b.config) for b in cfg.bindings
        ]
        self.actor_states: dict[str, ActorState] = {}
        self._last_raw_velocity: dict[str, Vec2] = {}

    def trajectory_input(
        self, spec: ActorSpec, t: float, rng: np.random.Generator, noise: NoiseModel
    ) -> TickInput:
        """Sample a scripted actor: position at t, velocity over the last interval."""
        raw = sample_trajectory(spec.trajectory, t)
        noisy = inject_noise(raw, noise, rng)
        interval_velocity = self._last_raw_velocity.get(spec.name, raw.velocity)
        self._last_raw_velocity[spec.name] = raw.velocity
        return TickInput(noisy.position, interval_velocity)

    def step(self, t: float, inputs: dict[str, TickInput]) -> list[TraceRecord]:
        self.actor_states = {
            name: self.runtimes[name].advance(tick) for name, tick in inputs.items()
        }
        records = []
        for i, binding in enumerate(self.cfg.bindings):
            actor_state = self.actor_states[binding.actor]
            params = self.cfg.actor(binding.actor).params
            device = self.cfg.device(binding.device).config
            sample = potential_interest(actor_state, params, device, t, self.cfg.polygon_n)
            self.machines[i], events = step(self.machines[i], sample.pi, t, binding.config)
            records.append(
                TraceRecord(
                    t=t,
                    actor=binding.actor,
                    device=binding.device,
                    pi=sample.pi,
                    state=self.machines[i].label(),
                    events=tuple(events),
                )
            )
        return records


def run_scenario(cfg: ScenarioConfig) -> EventTrace:
    """Execute a scenario start to finish; same config in, same trace out."""
    engine = SimulationEngine(cfg)
    rng = np.random.default_rng(cfg.noise.seed)
    records: list[TraceRecord] = []
    for t in tick_times(cfg.duration_s, cfg.tick_rate_hz):
        inputs = {
            spec.name: engine.trajectory_input(spec, t, rng, cfg.noise)
            for spec in cfg.actors
        }
        records.extend(engine.step(t, inputs))
    metadata = {
        "schema_version": TRACE_SCHEMA_VERSION,
        "config_hash": config_hash(cfg),
        "seed": cfg.noise.seed,
        "scenario": scenario_to_dict(cfg),
    }
    return EventTrace(tuple(records), metadata)


def trace_to_jsonl(trace: EventTrace) -> str:
    """Header line with run metadata, then one line per record, '\\n'-terminated.

    Serialization is canonical (sorted keys, fixed separators) so identical
    runs produce identical bytes.
    """
    lines = [json.dumps(trace.metadata, sort_keys=True, separators=(",", ":"))]
    for record in trace.records:
        lines.append(json.dumps(record.to_dict(), sort_keys=True, separators=(",", ":")))
    return "\n".join(lines) + "\n"


def write_trace(trace: EventTrace, path: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(trace_to_jsonl(trace))
