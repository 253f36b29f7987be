"""Live session host: applies client messages between ticks and emits snapshots.

This module is transport-free; `server` wraps it in sockets. A session owns a
SimulationEngine plus per-actor drive mode: actors follow their scripted
trajectory until a move_actor message switches them to client-driven poses.

All mutation happens between ticks: messages are queued by the transport and
drained through apply_client_message before each advance, so a snapshot never
shows a half-applied change.
"""

from __future__ import annotations

import dataclasses
import json
from collections import deque
from typing import Any, Optional

import numpy as np

from .engagement import (
    Directionality,
    compute_device_field,
    compute_user_field,
    smoothing_alpha_for_dt,
)
from .geometry import ConvexPolygon, Vec2, intersect_fields, to_polygon
from .scenario import ScenarioConfig, ScenarioValidationError, load_scenario
from .simulator import SimulationEngine, TickInput, TraceRecord

PROTOCOL_VERSION = "1"
# Client positions arrive with pointer jitter; velocity uses a short moving
# average of per-tick finite differences before the regular smoothing filter.
CLIENT_VELOCITY_WINDOW = 3


class _ClientDrive:
    """Pose source for an actor steered by the client instead of its script."""

    def __init__(self, position: Vec2):
        self.position = position
        self.previous: Optional[Vec2] = None
        self.diffs: deque[Vec2] = deque(maxlen=CLIENT_VELOCITY_WINDOW)

    def tick_input(self, dt: float) -> TickInput:
        if self.previous is not None:
            self.diffs.append(
                Vec2(
                    (self.position.x - self.previous.x) / dt,
                    (self.position.y - self.previous.y) / dt,
                )
            )
        self.previous = self.position
        if self.diffs:
            inv = 1.0 / len(self.diffs)
            velocity = Vec2(
                sum(d.x for d in self.diffs) * inv,
                sum(d.y for d in self.diffs) * inv,
            )
        else:
            velocity = Vec2(0.0, 0.0)
        return TickInput(self.position, velocity)


class SessionState:
    """One live scenario: engine, drive modes, tick counter, paused flag."""

    def __init__(self, cfg: ScenarioConfig):
        self.paused = False
        self._install(cfg)

    def _install(self, cfg: ScenarioConfig) -> None:
        self.cfg = cfg
        self.engine = SimulationEngine(cfg)
        self.rng = np.random.default_rng(cfg.noise.seed)
        self.tick_index = 0
        self.client_drives: dict[str, _ClientDrive] = {}

    @property
    def t(self) -> float:
        return self.tick_index * self.engine.dt

    def reset(self) -> None:
        """Back to tick 0 of the current scenario, all actors script-driven."""
        self._install(self.cfg)

    def tick_and_snapshot(self) -> Optional[dict[str, Any]]:
        """Advance one tick and build the broadcast snapshot; None while paused."""
        if self.paused:
            return None
        t = self.t
        inputs: dict[str, TickInput] = {}
        for spec in self.cfg.actors:
            drive = self.client_drives.get(spec.name)
            if drive is not None:
                inputs[spec.name] = drive.tick_input(self.engine.dt)
            else:
                inputs[spec.name] = self.engine.trajectory_input(
                    spec, t, self.rng, self.cfg.noise
                )
        records = self.engine.step(t, inputs)
        self.tick_index += 1
        return self._snapshot(t, records)

    def _snapshot(self, t: float, records: list[TraceRecord]) -> dict[str, Any]:
        n = self.cfg.polygon_n
        user_fields = {}
        actors_payload = []
        for spec in self.cfg.actors:
            state = self.engine.actor_states[spec.name]
            field = compute_user_field(state, spec.params)
            user_fields[spec.name] = field
            actors_payload.append(
                {
                    "name": spec.name,
                    "position": [state.position.x, state.position.y],
                    "velocity": [state.velocity.x, state.velocity.y],
                    "heading": state.heading,
                    "client_driven": spec.name in self.client_drives,
                }
            )
        device_fields = {
            spec.name: compute_device_field(spec.config) for spec in self.cfg.devices
        }
        bindings_payload = []
        for binding, record in zip(self.cfg.bindings, records):
            overlap = intersect_fields(
                user_fields[binding.actor], device_fields[binding.device], n
            )
            bindings_payload.append(
                {
                    "actor": binding.actor,
                    "device": binding.device,
                    "pattern": binding.kind.value,
                    "pi": record.pi,
                    "state": record.state,
                    "events": [e.to_dict() for e in record.events],
                    "intersection": _vertices(overlap),
                }
            )
        return {
            "type": "snapshot",
            "schema_version": PROTOCOL_VERSION,
            "tick": self.tick_index - 1,
            "t": t,
            "paused": self.paused,
            "arena": {"width": self.cfg.arena[0], "height": self.cfg.arena[1]},
            "actors": actors_payload,
            "devices": [
                {
                    "name": spec.name,
                    "position": [spec.config.position.x, spec.config.position.y],
                    "facing": spec.config.facing,
                    "radius": spec.config.radius,
                    "directionality": spec.config.directionality.value,
                }
                for spec in self.cfg.devices
            ],
            "user_fields": [
                {"actor": name, "vertices": _vertices(to_polygon(field, n))}
                for name, field in user_fields.items()
            ],
            "device_fields": [
                {"device": name, "vertices": _vertices(to_polygon(field, n))}
                for name, field in device_fields.items()
            ],
            "bindings": bindings_payload,
        }


def _vertices(polygon: ConvexPolygon) -> list[list[float]]:
    return [[v.x, v.y] for v in polygon.vertices]


def _ack(msg_id: Any) -> dict[str, Any]:
    return {"type": "ack", "schema_version": PROTOCOL_VERSION, "id": msg_id}


def _error(msg_id: Any, reason: str) -> dict[str, Any]:
    return {
        "type": "error",
        "schema_version": PROTOCOL_VERSION,
        "id": msg_id,
        "reason": reason,
    }


def apply_client_message(session: SessionState, msg: dict[str, Any]) -> dict[str, Any]:
    """Apply one message; invalid input yields an error and no session change."""
    if not isinstance(msg, dict):
        return _error(None, "message must be a JSON object")
    msg_id = msg.get("id")
    msg_type = msg.get("type")
    try:
        if msg_type == "load_scenario":
            document = msg.get("document")
            if isinstance(document, dict):
                document = json.dumps(document)
            if not isinstance(document, str):
                return _error(msg_id, "load_scenario needs a 'document'")
            cfg = load_scenario(document)
            session.paused = False
            session._install(cfg)
            return _ack(msg_id)
        if msg_type == "move_actor":
            name = msg.get("name")
            if not any(a.name == name for a in session.cfg.actors):
                return _error(msg_id, f"unknown actor {name!r}")
            position = msg.get("position")
            if (
                not isinstance(position, (list, tuple))
                or len(position) != 2
                or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in position)
            ):
                return _error(msg_id, "move_actor needs 'position' [x, y]")
            point = Vec2(float(position[0]), float(position[1]))
            drive = session.client_drives.get(name)
            if drive is None:
                session.client_drives[name] = _ClientDrive(point)
            else:
                drive.position = point
            return _ack(msg_id)
        if msg_type == "set_param":
            path = msg.get("path")
            if not isinstance(path, str):
                return _error(msg_id, "set_param needs a string 'path'")
            new_cfg = set_param(session.cfg, path, msg.get("value"))
            session.cfg = new_cfg
            _refresh_engine(session)
            return _ack(msg_id)
        if msg_type == "pause_resume":
            session.paused = not session.paused
            return _ack(msg_id)
        if msg_type == "reset":
            session.paused = False
            session.reset()
            return _ack(msg_id)
    except (ScenarioValidationError, ValueError) as exc:
        return _error(msg_id, str(exc))
    return _error(msg_id, f"unknown message type {msg_type!r}")


def _refresh_engine(session: SessionState) -> None:
    """Point live filter state at the new config without resetting it."""
    engine = session.engine
    engine.cfg = session.cfg
    for spec in session.cfg.actors:
        runtime = engine.runtimes[spec.name]
        runtime.spec = spec
        runtime.alpha = smoothing_alpha_for_dt(
            spec.params.velocity_smoothing_alpha, engine.dt
        )


_ACTOR_PARAM_FIELDS = {
    "k",
    "rest_radius",
    "velocity_smoothing_alpha",
    "heading_speed_floor",
}
_DEVICE_FIELDS = {"radius", "facing", "position", "directionality"}


def _parse_indexed(path_piece: str, section: str) -> int:
    # "actors[3]" -> 3
    prefix = section + "["
    if not (path_piece.startswith(prefix) and path_piece.endswith("]")):
        raise ValueError(f"bad parameter path segment {path_piece!r}")
    try:
        return int(path_piece[len(prefix):-1])
    except ValueError as exc:
        raise ValueError(f"bad index in {path_piece!r}") from exc


def _require_number(value: Any, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ValueError(f"{path} needs a numeric value, got {value!r}")
    return float(value)


def set_param(cfg: ScenarioConfig, path: str, value: Any) -> ScenarioConfig:
    """Rebuild the config with one field changed; invariants re-checked.

    Paths: actors[i].<k|rest_radius|velocity_smoothing_alpha|heading_speed_floor>,
    devices[i].<radius|facing|position|directionality>,
    bindings[i].<greeting|turn_taking|revealing>.<t1|t2|thresholds|dwell>.
    """
    parts = path.split(".")
    if len(parts) == 2 and parts[0].startswith("actors["):
        index = _parse_indexed(parts[0], "actors")
        if not 0 <= index < len(cfg.actors):
            raise ValueError(f"actor index out of range in {path!r}")
        field = parts[1]
        if field not in _ACTOR_PARAM_FIELDS:
            raise ValueError(f"unknown actor parameter {field!r}")
        spec = cfg.actors[index]
        params = dataclasses.replace(
            spec.params, **{field: _require_number(value, path)}
        )
        actors = list(cfg.actors)
        actors[index] = dataclasses.replace(spec, params=params)
        return dataclasses.replace(cfg, actors=tuple(actors))
    if len(parts) == 2 and parts[0].startswith("devices["):
        index = _parse_indexed(parts[0], "devices")
        if not 0 <= index < len(cfg.devices):
            raise ValueError(f"device index out of range in {path!r}")
        field = parts[1]
        if field not in _DEVICE_FIELDS:
            raise ValueError(f"unknown device parameter {field!r}")
        spec = cfg.devices[index]
        if field == "position":
            if not (isinstance(value, (list, tuple)) and len(value) == 2):
                raise ValueError(f"{path} needs [x, y]")
            new: Any = Vec2(float(value[0]), float(value[1]))
        elif field == "directionality":
            new = Directionality(value)
        else:
            new = _require_number(value, path)
        config = dataclasses.replace(spec.config, **{field: new})
        devices = list(cfg.devices)
        devices[index] = dataclasses.replace(spec, config=config)
        return dataclasses.replace(cfg, devices=tuple(devices))
    if len(parts) == 3 and parts[0].startswith("bindings["):
        index = _parse_indexed(parts[0], "bindings")
        if not 0 <= index < len(cfg.bindings):
            raise ValueError(f"binding index out of range in {path!r}")
        binding = cfg.bindings[index]
        kind_name, field = parts[1], parts[2]
        if kind_name != binding.kind.value:
            raise ValueError(
                f"binding {index} is {binding.kind.value!r}, not {kind_name!r}"
            )
        if field == "thresholds":
            if not isinstance(value, (list, tuple)):
                raise ValueError(f"{path} needs a list of thresholds")
            new = tuple(float(v) for v in value)
        else:
            new = _require_number(value, path)
        try:
            pattern_cfg = dataclasses.replace(binding.config, **{field: new})
        except TypeError as exc:
            raise ValueError(f"unknown {kind_name} parameter {field!r}") from exc
        bindings = list(cfg.bindings)
        bindings[index] = dataclasses.replace(binding, config=pattern_cfg)
        return dataclasses.replace(cfg, bindings=tuple(bindings))
    raise ValueError(f"unrecognized parameter path {path!r}")
