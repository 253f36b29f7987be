"""Scenario configuration: declarative rooms, actors, devices, and pattern bindings.

Scenario files are UTF-8 JSON with a mandatory integer `version` field. All
defaults are materialized when a file is loaded, so a resolved configuration
serializes to a complete, hashable document (see scenario_to_dict).
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from importlib import resources
from typing import Any

from .engagement import (
    DEFAULT_HEADING_SPEED_FLOOR,
    DEFAULT_REST_RADIUS,
    DEFAULT_SMOOTHING_ALPHA,
    DeviceConfig,
    Directionality,
    UserFieldParams,
)
from .geometry import Vec2
from .patterns import (
    DEFAULT_DWELL,
    GreetingConfig,
    PatternConfig,
    PatternKind,
    RevealingConfig,
    TurnTakingConfig,
)

SCENARIO_SCHEMA_VERSION = 1
DEFAULT_ARENA = (5.0, 5.0)
DEFAULT_TICK_RATE_HZ = 20.0
DEFAULT_POLYGON_N = 64
# Greeting rows in source material carry a single threshold; the release
# threshold defaults to two thirds of it to preserve the hysteresis band.
GREETING_T2_FRACTION = 2.0 / 3.0


class ScenarioValidationError(ValueError):
    """Carries every human-readable validation problem found in a document."""

    def __init__(self, errors: list[str]):
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))


@dataclass(frozen=True)
class Trajectory:
    """Piecewise-linear path: (time, position) waypoints with increasing times."""

    waypoints: tuple[tuple[float, Vec2], ...]

    def __post_init__(self) -> None:
        waypoints = tuple((float(t), p) for t, p in self.waypoints)
        object.__setattr__(self, "waypoints", waypoints)
        if not waypoints:
            raise ValueError("trajectory needs at least one waypoint")
        times = [t for t, _ in waypoints]
        if any(a >= b for a, b in zip(times, times[1:])):
            raise ValueError("waypoint times must be strictly increasing")


@dataclass(frozen=True)
class NoiseModel:
    """Gaussian range/angle perturbation of tracked positions about the origin."""

    range_sigma: float = 0.0  # meters
    angle_sigma: float = 0.0  # degrees
    seed: int = 0
    enabled: bool = False

    def __post_init__(self) -> None:
        if self.range_sigma < 0 or self.angle_sigma < 0:
            raise ValueError("noise sigmas must be >= 0")


@dataclass(frozen=True)
class ActorSpec:
    name: str
    trajectory: Trajectory
    params: UserFieldParams = field(default_factory=UserFieldParams)


@dataclass(frozen=True)
class DeviceSpec:
    name: str
    config: DeviceConfig


@dataclass(frozen=True)
class Binding:
    actor: str
    device: str
    kind: PatternKind
    config: PatternConfig


@dataclass(frozen=True)
class ScenarioConfig:
    devices: tuple[DeviceSpec, ...]
    actors: tuple[ActorSpec, ...]
    bindings: tuple[Binding, ...]
    duration_s: float
    arena: tuple[float, float] = DEFAULT_ARENA
    tick_rate_hz: float = DEFAULT_TICK_RATE_HZ
    noise: NoiseModel = field(default_factory=NoiseModel)
    polygon_n: int = DEFAULT_POLYGON_N
    name: str = ""

    def __post_init__(self) -> None:
        errors = validate_scenario(self)
        if errors:
            raise ScenarioValidationError(errors)

    def actor(self, name: str) -> ActorSpec:
        for spec in self.actors:
            if spec.name == name:
                return spec
        raise KeyError(name)

    def device(self, name: str) -> DeviceSpec:
        for spec in self.devices:
            if spec.name == name:
                return spec
        raise KeyError(name)


def validate_scenario(cfg: ScenarioConfig) -> list[str]:
    """Cross-field checks; per-type invariants are enforced at construction."""
    errors: list[str] = []
    if cfg.tick_rate_hz <= 0:
        errors.append(f"tick_rate_hz must be > 0, got {cfg.tick_rate_hz}")
    if cfg.duration_s < 0:
        errors.append(f"duration_s must be >= 0, got {cfg.duration_s}")
    if cfg.polygon_n < 8:
        errors.append(f"polygon_n must be >= 8, got {cfg.polygon_n}")
    if cfg.arena[0] <= 0 or cfg.arena[1] <= 0:
        errors.append(f"arena dimensions must be > 0, got {cfg.arena}")
    device_names = [d.name for d in cfg.devices]
    actor_names = [a.name for a in cfg.actors]
    if len(set(device_names)) != len(device_names):
        errors.append("device names must be unique")
    if len(set(actor_names)) != len(actor_names):
        errors.append("actor names must be unique")
    for i, binding in enumerate(cfg.bindings):
        if binding.actor not in actor_names:
            errors.append(f"bindings[{i}] references unknown actor {binding.actor!r}")
        if binding.device not in device_names:
            errors.append(f"bindings[{i}] references unknown device {binding.device!r}")
        expected = {
            PatternKind.GREETING: GreetingConfig,
            PatternKind.TURN_TAKING: TurnTakingConfig,
            PatternKind.REVEALING: RevealingConfig,
        }[binding.kind]
        if not isinstance(binding.config, expected):
            errors.append(
                f"bindings[{i}] pattern {binding.kind.value} needs {expected.__name__}"
            )
    return errors


def _get_number(
    obj: dict, key: str, errors: list[str], where: str, default: float | None = None
) -> float | None:
    if key not in obj:
        if default is None:
            errors.append(f"{where}: missing required field {key!r}")
        return default
    value = obj[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
        errors.append(f"{where}: field {key!r} must be a finite number, got {value!r}")
        return default
    return float(value)


def _get_position(obj: dict, key: str, errors: list[str], where: str) -> Vec2 | None:
    value = obj.get(key)
    if (
        not isinstance(value, (list, tuple))
        or len(value) != 2
        or any(isinstance(v, bool) or not isinstance(v, (int, float)) for v in value)
    ):
        errors.append(f"{where}: field {key!r} must be a [x, y] pair of numbers")
        return None
    try:
        return Vec2(float(value[0]), float(value[1]))
    except ValueError as exc:
        errors.append(f"{where}: {exc}")
        return None


def _parse_pattern(entry: dict, where: str, errors: list[str]) -> tuple[PatternKind, PatternConfig] | None:
    kind_name = entry.get("pattern")
    dwell = _get_number(entry, "dwell", errors, where, DEFAULT_DWELL)
    if dwell is None:
        dwell = DEFAULT_DWELL
    try:
        if kind_name == "greeting":
            t1 = _get_number(entry, "t1", errors, where)
            if t1 is None:
                return None
            t2 = _get_number(entry, "t2", errors, where, GREETING_T2_FRACTION * t1)
            return PatternKind.GREETING, GreetingConfig(t1=t1, t2=t2, dwell=dwell)
        if kind_name == "turn_taking":
            t1 = _get_number(entry, "t1", errors, where)
            if t1 is None:
                return None
            return PatternKind.TURN_TAKING, TurnTakingConfig(t1=t1, dwell=dwell)
        if kind_name == "revealing":
            thresholds = entry.get("thresholds")
            if not isinstance(thresholds, (list, tuple)) or not all(
                isinstance(v, (int, float)) and not isinstance(v, bool) for v in thresholds
            ):
                errors.append(f"{where}: field 'thresholds' must be a list of numbers")
                return None
            return PatternKind.REVEALING, RevealingConfig(
                thresholds=tuple(float(v) for v in thresholds), dwell=dwell
            )
    except ValueError as exc:
        errors.append(f"{where}: {exc}")
        return None
    errors.append(f"{where}: unknown pattern kind {kind_name!r}")
    return None


def load_scenario(text: str) -> ScenarioConfig:
    """Parse and fully validate a scenario document.

    Raises ScenarioValidationError listing every problem found; on success the
    returned config has all defaults filled in.
    """
    errors: list[str] = []
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioValidationError([f"invalid JSON: {exc}"]) from exc
    if not isinstance(doc, dict):
        raise ScenarioValidationError(["scenario document must be a JSON object"])
    version = doc.get("version")
    if version != SCENARIO_SCHEMA_VERSION:
        errors.append(
            f"scenario 'version' must be {SCENARIO_SCHEMA_VERSION}, got {version!r}"
        )

    arena = DEFAULT_ARENA
    arena_obj = doc.get("arena")
    if arena_obj is not None:
        if not isinstance(arena_obj, dict):
            errors.append("'arena' must be an object with width/height")
        else:
            w = _get_number(arena_obj, "width", errors, "arena", DEFAULT_ARENA[0])
            h = _get_number(arena_obj, "height", errors, "arena", DEFAULT_ARENA[1])
            if w is not None and h is not None:
                arena = (w, h)

    tick_rate = _get_number(doc, "tick_rate_hz", errors, "scenario", DEFAULT_TICK_RATE_HZ)
    duration = _get_number(doc, "duration_s", errors, "scenario")
    polygon_n_f = _get_number(doc, "polygon_n", errors, "scenario", float(DEFAULT_POLYGON_N))
    polygon_n = int(polygon_n_f) if polygon_n_f is not None else DEFAULT_POLYGON_N

    noise = NoiseModel()
    noise_obj = doc.get("noise")
    if noise_obj is not None:
        if not isinstance(noise_obj, dict):
            errors.append("'noise' must be an object")
        else:
            try:
                noise = NoiseModel(
                    range_sigma=_get_number(noise_obj, "range_sigma", errors, "noise", 0.0) or 0.0,
                    angle_sigma=_get_number(noise_obj, "angle_sigma", errors, "noise", 0.0) or 0.0,
                    seed=int(noise_obj.get("seed", 0)),
                    enabled=bool(noise_obj.get("enabled", False)),
                )
            except (TypeError, ValueError) as exc:
                errors.append(f"noise: {exc}")

    devices: list[DeviceSpec] = []
    for i, entry in enumerate(doc.get("devices") or []):
        where = f"devices[{i}]"
        if not isinstance(entry, dict):
            errors.append(f"{where}: must be an object")
            continue
        name = entry.get("name")
        if not isinstance(name, str) or not name:
            errors.append(f"{where}: missing device name")
            continue
        position = _get_position(entry, "position", errors, where)
        radius = _get_number(entry, "radius", errors, where)
        facing = _get_number(entry, "facing", errors, where, 0.0)
        direction_name = entry.get("directionality", "directional")
        try:
            directionality = Directionality(direction_name)
        except ValueError:
            errors.append(f"{where}: unknown directionality {direction_name!r}")
            continue
        if position is None or radius is None or facing is None:
            continue
        try:
            devices.append(
                DeviceSpec(name, DeviceConfig(position, facing, radius, directionality))
            )
        except ValueError as exc:
            errors.append(f"{where}: {exc}")

    actors: list[ActorSpec] = []
    for i, entry in enumerate(doc.get("actors") or []):
        where = f"actors[{i}]"
        if not isinstance(entry, dict):
            errors.append(f"{where}: must be an object")
            continue
        name = entry.get("name")
        if not isinstance(name, str) or not name:
            errors.append(f"{where}: missing actor name")
            continue
        params_obj = entry.get("params") or {}
        if not isinstance(params_obj, dict):
            errors.append(f"{where}: 'params' must be an object")
            params_obj = {}
        try:
            params = UserFieldParams(
                rest_radius=_get_number(params_obj, "rest_radius", errors, where, DEFAULT_REST_RADIUS)
                or DEFAULT_REST_RADIUS,
                k=_get_number(params_obj, "k", errors, where, 0.25) or 0.0,
                velocity_smoothing_alpha=_get_number(
                    params_obj, "velocity_smoothing_alpha", errors, where, DEFAULT_SMOOTHING_ALPHA
                )
                or DEFAULT_SMOOTHING_ALPHA,
                heading_speed_floor=_get_number(
                    params_obj, "heading_speed_floor", errors, where, DEFAULT_HEADING_SPEED_FLOOR
                )
                or 0.0,
            )
        except ValueError as exc:
            errors.append(f"{where}: {exc}")
            continue
        waypoint_entries = entry.get("waypoints")
        if not isinstance(waypoint_entries, list) or not waypoint_entries:
            errors.append(f"{where}: 'waypoints' must be a non-empty list")
            continue
        waypoints: list[tuple[float, Vec2]] = []
        ok = True
        for j, wp in enumerate(waypoint_entries):
            wp_where = f"{where}.waypoints[{j}]"
            if not isinstance(wp, dict):
                errors.append(f"{wp_where}: must be an object")
                ok = False
                continue
            t = _get_number(wp, "t", errors, wp_where)
            position = _get_position(wp, "position", errors, wp_where)
            if t is None or position is None:
                ok = False
                continue
            waypoints.append((t, position))
        if not ok:
            continue
        try:
            actors.append(ActorSpec(name, Trajectory(tuple(waypoints)), params))
        except ValueError as exc:
            errors.append(f"{where}: {exc}")

    bindings: list[Binding] = []
    for i, entry in enumerate(doc.get("bindings") or []):
        where = f"bindings[{i}]"
        if not isinstance(entry, dict):
            errors.append(f"{where}: must be an object")
            continue
        actor = entry.get("actor")
        device = entry.get("device")
        if not isinstance(actor, str) or not isinstance(device, str):
            errors.append(f"{where}: needs 'actor' and 'device' names")
            continue
        parsed = _parse_pattern(entry, where, errors)
        if parsed is None:
            continue
        kind, pattern_cfg = parsed
        bindings.append(Binding(actor, device, kind, pattern_cfg))

    if errors:
        raise ScenarioValidationError(errors)
    if duration is None or tick_rate is None:
        raise ScenarioValidationError(["scenario is missing duration_s"])
    try:
        return ScenarioConfig(
            devices=tuple(devices),
            actors=tuple(actors),
            bindings=tuple(bindings),
            duration_s=duration,
            arena=arena,
            tick_rate_hz=tick_rate,
            noise=noise,
            polygon_n=polygon_n,
            name=str(doc.get("name", "")),
        )
    except ScenarioValidationError:
        raise
    except ValueError as exc:
        raise ScenarioValidationError([str(exc)]) from exc


def _pattern_to_dict(binding: Binding) -> dict[str, Any]:
    out: dict[str, Any] = {
        "actor": binding.actor,
        "device": binding.device,
        "pattern": binding.kind.value,
    }
    cfg = binding.config
    if isinstance(cfg, GreetingConfig):
        out.update(t1=cfg.t1, t2=cfg.t2, dwell=cfg.dwell)
    elif isinstance(cfg, TurnTakingConfig):
        out.update(t1=cfg.t1, dwell=cfg.dwell)
    elif isinstance(cfg, RevealingConfig):
        out.update(thresholds=list(cfg.thresholds), dwell=cfg.dwell)
    return out


def scenario_to_dict(cfg: ScenarioConfig) -> dict[str, Any]:
    """Resolved document with every default materialized; load_scenario round-trips it."""
    return {
        "version": SCENARIO_SCHEMA_VERSION,
        "name": cfg.name,
        "arena": {"width": cfg.arena[0], "height": cfg.arena[1]},
        "tick_rate_hz": cfg.tick_rate_hz,
        "duration_s": cfg.duration_s,
        "polygon_n": cfg.polygon_n,
        "noise": {
            "enabled": cfg.noise.enabled,
            "range_sigma": cfg.noise.range_sigma,
            "angle_sigma": cfg.noise.angle_sigma,
            "seed": cfg.noise.seed,
        },
        "devices": [
            {
                "name": d.name,
                "position": [d.config.position.x, d.config.position.y],
                "facing": d.config.facing,
                "radius": d.config.radius,
                "directionality": d.config.directionality.value,
            }
            for d in cfg.devices
        ],
        "actors": [
            {
                "name": a.name,
                "params": {
                    "rest_radius": a.params.rest_radius,
                    "k": a.params.k,
                    "velocity_smoothing_alpha": a.params.velocity_smoothing_alpha,
                    "heading_speed_floor": a.params.heading_speed_floor,
                },
                "waypoints": [
                    {"t": t, "position": [p.x, p.y]} for t, p in a.trajectory.waypoints
                ],
            }
            for a in cfg.actors
        ],
        "bindings": [_pattern_to_dict(b) for b in cfg.bindings],
    }


def config_hash(cfg: ScenarioConfig) -> str:
    """SHA-256 of the canonical resolved document."""
    canonical = json.dumps(scenario_to_dict(cfg), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def packaged_scenario_names() -> list[str]:
    """Names of the scenario files shipped inside the package."""
    root = resources.files("proxfields") / "scenarios"
    return sorted(
        entry.name[: -len(".json")]
        for entry in root.iterdir()
        if entry.name.endswith(".json")
    )


def load_packaged_scenario(name: str) -> ScenarioConfig:
    """Load one of the shipped scenarios by bare name (e.g. "recipe")."""
    path = resources.files("proxfields") / "scenarios" / f"{name}.json"
    if not path.is_file():
        raise ScenarioValidationError(
            [f"unknown packaged scenario {name!r}; have {packaged_scenario_names()}"]
        )
    return load_scenario(path.read_text(encoding="utf-8"))
