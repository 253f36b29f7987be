"""Proxemic interaction fields: spatial engagement zones, Potential Interest,
and threshold-driven interaction patterns, with a deterministic scenario
simulator and a live streaming service."""

from .engagement import (
    ActorState,
    DeviceConfig,
    Directionality,
    EngagementSample,
    UserFieldParams,
    compute_device_field,
    compute_user_field,
    potential_interest,
)
from .geometry import (
    CircleField,
    ConvexPolygon,
    EllipseField,
    HalfDiskField,
    Vec2,
    ellipse_axes,
    iou,
    polygon_area,
    to_polygon,
)
from .patterns import (
    EventKind,
    GreetingConfig,
    PatternEvent,
    PatternKind,
    RevealingConfig,
    TurnTakingConfig,
    reset,
    step,
)
from .scenario import (
    NoiseModel,
    ScenarioConfig,
    ScenarioValidationError,
    Trajectory,
    load_scenario,
    scenario_to_dict,
)
from .simulator import EventTrace, TraceRecord, run_scenario, trace_to_jsonl

__version__ = "0.1.0"

__all__ = [
    "ActorState",
    "CircleField",
    "ConvexPolygon",
    "DeviceConfig",
    "Directionality",
    "EllipseField",
    "EngagementSample",
    "EventKind",
    "EventTrace",
    "GreetingConfig",
    "HalfDiskField",
    "NoiseModel",
    "PatternEvent",
    "PatternKind",
    "RevealingConfig",
    "ScenarioConfig",
    "ScenarioValidationError",
    "TraceRecord",
    "Trajectory",
    "TurnTakingConfig",
    "UserFieldParams",
    "Vec2",
    "compute_device_field",
    "compute_user_field",
    "ellipse_axes",
    "iou",
    "load_scenario",
    "polygon_area",
    "potential_interest",
    "reset",
    "run_scenario",
    "scenario_to_dict",
    "step",
    "to_polygon",
    "trace_to_jsonl",
]
