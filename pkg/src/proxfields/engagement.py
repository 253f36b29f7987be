"""Interaction fields from actor kinematics and device configuration."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .geometry import (
    CircleField,
    EllipseField,
    FieldShape,
    HalfDiskField,
    Vec2,
    ellipse_axes,
    iou,
    normalize_angle,
)

DEFAULT_REST_RADIUS = 1.2
DEFAULT_SMOOTHING_ALPHA = 0.4
DEFAULT_HEADING_SPEED_FLOOR = 0.05
# Reference tick rate at which velocity_smoothing_alpha is specified.
SMOOTHING_REFERENCE_HZ = 20.0


class Directionality(enum.Enum):
    DIRECTIONAL = "directional"
    NON_DIRECTIONAL = "non_directional"


@dataclass(frozen=True, slots=True)
class ActorState:
    """Tracked pose: position, (smoothed) velocity, and motion heading.

    The heading is the direction of the last motion sample faster than the
    heading floor; it is carried forward while the actor is at rest.
    """

    position: Vec2
    velocity: Vec2
    heading: float = 0.0

    def __post_init__(self) -> None:
        if not math.isfinite(self.heading):
            raise ValueError(f"heading must be finite, got {self.heading!r}")
        object.__setattr__(self, "heading", normalize_angle(self.heading))

    @property
    def speed(self) -> float:
        return self.velocity.norm()


@dataclass(frozen=True, slots=True)
class UserFieldParams:
    rest_radius: float = DEFAULT_REST_RADIUS
    k: float = 0.25
    velocity_smoothing_alpha: float = DEFAULT_SMOOTHING_ALPHA
    heading_speed_floor: float = DEFAULT_HEADING_SPEED_FLOOR

    def __post_init__(self) -> None:
        if self.rest_radius <= 0:
            raise ValueError(f"rest_radius must be > 0, got {self.rest_radius}")
        if self.k < 0:
            raise ValueError(f"k must be >= 0, got {self.k}")
        if not 0.0 < self.velocity_smoothing_alpha <= 1.0:
            raise ValueError(
                f"velocity_smoothing_alpha must be in (0, 1], got {self.velocity_smoothing_alpha}"
            )
        if self.heading_speed_floor < 0:
            raise ValueError(f"heading_speed_floor must be >= 0, got {self.heading_speed_floor}")

    @property
    def area_constant(self) -> float:
        """c in the constant-area law: product of the ellipse semi-axes."""
        return self.rest_radius * self.rest_radius


@dataclass(frozen=True, slots=True)
class DeviceConfig:
    position: Vec2
    facing: float
    radius: float
    directionality: Directionality = Directionality.DIRECTIONAL

    def __post_init__(self) -> None:
        if not math.isfinite(self.facing):
            raise ValueError(f"facing must be finite, got {self.facing!r}")
        if self.radius <= 0:
            raise ValueError(f"radius must be > 0, got {self.radius}")
        object.__setattr__(self, "facing", normalize_angle(self.facing))


@dataclass(frozen=True, slots=True)
class EngagementSample:
    """One timestamped Potential Interest evaluation for a (user, device) pair."""

    t: float
    pi: float
    user_field: FieldShape
    device_field: FieldShape


def smooth_velocity(previous_smoothed: Vec2, raw: Vec2, alpha: float) -> Vec2:
    """Exponential smoothing step: alpha*raw + (1-alpha)*previous."""
    if not 0.0 < alpha <= 1.0:
        raise ValueError(f"alpha must be in (0, 1], got {alpha}")
    if alpha == 1.0:
        return raw
    keep = 1.0 - alpha
    return Vec2(
        alpha * raw.x + keep * previous_smoothed.x,
        alpha * raw.y + keep * previous_smoothed.y,
    )


def smoothing_alpha_for_dt(alpha_at_reference: float, dt: float) -> float:
    """Per-step alpha for an arbitrary step size.

    velocity_smoothing_alpha is specified per tick at SMOOTHING_REFERENCE_HZ;
    rescaling by dt keeps the filter time constant, and therefore event
    timing, independent of the simulation tick rate.
    """
    if dt <= 0:
        raise ValueError(f"dt must be > 0, got {dt}")
    if alpha_at_reference >= 1.0:
        return 1.0
    reference_dt = 1.0 / SMOOTHING_REFERENCE_HZ
    return 1.0 - (1.0 - alpha_at_reference) ** (dt / reference_dt)


def resolve_heading(previous_heading: float, velocity: Vec2, speed_floor: float) -> float:
    """Motion direction of `velocity`, or the previous heading below the floor."""
    if velocity.norm() >= speed_floor and (velocity.x != 0.0 or velocity.y != 0.0):
        return math.atan2(velocity.y, velocity.x)
    return previous_heading


def compute_user_field(actor: ActorState, params: UserFieldParams) -> FieldShape:
    """Interaction field around a user.

    At rest the field is a circle of rest_radius around the actor. In motion
    it is the constant-area ellipse with the actor at the rear focus, so the
    field projects forward along the heading by the focal distance
    f = sqrt(r_major^2 - r_minor^2).
    """
    speed = actor.speed
    if speed == 0.0:
        return CircleField(actor.position, params.rest_radius)
    r_major, r_minor = ellipse_axes(speed, params.k, params.area_constant)
    heading = resolve_heading(actor.heading, actor.velocity, params.heading_speed_floor)
    focal = math.sqrt(r_major * r_major - r_minor * r_minor)
    center = Vec2(
        actor.position.x + focal * math.cos(heading),
        actor.position.y + focal * math.sin(heading),
    )
    return EllipseField(center, r_major, r_minor, heading)


def compute_device_field(device: DeviceConfig) -> FieldShape:
    """Half disk bulging along `facing` for directional devices, else a circle."""
    if device.directionality is Directionality.DIRECTIONAL:
        return HalfDiskField(device.position, device.radius, device.facing)
    return CircleField(device.position, device.radius)


def potential_interest(
    actor: ActorState,
    params: UserFieldParams,
    device: DeviceConfig,
    t: float,
    n: int,
) -> EngagementSample:
    """Potential Interest: IOU of the user and device fields at time t."""
    user_field = compute_user_field(actor, params)
    device_field = compute_device_field(device)
    pi = iou(user_field, device_field, n)
    return EngagementSample(t=t, pi=pi, user_field=user_field, device_field=device_field)
