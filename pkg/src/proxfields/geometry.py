"""Convex planar shapes for interaction fields, polygon clipping, and area oracles."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import ClassVar, Union

import numpy as np

# Convexity slack for polygons assembled from floating-point clipping.
CONVEX_TOL = 1e-9
# Intersections smaller than this are numerical noise at tangency.
DEGENERATE_AREA = 1e-12
_DEDUPE_TOL = 1e-9


def normalize_angle(angle: float) -> float:
    """Wrap an angle to [-pi, pi)."""
    wrapped = math.remainder(angle, math.tau)
    if wrapped >= math.pi:
        wrapped -= math.tau
    elif wrapped < -math.pi:
        wrapped += math.tau
    return wrapped


def _require_finite(name: str, *values: float) -> None:
    for v in values:
        if not math.isfinite(v):
            raise ValueError(f"{name} must be finite, got {v!r}")


@dataclass(frozen=True, slots=True)
class Vec2:
    """2-D point or vector in meters."""

    x: float
    y: float

    def __post_init__(self) -> None:
        _require_finite("Vec2 component", self.x, self.y)

    def __add__(self, other: Vec2) -> Vec2:
        return Vec2(self.x + other.x, self.y + other.y)

    def __sub__(self, other: Vec2) -> Vec2:
        return Vec2(self.x - other.x, self.y - other.y)

    def scaled(self, s: float) -> Vec2:
        return Vec2(self.x * s, self.y * s)

    def norm(self) -> float:
        return math.hypot(self.x, self.y)


@dataclass(frozen=True, slots=True)
class EllipseField:
    """Ellipse with semi-axes r_major >= r_minor and major axis along `heading`."""

    center: Vec2
    r_major: float
    r_minor: float
    heading: float

    def __post_init__(self) -> None:
        _require_finite("EllipseField parameter", self.r_major, self.r_minor, self.heading)
        if not self.r_major >= self.r_minor > 0:
            raise ValueError(
                f"ellipse axes must satisfy r_major >= r_minor > 0, "
                f"got ({self.r_major}, {self.r_minor})"
            )
        object.__setattr__(self, "heading", normalize_angle(self.heading))


@dataclass(frozen=True, slots=True)
class HalfDiskField:
    """Half disk whose flat edge passes through `center`, bulging along `facing`."""

    center: Vec2
    radius: float
    facing: float

    def __post_init__(self) -> None:
        _require_finite("HalfDiskField parameter", self.radius, self.facing)
        if self.radius <= 0:
            raise ValueError(f"radius must be > 0, got {self.radius}")
        object.__setattr__(self, "facing", normalize_angle(self.facing))


@dataclass(frozen=True, slots=True)
class CircleField:
    center: Vec2
    radius: float

    def __post_init__(self) -> None:
        _require_finite("CircleField radius", self.radius)
        if self.radius <= 0:
            raise ValueError(f"radius must be > 0, got {self.radius}")


FieldShape = Union[EllipseField, HalfDiskField, CircleField]


@dataclass(frozen=True)
class ConvexPolygon:
    """Counter-clockwise convex polygon, or the designated empty polygon.

    Vertices are validated at construction: at least 3, CCW winding, and every
    turn convex up to CONVEX_TOL. Use ConvexPolygon.EMPTY (or zero vertices)
    for the empty region.
    """

    vertices: tuple[Vec2, ...]

    EMPTY: ClassVar[ConvexPolygon]

    def __post_init__(self) -> None:
        verts = tuple(self.vertices)
        object.__setattr__(self, "vertices", verts)
        if not verts:
            return
        if len(verts) < 3:
            raise ValueError(f"polygon needs >= 3 vertices or none, got {len(verts)}")
        n = len(verts)
        for i in range(n):
            ax, ay = verts[i].x, verts[i].y
            bx, by = verts[(i + 1) % n].x, verts[(i + 1) % n].y
            cx, cy = verts[(i + 2) % n].x, verts[(i + 2) % n].y
            cross = (bx - ax) * (cy - by) - (by - ay) * (cx - bx)
            if cross < -CONVEX_TOL:
                raise ValueError(f"polygon is not convex/CCW at vertex {i} (cross={cross})")
        if _shoelace(verts) <= 0:
            raise ValueError("polygon winding must be counter-clockwise")

    @property
    def is_empty(self) -> bool:
        return not self.vertices


ConvexPolygon.EMPTY = ConvexPolygon(())


def _shoelace(verts: tuple[Vec2, ...]) -> float:
    total = 0.0
    n = len(verts)
    for i in range(n):
        a = verts[i]
        b = verts[(i + 1) % n]
        total += a.x * b.y - b.x * a.y
    return 0.5 * total


def ellipse_axes(speed: float, k: float, c: float) -> tuple[float, float]:
    """Semi-axes of the user field for a given speed.

    The axis ratio grows linearly with speed (r_major/r_minor = k*speed + 1)
    while the product of the axes is pinned to the area constant c, so the
    field elongates without changing area. At speed 0 both axes are sqrt(c).
    """
    _require_finite("ellipse_axes argument", speed, k, c)
    if speed < 0:
        raise ValueError(f"speed must be >= 0, got {speed}")
    if k < 0:
        raise ValueError(f"dynamics coefficient must be >= 0, got {k}")
    if c <= 0:
        raise ValueError(f"area constant must be > 0, got {c}")
    ratio = k * speed + 1.0
    return math.sqrt(c * ratio), math.sqrt(c / ratio)


def to_polygon(shape: FieldShape, n: int) -> ConvexPolygon:
    """Inscribe a counter-clockwise n-gon in the shape boundary.

    Ellipse and circle use parameter-uniform boundary samples. The half disk
    places its two diameter endpoints exactly and spreads n-2 samples along
    the arc, keeping the flat edge bit-exact.
    """
    if n < 8:
        raise ValueError(f"polygonization needs n >= 8, got {n}")
    if isinstance(shape, CircleField):
        cx, cy, r = shape.center.x, shape.center.y, shape.radius
        step = math.tau / n
        pts = [Vec2(cx + r * math.cos(i * step), cy + r * math.sin(i * step)) for i in range(n)]
    elif isinstance(shape, EllipseField):
        cx, cy = shape.center.x, shape.center.y
        ch, sh = math.cos(shape.heading), math.sin(shape.heading)
        a, b = shape.r_major, shape.r_minor
        step = math.tau / n
        pts = []
        for i in range(n):
            u = a * math.cos(i * step)
            w = b * math.sin(i * step)
            pts.append(Vec2(cx + u * ch - w * sh, cy + u * sh + w * ch))
    elif isinstance(shape, HalfDiskField):
        cx, cy, r = shape.center.x, shape.center.y, shape.radius
        start = shape.facing - math.pi / 2.0
        step = math.pi / (n - 1)
        pts = [Vec2(cx + r * math.cos(start + i * step), cy + r * math.sin(start + i * step))
               for i in range(n)]
    else:
        raise TypeError(f"unsupported shape {type(shape).__name__}")
    return ConvexPolygon(tuple(pts))


def polygon_area(p: ConvexPolygon) -> float:
    """Shoelace area in square meters; 0 for the empty polygon."""
    if p.is_empty:
        return 0.0
    return _shoelace(p.vertices)


def convex_intersect(p: ConvexPolygon, q: ConvexPolygon) -> ConvexPolygon:
    """Intersection of two convex polygons (Sutherland-Hodgman clip).

    Both inputs must be convex, which makes the clip exact: the subject is cut
    against each directed edge of the clip polygon. Results with area below
    DEGENERATE_AREA collapse to the empty polygon.
    """
    if p.is_empty or q.is_empty:
        return ConvexPolygon.EMPTY
    output = [(v.x, v.y) for v in p.vertices]
    clip = [(v.x, v.y) for v in q.vertices]
    ax, ay = clip[-1]
    for bx, by in clip:
        if not output:
            return ConvexPolygon.EMPTY
        ex, ey = bx - ax, by - ay
        subject = output
        output = []
        sx, sy = subject[-1]
        s_side = ex * (sy - ay) - ey * (sx - ax)
        for vx, vy in subject:
            v_side = ex * (vy - ay) - ey * (vx - ax)
            if v_side >= 0.0:
                if s_side < 0.0:
                    t = s_side / (s_side - v_side)
                    output.append((sx + t * (vx - sx), sy + t * (vy - sy)))
                output.append((vx, vy))
            elif s_side >= 0.0:
                t = s_side / (s_side - v_side)
                output.append((sx + t * (vx - sx), sy + t * (vy - sy)))
            sx, sy, s_side = vx, vy, v_side
        ax, ay = bx, by
    cleaned = _dedupe(output)
    if len(cleaned) < 3:
        return ConvexPolygon.EMPTY
    verts = tuple(Vec2(x, y) for x, y in cleaned)
    if _shoelace(verts) < DEGENERATE_AREA:
        return ConvexPolygon.EMPTY
    return ConvexPolygon(verts)


def _dedupe(points: list[tuple[float, float]]) -> list[tuple[float, float]]:
    """Drop consecutive near-duplicate vertices (closing edge included)."""
    out: list[tuple[float, float]] = []
    for x, y in points:
        if out and abs(x - out[-1][0]) <= _DEDUPE_TOL and abs(y - out[-1][1]) <= _DEDUPE_TOL:
            continue
        out.append((x, y))
    while len(out) > 1 and (abs(out[0][0] - out[-1][0]) <= _DEDUPE_TOL
                            and abs(out[0][1] - out[-1][1]) <= _DEDUPE_TOL):
        out.pop()
    return out


def intersect_fields(a: FieldShape, b: FieldShape, n: int) -> ConvexPolygon:
    """Clipped overlap of two field shapes via their n-gon inscriptions.

    The clip order is canonicalized (polygons sorted by vertex tuples) so the
    result is identical under argument swap; iou() divides this polygon's area
    by the union of the same two inscriptions.
    """
    first, second = sorted(
        (to_polygon(a, n), to_polygon(b, n)),
        key=lambda p: tuple((v.x, v.y) for v in p.vertices),
    )
    return convex_intersect(first, second)


def iou(a: FieldShape, b: FieldShape, n: int) -> float:
    """Intersection over union of two field shapes via their n-gon inscriptions.

    Numerator and denominator come from the same polygons, so the ratio is
    exactly within [0, 1] and coincident shapes give exactly 1.
    """
    area_a = polygon_area(to_polygon(a, n))
    area_b = polygon_area(to_polygon(b, n))
    if area_a <= 0.0 or area_b <= 0.0:
        return 0.0
    inter = polygon_area(intersect_fields(a, b, n))
    union = area_a + area_b - inter
    if union <= 0.0:
        return 0.0
    return min(inter / union, 1.0)


def circle_circle_iou_analytic(c1: Vec2, r1: float, c2: Vec2, r2: float) -> float:
    """Exact IOU of two circles via the circular-lens formula (test oracle)."""
    if r1 <= 0 or r2 <= 0:
        raise ValueError("circle radii must be > 0")
    d = (c2 - c1).norm()
    if d >= r1 + r2:
        return 0.0
    if d <= abs(r1 - r2):
        small, big = min(r1, r2), max(r1, r2)
        return (small * small) / (big * big)
    d2 = d * d
    lens = (
        r1 * r1 * math.acos((d2 + r1 * r1 - r2 * r2) / (2.0 * d * r1))
        + r2 * r2 * math.acos((d2 + r2 * r2 - r1 * r1) / (2.0 * d * r2))
        - 0.5 * math.sqrt(
            (-d + r1 + r2) * (d + r1 - r2) * (d - r1 + r2) * (d + r1 + r2)
        )
    )
    union = math.pi * (r1 * r1 + r2 * r2) - lens
    return lens / union


def _bounding_box(shape: FieldShape) -> tuple[float, float, float, float]:
    if isinstance(shape, CircleField):
        c, r = shape.center, shape.radius
        return c.x - r, c.y - r, c.x + r, c.y + r
    if isinstance(shape, EllipseField):
        c = shape.center
        ch, sh = math.cos(shape.heading), math.sin(shape.heading)
        ex = math.hypot(shape.r_major * ch, shape.r_minor * sh)
        ey = math.hypot(shape.r_major * sh, shape.r_minor * ch)
        return c.x - ex, c.y - ey, c.x + ex, c.y + ey
    if isinstance(shape, HalfDiskField):
        # Conservative: full-disk box; membership tests cull the empty half.
        c, r = shape.center, shape.radius
        return c.x - r, c.y - r, c.x + r, c.y + r
    raise TypeError(f"unsupported shape {type(shape).__name__}")


def _contains(shape: FieldShape, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    """Vectorized exact membership test, independent of any polygonization."""
    if isinstance(shape, CircleField):
        dx = xs - shape.center.x
        dy = ys - shape.center.y
        return dx * dx + dy * dy <= shape.radius * shape.radius
    if isinstance(shape, EllipseField):
        dx = xs - shape.center.x
        dy = ys - shape.center.y
        ch, sh = math.cos(shape.heading), math.sin(shape.heading)
        u = (dx * ch + dy * sh) / shape.r_major
        w = (-dx * sh + dy * ch) / shape.r_minor
        return u * u + w * w <= 1.0
    if isinstance(shape, HalfDiskField):
        dx = xs - shape.center.x
        dy = ys - shape.center.y
        in_disk = dx * dx + dy * dy <= shape.radius * shape.radius
        forward = dx * math.cos(shape.facing) + dy * math.sin(shape.facing) >= 0.0
        return in_disk & forward
    raise TypeError(f"unsupported shape {type(shape).__name__}")


def mc_area_oracle(
    a: FieldShape, b: FieldShape, samples: int, seed: int
) -> tuple[float, float]:
    """Monte-Carlo IOU estimate with binomial standard error.

    Samples the joint bounding box uniformly and classifies points with exact
    membership tests, so the estimate is an oracle for iou() that shares none
    of its polygon machinery. Deterministic for a fixed seed.
    """
    if samples < 10_000:
        raise ValueError(f"need at least 1e4 samples, got {samples}")
    ax0, ay0, ax1, ay1 = _bounding_box(a)
    bx0, by0, bx1, by1 = _bounding_box(b)
    x0, y0 = min(ax0, bx0), min(ay0, by0)
    x1, y1 = max(ax1, bx1), max(ay1, by1)
    rng = np.random.default_rng(seed)
    xs = rng.uniform(x0, x1, samples)
    ys = rng.uniform(y0, y1, samples)
    in_a = _contains(a, xs, ys)
    in_b = _contains(b, xs, ys)
    n_union = int(np.count_nonzero(in_a | in_b))
    if n_union == 0:
        return 0.0, 0.0
    n_inter = int(np.count_nonzero(in_a & in_b))
    estimate = n_inter / n_union
    std_error = math.sqrt(estimate * (1.0 - estimate) / n_union)
    return estimate, std_error
