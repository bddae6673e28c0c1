"""Planar geometry helpers shared by the simulation and the renderers."""

from __future__ import annotations

import math
from dataclasses import dataclass

TWO_PI = 2.0 * math.pi


@dataclass
class Vec2:
    x: float
    y: float

    def copy(self) -> "Vec2":
        return Vec2(self.x, self.y)


def wrap_angle(theta: float) -> float:
    """Reduce an angle to the interval (-pi, pi]."""
    if not math.isfinite(theta):
        raise ValueError(f"non-finite angle: {theta!r}")
    wrapped = theta % TWO_PI  # in [0, 2*pi)
    if wrapped > math.pi:
        wrapped -= TWO_PI
    return wrapped


def distance(a: Vec2, b: Vec2) -> float:
    return math.hypot(a.x - b.x, a.y - b.y)


def bearing(origin: Vec2, to: Vec2) -> float:
    """Angle of the vector from `origin` to `to`, in (-pi, pi].

    Coincident points are a degenerate case and map to 0.
    """
    if origin.x == to.x and origin.y == to.y:
        return 0.0
    return wrap_angle(math.atan2(to.y - origin.y, to.x - origin.x))


def relative_angle(heading: float, target_bearing: float) -> float:
    """Signed angle the heading must rotate by to face the bearing."""
    return wrap_angle(target_bearing - heading)
