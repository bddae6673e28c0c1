import math

import pytest

from jetrl.geom import Vec2, bearing, distance, relative_angle, wrap_angle


def test_wrap_identity():
    assert wrap_angle(0.0) == 0.0


def test_wrap_modular_cases():
    assert wrap_angle(3 * math.pi) == pytest.approx(math.pi)
    assert wrap_angle(-3 * math.pi / 2) == pytest.approx(math.pi / 2)
    assert wrap_angle(math.pi) == pytest.approx(math.pi)       # pi stays pi
    assert wrap_angle(-math.pi) == pytest.approx(math.pi)      # -pi maps to pi


def test_wrap_range_property():
    for k in range(-50, 50):
        theta = 0.137 * k
        w = wrap_angle(theta)
        assert -math.pi < w <= math.pi
        assert math.isclose(math.cos(w), math.cos(theta), abs_tol=1e-12)
        assert math.isclose(math.sin(w), math.sin(theta), abs_tol=1e-12)


def test_wrap_rejects_non_finite():
    with pytest.raises(ValueError):
        wrap_angle(float("nan"))
    with pytest.raises(ValueError):
        wrap_angle(float("inf"))


def test_distance():
    assert distance(Vec2(0, 0), Vec2(3, 4)) == 5.0
    assert distance(Vec2(1, 1), Vec2(1, 1)) == 0.0
    assert distance(Vec2(-2, 0), Vec2(1, 0)) == 3.0


def test_bearing_axes():
    assert bearing(Vec2(0, 0), Vec2(1, 0)) == pytest.approx(0.0)
    assert bearing(Vec2(0, 0), Vec2(0, 1)) == pytest.approx(math.pi / 2)
    assert bearing(Vec2(0, 0), Vec2(-1, 0)) == pytest.approx(math.pi)


def test_bearing_coincident_degenerate():
    assert bearing(Vec2(2, 3), Vec2(2, 3)) == 0.0


def test_relative_angle():
    assert relative_angle(0.0, math.pi / 2) == pytest.approx(math.pi / 2)
    assert relative_angle(math.pi / 2, math.pi / 2) == 0.0
    # wrap(-3pi/4 - 3pi/4) = wrap(-3pi/2) = pi/2
    assert relative_angle(3 * math.pi / 4, -3 * math.pi / 4) == pytest.approx(math.pi / 2)
