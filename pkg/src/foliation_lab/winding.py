"""Argument-principle integrals of f'/f over circles in either sphere chart."""

from __future__ import annotations

import math
from typing import TYPE_CHECKING

import numpy as np

from . import _poly
from .errors import ContourThroughSingularity, NoDivisor, NotNearInteger
from .projective import STANDARD, PointCP1, RationalFunction

if TYPE_CHECKING:
    from .manifold import MappingTorusScenario
    from .orbits import ClosedOrbitRecord

WINDING_SNAP = 1e-6
QUAD_TOL = 1e-10
START_NODES = 64
MAX_NODES = 2**14
GUARD = 1e-7
MAX_HALVINGS = 8


def chart_polynomials(f: RationalFunction, chart: str):
    """(num, den, k) with f = x^k * num(x)/den(x) in the coordinate x of ``chart``."""
    if chart == STANDARD:
        return f.num, f.den, 0
    return f.num[::-1], f.den[::-1], f.deg_den - f.deg_num


def log_derivative(f: RationalFunction, x, chart: str = STANDARD):
    """d/dx log f in the given chart; vectorized over ``x``."""
    num, den, k = chart_polynomials(f, chart)
    x = np.asarray(x, dtype=complex)
    out = _poly.polyval(_poly.polyder(num), x) / _poly.polyval(num, x)
    out = out - _poly.polyval(_poly.polyder(den), x) / _poly.polyval(den, x)
    if k:
        out = out + k / x
    return out


def _contour(center: PointCP1, radius: float, aspect: float, theta):
    """Points z(theta) and z'(theta)/i of a positively oriented circle or ellipse."""
    c, s = np.cos(theta), np.sin(theta)
    z = center.value + radius * (c + 1j * s / aspect)
    dz_over_i = radius * (c / aspect + 1j * s)
    return z, dz_over_i


def _intrudes(f: RationalFunction, center: PointCP1, radius: float, aspect: float) -> bool:
    if aspect != 1:
        ring, _ = _contour(center, radius, aspect, np.linspace(0, 2 * np.pi, 4096, endpoint=False))
    for p in f.raw_divisor_points():
        x = p.in_chart(center.chart)
        if x is None:
            continue
        if aspect == 1:
            if abs(abs(x - center.value) - radius) < GUARD:
                return True
        elif np.min(np.abs(ring - x)) < GUARD + radius * 2e-3:
            return True
    return False


def contour_integral(f: RationalFunction, center: PointCP1, radius: float,
                     tol: float = QUAD_TOL, aspect: float = 1.0) -> tuple[complex, float]:
    """Raw (1/2 pi i) * contour integral of f'/f and the radius actually used.

    The radius is halved (at most 8 times) while a zero or pole of ``f`` lies
    within the guard band of the circle. Trapezoid nodes double from 64 until
    successive values agree to ``tol`` or the node cap is reached.
    ``aspect`` > 1 squashes the circle into an ellipse with that axis ratio.
    """
    if radius <= 0:
        raise ValueError("radius must be positive")
    r = radius
    for _ in range(MAX_HALVINGS + 1):
        if not _intrudes(f, center, r, aspect):
            break
        r /= 2
    else:
        raise ContourThroughSingularity(
            f"no admissible radius around {center} starting from {radius}"
        )

    def nodes_sum(n, offset):
        theta = 2 * math.pi * (np.arange(n) + offset) / n
        z, dz = _contour(center, r, aspect, theta)
        return complex(np.sum(log_derivative(f, z, center.chart) * dz))

    n = START_NODES
    total = nodes_sum(n, 0.0)
    value = total / n
    while n < MAX_NODES:
        total += nodes_sum(n, 0.5)
        n *= 2
        new = total / n
        if abs(new - value) < tol:
            return new, r
        value = new
    return value, r


def winding_order(f: RationalFunction, center: PointCP1, radius: float,
                  snap: float = WINDING_SNAP, aspect: float = 1.0) -> int:
    """Zeros minus poles of ``f`` (with multiplicity) inside the circle."""
    raw, _ = contour_integral(f, center, radius, aspect=aspect)
    k = round(raw.real)
    if abs(raw - k) >= snap:
        raise NotNearInteger(f"winding integral {raw} is not within {snap} of an integer")
    return int(k)


def order_constancy_profile(scenario: MappingTorusScenario, orbit: ClosedOrbitRecord,
                            m: int = 8) -> list[int]:
    """Orders of the leaf function at the orbit's point on each leaf s = j/m."""
    from .orbits import default_tube_radius

    if m < 2:
        raise ValueError("m must be >= 2")
    family = scenario.family
    if not family.g.raw_divisor_points():
        raise NoDivisor("the leaf function has no zeros or poles")
    radius = default_tube_radius(family.g)
    snap = scenario.tolerances.winding_snap
    profile = []
    for j in range(m):
        leaf = family.leaf_function(j / m)
        point = orbit.points[j % orbit.period_n]
        profile.append(winding_order(leaf, point, radius, snap=snap))
    return profile
