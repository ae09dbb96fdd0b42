"""The 2-form eta = (1/f) d_F f ^ omega and its integrals.

In mapping-torus coordinates omega = ds / h(s) and d_F f / f = (g'/g) dz on
every leaf, so the pullback of eta along (u, v) -> (z, s) has density

    (g'(z)/g(z)) * (z_u s_v - z_v s_u) / h(s).

A surface is oriented by its parameters (u, v) in that order. The boundary
of a tube around a closed orbit, oriented as the boundary of the tube in M
(leaf orientation followed by flow direction), is the patch with u the
angle around the orbit and v the flow coordinate.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    InvalidPatch,
    NotTransverseAtPoint,
    QuadratureNotConverged,
    TooCloseToDivisor,
)
from .manifold import MappingTorusScenario
from .orbits import ClosedOrbitRecord, default_tube_radius, find_singular_orbits
from .projective import STANDARD, PointCP1, chordal_distance
from .winding import contour_integral, log_derivative

TWO_PI = 2 * math.pi
DIVISOR_CLEARANCE = 1e-6
SURFACE_TOL = 1e-9
SURFACE_START = 16
SURFACE_CAP = 2**10


class Method(str, enum.Enum):
    ARGUMENT_PRINCIPLE = "A"
    SURFACE_QUADRATURE = "B"


@dataclass(frozen=True)
class TubeSpec:
    orbit: ClosedOrbitRecord
    radius: float


@dataclass(frozen=True)
class SurfacePatch:
    """A doubly periodic parametrized surface (u, v) in [0, 1)^2 -> (z, s).

    z = sum c * exp(2 pi i (j u + k v)) over ``z_terms`` (j, k, c), in ``chart``;
    s = s0 + wu*u + wv*v + Re sum d * exp(2 pi i (j u + k v)) over ``s_terms``.
    """

    z_terms: tuple
    s0: float = 0.0
    s_winding: tuple = (0, 0)
    s_terms: tuple = ()
    chart: str = STANDARD

    def __post_init__(self):
        object.__setattr__(self, "z_terms", tuple((int(j), int(k), complex(c)) for j, k, c in self.z_terms))
        object.__setattr__(self, "s_terms", tuple((int(j), int(k), complex(c)) for j, k, c in self.s_terms))
        object.__setattr__(self, "s_winding", tuple(int(w) for w in self.s_winding))
        object.__setattr__(self, "s0", float(self.s0))

    def evaluate(self, u, v):
        """z, s and the four partial derivatives on arrays u, v."""
        z = np.zeros(np.broadcast(u, v).shape, dtype=complex)
        z_u = np.zeros_like(z)
        z_v = np.zeros_like(z)
        for j, k, c in self.z_terms:
            e = c * np.exp(2j * np.pi * (j * u + k * v))
            z = z + e
            z_u = z_u + 2j * np.pi * j * e
            z_v = z_v + 2j * np.pi * k * e
        wu, wv = self.s_winding
        s = self.s0 + wu * u + wv * v + np.zeros(z.shape)
        s_u = np.full(z.shape, float(wu))
        s_v = np.full(z.shape, float(wv))
        for j, k, d in self.s_terms:
            e = d * np.exp(2j * np.pi * (j * u + k * v))
            s = s + e.real
            s_u = s_u + (2j * np.pi * j * e).real
            s_v = s_v + (2j * np.pi * k * e).real
        return z, s, z_u, z_v, s_u, s_v


def tube_patch(center: PointCP1, radius: float, aspect: float = 1.0, s0: float = 0.0) -> SurfacePatch:
    """Boundary of a tube around the vertical line through ``center``.

    ``aspect`` != 1 squashes the cross-section into an ellipse with that
    axis ratio (same area orientation).
    """
    a = radius * (1 + 1 / aspect) / 2
    b = radius * (1 - 1 / aspect) / 2
    terms = [(0, 0, center.value), (1, 0, a)]
    if b:
        terms.append((-1, 0, b))
    return SurfacePatch(tuple(terms), s0=s0, s_winding=(0, 1), chart=center.chart)


def torus_patch(center: PointCP1, radius: float, s_mid: float, s_amp: float) -> SurfacePatch:
    """A torus that does not wind around the s-circle: a circle swept up and down in s."""
    return SurfacePatch(
        ((0, 0, center.value), (1, 0, radius)),
        s0=s_mid,
        s_terms=((0, 1, s_amp),),
        chart=center.chart,
    )


def leaf_patch(s: float, center: complex = 0j, r1: float = 0.5, r2: float = 0.2) -> SurfacePatch:
    """A (degenerate) torus lying inside the leaf at height s."""
    return SurfacePatch(((0, 0, center), (1, 0, r1), (0, 1, r2)), s0=s)


def _density(scenario: MappingTorusScenario, z, s, z_u, z_v, s_u, s_v, chart):
    jac = z_u * s_v - z_v * s_u
    h = scenario.speed(np.mod(s, 1.0))
    out = np.zeros(np.shape(jac), dtype=complex)
    live = jac != 0
    if np.any(live & (h <= 0)):
        raise NotTransverseAtPoint("the patch meets a compact leaf where omega is undefined")
    if np.any(live):
        g = scenario.family.g
        if g.is_constant:
            return out
        out[live] = log_derivative(g, z[live], chart) * jac[live] / h[live]
    return out


def eta_pullback(scenario: MappingTorusScenario, z, s, z_u, z_v, s_u, s_v, chart: str = STANDARD) -> complex:
    """Density of the pullback of eta for a single tangent frame at (z, s)."""
    g = scenario.family.g
    p = PointCP1(chart, z)
    for d in g.raw_divisor_points():
        if chordal_distance(p, d) <= 1e-7:
            raise TooCloseToDivisor(f"{p} is within 1e-7 of the divisor point {d}")
    args = [np.array([x]) for x in (z, s, z_u, z_v, s_u, s_v)]
    return complex(_density(scenario, *args, chart)[0])


def tube_boundary_integral(scenario: MappingTorusScenario, tube: TubeSpec) -> complex:
    """Integral of eta over the tube boundary in factorized form.

    Each of the n circles of the tube contributes (integral of ds/h) times
    the contour integral of (g'/g) dz.
    """
    _validate_tube(scenario, tube)
    t1 = scenario.base_return_time
    g = scenario.family.g
    total = 0j
    for p in tube.orbit.points:
        raw, _ = contour_integral(g, p, tube.radius)
        total += t1 * 2j * np.pi * raw
    return total


def _validate_tube(scenario: MappingTorusScenario, tube: TubeSpec) -> None:
    if tube.radius <= 0:
        raise InvalidPatch("tube radius must be positive")
    pts = tube.orbit.points
    for i, p in enumerate(pts):
        for d in scenario.family.g.raw_divisor_points():
            x = d.in_chart(p.chart)
            if x is None or chordal_distance(d, p) < 1e-7:
                continue
            if abs(x - p.value) <= tube.radius:
                raise InvalidPatch(f"tube disc around {p} contains the divisor point {d}")
        for q in pts[i + 1:]:
            x = q.in_chart(p.chart)
            if x is not None and abs(x - p.value) <= 2 * tube.radius:
                raise InvalidPatch(f"tube discs around {p} and {q} overlap")


def validate_patch(scenario: MappingTorusScenario, patch: SurfacePatch, samples: int = 128) -> None:
    u, v = np.meshgrid(np.arange(samples) / samples, np.arange(samples) / samples, indexing="ij")
    z, s, z_u, z_v, s_u, s_v = patch.evaluate(u, v)
    divisor = scenario.family.g.raw_divisor_points()
    for d in divisor:
        x = d.in_chart(patch.chart)
        if x is None:
            # the chart's missing point: |z| large in the other chart
            dist = 2 / np.sqrt(1 + np.abs(z) ** 2)
        else:
            dist = 2 * np.abs(z - x) / np.sqrt((1 + np.abs(z) ** 2) * (1 + abs(x) ** 2))
        if np.min(dist) <= DIVISOR_CLEARANCE:
            raise InvalidPatch(f"patch passes within {DIVISOR_CLEARANCE:g} of the divisor point {d}")
    live = (z_u * s_v - z_v * s_u) != 0
    if np.any(live & (scenario.speed(np.mod(s, 1.0)) <= 1e-9)):
        raise InvalidPatch("patch leaves the transverse region")


def surface_integral_eta(scenario: MappingTorusScenario, patch: SurfacePatch,
                         tol: float = SURFACE_TOL) -> complex:
    """Double trapezoid quadrature of the eta pullback over the unit square."""
    validate_patch(scenario, patch)

    def integrate(n):
        grid = np.arange(n) / n
        u, v = np.meshgrid(grid, grid, indexing="ij")
        z, s, z_u, z_v, s_u, s_v = patch.evaluate(u, v)
        return complex(np.mean(_density(scenario, z, s, z_u, z_v, s_u, s_v, patch.chart)))

    n = SURFACE_START
    value = integrate(n)
    while n < SURFACE_CAP:
        n *= 2
        new = integrate(n)
        if abs(new - value) < tol:
            return new
        value = new
    raise QuadratureNotConverged(f"surface integral not converged at {SURFACE_CAP} nodes per axis")


def _loop_winding(z: np.ndarray, x: complex) -> int:
    w = np.angle(np.roll(z, -1) - x) - np.angle(z - x)
    w = (w + np.pi) % (2 * np.pi) - np.pi
    return int(round(w.sum() / (2 * np.pi)))


def stokes_residual(scenario: MappingTorusScenario, patch: SurfacePatch) -> float:
    """|integral of eta| over a patch bounding a region free of zeros and poles."""
    n = 256
    grid = np.arange(n) / n
    u_loop = patch.evaluate(grid, 0.0 * grid)[0]
    v_loop = patch.evaluate(0.0 * grid, grid)[0]
    for orbit in find_singular_orbits(scenario) if scenario.is_transverse else []:
        for p in orbit.points:
            x = p.in_chart(patch.chart)
            if x is None:
                continue
            if _loop_winding(u_loop, x) or _loop_winding(v_loop, x):
                raise InvalidPatch(f"patch encloses the singular orbit through {p}")
    return abs(surface_integral_eta(scenario, patch))


def orbit_tube_patches(orbit: ClosedOrbitRecord, radius: float) -> list[SurfacePatch]:
    return [tube_patch(p, radius) for p in orbit.points]


def orbit_surface_integral(scenario: MappingTorusScenario, orbit: ClosedOrbitRecord,
                           radius: float | None = None) -> complex:
    """The tube-boundary integral by raw surface quadrature, one cylinder per orbit point."""
    r = default_tube_radius(scenario.family.g) if radius is None else radius
    return sum((surface_integral_eta(scenario, patch) for patch in orbit_tube_patches(orbit, r)), 0j)


def leaf_boundary_patches(scenario: MappingTorusScenario, width: float = 0.05) -> list[tuple[int, SurfacePatch]]:
    """(sign, patch) pairs for the two boundary leaves of each compact-leaf tube."""
    out = []
    for leaf in scenario.leaf_structure.compact_leaves:
        out.append((1, leaf_patch(leaf.s_star + width)))
        out.append((-1, leaf_patch(leaf.s_star - width)))
    return out


def compact_leaf_terms(scenario: MappingTorusScenario, width: float = 0.05) -> list[complex]:
    """(1/2 pi i) times the integral of eta over each compact leaf's tube boundary."""
    terms = []
    leaves = scenario.leaf_structure.compact_leaves
    patches = leaf_boundary_patches(scenario, width)
    for j in range(len(leaves)):
        total = 0j
        for sign, patch in patches[2 * j: 2 * j + 2]:
            total += sign * surface_integral_eta(scenario, patch)
        terms.append(total / (2j * np.pi))
    return terms


def boundary_balance(scenario: MappingTorusScenario, partition=None) -> float:
    """Residual of: sum over orbits of l * ord + sum over compact leaves of (1/2 pi i) * boundary integral.

    ``partition`` maps orbit index (in sorted orbit order) to a Method; orbits
    not listed use the argument principle (exact l * ord).
    """
    partition = _normalize_partition(partition)
    orbits = find_singular_orbits(scenario)
    total = 0j
    for i, orbit in enumerate(orbits):
        method = partition.get(i, Method.ARGUMENT_PRINCIPLE)
        if method is Method.ARGUMENT_PRINCIPLE:
            total += orbit.length_l * orbit.order
        else:
            total += orbit_surface_integral(scenario, orbit) / (2j * np.pi)
    for term in compact_leaf_terms(scenario):
        total += term
    return abs(total)


def _normalize_partition(partition) -> dict[int, Method]:
    if partition is None:
        return {}
    if isinstance(partition, dict):
        return {int(k): Method(v) for k, v in partition.items()}
    return {i: Method(v) for i, v in enumerate(partition)}
