"""Mapping torus of a sphere automorphism with a reparametrized suspension flow.

Coordinates are (z, s) with s in [0, 1) and (z, 1) glued to (phi(z), 0).
The flow moves in the +s direction with speed ds/dt = h(s), which depends
on s only so that time-t maps send leaves to leaves.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import (
    NegativeSpeed,
    NotProjectivelyInvariant,
    NotTransverse,
    OrbitNotClosed,
    QuadratureNotConverged,
)
from .leafwise import EquivariantFamily, equivariance_residual
from .projective import MoebiusMap, PointCP1, RationalFunction

GRID = 4096
NEG_TOL = 1e-9
ZERO_TOL = 1e-10
EQUIVARIANCE_TOL = 1e-9
TWO_PI = 2 * math.pi


@dataclass(frozen=True)
class SpeedProfile:
    """h(s) = a0 + sum(cos_coeff cos 2 pi k s + sin_coeff sin 2 pi k s)."""

    a0: float
    terms: tuple = ()

    def __post_init__(self):
        terms = tuple((int(k), float(c), float(s)) for k, c, s in self.terms)
        if any(k <= 0 for k, _, _ in terms):
            raise ValueError("frequencies must be positive integers")
        object.__setattr__(self, "a0", float(self.a0))
        object.__setattr__(self, "terms", terms)

    @classmethod
    def constant(cls, value: float) -> SpeedProfile:
        return cls(value)

    def scaled(self, c: float) -> SpeedProfile:
        return SpeedProfile(self.a0 * c, tuple((k, a * c, b * c) for k, a, b in self.terms))

    def derivative(self, s, order: int = 1):
        """The ``order``-th derivative, vectorized over s."""
        s = np.asarray(s, dtype=float)
        out = np.full(s.shape, self.a0 if order == 0 else 0.0)
        shift = order * math.pi / 2
        for k, a, b in self.terms:
            w = TWO_PI * k
            x = w * s + shift
            out = out + w**order * (a * np.cos(x) + b * np.sin(x))
        return out

    def __call__(self, s):
        return self.derivative(s, 0)

    @cached_property
    def leaf_structure(self) -> LeafStructure:
        return transversality_check(self)


@dataclass(frozen=True)
class CompactLeafRecord:
    s_star: float
    zero_order: int


@dataclass(frozen=True)
class LeafStructure:
    """Outcome of the transversality check: empty ``compact_leaves`` means transverse."""

    compact_leaves: tuple = ()

    @property
    def is_transverse(self) -> bool:
        return not self.compact_leaves


def speed_eval(h: SpeedProfile, s: float) -> float:
    return float(h(s))


def _refine_minimum(h: SpeedProfile, lo: float, hi: float) -> float:
    dlo, dhi = float(h.derivative(lo)), float(h.derivative(hi))
    if dlo <= 0 <= dhi:
        while hi - lo > 1e-12:
            mid = 0.5 * (lo + hi)
            if h.derivative(mid) < 0:
                lo = mid
            else:
                hi = mid
        return 0.5 * (lo + hi)
    # no derivative bracket: golden-section search on h itself
    g = (math.sqrt(5) - 1) / 2
    a, b = lo, hi
    c, d = b - g * (b - a), a + g * (b - a)
    while b - a > 1e-12:
        if h(c) < h(d):
            b, d = d, c
            c = b - g * (b - a)
        else:
            a, c = c, d
            d = a + g * (b - a)
    return 0.5 * (a + b)


def _vanishing_order(h: SpeedProfile, s: float) -> int:
    for j in range(1, 9):
        scale = sum((TWO_PI * k) ** j * (abs(a) + abs(b)) for k, a, b in h.terms)
        if abs(float(h.derivative(s, j))) > 1e-7 * max(scale, 1e-300):
            return j
    return 9


def transversality_check(h: SpeedProfile, grid: int = GRID) -> LeafStructure:
    """Classify the flow as transverse or locate its compact leaves (zeros of h)."""
    if not h.terms or all(a == 0 and b == 0 for _, a, b in h.terms):
        if h.a0 > NEG_TOL:
            return LeafStructure()
        if h.a0 < -NEG_TOL:
            raise NegativeSpeed(f"constant speed {h.a0} is negative")
        raise NotTransverse("speed vanishes identically: every leaf would be compact")
    s = np.arange(grid) / grid
    v = h(s)
    if v.min() < -NEG_TOL:
        i = int(np.argmin(v))
        raise NegativeSpeed(f"h({s[i]:.6f}) = {v[i]:.3e} < 0")
    prev, nxt = np.roll(v, 1), np.roll(v, -1)
    minima = np.nonzero((v < prev) & (v <= nxt))[0]
    leaves: list[CompactLeafRecord] = []
    for i in minima:
        s_star = float(_refine_minimum(h, (i - 1) / grid, (i + 1) / grid) % 1.0)
        if s_star < 1e-11 or s_star > 1 - 1e-11:
            s_star = 0.0
        value = float(h(s_star))
        if value < -NEG_TOL:
            raise NegativeSpeed(f"h({s_star:.12f}) = {value:.3e} < 0")
        if abs(value) < ZERO_TOL:
            order = _vanishing_order(h, s_star)
            if order % 2:
                raise NegativeSpeed(
                    f"zero of odd order {order} at s = {s_star:.12f}: the flow reverses direction"
                )
            if not any(abs(l.s_star - s_star) < 1e-9 for l in leaves):
                leaves.append(CompactLeafRecord(s_star, order))
        elif value <= NEG_TOL:
            raise NotTransverse(f"speed nearly vanishes at s = {s_star:.12f} (h = {value:.3e})")
    return LeafStructure(tuple(sorted(leaves, key=lambda l: l.s_star)))


def base_return_time(h: SpeedProfile, tol: float = 1e-10, max_nodes: int = 2**16) -> float:
    """Flow time for one turn around the s-circle: the integral of 1/h over [0, 1]."""
    if not h.leaf_structure.is_transverse:
        raise NotTransverse("the flow has compact leaves; return times are infinite")
    n = 16
    value = float(np.mean(1.0 / h(np.arange(n) / n)))
    while n < max_nodes:
        n *= 2
        new = float(np.mean(1.0 / h(np.arange(n) / n)))
        if abs(new - value) < tol:
            return new
        value = new
    raise QuadratureNotConverged(f"return time not converged with {max_nodes} nodes")


def flow_return_time_ode(h: SpeedProfile, n: int, step: float = 1e-3) -> float:
    """Integrate ds/dt = h(s) with classical RK4 until s has advanced by n."""
    if not h.leaf_structure.is_transverse:
        raise NotTransverse("the flow has compact leaves; return times are infinite")
    if step > 1e-3:
        raise ValueError("step must be <= 1e-3")

    def f(s):
        return float(h(s))

    def rk4(s, dt):
        k1 = f(s)
        k2 = f(s + 0.5 * dt * k1)
        k3 = f(s + 0.5 * dt * k2)
        k4 = f(s + dt * k3)
        return s + dt * (k1 + 2 * k2 + 2 * k3 + k4) / 6

    target = float(n)
    t, s = 0.0, 0.0
    while True:
        s_next = rk4(s, step)
        if s_next >= target:
            break
        t, s = t + step, s_next
    # last partial step: solve rk4(s, tau) = target for tau by Newton
    tau = (target - s) / f(s)
    for _ in range(20):
        err = rk4(s, tau) - target
        tau -= err / f(target)
        if abs(err) < 1e-15:
            break
    return t + tau


def check_divisor_periodicity(phi: MoebiusMap, g: RationalFunction, n_max: int, tol: float) -> None:
    """Raise OrbitNotClosed if some zero or pole of g is not periodic under phi.

    Runs before the equivariance check: a non-periodic zero or pole is the
    more specific reason a function fails to descend to closed orbits.
    """
    from .orbits import primitive_period

    clusters = [(r, 1) for r, _ in g.zero_clusters] + [(r, -1) for r, _ in g.pole_clusters]
    for r, sign in clusters:
        p = PointCP1.from_complex(r)
        if primitive_period(phi, p, n_max, tol) is None:
            kind = "zero" if sign > 0 else "pole"
            raise OrbitNotClosed(f"{kind} at {p} not periodic under phi (n_max={n_max})")


@dataclass(frozen=True)
class Tolerances:
    winding_snap: float = 1e-6
    residual: float = 1e-9
    quadrature: float = 1e-10
    periodicity: float = 1e-9


@dataclass(frozen=True)
class MappingTorusScenario:
    """A complete instance: gluing map, flow speed, leafwise function, tolerances."""

    phi: MoebiusMap
    speed: SpeedProfile
    family: EquivariantFamily
    n_max: int = 64
    tolerances: Tolerances = field(default_factory=Tolerances)

    def __post_init__(self):
        if self.n_max < 1:
            raise ValueError("n_max must be >= 1")
        check_divisor_periodicity(self.phi, self.family.g, self.n_max, self.tolerances.periodicity)
        residual = equivariance_residual(self.family, self.phi, 64)
        if not residual < EQUIVARIANCE_TOL:
            raise NotProjectivelyInvariant(
                f"gluing residual {residual:.3e} exceeds {EQUIVARIANCE_TOL:g}: "
                "f does not descend to the mapping torus"
            )
        _ = self.speed.leaf_structure

    @property
    def leaf_structure(self) -> LeafStructure:
        return self.speed.leaf_structure

    @property
    def is_transverse(self) -> bool:
        return self.leaf_structure.is_transverse

    @cached_property
    def base_return_time(self) -> float:
        return base_return_time(self.speed, self.tolerances.quadrature)
