"""Leafwise meromorphic functions f(z, s) = mu^s * q(s) * g(z) on a mapping torus."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as P

from .errors import TooCloseToDivisor
from .projective import (
    INFINITY,
    MoebiusMap,
    PointCP1,
    RationalFunction,
    chordal_distance,
    invariance_multiplier,
    moebius_apply,
    rat_eval,
)

_SEED = 0x5EED


@dataclass(frozen=True)
class EquivariantFamily:
    """A rational function g with g(phi z) = mu g(z), twisted by a leafwise constant.

    ``twist`` holds (k, coeff) pairs defining the periodic factor
    q(s) = exp(sum coeff * e^{2 pi i k s}).
    """

    g: RationalFunction
    mu: complex = 1.0
    twist: tuple = ()

    def __post_init__(self):
        mu = complex(self.mu)
        if mu == 0:
            raise ValueError("mu must be nonzero")
        object.__setattr__(self, "mu", mu)
        twist = tuple((int(k), complex(c)) for k, c in self.twist)
        if any(k <= 0 for k, _ in twist):
            raise ValueError("twist frequencies must be positive integers")
        object.__setattr__(self, "twist", twist)

    @classmethod
    def for_map(cls, g: RationalFunction, phi: MoebiusMap, twist=()) -> EquivariantFamily:
        return cls(g, invariance_multiplier(g, phi), twist)

    @property
    def log_mu(self) -> complex:
        return cmath.log(self.mu)

    def twist_value(self, s: float) -> complex:
        expo = sum(c * cmath.exp(2j * math.pi * k * s) for k, c in self.twist)
        return cmath.exp(expo)

    def leaf_factor(self, s: float) -> complex:
        """The constant q(s) * mu^s multiplying g on the leaf s."""
        return self.twist_value(s) * cmath.exp(s * self.log_mu)

    def leaf_function(self, s: float) -> RationalFunction:
        return self.g.scaled(self.leaf_factor(s))


def _scale_point(p: PointCP1, lam: complex) -> PointCP1:
    if p.chart == INFINITY:
        return PointCP1(INFINITY, p.value / lam)
    return PointCP1.from_complex(p.value * lam)


def family_eval(F: EquivariantFamily, z: PointCP1, s: float) -> PointCP1:
    return _scale_point(rat_eval(F.g, z), F.leaf_factor(s))


def equivariance_residual(F: EquivariantFamily, phi: MoebiusMap, samples: int = 64) -> float:
    """Max chordal gap between f(z, s+1) and f(phi z, s) over random samples."""
    if samples < 16:
        raise ValueError("samples must be >= 16")
    rng = np.random.default_rng(_SEED)
    zs = rng.normal(size=samples) + 1j * rng.normal(size=samples)
    ss = rng.uniform(size=samples)
    worst = 0.0
    for z, s in zip(zs, ss):
        p = PointCP1.from_complex(complex(z))
        lhs = family_eval(F, p, float(s) + 1)
        rhs = family_eval(F, moebius_apply(phi, p), float(s))
        worst = max(worst, chordal_distance(lhs, rhs))
    return worst


def leafwise_log_derivative(F: EquivariantFamily, z: complex, s: float) -> complex:
    """(d_F f / f) at (z, s); equals g'(z)/g(z) for every leaf."""
    p = PointCP1.from_complex(z)
    for d in F.g.raw_divisor_points():
        if chordal_distance(p, d) <= 1e-7:
            raise TooCloseToDivisor(f"{p} is within 1e-7 of the divisor point {d}")
    num, den = F.g.num, F.g.den
    gz = P.polyval(z, num) / P.polyval(z, den)
    dq = P.polyval(z, den)
    dg = (P.polyval(z, P.polyder(num)) * dq - P.polyval(z, num) * P.polyval(z, P.polyder(den))) / dq**2
    values = []
    for s_k in (s, s + 1 / 3, s + 0.5):
        lam = F.leaf_factor(s_k)
        values.append(complex((lam * dg) / (lam * gz)))
    ref = values[0]
    for v in values[1:]:
        if abs(v - ref) > 1e-12 * max(1.0, abs(ref)):
            raise ArithmeticError("leafwise log derivative depends on the leaf")
    return ref
