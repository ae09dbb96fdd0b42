"""Points, Moebius maps and rational functions on the Riemann sphere."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from numpy.polynomial import polynomial as P

from . import _poly
from .errors import (
    DegenerateMap,
    InvalidRationalFunction,
    MultiplicityAmbiguous,
    NotProjectivelyInvariant,
)

STANDARD = "standard"
INFINITY = "infinity"
_CHARTS = (STANDARD, INFINITY)

COPRIME_TOL = 1e-9
MAX_DIVISOR_DEGREE = 32


@dataclass(frozen=True)
class PointCP1:
    """A point of the sphere in one of two charts.

    ``value`` is ``z`` in the standard chart and ``w = 1/z`` in the infinity
    chart. Points are canonicalized so that the stored coordinate has modulus
    at most 1; ``PointCP1("infinity", 0)`` is the point at infinity.
    """

    chart: str
    value: complex

    def __post_init__(self):
        if self.chart not in _CHARTS:
            raise ValueError(f"unknown chart {self.chart!r}")
        v = complex(self.value)
        if not (math.isfinite(v.real) and math.isfinite(v.imag)):
            raise ValueError("chart coordinate must be finite")
        chart = self.chart
        if abs(v) > 1:
            chart = INFINITY if chart == STANDARD else STANDARD
            v = 1 / v
        object.__setattr__(self, "chart", chart)
        object.__setattr__(self, "value", v)

    @classmethod
    def from_complex(cls, z) -> PointCP1:
        z = complex(z)
        if cmath.isinf(z):
            return cls.infinity()
        return cls(STANDARD, z)

    @classmethod
    def from_ratio(cls, num, den) -> PointCP1:
        """The point ``num/den`` computed without overflow."""
        num, den = complex(num), complex(den)
        if num == 0 and den == 0:
            raise ArithmeticError("0/0 is not a point of the sphere")
        if abs(num) > abs(den):
            return cls(INFINITY, den / num)
        return cls(STANDARD, num / den)

    @classmethod
    def infinity(cls) -> PointCP1:
        return cls(INFINITY, 0j)

    @property
    def is_infinity(self) -> bool:
        return self.chart == INFINITY and self.value == 0

    def to_complex(self) -> complex:
        if self.chart == STANDARD:
            return self.value
        if self.value == 0:
            return complex(math.inf, 0.0)
        return 1 / self.value

    def in_chart(self, chart: str) -> complex | None:
        """Coordinate in ``chart``, or None if the point is that chart's missing point."""
        if chart == self.chart:
            return self.value
        if self.value == 0:
            return None
        return 1 / self.value

    def sort_key(self) -> tuple:
        if self.is_infinity:
            return (1, 0.0, 0.0)
        z = self.to_complex()
        return (0, round(z.real, 9), round(z.imag, 9))

    def __str__(self) -> str:
        if self.is_infinity:
            return "inf"
        return format_complex(self.to_complex())


def format_complex(z: complex) -> str:
    tiny = 1e-12 * max(1.0, abs(z))
    re = z.real if abs(z.real) > tiny else 0.0
    im = z.imag if abs(z.imag) > tiny else 0.0
    return f"{re:.10g}{im:+.10g}i"


def chordal_distance(p: PointCP1, q: PointCP1) -> float:
    """Chordal metric 2|z-w| / sqrt((1+|z|^2)(1+|w|^2)), continuous at infinity."""
    a, b = p.value, q.value
    denom = math.sqrt((1 + abs(a) ** 2) * (1 + abs(b) ** 2))
    if p.chart == q.chart:
        d = 2 * abs(a - b) / denom
    else:
        d = 2 * abs(a * b - 1) / denom
    return min(d, 2.0)


@dataclass(frozen=True)
class MoebiusMap:
    """z -> (az+b)/(cz+d), stored with determinant 1."""

    a: complex
    b: complex
    c: complex
    d: complex

    def __post_init__(self):
        a, b, c, d = (complex(x) for x in (self.a, self.b, self.c, self.d))
        det = a * d - b * c
        if abs(det) <= 1e-12:
            raise DegenerateMap(f"determinant {det} is (numerically) zero")
        if abs(det - 1) > 4 * _poly.EPS:
            r = cmath.sqrt(det)
            a, b, c, d = a / r, b / r, c / r, d / r
        for name, val in zip("abcd", (a, b, c, d)):
            object.__setattr__(self, name, val)

    @classmethod
    def identity(cls) -> MoebiusMap:
        return cls(1, 0, 0, 1)

    @classmethod
    def rotation(cls, angle: float) -> MoebiusMap:
        """z -> e^{i angle} z."""
        return cls(cmath.exp(1j * angle), 0, 0, 1)

    @classmethod
    def from_matrix(cls, m) -> MoebiusMap:
        m = np.asarray(m, dtype=complex)
        return cls(m[0, 0], m[0, 1], m[1, 0], m[1, 1])

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.c, self.d]], dtype=complex)

    def inverse(self) -> MoebiusMap:
        return MoebiusMap(self.d, -self.b, -self.c, self.a)

    def power(self, n: int) -> MoebiusMap:
        if n < 0:
            return self.inverse().power(-n)
        out = MoebiusMap.identity()
        for _ in range(n):
            out = moebius_compose(self, out)
        return out

    def __call__(self, p: PointCP1) -> PointCP1:
        return moebius_apply(self, p)


def moebius_apply(m: MoebiusMap, p: PointCP1) -> PointCP1:
    x = p.value
    if p.chart == STANDARD:
        num, den = m.a * x + m.b, m.c * x + m.d
    else:
        num, den = m.a + m.b * x, m.c + m.d * x
    return PointCP1.from_ratio(num, den)


def moebius_compose(m1: MoebiusMap, m2: MoebiusMap) -> MoebiusMap:
    """The map m1 after m2."""
    return MoebiusMap.from_matrix(m1.matrix @ m2.matrix)


def moebius_equal(m1: MoebiusMap, m2: MoebiusMap, tol: float = 1e-12) -> bool:
    """Equality as maps, i.e. of normalized matrices up to sign."""
    x, y = m1.matrix, m2.matrix
    return bool(np.max(np.abs(x - y)) < tol or np.max(np.abs(x + y)) < tol)


@dataclass(frozen=True)
class RationalFunction:
    """numerator/denominator with coefficient lists low degree first.

    The denominator is normalized to leading coefficient 1. Construction
    fails if numerator and denominator share a root.
    """

    numerator: tuple
    denominator: tuple = (1.0,)

    def __post_init__(self):
        num = _poly.trim(self.numerator)
        den = _poly.trim(self.denominator)
        if not np.any(num):
            raise InvalidRationalFunction("numerator is identically zero")
        if not np.any(den):
            raise InvalidRationalFunction("denominator is identically zero")
        lead = den[-1]
        if lead != 1:
            num, den = num / lead, den / lead
        object.__setattr__(self, "numerator", tuple(complex(x) for x in num))
        object.__setattr__(self, "denominator", tuple(complex(x) for x in den))
        for zr, _ in self.zero_clusters:
            for pr, _ in self.pole_clusters:
                if chordal_distance(PointCP1.from_complex(zr), PointCP1.from_complex(pr)) < COPRIME_TOL:
                    raise InvalidRationalFunction(
                        f"numerator and denominator share the root {format_complex(zr)}"
                    )

    @classmethod
    def constant(cls, value) -> RationalFunction:
        return cls((complex(value),), (1.0,))

    @classmethod
    def from_factors(cls, zeros=(), poles=(), scale=1.0) -> RationalFunction:
        """Build ``scale * prod (z-a)^m / prod (z-b)^k`` from (root, multiplicity) lists."""
        return cls(
            tuple(_poly.from_roots(list(zeros), scale)),
            tuple(_poly.from_roots(list(poles))),
        )

    @property
    def num(self) -> np.ndarray:
        return np.array(self.numerator, dtype=complex)

    @property
    def den(self) -> np.ndarray:
        return np.array(self.denominator, dtype=complex)

    @property
    def deg_num(self) -> int:
        return len(self.numerator) - 1

    @property
    def deg_den(self) -> int:
        return len(self.denominator) - 1

    @property
    def is_constant(self) -> bool:
        return self.deg_num == 0 and self.deg_den == 0

    @property
    def order_at_infinity(self) -> int:
        return self.deg_den - self.deg_num

    @cached_property
    def zero_clusters(self) -> list[tuple[complex, int]]:
        return _poly.root_clusters(self.numerator)

    @cached_property
    def pole_clusters(self) -> list[tuple[complex, int]]:
        return _poly.root_clusters(self.denominator)

    def raw_divisor_points(self) -> list[PointCP1]:
        """Zero and pole locations (including infinity) without winding confirmation."""
        pts = [PointCP1.from_complex(r) for r, _ in self.zero_clusters + self.pole_clusters]
        if self.order_at_infinity != 0:
            pts.append(PointCP1.infinity())
        return pts

    @cached_property
    def divisor(self) -> tuple[tuple[PointCP1, int], ...]:
        return _confirmed_divisor(self)

    def scaled(self, factor) -> RationalFunction:
        return RationalFunction(tuple(self.num * complex(factor)), self.denominator)

    def __call__(self, z):
        """Evaluate at finite complex arguments (scalar or array)."""
        return _poly.polyval(self.num, z) / _poly.polyval(self.den, z)


def rat_eval(f: RationalFunction, p: PointCP1) -> PointCP1:
    x = p.value
    if p.chart == STANDARD:
        n = _poly.polyval(f.num, x)
        d = _poly.polyval(f.den, x)
    else:
        top = max(f.deg_num, f.deg_den)
        n = x ** (top - f.deg_num) * _poly.polyval(f.num[::-1], x)
        d = x ** (top - f.deg_den) * _poly.polyval(f.den[::-1], x)
    return PointCP1.from_ratio(n, d)


def rat_derivative(f: RationalFunction) -> RationalFunction:
    """Quotient-rule derivative, reduced so the result stays coprime."""
    if f.is_constant:
        raise InvalidRationalFunction("the derivative of a constant is identically zero")
    p, q = f.num, f.den
    dp = _poly.polyder(p)
    if all(m == 1 for _, m in f.pole_clusters):
        num = P.polysub(P.polymul(dp, q), P.polymul(p, _poly.polyder(q)))
        den = P.polymul(q, q)
    else:
        # q'/q = t/s with s the square-free part of q; then f' = (p's - pt)/(qs).
        roots = f.pole_clusters
        s = _poly.from_roots([(r, 1) for r, _ in roots])
        t = np.zeros(1, dtype=complex)
        for i, (_, m) in enumerate(roots):
            others = _poly.from_roots([(r, 1) for j, (r, _) in enumerate(roots) if j != i])
            t = P.polyadd(t, m * others)
        num = P.polysub(P.polymul(dp, s), P.polymul(p, t))
        den = P.polymul(q, s)
    return RationalFunction(tuple(num), tuple(den))


def _chart_radius_for(point: PointCP1, others: list[PointCP1]) -> float:
    gaps = []
    for o in others:
        c = o.in_chart(point.chart)
        if c is not None:
            gaps.append(abs(c - point.value))
    return min([0.5] + [0.25 * g for g in gaps])


def _confirmed_divisor(f: RationalFunction) -> tuple[tuple[PointCP1, int], ...]:
    from .winding import winding_order

    if max(f.deg_num, f.deg_den) > MAX_DIVISOR_DEGREE:
        raise ValueError(f"divisor computation supports degree <= {MAX_DIVISOR_DEGREE}")
    entries = [(PointCP1.from_complex(r), m) for r, m in f.zero_clusters]
    entries += [(PointCP1.from_complex(r), -m) for r, m in f.pole_clusters]
    entries = _merge_chordal(entries)
    ordered = sorted((e for e in entries if e[1] > 0), key=lambda e: e[0].sort_key())
    ordered += sorted((e for e in entries if e[1] < 0), key=lambda e: e[0].sort_key())
    if f.order_at_infinity != 0:
        ordered.append((PointCP1.infinity(), f.order_at_infinity))
    points = [p for p, _ in ordered]
    for i, (p, order) in enumerate(ordered):
        radius = _chart_radius_for(p, points[:i] + points[i + 1:])
        w = winding_order(f, p, radius)
        if w != order:
            raise MultiplicityAmbiguous(
                f"clustered order {order} at {p} but winding integral gives {w}"
            )
    return tuple(ordered)


def _merge_chordal(entries: list[tuple[PointCP1, int]]) -> list[tuple[PointCP1, int]]:
    out: list[tuple[PointCP1, int]] = []
    for p, m in entries:
        for i, (q, k) in enumerate(out):
            if (m > 0) == (k > 0) and chordal_distance(p, q) < _poly.CLUSTER_TOL:
                out[i] = (q, k + m)
                break
        else:
            out.append((p, m))
    return out


def rat_divisor(f: RationalFunction) -> list[tuple[PointCP1, int]]:
    """Zeros (positive orders) and poles (negative orders), including infinity."""
    return list(f.divisor)


def divisor_degree_check(f: RationalFunction) -> int:
    return sum(order for _, order in rat_divisor(f))


def min_divisor_gap(f: RationalFunction) -> float:
    """Smallest chordal distance between distinct divisor points (2 if fewer than two)."""
    pts = f.raw_divisor_points()
    gap = 2.0
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            gap = min(gap, chordal_distance(pts[i], pts[j]))
    return gap


def _sample_points(count: int):
    golden = (math.sqrt(5) - 1) / 2
    k = 0
    while True:
        r = 0.3 + 1.4 * ((k * math.sqrt(2)) % 1.0)
        theta = 2 * math.pi * ((k * golden) % 1.0) + 0.1
        yield PointCP1.from_complex(r * cmath.exp(1j * theta))
        k += 1


def _finite_value(f: RationalFunction, p: PointCP1) -> complex:
    return rat_eval(f, p).to_complex()


def invariance_multiplier(g: RationalFunction, phi: MoebiusMap, samples: int = 32) -> complex:
    """The constant mu with g(phi(z)) = mu * g(z), validated at ``samples`` points."""
    if samples < 8:
        raise ValueError("samples must be >= 8")
    divisor = g.raw_divisor_points()

    def clear(p):
        return all(chordal_distance(p, d) > 1e-3 for d in divisor)

    points = []
    for p in _sample_points(samples):
        if len(points) == samples:
            break
        q = moebius_apply(phi, p)
        if clear(p) and clear(q):
            points.append((p, q))
    mu = None
    for p, q in points:
        gz, gphi = _finite_value(g, p), _finite_value(g, q)
        if mu is None:
            mu = gphi / gz
        if abs(gphi - mu * gz) / max(1.0, abs(gz)) >= 1e-9:
            raise NotProjectivelyInvariant(
                f"g(phi(z)) != mu*g(z) at z = {p} (mu = {format_complex(mu)})"
            )
    return complex(mu)
