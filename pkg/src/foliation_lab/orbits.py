"""Closed flow orbits through the zeros and poles of the leafwise function."""

from __future__ import annotations

from dataclasses import dataclass

from . import _poly
from .errors import InconsistentOrders, OrbitNotClosed
from .manifold import MappingTorusScenario, SpeedProfile, base_return_time
from .projective import (
    MoebiusMap,
    PointCP1,
    RationalFunction,
    chordal_distance,
    min_divisor_gap,
    moebius_apply,
    rat_divisor,
)


@dataclass(frozen=True)
class ClosedOrbitRecord:
    """A closed orbit meeting the leaf s = 0 in ``points`` (x, phi x, ...)."""

    points: tuple
    period_n: int
    length_l: float
    order: int

    @property
    def base_point(self) -> PointCP1:
        return self.points[0]


def primitive_period(phi: MoebiusMap, p: PointCP1, n_max: int = 64, tol: float = 1e-9) -> int | None:
    """Smallest n <= n_max with phi^n(p) = p, or None if p is not periodic."""
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    q = p
    for n in range(1, n_max + 1):
        q = moebius_apply(phi, q)
        if chordal_distance(q, p) < tol:
            return n
    return None


def orbit_length(n: int, h: SpeedProfile) -> float:
    return n * base_return_time(h)


def default_tube_radius(g: RationalFunction) -> float:
    """Chart radius for tubes and winding contours around divisor points."""
    return min(0.5, 0.25 * min_divisor_gap(g))


def _describe(order: int) -> str:
    return "zero" if order > 0 else "pole"


def find_singular_orbits(scenario: MappingTorusScenario) -> list[ClosedOrbitRecord]:
    phi = scenario.phi
    tol = scenario.tolerances.periodicity
    divisor = rat_divisor(scenario.family.g)
    if not divisor:
        return []
    if not scenario.is_transverse:
        p, order = divisor[0]
        raise OrbitNotClosed(
            f"{_describe(order)} at {p} lies on a flow line that accumulates on a compact leaf"
        )
    t1 = scenario.base_return_time

    def match(x: PointCP1) -> int | None:
        for k, (d, _) in enumerate(divisor):
            if chordal_distance(x, d) < max(tol, _poly.CLUSTER_TOL):
                return k
        return None

    assigned = [False] * len(divisor)
    records = []
    for i, (p, order) in enumerate(divisor):
        if assigned[i]:
            continue
        n = primitive_period(phi, p, scenario.n_max, tol)
        if n is None:
            raise OrbitNotClosed(
                f"{_describe(order)} at {p} not periodic under phi (n_max={scenario.n_max})"
            )
        members = [p]
        for _ in range(n - 1):
            members.append(moebius_apply(phi, members[-1]))
        for x in members:
            k = match(x)
            if k is None or divisor[k][1] != order:
                found = "no divisor point" if k is None else f"order {divisor[k][1]}"
                raise InconsistentOrders(
                    f"orbit of {p} (order {order}) reaches {x} carrying {found}"
                )
            assigned[k] = True
        # canonical base point: smallest member, then regenerate from it
        start = min(range(n), key=lambda j: members[j].sort_key())
        pts = [members[start]]
        for _ in range(n - 1):
            pts.append(moebius_apply(phi, pts[-1]))
        records.append(ClosedOrbitRecord(tuple(pts), n, n * t1, order))
    records.sort(key=lambda r: (r.period_n, r.base_point.sort_key()))
    return records
