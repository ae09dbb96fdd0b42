"""End-to-end verification of a scenario and the resulting report."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from .errors import FoliationLabError
from .eta import (
    TubeSpec,
    boundary_balance,
    stokes_residual,
    torus_patch,
    tube_boundary_integral,
    tube_patch,
)
from .manifold import MappingTorusScenario
from .orbits import ClosedOrbitRecord, default_tube_radius, find_singular_orbits
from .projective import PointCP1, chordal_distance
from .winding import order_constancy_profile

TUBE_REL_TOL = 1e-8
STOKES_TOL = 1e-9
BALANCE_TOL = 1e-7
CONSTANCY_SAMPLES = 8

# Failures of these kinds mean the scenario is outside the theorem's
# hypotheses or the numerics broke down, not that the formula failed.
OPERATIONAL = "operational"
FORMULA = "formula"


@dataclass
class VerificationReport:
    scenario_digest: str
    orbits: list = field(default_factory=list)
    sum_l_ord: float = 0.0
    residual: float = 0.0
    constancy_ok: bool = True
    constancy_profiles: list = field(default_factory=list)
    tube_checks: list = field(default_factory=list)
    stokes_checks: list = field(default_factory=list)
    balance_residual: float | None = None
    passed: bool = False
    diagnostic: str | None = None
    diagnostic_code: str | None = None

    @property
    def failure_kind(self) -> str | None:
        if self.passed:
            return None
        return OPERATIONAL if self.diagnostic_code else FORMULA


def residual_ok(residual: float, terms: list[float], tol: float) -> bool:
    """Absolute threshold for small totals, relative beyond a total magnitude of 10."""
    scale = sum(abs(t) for t in terms)
    if scale <= 10:
        return residual < tol
    return residual / scale < tol


def _stokes_site(scenario: MappingTorusScenario) -> tuple[PointCP1, float]:
    """A point far from every zero and pole, with a tube radius that keeps clear of them."""
    divisor = scenario.family.g.raw_divisor_points()
    best, best_gap = PointCP1.from_complex(0.5 + 0.25j), -1.0
    for i in range(-4, 5):
        for j in range(-4, 5):
            p = PointCP1.from_complex(complex(i, j) / 4)
            gap = min([2.0] + [chordal_distance(p, d) for d in divisor])
            if gap > best_gap + 1e-12:
                best, best_gap = p, gap
    return best, min(0.25, 0.25 * best_gap)


def _orbit_checks(scenario: MappingTorusScenario, orbit: ClosedOrbitRecord, radius: float):
    profile = order_constancy_profile(scenario, orbit, CONSTANCY_SAMPLES)
    value = tube_boundary_integral(scenario, TubeSpec(orbit, radius))
    expected = 2j * math.pi * orbit.length_l * orbit.order
    return profile, abs(value / expected - 1)


def _stokes_checks(scenario: MappingTorusScenario) -> list[float]:
    center, radius = _stokes_site(scenario)
    if scenario.is_transverse:
        patch = tube_patch(center, radius)
    else:
        leaves = [l.s_star for l in scenario.leaf_structure.compact_leaves]
        s_mid = _far_from(leaves)
        patch = torus_patch(center, radius, s_mid, 0.02)
    return [stokes_residual(scenario, patch)]


def _far_from(values: list[float]) -> float:
    """A height in [0, 1) maximizing the circular distance to ``values``."""
    grid = [k / 64 for k in range(64)]
    return max(grid, key=lambda s: min(min(abs(s - v) % 1.0, 1 - abs(s - v) % 1.0) for v in values))


def verify_product_formula(scenario: MappingTorusScenario, digest: str = "", n_jobs: int = 1) -> VerificationReport:
    report = VerificationReport(scenario_digest=digest)
    try:
        orbits = find_singular_orbits(scenario)
        report.orbits = orbits
        terms = [o.length_l * o.order for o in orbits]
        report.sum_l_ord = sum(terms)
        report.residual = abs(report.sum_l_ord)
        radius = default_tube_radius(scenario.family.g)
        if n_jobs > 1 and len(orbits) > 1:
            with ThreadPoolExecutor(max_workers=n_jobs) as pool:
                results = list(pool.map(lambda o: _orbit_checks(scenario, o, radius), orbits))
        else:
            results = [_orbit_checks(scenario, o, radius) for o in orbits]
        report.constancy_profiles = [profile for profile, _ in results]
        report.constancy_ok = all(
            all(x == o.order for x in profile) for o, (profile, _) in zip(orbits, results)
        )
        report.tube_checks = [(i, rel) for i, (_, rel) in enumerate(results)]
        report.stokes_checks = _stokes_checks(scenario)
    except FoliationLabError as exc:
        report.diagnostic_code = exc.code
        report.diagnostic = f"{exc.code}: {exc}"
        report.passed = False
        return report
    report.passed = _passed(scenario, report, [o.length_l * o.order for o in report.orbits])
    return report


def _passed(scenario, report, terms) -> bool:
    ok = residual_ok(report.residual, terms, scenario.tolerances.residual)
    ok = ok and report.constancy_ok
    ok = ok and all(rel < TUBE_REL_TOL for _, rel in report.tube_checks)
    ok = ok and all(r < STOKES_TOL for r in report.stokes_checks)
    if report.balance_residual is not None:
        ok = ok and report.balance_residual < BALANCE_TOL
    return bool(ok)


def verify_all(scenario: MappingTorusScenario, partition=None, digest: str = "", n_jobs: int = 1) -> VerificationReport:
    """Product-formula checks plus the balance with compact-leaf boundary terms."""
    report = verify_product_formula(scenario, digest, n_jobs)
    if report.diagnostic_code:
        return report
    try:
        report.balance_residual = boundary_balance(scenario, partition)
    except FoliationLabError as exc:
        report.diagnostic_code = exc.code
        report.diagnostic = f"{exc.code}: {exc}"
        report.passed = False
        return report
    report.passed = _passed(scenario, report, [o.length_l * o.order for o in report.orbits])
    return report
