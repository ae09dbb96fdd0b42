from __future__ import annotations

import math

import pytest

from foliation_lab.documents import report_json, report_to_document, scenario_digest
from foliation_lab.eta import Method
from foliation_lab.leafwise import EquivariantFamily
from foliation_lab.manifold import MappingTorusScenario, SpeedProfile
from foliation_lab.scenarios import (
    QUARTER_TURN,
    WOBBLY_SPEED,
    compact_leaf,
    identity_z,
    iz_quartic,
    iz_quartic_over_square,
    quartic_ratio,
)
from foliation_lab.verifier import residual_ok, verify_all, verify_product_formula


def test_identity_scenario():
    r = verify_product_formula(identity_z())
    assert r.passed
    assert r.residual < 1e-12
    assert [(o.length_l, o.order) for o in r.orbits] == [(1.0, 1), (1.0, -1)]
    assert r.failure_kind is None


def test_quartic_scenario():
    r = verify_product_formula(iz_quartic())
    assert r.passed
    assert r.residual < 1e-9
    assert abs(r.orbits[0].length_l - 2 / math.sqrt(3)) < 1e-10
    assert r.constancy_profiles == [[4] * 8, [-1] * 8]
    assert all(rel < 1e-8 for _, rel in r.tube_checks)
    assert len(r.stokes_checks) == 1 and r.stokes_checks[0] < 1e-9


def test_multiplier_scenario():
    r = verify_product_formula(iz_quartic_over_square())
    assert r.passed
    assert sorted((o.period_n, o.order) for o in r.orbits) == [(1, -2), (1, -2), (4, 1)]
    assert abs(r.sum_l_ord) < 1e-12


def test_all_argument_principle_matches_product_formula():
    sc = iz_quartic()
    a = verify_product_formula(sc)
    b = verify_all(sc, "AA")
    assert b.balance_residual == a.residual
    assert b.passed


def test_mixed_partition_balance():
    r = verify_all(iz_quartic(), {0: Method.ARGUMENT_PRINCIPLE, 1: Method.SURFACE_QUADRATURE})
    assert r.balance_residual < 1e-7
    assert r.passed


def test_compact_leaf_balance():
    r = verify_all(compact_leaf())
    assert r.orbits == []
    assert r.balance_residual < 1e-12
    assert r.passed


def test_residual_threshold_switches_to_relative():
    assert residual_ok(5e-10, [1.0, -1.0], 1e-9)
    assert not residual_ok(2e-9, [1.0, -1.0], 1e-9)
    assert residual_ok(5e-8, [100.0, -100.0], 1e-9)


def test_failed_formula_is_not_operational():
    sc = MappingTorusScenario(
        QUARTER_TURN, WOBBLY_SPEED, EquivariantFamily.for_map(quartic_ratio(), QUARTER_TURN),
        tolerances=iz_quartic().tolerances.__class__(residual=0.0),
    )
    r = verify_all(sc)
    assert not r.passed
    assert r.failure_kind == "formula"


@pytest.mark.parametrize("c", [0.5, 3.0])
def test_scale_invariance(c):
    base = verify_product_formula(iz_quartic())
    scaled = verify_product_formula(iz_quartic(WOBBLY_SPEED.scaled(c)))
    assert scaled.passed == base.passed
    for a, b in zip(base.orbits, scaled.orbits):
        assert abs(b.length_l - a.length_l / c) < 1e-10
        assert b.order == a.order
    worst = max(abs(o.length_l * o.order) for o in scaled.orbits)
    assert scaled.residual / worst < 1e-12


def test_twist_invariance():
    plain = iz_quartic()
    twisted = iz_quartic(twist=((1, 0.3 - 0.2j), (3, 0.1j)))
    a = report_to_document(verify_all(plain, "AB", scenario_digest(plain)))
    b = report_to_document(verify_all(twisted, "AB", scenario_digest(twisted)))
    assert a.pop("scenario_digest") != b.pop("scenario_digest")
    assert a == b


def test_reports_are_deterministic_across_jobs():
    sc = iz_quartic()
    digest = scenario_digest(sc)
    outputs = {report_json(verify_all(sc, "AB", digest, n_jobs=j)) for j in (1, 1, 2, 4)}
    assert len(outputs) == 1
