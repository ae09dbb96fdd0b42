from __future__ import annotations

import cmath
import math

import numpy as np
import pytest

from foliation_lab.errors import TooCloseToDivisor
from foliation_lab.leafwise import (
    EquivariantFamily,
    equivariance_residual,
    family_eval,
    leafwise_log_derivative,
)
from foliation_lab.projective import MoebiusMap, PointCP1, RationalFunction, chordal_distance, rat_divisor
from foliation_lab.scenarios import QUARTER_TURN, quartic_over_square, quartic_ratio

Z = RationalFunction((0, 1))
CUBE = RationalFunction((-1, 3, -3, 1), (2, 1))


def test_family_eval_examples():
    F = EquivariantFamily(Z, 1.0)
    assert abs(family_eval(F, PointCP1.from_complex(2), 0.7).to_complex() - 2) < 1e-12

    F = EquivariantFamily(quartic_over_square(), -1.0)
    a = family_eval(F, PointCP1.from_complex(1), 1.0)
    b = family_eval(F, PointCP1.from_complex(1j), 0.0)
    assert abs(a.to_complex() + 2) < 1e-12
    assert abs(b.to_complex() + 2) < 1e-12

    for s in (0.0, 0.3, 0.9):
        assert family_eval(F, PointCP1.from_complex(0), s).is_infinity


def test_for_map_finds_multiplier():
    assert abs(EquivariantFamily.for_map(quartic_over_square(), QUARTER_TURN).mu + 1) < 1e-12


def test_residual_examples():
    F = EquivariantFamily(quartic_over_square(), -1.0)
    assert equivariance_residual(F, QUARTER_TURN) < 1e-12
    bad = EquivariantFamily(quartic_over_square(), -1.0 * (1 + 1e-3))
    assert equivariance_residual(bad, QUARTER_TURN) > 1e-4
    assert equivariance_residual(EquivariantFamily(Z, 1.0), MoebiusMap.identity()) == 0


def test_twisted_family_still_descends():
    F = EquivariantFamily(quartic_ratio(), 1.0, ((1, 0.3 + 0.1j), (2, -0.2j)))
    assert equivariance_residual(F, QUARTER_TURN) < 1e-12
    assert abs(F.twist_value(0.0) - F.twist_value(1.0)) < 1e-12


def test_log_derivative_examples():
    assert abs(leafwise_log_derivative(EquivariantFamily(Z), 2, 0.0) - 0.5) < 1e-15
    quartic = EquivariantFamily(quartic_ratio())
    assert abs(leafwise_log_derivative(quartic, 2, 0.4) - (32 / 16 - 32 / 17)) < 1e-12
    assert abs(leafwise_log_derivative(EquivariantFamily(CUBE), 0, 0.0) + 3.5) < 1e-12


def test_log_derivative_refuses_divisor():
    with pytest.raises(TooCloseToDivisor):
        leafwise_log_derivative(EquivariantFamily(CUBE), 1 + 1e-9, 0.0)


def test_log_derivative_matches_finite_difference():
    F = EquivariantFamily(quartic_over_square(), -1.0, ((1, 0.25),))
    rng = np.random.default_rng(17)
    divisor = [p.to_complex() for p, _ in rat_divisor(F.g) if not p.is_infinity]
    checked = 0
    while checked < 100:
        z = complex(*rng.uniform(-2, 2, size=2))
        if min(abs(z - d) for d in divisor) < 0.2:
            continue
        s = rng.uniform()
        step = 1e-5

        def log_f(x):
            return F.leaf_function(s)(x)

        # centered difference of log f along the real direction; the branch is
        # unwrapped by taking the phase of the ratio
        fd = cmath.log(log_f(z + step) / log_f(z - step)) / (2 * step)
        assert abs(leafwise_log_derivative(F, z, s) - fd) < 1e-6
        checked += 1


def test_divisor_is_independent_of_leaf():
    F = EquivariantFamily(quartic_ratio(), 1.0, ((1, 0.4 - 0.2j),))
    reference = rat_divisor(F.g)
    for j in range(8):
        leaf = rat_divisor(F.leaf_function(j / 8))
        assert [m for _, m in leaf] == [m for _, m in reference]
        for (p, _), (q, _) in zip(leaf, reference):
            assert chordal_distance(p, q) < 1e-9


def test_leaf_factor_uses_principal_branch():
    F = EquivariantFamily(Z, cmath.exp(0.5j * math.pi))
    assert abs(F.leaf_factor(0.5) - cmath.exp(0.25j * math.pi)) < 1e-15
