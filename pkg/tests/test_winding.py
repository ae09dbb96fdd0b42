from __future__ import annotations

import numpy as np
import pytest

from foliation_lab.errors import NoDivisor
from foliation_lab.orbits import find_singular_orbits
from foliation_lab.projective import PointCP1, RationalFunction
from foliation_lab.scenarios import compact_leaf, iz_quartic, iz_quartic_over_square
from foliation_lab.winding import contour_integral, order_constancy_profile, winding_order

CUBE = RationalFunction((-1, 3, -3, 1), (2, 1))


def pt(z):
    return PointCP1.infinity() if z is None else PointCP1.from_complex(z)


@pytest.mark.parametrize("center,radius,expected", [(1, 0.5, 3), (0, 0.1, 0), (-2, 0.5, -1)])
def test_winding_examples(center, radius, expected):
    assert winding_order(CUBE, pt(center), radius) == expected


def test_winding_at_infinity():
    # (z-1)^3/(z+2) has a double pole at infinity
    assert winding_order(CUBE, pt(None), 0.2) == -2


def test_radius_is_halved_when_contour_hits_a_root():
    raw, used = contour_integral(CUBE, pt(0), 1.0)
    assert used == 0.5
    assert abs(raw) < 1e-10


def _factor_function(rng):
    zeros, poles, taken = [], [], []
    for target in (zeros, poles):
        budget = int(rng.integers(0, 4))
        while budget > 0:
            m = int(rng.integers(1, budget + 1))
            while True:
                # inside the unit disc, so the standard chart measures the radius
                z = 0.9 * np.sqrt(rng.uniform()) * np.exp(2j * np.pi * rng.uniform())
                if all(abs(z - w) > 0.2 for w in taken):
                    break
            taken.append(z)
            target.append((z, m))
            budget -= m
    if not zeros and not poles:
        zeros.append((0.1, 2))
    return RationalFunction.from_factors(zeros, poles), zeros, poles


def test_ellipse_contour_gives_same_order():
    rng = np.random.default_rng(3)
    checked = 0
    while checked < 20:
        f, zeros, poles = _factor_function(rng)
        points = zeros + [(p, -m) for p, m in poles]
        z, m = points[int(rng.integers(len(points)))]
        others = [abs(z - w) for w, _ in points if w != z]
        gap = min(others) if others else 1.0
        r = min(0.4 * gap, 0.5 * (1 - abs(z)) + 0.05)
        # an ellipse with axis ratio 2 inside the circle of radius r
        assert winding_order(f, pt(z), r, aspect=2.0) == m
        assert winding_order(f, pt(z), r) == m
        checked += 1


def test_ellipse_encloses_nothing_off_divisor():
    assert winding_order(CUBE, pt(0.3j), 0.4, aspect=2.0) == 0


def test_constancy_examples():
    sc = iz_quartic()
    zero_orbit, pole_orbit = find_singular_orbits(sc)
    assert order_constancy_profile(sc, zero_orbit, 8) == [4] * 8
    assert order_constancy_profile(sc, pole_orbit, 4) == [-1] * 4


def test_constancy_requires_divisor():
    sc = compact_leaf()
    fake = find_singular_orbits(iz_quartic())[0]
    with pytest.raises(NoDivisor):
        order_constancy_profile(sc, fake, 8)


def test_constancy_with_multiplier():
    sc = iz_quartic_over_square()
    for o in find_singular_orbits(sc):
        assert order_constancy_profile(sc, o, 8) == [o.order] * 8
