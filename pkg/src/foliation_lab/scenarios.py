"""Ready-made scenarios used by the tests, the acceptance suite and ``scenarios/``."""

from __future__ import annotations

import math

from .leafwise import EquivariantFamily
from .manifold import MappingTorusScenario, SpeedProfile
from .projective import MoebiusMap, RationalFunction

QUARTER_TURN = MoebiusMap.rotation(math.pi / 2)
WOBBLY_SPEED = SpeedProfile(1.0, ((1, 0.0, 0.5),))


def quartic_ratio() -> RationalFunction:
    """z^4 / (z^4 + 1)."""
    return RationalFunction((0, 0, 0, 0, 1), (1, 0, 0, 0, 1))


def quartic_over_square() -> RationalFunction:
    """(z^4 + 1) / z^2."""
    return RationalFunction((1, 0, 0, 0, 1), (0, 0, 1))


def iz_quartic(speed: SpeedProfile = WOBBLY_SPEED, twist=()) -> MappingTorusScenario:
    g = quartic_ratio()
    return MappingTorusScenario(QUARTER_TURN, speed, EquivariantFamily.for_map(g, QUARTER_TURN, twist))


def iz_quartic_over_square(speed: SpeedProfile = SpeedProfile(1.0)) -> MappingTorusScenario:
    g = quartic_over_square()
    return MappingTorusScenario(QUARTER_TURN, speed, EquivariantFamily.for_map(g, QUARTER_TURN))


def identity_z() -> MappingTorusScenario:
    g = RationalFunction((0, 1))
    return MappingTorusScenario(MoebiusMap.identity(), SpeedProfile(1.0), EquivariantFamily(g, 1.0))


def compact_leaf() -> MappingTorusScenario:
    """Speed 0.5 - 0.5 cos 2 pi s (a compact leaf at s = 0) and a constant function."""
    speed = SpeedProfile(0.5, ((1, -0.5, 0.0),))
    g = RationalFunction.constant(1.0)
    return MappingTorusScenario(QUARTER_TURN, speed, EquivariantFamily(g, 1.0))


def hyperbolic_bad() -> MappingTorusScenario:
    """phi = 2z with g = (z-1)/z: the zero at 1 never returns.

    Construction always raises OrbitNotClosed.
    """
    phi = MoebiusMap(2, 0, 0, 1)
    g = RationalFunction((-1, 1), (0, 1))
    return MappingTorusScenario(phi, SpeedProfile(1.0), EquivariantFamily(g, 1.0))
