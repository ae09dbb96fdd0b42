"""Numerical laboratory for the foliated product formula.

Mapping tori of Moebius maps carry a foliation by spheres and a suspension
flow; leafwise meromorphic functions have zeros and poles on closed orbits,
and the orbit lengths weighted by orders sum to zero. The arithmetic side
checks the valuation product formula for Q and Q(i).
"""

from .arithmetic import (
    GaussianInt,
    PlaceValuation,
    analogy_table,
    gaussian_places,
    product_formula_residual,
    rational_places,
)
from .documents import parse_scenario, scenario_digest, scenario_to_document
from .eta import (
    Method,
    SurfacePatch,
    TubeSpec,
    eta_pullback,
    boundary_balance,
    stokes_residual,
    surface_integral_eta,
    tube_boundary_integral,
)
from .leafwise import (
    EquivariantFamily,
    equivariance_residual,
    family_eval,
    leafwise_log_derivative,
)
from .manifold import (
    CompactLeafRecord,
    MappingTorusScenario,
    SpeedProfile,
    Tolerances,
    base_return_time,
    flow_return_time_ode,
    speed_eval,
    transversality_check,
)
from .orbits import ClosedOrbitRecord, find_singular_orbits, orbit_length, primitive_period
from .projective import (
    MoebiusMap,
    PointCP1,
    RationalFunction,
    chordal_distance,
    divisor_degree_check,
    invariance_multiplier,
    moebius_apply,
    moebius_compose,
    rat_derivative,
    rat_divisor,
    rat_eval,
)
from .verifier import VerificationReport, verify_all, verify_product_formula
from .winding import order_constancy_profile, winding_order

__version__ = "0.1.0"
