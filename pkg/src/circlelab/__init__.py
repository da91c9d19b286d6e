"""Exact and certified computations with circle homeomorphisms."""

from .analysis import (
    classify_element,
    crossing_report,
    finite_orbit_search,
    fixed_points_report,
    gap_crossing_probe,
    word_ball_max_fixed,
)
from .constructions import (
    build_prop41,
    build_theorem_b,
    denjoy_blowup,
    involution_action_matrix,
    semiconjugacy_check,
)
from .core import ANGLE, PROJECTIVE, CircleInterval, CirclePoint, circular_order
from .errors import CircleLabError, ClaimViolated, InputError
from .metrics import distance_c0, distance_inf, is_positive
from .moebius import MoebiusMap, moebius_classify, moebius_fixed_points
from .numbers import INF, Enclosure, Quad
from .piecewise import PiecewiseMap, half_turn, identity, pw_affine, pw_affine_graph, pw_moebius, rigid
from .rotation import irrational_scheme, perturbation_step, rotation_number

__version__ = "0.1.0"

__all__ = [
    "classify_element",
    "crossing_report",
    "finite_orbit_search",
    "fixed_points_report",
    "gap_crossing_probe",
    "word_ball_max_fixed",
    "build_prop41",
    "build_theorem_b",
    "denjoy_blowup",
    "involution_action_matrix",
    "semiconjugacy_check",
    "ANGLE",
    "PROJECTIVE",
    "CircleInterval",
    "CirclePoint",
    "circular_order",
    "CircleLabError",
    "ClaimViolated",
    "InputError",
    "distance_c0",
    "distance_inf",
    "is_positive",
    "MoebiusMap",
    "moebius_classify",
    "moebius_fixed_points",
    "INF",
    "Enclosure",
    "Quad",
    "PiecewiseMap",
    "half_turn",
    "identity",
    "pw_affine",
    "pw_affine_graph",
    "pw_moebius",
    "rigid",
    "irrational_scheme",
    "perturbation_step",
    "rotation_number",
]
