"""Generalized Cantor sets E(omega) and uniformity of their complements."""
from ._kernels import BACKEND
from .adversary import (
    AdversaryCertificate,
    AdversaryParams,
    certificate,
    choose_params,
    find_M,
    verify_no_curve,
)
from .geometry import (
    Arc,
    PathCurve,
    Segment,
    UniformityReport,
    geodesic,
    path_length,
    split_lengths_at,
    verify_conditions,
)
from .oracle import base3_membership, crossing_lower_bound, template_upper_bound
from .sequence import (
    OMEGA0,
    SequenceSpec,
    big_N,
    classify_moduli_standard,
    constant_spec,
    is_uniform,
    metric_d,
    omega_b_measure_bound,
    omega_delta_i,
    select_delta,
    spec_stats,
    theorem_constant,
    validate_spec,
)
from .tree import CantorTree, build_tree, dist_to_E, gaps_in, locate, perfectness_estimate
from .witness import WitnessResult, build_witness, case_constant

__version__ = "0.1.0"

__all__ = [
    "AdversaryCertificate", "AdversaryParams", "Arc", "BACKEND", "CantorTree", "OMEGA0",
    "PathCurve", "Segment", "SequenceSpec", "UniformityReport", "WitnessResult",
    "base3_membership", "big_N", "build_tree", "build_witness", "case_constant", "certificate",
    "choose_params", "classify_moduli_standard", "constant_spec", "crossing_lower_bound",
    "dist_to_E", "find_M", "gaps_in", "geodesic", "is_uniform", "locate", "metric_d",
    "omega_b_measure_bound", "omega_delta_i", "path_length", "perfectness_estimate",
    "select_delta", "spec_stats", "split_lengths_at", "template_upper_bound", "theorem_constant",
    "validate_spec", "verify_conditions", "verify_no_curve",
]
