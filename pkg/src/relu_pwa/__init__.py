"""ReLU networks, explicit piecewise-affine functions and multiparametric LPs."""

__version__ = "0.1.0"

from .bounds import Architecture, HypothesisError, lower_bound, naive_bound, upper_bound
from .inverse_mplp import MpLP, dc_to_mplp, solve_slice, verify_inverse
from .lp import LinearProgram, LpOutcome, LpStatus, chebyshev_center, solve_lp
from .polyhedra import Polyhedron
from .pwa_core import (PWA1D, DCPair, MaxAffine, Piece, PWAFunction, check_continuity,
                       dc_decompose_1d, eval_maxaffine, eval_pwa, is_convex_1d)
from .region_analysis import (RegionCapExceeded, RegionRecord, count_regions, enumerate_exact,
                              sample_identify, to_pwa, unit_pwa)
from .relu_net import (ActivationPattern, Layer, LocalAffine, ReLUNet, activation_pattern,
                       eval_net, local_affine, param_count, pattern_affine, pre_activations)
from .synthesis import dc_to_relu, maxaffine_to_relu, vector_policy_nets

__all__ = [
    "Architecture", "HypothesisError", "lower_bound", "naive_bound", "upper_bound",
    "MpLP", "dc_to_mplp", "solve_slice", "verify_inverse",
    "LinearProgram", "LpOutcome", "LpStatus", "chebyshev_center", "solve_lp",
    "Polyhedron",
    "PWA1D", "DCPair", "MaxAffine", "Piece", "PWAFunction", "check_continuity",
    "dc_decompose_1d", "eval_maxaffine", "eval_pwa", "is_convex_1d",
    "RegionCapExceeded", "RegionRecord", "count_regions", "enumerate_exact",
    "sample_identify", "to_pwa", "unit_pwa",
    "ActivationPattern", "Layer", "LocalAffine", "ReLUNet", "activation_pattern",
    "eval_net", "local_affine", "param_count", "pattern_affine", "pre_activations",
    "dc_to_relu", "maxaffine_to_relu", "vector_policy_nets",
]
