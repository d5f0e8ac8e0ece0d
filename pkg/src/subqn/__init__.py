"""Quasi-Newton methods for nonsmooth convex optimization.

The package centers on a bundle-based descent-direction search combined
with subgradient Wolfe line searches (exact for hinge-style losses) and
BFGS / limited-memory BFGS curvature models, plus the regularized risk
objectives, LIBSVM ingestion, and a CLI that writes convergence traces
with matching figures.
"""

from .quasi_newton import (
    DegenerateDisplacementError,
    DenseInverseHessian,
    DisplacementPair,
    IdentityModel,
    LimitedMemoryInverseHessian,
    curvature_safeguard,
    skip_update_test,
)
from .segmentation import LineSet, envelope_value, naive_envelope, segment_max_lines
from .line_search import (
    BinaryHingeRestriction,
    BisectionRestriction,
    LineSearchError,
    PiecewiseQuadraticRestriction,
    UnboundedRayError,
    WolfeParams,
    backtracking_search,
    check_wolfe,
)
from .direction import DirectionResult, descent_direction, model_value
from .solver import (
    SolverConfig,
    SolverTrace,
    TraceRecord,
    solve,
    solve_gd,
    solve_subgd,
    trace_to_csv,
    wolfe_certify,
)
from .data_io import DataFormatError, Dataset, load_libsvm, save_libsvm
from . import objectives

__all__ = [
    "BinaryHingeRestriction",
    "BisectionRestriction",
    "DataFormatError",
    "Dataset",
    "DegenerateDisplacementError",
    "DenseInverseHessian",
    "DirectionResult",
    "DisplacementPair",
    "IdentityModel",
    "LimitedMemoryInverseHessian",
    "LineSearchError",
    "LineSet",
    "PiecewiseQuadraticRestriction",
    "SolverConfig",
    "SolverTrace",
    "TraceRecord",
    "UnboundedRayError",
    "WolfeParams",
    "backtracking_search",
    "check_wolfe",
    "curvature_safeguard",
    "descent_direction",
    "envelope_value",
    "load_libsvm",
    "model_value",
    "naive_envelope",
    "objectives",
    "save_libsvm",
    "segment_max_lines",
    "skip_update_test",
    "solve",
    "solve_gd",
    "solve_subgd",
    "trace_to_csv",
    "wolfe_certify",
]

__version__ = "0.1.0"
