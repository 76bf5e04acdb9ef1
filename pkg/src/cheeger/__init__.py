"""Cheeger deformations: curvature of g_t, fixed-point obstructions and the S^n examples."""

__version__ = "0.1.0"

from .group import IsotropyRep, LieAlgebraData, orbit_dimension, so_basis, standard_block_rep, structure_constants
from .core import (CurvatureModel, OrbitTensor, TangentVector, ZtInput, kappa_t, ricci_limit, ricci_t, scal_t, z_t,
                   zt_lower_bound)
from .warped import WarpedMetricSpec, curvature_operator, warped_point_model
from .feasibility import FeasibilityInstance, FeasibilityResult, is_feasible_2, is_feasible_n, solve_lambdas_2, solve_lambdas_n
from .limiting import effectiveness_criterion, inf_trace, limiting_space
from .counterexamples import build, scalar_blowup_scan, verify_negative_ricci, verify_quotient_ricci
from .coho1 import DiagonalMetricFamily, criterion, dual_holonomy_identity_check, trace_p_inverse

__all__ = [
    "__version__",
    "IsotropyRep", "LieAlgebraData", "orbit_dimension", "so_basis", "standard_block_rep", "structure_constants",
    "CurvatureModel", "OrbitTensor", "TangentVector", "ZtInput", "kappa_t", "ricci_limit", "ricci_t", "scal_t", "z_t",
    "zt_lower_bound",
    "WarpedMetricSpec", "curvature_operator", "warped_point_model",
    "FeasibilityInstance", "FeasibilityResult", "is_feasible_2", "is_feasible_n", "solve_lambdas_2", "solve_lambdas_n",
    "effectiveness_criterion", "inf_trace", "limiting_space",
    "build", "scalar_blowup_scan", "verify_negative_ricci", "verify_quotient_ricci",
    "DiagonalMetricFamily", "criterion", "dual_holonomy_identity_check", "trace_p_inverse",
]
