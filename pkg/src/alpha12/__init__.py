"""Numerical toolkit for (alpha1, alpha2)-norms and left-invariant metrics on compact Lie groups."""
from .families import GeneratingFamily, convert_generating, mroot, parse_family, riemannian
from .lie import CompactLieAlgebra, build_su, centralizer, parse_algebra
from .norm import (
    DatumDecomposition,
    cartan_tensor,
    fundamental_tensor,
    hessian_fd_oracle,
    is_riemannian,
    normalize_datum,
    validate_generating,
)
from .roots import assertion_scan, bracket_dim_crosscheck, build_root_system, count_nonorthogonal
from .scurvature import (
    build_cartan_datum,
    perturbed_datum,
    s_curvature_closed,
    s_curvature_oracle,
    vanishing_criterion,
)

__version__ = "0.1.0"
