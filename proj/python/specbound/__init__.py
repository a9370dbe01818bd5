"""Spectral bounds, dispersal thresholds and patch-model dynamics."""

from ._specbound import (
    CapacityError,
    DispersalNetwork,
    DomainError,
    EigenTriple,
    MatrixClass,
    NumericError,
    StructureError,
    ValidationError,
    asymptotic_limits,
    bound_curve,
    bound_derivative,
    build_network,
    classify_matrix,
    collatz_wielandt,
    construct_k_vector,
    karlin_map,
    principal_cofactors,
    principal_eigen,
    scc_blocks,
    sis_r0,
    spectral_bound,
    strongly_connected,
    threshold_mu,
    verify_k_vector,
)

__all__ = [
    "CapacityError",
    "DispersalNetwork",
    "DomainError",
    "EigenTriple",
    "MatrixClass",
    "NumericError",
    "StructureError",
    "ValidationError",
    "asymptotic_limits",
    "bound_curve",
    "bound_derivative",
    "build_network",
    "classify_matrix",
    "collatz_wielandt",
    "construct_k_vector",
    "karlin_map",
    "principal_cofactors",
    "principal_eigen",
    "scc_blocks",
    "sis_r0",
    "spectral_bound",
    "strongly_connected",
    "threshold_mu",
    "verify_k_vector",
]
