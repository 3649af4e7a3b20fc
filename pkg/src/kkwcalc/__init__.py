"""Exact symbol calculus for boundary terms of a spectral Einstein functional."""

from .pipeline import assemble_theorem, compute_all_phi, compute_phi_case, interior_coefficients
from .scalar import ExactScalar, GaussQ

__all__ = [
    "ExactScalar",
    "GaussQ",
    "assemble_theorem",
    "compute_all_phi",
    "compute_phi_case",
    "interior_coefficients",
]
