"""Empirical verification harness: data families, verifiers and reports."""

from .bilinear import bilinear_identity, verify_bilinear_inequality, verify_bilinear_kernel
from .data import FAMILIES, generate_data
from .embeddings import verify_embeddings
from .persistence import verify_norm_persistence
from .report import EstimateReport, fit_power_law
from .restriction import verify_restriction_L4
from .scaling import verify_scaling_law
from .strichartz import verify_strichartz

__all__ = [
    "FAMILIES",
    "EstimateReport",
    "bilinear_identity",
    "fit_power_law",
    "generate_data",
    "verify_bilinear_inequality",
    "verify_bilinear_kernel",
    "verify_embeddings",
    "verify_norm_persistence",
    "verify_restriction_L4",
    "verify_scaling_law",
    "verify_strichartz",
]
