"""Pseudospectral laboratory for the one-dimensional cubic Schrodinger equation.

The package models the real line by a large torus and provides Fourier
transforms, frequency projections, modulation/Orlicz/variation norms, a
split-step solver, Picard iteration and a harness that measures the
constants in a collection of dispersive inequalities.
"""

from .grid import (
    DyadicInterval,
    FrequencyGrid,
    SpaceTimeField,
    SpectralField,
    forward_transform,
    inverse_transform,
    project_band,
    unit_blocks,
)

__all__ = [
    "DyadicInterval",
    "FrequencyGrid",
    "SpaceTimeField",
    "SpectralField",
    "forward_transform",
    "inverse_transform",
    "project_band",
    "unit_blocks",
]

__version__ = "0.1.0"
