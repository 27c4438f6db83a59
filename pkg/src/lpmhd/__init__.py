"""Pseudo-spectral laboratory for 2-D ideal incompressible MHD.

Subpackage map:
    spectral          grid, fields, transforms, multiplier primitives
    littlewood_paley  dyadic blocks, Besov norms, Bernstein sweeps
    paracalculus      paraproducts, Leray projection, Biot-Savart, commutators
    dynamics          MHD / Elsasser / Euler tendencies and time integration
    diagnostics       continuation integrals, lifespan bounds, Euler comparison
    cli               run / sweep / verify entry points
"""

from .spectral import (
    Grid,
    ScalarField,
    VectorField,
    dealias,
    invert_laplacian,
    spectral_derivative,
)
from .littlewood_paley import (
    BesovSpec,
    DyadicPartition,
    bernstein_ratio,
    besov_norm,
    build_partition,
    dyadic_block,
    low_cutoff,
)

__all__ = [
    "Grid",
    "ScalarField",
    "VectorField",
    "dealias",
    "invert_laplacian",
    "spectral_derivative",
    "BesovSpec",
    "DyadicPartition",
    "bernstein_ratio",
    "besov_norm",
    "build_partition",
    "dyadic_block",
    "low_cutoff",
]

__version__ = "0.1.0"
