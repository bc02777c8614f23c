"""Darboux displacement toolkit for Weierstrass-class periodic potentials.

A numerical library and command-line tool for building and verifying Darboux
(supersymmetric) displacement transformations of the one-gap periodic
potential family: elliptic-function evaluation, superpotential construction,
general one-parameter Riccati solutions, finite-difference chain steps, and
an independent one-dimensional Schrodinger spectral probe.
"""

__version__ = "0.1.0"

from .errors import (
    AccuracyError,
    ConsistencyError,
    ConstructionError,
    DarbouxError,
    DegeneratePairError,
    DomainError,
    PoleProximityError,
    SingularStepError,
    VerificationError,
)

__all__ = [
    "AccuracyError",
    "ConsistencyError",
    "ConstructionError",
    "DarbouxError",
    "DegeneratePairError",
    "DomainError",
    "PoleProximityError",
    "SingularStepError",
    "VerificationError",
    "__version__",
]
