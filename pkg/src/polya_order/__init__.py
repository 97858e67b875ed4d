"""Pólya urn distribution, Bernstein-Stancu operators and convex-order checks."""

from .polya_core import (
    InvalidParams,
    PolyaParams,
    Pmf,
    StandardParams,
    brute_force_pmf,
    check_kozniewska_identity,
    kozniewska_residuals,
    min_replacement,
    partial_centered_moment,
    pmf,
    pmf_dc,
    rising_factorial,
)
from .interlace import InterlacePartition, build_partition, verify_claim1
from .operators import (
    REGISTRY,
    OperatorEval,
    TestFunction,
    apply_general,
    bernstein,
    r_n,
    stancu,
)

__version__ = "0.1.0"

__all__ = [
    "InvalidParams",
    "PolyaParams",
    "Pmf",
    "StandardParams",
    "brute_force_pmf",
    "check_kozniewska_identity",
    "kozniewska_residuals",
    "min_replacement",
    "partial_centered_moment",
    "pmf",
    "pmf_dc",
    "rising_factorial",
    "InterlacePartition",
    "build_partition",
    "verify_claim1",
    "REGISTRY",
    "OperatorEval",
    "TestFunction",
    "apply_general",
    "bernstein",
    "r_n",
    "stancu",
]
