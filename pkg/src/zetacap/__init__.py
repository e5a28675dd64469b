"""zetacap: zeta-regularized determinants of massive Laplacians on spherical caps."""

from .errors import (
    BasisOverflow,
    BracketFailure,
    DescriptorMismatch,
    DifferentiationUnstable,
    Divergence,
    DomainError,
    NonPositive,
    NonPositiveValue,
    Overflow,
    PoleAtOne,
    PoleHit,
    QuadratureFailure,
    SingularDeterminant,
    TailBoundTooLarge,
    UnsupportedDimension,
    ZetacapError,
)
from .specfun import CapGeometry, Precision, DEFAULT_PRECISION
from .invariants import (
    ZetaInvariants,
    discrepancy_report,
    logdet,
    zeta0_general,
    zeta0_printed,
    zeta_prime0_general,
    zeta_prime0_printed,
    zeta_prime0_terms,
)
from .oracle import (
    DirectSum,
    EigenRoot,
    char_value,
    eigen_roots,
    root_table,
    root_table_csv,
    zeta_contour,
    zeta_direct,
    zeta_prime0_subtraction,
)

__version__ = "0.1.0"

__all__ = [
    "CapGeometry",
    "Precision",
    "DEFAULT_PRECISION",
    "ZetaInvariants",
    "logdet",
    "zeta0_general",
    "zeta0_printed",
    "zeta_prime0_general",
    "zeta_prime0_printed",
    "zeta_prime0_terms",
    "discrepancy_report",
    "EigenRoot",
    "DirectSum",
    "char_value",
    "eigen_roots",
    "root_table",
    "root_table_csv",
    "zeta_direct",
    "zeta_contour",
    "zeta_prime0_subtraction",
    "ZetacapError",
    "DomainError",
    "UnsupportedDimension",
    "PoleAtOne",
    "PoleHit",
    "Divergence",
    "Overflow",
    "NonPositiveValue",
    "NonPositive",
    "BasisOverflow",
    "DescriptorMismatch",
    "SingularDeterminant",
    "QuadratureFailure",
    "DifferentiationUnstable",
    "BracketFailure",
    "TailBoundTooLarge",
    "__version__",
]
