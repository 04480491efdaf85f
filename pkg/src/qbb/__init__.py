"""High-precision generalized q-Bernoulli polynomials and the q-calculus beneath them."""

from __future__ import annotations

from .qasym import ResidueSeriesResult, alpha_limit, beta_residue, residue_table
from .qbernoulli import (
    BernoulliFamily,
    BetaSequence,
    IdentityReport,
    bernoulli_poly,
    beta3_numbers,
    beta_numbers,
    identity_residual,
    run_identity_grid,
)
from .qbessel import BesselKind, ZeroTable, bessel_zeros, h_coeffs, jbessel
from .qconnect import ConnectionExpansion, connection_coeffs, qlaguerre, qlegendre
from .qcore import (
    ConvergenceError,
    PoleError,
    QDomainError,
    QParams,
    qexp,
    qintegral01,
    qpochhammer,
    qtrig,
)

__version__ = "0.1.0"

__all__ = [
    "BernoulliFamily",
    "BesselKind",
    "BetaSequence",
    "ConnectionExpansion",
    "ConvergenceError",
    "IdentityReport",
    "PoleError",
    "QDomainError",
    "QParams",
    "ResidueSeriesResult",
    "ZeroTable",
    "alpha_limit",
    "bernoulli_poly",
    "bessel_zeros",
    "beta3_numbers",
    "beta_numbers",
    "beta_residue",
    "connection_coeffs",
    "h_coeffs",
    "identity_residual",
    "jbessel",
    "qexp",
    "qintegral01",
    "qlaguerre",
    "qlegendre",
    "qpochhammer",
    "qtrig",
    "residue_table",
    "run_identity_grid",
]
