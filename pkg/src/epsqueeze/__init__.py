"""Two-mode bosonic squeezing across an exceptional point.

Closed-form transfer coefficients and squeezing factors of a Hermitian
pair-coupling model whose dynamical matrix is non-Hermitian, precision
sensing built on the divergent parameter sensitivity near the exceptional
point, a truncated-Fock-space oracle (with optional Kerr nonlinearity), a
ring-condensate realization, and a four-wave-mixing parameter map.
"""

from .dynamics import (
    CoherentPair,
    Eigensystem,
    ModelParams,
    QuadratureStats,
    Regime,
    SqueezeSummary,
    TransferCoeffs,
    classify_regime,
    eigensystem,
    ground_state_param,
    lambda0,
    quadrature_mean,
    quadrature_stats,
    quadrature_variance,
    squeeze_summary,
    transfer_coeffs,
    transfer_matrix,
)
from .sensing import (
    CoeffDerivatives,
    EstimateSummary,
    SensitivityReport,
    SensorConfig,
    coeff_derivatives,
    inverse_variance,
    monte_carlo_estimate,
    qfi,
    sensitivity_report,
    susceptibility,
    working_kappas,
    working_points,
)

__version__ = "0.1.0"
