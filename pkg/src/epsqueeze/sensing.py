"""Parameter estimation near the exceptional point.

Implements analytic derivatives of the transfer coefficients, the quadrature
susceptibility, the quantum Fisher information of an evolved coherent state,
the Cramer-Rao comparison, working-point solvers (``lambda0 * t = n*pi``),
and a reproducible Monte-Carlo homodyne estimation harness.

The estimated parameter is selected by ``wrt`` ("kappa" or "delta"); the
formulas are symmetric in the two choices.  These routines require a real
coupling, which is the regime of the sensing protocol.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .dynamics import (
    CoherentPair,
    ModelParams,
    _dcos_ds,
    _dsinc_ds,
    _sinc_like,
    lambda0,
    quadrature_mean,
    quadrature_variance,
    transfer_coeffs,
)
from .errors import IllConditionedEstimatorError

__all__ = [
    "SensorConfig",
    "SensitivityReport",
    "CoeffDerivatives",
    "EstimateSummary",
    "coeff_derivatives",
    "susceptibility",
    "qfi",
    "inverse_variance",
    "sensitivity_report",
    "working_points",
    "working_kappas",
    "working_point_susceptibility",
    "working_point_qfi",
    "monte_carlo_estimate",
]


def _require_real_kappa(params: ModelParams) -> float:
    kappa = complex(params.kappa)
    if kappa.imag != 0.0:
        raise ValueError("sensing formulas require a real coupling")
    return kappa.real


@dataclass(frozen=True)
class SensorConfig:
    """One sensing configuration.

    Exactly one of ``t`` and ``working_index`` must be given; the latter sets
    ``t = n*pi/lambda0`` and requires real eigenvalues (|delta| > |kappa|).
    ``phi`` is the homodyne angle, ``mode`` the measured mode.
    """

    params: ModelParams
    alphas: CoherentPair
    t: Optional[float] = None
    working_index: Optional[int] = None
    wrt: str = "kappa"
    phi: float = 0.0
    mode: int = 1

    def __post_init__(self):
        if (self.t is None) == (self.working_index is None):
            raise ValueError("give exactly one of t or working_index")
        if self.working_index is not None:
            if self.working_index < 1:
                raise ValueError("working_index must be a positive integer")
            if self.params.signed_gap <= 0.0:
                raise ValueError(
                    "working points t = n*pi/lambda0 require |delta| > |kappa|"
                )
        if self.wrt not in ("kappa", "delta"):
            raise ValueError(f"wrt must be 'kappa' or 'delta', got {self.wrt!r}")

    def resolved_time(self) -> float:
        if self.t is not None:
            return self.t
        return self.working_index * math.pi / lambda0(self.params)


@dataclass(frozen=True)
class CoeffDerivatives:
    """Derivatives of (A, B) with respect to the estimated parameter at fixed t."""

    dA: complex
    dB: complex


@dataclass(frozen=True)
class SensitivityReport:
    """Susceptibility, measurement variance, and Fisher-information comparison.

    ``inv_var = chi^2/variance`` is the inverse estimation variance of the
    homodyne scheme; ``ratio = inv_var/qfi`` lies in [0, 1] by the Cramer-Rao
    bound (reported as 0 when both vanish, e.g. at t = 0).
    """

    chi: float
    variance: float
    inv_var: float
    qfi: float
    ratio: float

    def to_dict(self) -> dict:
        return {
            "chi": self.chi,
            "variance": self.variance,
            "inv_var": self.inv_var,
            "qfi": self.qfi,
            "ratio": self.ratio,
        }


def coeff_derivatives(params: ModelParams, t: float, wrt: str = "kappa") -> CoeffDerivatives:
    """Analytic ``(dA/dx, dB/dx)`` at fixed t for x = kappa or delta.

    Differentiates the entire-function form of the coefficients through
    ``s = delta^2 - kappa^2`` (``ds/dkappa = -2*kappa``, ``ds/ddelta =
    2*delta``), so the result is regular across the exceptional point where
    ``d(lambda0)/d(kappa) = -kappa/lambda0`` alone would diverge.
    """
    kappa = _require_real_kappa(params)
    delta = params.delta
    s = params.signed_gap
    g = _sinc_like(s, t)
    dc = _dcos_ds(s, t)
    dg = _dsinc_ds(s, t)
    if wrt == "kappa":
        ds = -2.0 * kappa
        dA = ds * (dc - 1j * delta * dg)
        dB = g + kappa * ds * dg
    elif wrt == "delta":
        ds = 2.0 * delta
        dA = ds * (dc - 1j * delta * dg) - 1j * g
        dB = kappa * ds * dg
    else:
        raise ValueError(f"wrt must be 'kappa' or 'delta', got {wrt!r}")
    return CoeffDerivatives(dA=dA, dB=dB)


def _mean_derivatives(config: SensorConfig) -> tuple[complex, complex]:
    """d<a_1(t)>/dx and d<a_2(t)>/dx for the coherent initial state."""
    t = config.resolved_time()
    d = coeff_derivatives(config.params, t, config.wrt)
    a1, a2 = config.alphas.alpha1, config.alphas.alpha2
    return (
        d.dA * a1 + d.dB * np.conj(a2),
        d.dA * a2 + d.dB * np.conj(a1),
    )


def susceptibility(config: SensorConfig) -> float:
    """Derivative of the measured quadrature mean w.r.t. the estimated parameter.

    ``chi = Re[exp(-i phi) (dA alpha_j + dB conj(alpha_jbar))]``; at working
    points in the oscillating regime it scales like ``lambda0^-3``.
    """
    d1, d2 = _mean_derivatives(config)
    dm = d1 if config.mode == 1 else d2
    if config.mode not in (1, 2):
        raise ValueError(f"mode must be 1 or 2, got {config.mode}")
    return (cmath.exp(-1j * config.phi) * dm).real


def qfi(config: SensorConfig) -> float:
    """Quantum Fisher information of the evolved coherent state.

    For initial state ``|alpha1, alpha2>``:

        F = 4|A|^4 |d(B/A*)|^2 + 4(|A|^2+|B|^2) sum_j |d<a_j>|^2
            - 16 Re[A* B* d<a_1> d<a_2>]
    """
    t = config.resolved_time()
    coeffs = transfer_coeffs(config.params, t)
    d = coeff_derivatives(config.params, t, config.wrt)
    A, B = coeffs.A, coeffs.B
    # d(B/A*) with d(A*) = conj(dA) since the parameter is real
    dq = d.dB / np.conj(A) - B * np.conj(d.dA) / np.conj(A) ** 2
    d1, d2 = _mean_derivatives(config)
    value = (
        4.0 * coeffs.A0**4 * abs(dq) ** 2
        + 4.0 * (coeffs.A0**2 + coeffs.B0**2) * (abs(d1) ** 2 + abs(d2) ** 2)
        - 16.0 * (np.conj(A) * np.conj(B) * d1 * d2).real
    )
    return float(value)


def inverse_variance(config: SensorConfig) -> float:
    """``chi^2 / Var[X]``: inverse variance of the linearized homodyne estimate."""
    t = config.resolved_time()
    chi = susceptibility(config)
    return chi**2 / quadrature_variance(config.params, t)


def sensitivity_report(config: SensorConfig) -> SensitivityReport:
    t = config.resolved_time()
    chi = susceptibility(config)
    variance = quadrature_variance(config.params, t)
    inv_var = chi**2 / variance
    f = qfi(config)
    ratio = inv_var / f if f > 0.0 else 0.0
    return SensitivityReport(chi=chi, variance=variance, inv_var=inv_var, qfi=f, ratio=ratio)


def working_points(params: ModelParams, n_max: int) -> np.ndarray:
    """Times ``t_n = n*pi/lambda0`` for n = 1..n_max (oscillating regime only)."""
    if params.signed_gap <= 0.0:
        raise ValueError("working points exist only for |delta| > |kappa|")
    lam0 = lambda0(params)
    return np.arange(1, n_max + 1) * math.pi / lam0


def working_kappas(delta: float, t: float, n_values) -> np.ndarray:
    """Couplings with ``lambda0(delta, kappa)*t = n*pi`` at fixed delta and t.

    Returns ``kappa_n = sqrt(delta^2 - (n*pi/t)^2)`` for the n that satisfy
    ``n*pi/t < |delta|``; may be empty.
    """
    n = np.asarray(list(n_values), dtype=float)
    rate = n * math.pi / t
    keep = rate < abs(delta)
    return np.sqrt(delta**2 - rate[keep] ** 2)


def working_point_susceptibility(params: ModelParams, alpha: float, n: int) -> float:
    """Closed form of chi_kappa at ``t = n*pi/lambda0``.

    ``-(-1)^n * alpha * kappa * (kappa+delta) * n*pi / lambda0^3`` for the
    default convention ``alpha1 = i*alpha, alpha2 = alpha``; the (-1)^n factor
    drops for even n.
    """
    kappa = _require_real_kappa(params)
    lam0 = lambda0(params)
    sign = -1.0 if n % 2 else 1.0
    return -sign * alpha * kappa * (kappa + params.delta) * n * math.pi / lam0**3


def working_point_qfi(params: ModelParams, alpha: float, n: int) -> float:
    """Closed form of the QFI at a working point:
    ``[8 + 4 kappa^2 / (alpha^2 (kappa+delta)^2)] * chi^2``.
    """
    kappa = _require_real_kappa(params)
    chi = working_point_susceptibility(params, alpha, n)
    return (8.0 + 4.0 * kappa**2 / (alpha**2 * (kappa + params.delta) ** 2)) * chi**2


@dataclass(frozen=True)
class EstimateSummary:
    """Result of a Monte-Carlo homodyne estimation run."""

    estimate: float
    est_variance: float
    shots: int
    seed: int
    chunk_size: int = field(default=4096, repr=False)

    def to_dict(self) -> dict:
        return {
            "estimate": self.estimate,
            "est_variance": self.est_variance,
            "shots": self.shots,
            "seed": self.seed,
        }


def _chunk_samples(mean: float, sigma: float, shots: int, seed: int, chunk_size: int):
    """Deterministic chunked Gaussian sampling with a counter-based generator.

    Chunk i always uses ``Philox(seed).jumped(i)``, so the merged stream is
    identical whether chunks are drawn serially or in parallel workers.
    """
    base = np.random.Philox(seed)
    out = []
    for i in range(0, shots, chunk_size):
        n = min(chunk_size, shots - i)
        rng = np.random.Generator(base.jumped(i // chunk_size))
        out.append(rng.normal(mean, sigma, size=n))
    return np.concatenate(out)


def monte_carlo_estimate(
    config: SensorConfig,
    true_params: ModelParams,
    shots: int,
    seed: int,
    chunk_size: int = 4096,
    min_chi: float = 1e-9,
) -> EstimateSummary:
    """Simulate ``shots`` homodyne measurements and invert the linearized model.

    Samples are drawn from the Gaussian quadrature marginal of the state
    evolved under ``true_params``; the estimator is
    ``x0 + (sample_mean - model_mean(x0)) / chi(x0)`` with x0 the assumed
    parameter from ``config``.  ``est_variance`` is the empirical variance of
    the estimate, ``Var[x]/(shots * chi^2)``; near a working point it should
    match ``Delta^2/shots``.
    """
    if shots < 100:
        raise ValueError("shots must be at least 100")
    chi = susceptibility(config)
    if abs(chi) < min_chi:
        raise IllConditionedEstimatorError(
            f"|chi| = {abs(chi):.3e} below {min_chi:.1e}; estimator ill-conditioned"
        )
    t = config.resolved_time()
    model_mean = quadrature_mean(
        config.params, t, config.alphas, config.phi, config.mode
    )
    true_mean = quadrature_mean(true_params, t, config.alphas, config.phi, config.mode)
    true_var = quadrature_variance(true_params, t)
    samples = _chunk_samples(true_mean, math.sqrt(true_var), shots, seed, chunk_size)

    x0 = config.params.kappa.real if config.wrt == "kappa" else config.params.delta
    estimate = x0 + (samples.mean() - model_mean) / chi
    est_variance = samples.var(ddof=1) / (shots * chi**2)
    return EstimateSummary(
        estimate=float(estimate),
        est_variance=float(est_variance),
        shots=shots,
        seed=seed,
        chunk_size=chunk_size,
    )
