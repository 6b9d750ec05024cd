"""Closed-form dynamics of a two-mode bosonic pair-coupling model.

The Hermitian Hamiltonian ``delta*(n1 + n2) + i*kappa*(a1^ a2^ - a1 a2)``
(hbar = 1) closes the Heisenberg equations of ``(a1, a2^)`` on the
non-Hermitian 2x2 dynamical matrix

    H = [[delta, i*kappa], [i*conj(kappa), -delta]],

which anticommutes with the combined parity-conjugation operation.  Its
eigenvalues are ``+-lambda0`` with ``lambda0 = sqrt(|delta^2 - |kappa|^2|)``:
real for ``|delta| > |kappa|`` (oscillating, "broken" side), imaginary for
``|kappa| > |delta|`` (exponentially growing, "symmetric" side), and zero at
the exceptional point ``|kappa| = |delta|`` where the eigenvectors coalesce.

Mode operators evolve as ``a_j(t) = A a_j(0) + B conj-mode^(0)`` with complex
transfer coefficients satisfying ``|A|^2 - |B|^2 = 1``.  Everything here is a
pure function of ``(delta, kappa, t)``; no shared state, safe to call from
any thread.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np

from .errors import CoalescenceError, DegenerateModelError, NoGroundStateError

__all__ = [
    "ModelParams",
    "Regime",
    "TransferCoeffs",
    "SqueezeSummary",
    "CoherentPair",
    "QuadratureStats",
    "Eigensystem",
    "classify_regime",
    "lambda0",
    "eigensystem",
    "transfer_coeffs",
    "transfer_matrix",
    "squeeze_summary",
    "quadrature_mean",
    "quadrature_variance",
    "quadrature_stats",
    "ground_state_param",
]

# Unified even/odd series kick in below this value of |lambda0*t|; on that
# scale the closed cos/cosh and sin/sinh forms lose digits to cancellation.
_SERIES_CUTOFF = 1e-4


@dataclass(frozen=True)
class ModelParams:
    """Detuning and coupling of the two-mode model (angular frequencies, hbar=1).

    ``kappa`` may be complex (needed when the coupling inherits the phase of a
    condensate amplitude); the main-text model has it real.
    """

    delta: float
    kappa: complex

    def __post_init__(self):
        if not (math.isfinite(self.delta) and cmath.isfinite(complex(self.kappa))):
            raise ValueError("delta and kappa must be finite")

    @property
    def signed_gap(self) -> float:
        """``delta^2 - |kappa|^2``; its sign selects the dynamical regime."""
        return self.delta**2 - abs(self.kappa) ** 2


class Regime(Enum):
    BROKEN = "broken"
    EXCEPTIONAL_POINT = "exceptional_point"
    SYMMETRIC = "symmetric"


@dataclass(frozen=True)
class TransferCoeffs:
    """Bogoliubov transfer pair: ``a_j(t) = A a_j(0) + B a_jbar^(0)``."""

    A: complex
    B: complex

    @property
    def A0(self) -> float:
        return abs(self.A)

    @property
    def B0(self) -> float:
        return abs(self.B)

    @property
    def phi_A(self) -> float:
        return cmath.phase(self.A)

    @property
    def phi_B(self) -> float:
        return cmath.phase(self.B)

    def matrix(self) -> np.ndarray:
        """2x2 transfer matrix ``[[A, B], [B*, A*]]``."""
        return np.array(
            [[self.A, self.B], [np.conj(self.B), np.conj(self.A)]], dtype=complex
        )


@dataclass(frozen=True)
class SqueezeSummary:
    """Squeezing factor and angles at one instant.

    ``S = |A| + |B| >= 1``.  ``phi_plus`` is the squeezing angle
    ``(Arg B + Arg A)/2``; ``phi_minus = (Arg B - Arg A)/2`` is reported but
    irrelevant for isotropic initial states.  ``period_T`` and ``s_max`` are
    filled only on the oscillating side (real eigenvalues).
    """

    S: float
    phi_plus: float
    phi_minus: float
    period_T: Optional[float] = None
    s_max: Optional[float] = None


@dataclass(frozen=True)
class CoherentPair:
    """Coherent amplitudes of the two modes."""

    alpha1: complex
    alpha2: complex

    def __post_init__(self):
        if not (cmath.isfinite(complex(self.alpha1)) and cmath.isfinite(complex(self.alpha2))):
            raise ValueError("coherent amplitudes must be finite")

    @classmethod
    def quadrature_convention(cls, alpha: float) -> "CoherentPair":
        """Default sensing convention ``alpha1 = i*alpha, alpha2 = alpha``.

        With a phi=0 quadrature measurement on mode 1 this makes the mean
        signal ``alpha*sin(lambda0*t)*(kappa+delta)/lambda0``.
        """
        return cls(1j * alpha, complex(alpha))


@dataclass(frozen=True)
class QuadratureStats:
    """Mean and variance of one quadrature measurement."""

    mean: float
    variance: float


@dataclass(frozen=True)
class Eigensystem:
    """Biorthogonal eigensystem of the 2x2 dynamical matrix.

    Normalized so that ``vdot(l_s, r_s) = 1`` and ``vdot(l_s, r_s') = 0``;
    ``sum_s r_s exp(-i lambda_s t) l_s^dag`` reconstructs the transfer matrix.
    """

    lambda_plus: complex
    lambda_minus: complex
    r_plus: np.ndarray
    r_minus: np.ndarray
    l_plus: np.ndarray
    l_minus: np.ndarray

    def reconstruct(self, t: float) -> np.ndarray:
        out = np.zeros((2, 2), dtype=complex)
        for lam, r, l in (
            (self.lambda_plus, self.r_plus, self.l_plus),
            (self.lambda_minus, self.r_minus, self.l_minus),
        ):
            out += cmath.exp(-1j * lam * t) * np.outer(r, np.conj(l))
        return out


# --- entire-function helpers -------------------------------------------------
#
# With s = delta^2 - |kappa|^2 both regime branches collapse onto two entire
# functions of u = s*t^2:
#   _cos_like  = cos(sqrt(s) t)        (s>0)  = cosh(sqrt(-s) t)  (s<0)
#   _sinc_like = sin(sqrt(s) t)/sqrt(s)(s>0)  = sinh(...)/sqrt(-s)(s<0)
# so the coefficients are continuous across s=0 and never divide by lambda0.


def _cos_like(s: float, t: float) -> float:
    u = s * t * t
    if abs(u) < _SERIES_CUTOFF**2:
        return 1.0 - u / 2.0 + u * u / 24.0 - u**3 / 720.0
    r = math.sqrt(abs(s)) * abs(t)
    return math.cos(r) if s > 0.0 else math.cosh(r)


def _sinc_like(s: float, t: float) -> float:
    u = s * t * t
    if abs(u) < _SERIES_CUTOFF**2:
        return t * (1.0 - u / 6.0 + u * u / 120.0 - u**3 / 5040.0)
    r = math.sqrt(abs(s))
    return math.sin(r * t) / r if s > 0.0 else math.sinh(r * t) / r


def _dsinc_ds(s: float, t: float) -> float:
    """d/ds of ``_sinc_like`` at fixed t; series form survives s -> 0."""
    u = s * t * t
    if abs(u) < _SERIES_CUTOFF**2:
        return t**3 * (-1.0 / 6.0 + u / 60.0 - u * u / 1680.0 + u**3 / 90720.0)
    return (t * _cos_like(s, t) - _sinc_like(s, t)) / (2.0 * s)


def _dcos_ds(s: float, t: float) -> float:
    """d/ds of ``_cos_like``; exact identity, no cancellation."""
    return -0.5 * t * _sinc_like(s, t)


# --- operations ---------------------------------------------------------------


def classify_regime(params: ModelParams, tol: float = 1e-12) -> Regime:
    """Classify by comparing |kappa| and |delta| with relative tolerance ``tol``.

    Classification is advisory: the transfer coefficients never branch on it.
    """
    if not 0.0 < tol <= 1e-3:
        raise ValueError(f"tol must lie in (0, 1e-3], got {tol}")
    ad, ak = abs(params.delta), abs(params.kappa)
    scale = max(ad, ak)
    if scale == 0.0:
        raise DegenerateModelError("delta = kappa = 0 has no regime")
    if abs(ak - ad) <= tol * scale:
        return Regime.EXCEPTIONAL_POINT
    return Regime.BROKEN if ad > ak else Regime.SYMMETRIC


def lambda0(params: ModelParams) -> float:
    """Eigenvalue scale ``sqrt(| |kappa|^2 - delta^2 |)``; zero at the EP."""
    return math.sqrt(abs(params.signed_gap))


def eigensystem(params: ModelParams, tol: float = 1e-12) -> Eigensystem:
    """Biorthogonal left/right eigenpairs of ``[[d, ik], [ik*, -d]]``.

    Raises ``CoalescenceError`` within ``tol`` of the exceptional point, where
    the two eigenvectors become parallel and the biorthogonal normalization
    blows up.
    """
    regime = classify_regime(params, tol)
    if regime is Regime.EXCEPTIONAL_POINT:
        raise CoalescenceError(
            "eigenvectors coalesce at |kappa| = |delta|; no biorthogonal pair"
        )
    delta = params.delta
    kappa = complex(params.kappa)
    lam0 = lambda0(params)
    lam_p = complex(lam0) if regime is Regime.BROKEN else 1j * lam0
    lam_m = -lam_p

    def right(lam: complex) -> np.ndarray:
        # Two algebraically equivalent forms; pick the better-conditioned one.
        v1 = np.array([1j * kappa, lam - delta], dtype=complex)
        v2 = np.array([lam + delta, 1j * np.conj(kappa)], dtype=complex)
        return v1 if np.linalg.norm(v1) >= np.linalg.norm(v2) else v2

    def left(lam: complex) -> np.ndarray:
        v1 = np.array([-1j * kappa, np.conj(lam) - delta], dtype=complex)
        v2 = np.array([np.conj(lam) + delta, -1j * np.conj(kappa)], dtype=complex)
        return v1 if np.linalg.norm(v1) >= np.linalg.norm(v2) else v2

    pairs = []
    for lam in (lam_p, lam_m):
        r = right(lam)
        r = r / np.linalg.norm(r)
        l = left(lam)
        l = l / np.conj(np.vdot(l, r))
        pairs.append((r, l))
    (r_p, l_p), (r_m, l_m) = pairs
    return Eigensystem(lam_p, lam_m, r_p, r_m, l_p, l_m)


def transfer_coeffs(params: ModelParams, t: float) -> TransferCoeffs:
    """Transfer pair (A, B) after evolution time ``t`` (negative allowed).

    ``A = C - i*delta*G`` and ``B = kappa*G`` where C, G are the cos-like and
    sinc-like entire functions of ``s = delta^2 - |kappa|^2``; this single
    expression covers the oscillating side, the exceptional point
    (``A = 1 - i*delta*t``, ``B = kappa*t``) and the growing side.
    """
    if not math.isfinite(t):
        raise ValueError("t must be finite")
    s = params.signed_gap
    c = _cos_like(s, t)
    g = _sinc_like(s, t)
    return TransferCoeffs(A=c - 1j * params.delta * g, B=complex(params.kappa) * g)


def transfer_matrix(params: ModelParams, t: float) -> np.ndarray:
    """2x2 matrix form ``[[A, B], [B*, A*]]`` of the transfer pair."""
    return transfer_coeffs(params, t).matrix()


def squeeze_summary(params: ModelParams, t: float) -> SqueezeSummary:
    """Squeezing factor ``S = |A| + |B|`` and angles at time ``t >= 0``.

    At the isolated times where B vanishes the phase of B is undefined; the
    reported angle uses the one-sided limit approached with growing S, which
    is ``Arg[kappa * sign(cos_like)]`` (equal to ``Arg[kappa]`` at t=0).
    """
    if t < 0.0:
        raise ValueError("squeeze_summary requires t >= 0")
    coeffs = transfer_coeffs(params, t)
    S = coeffs.A0 + coeffs.B0
    phi_a = coeffs.phi_A
    if coeffs.B0 > 0.0:
        phi_b = coeffs.phi_B
    else:
        sign = 1.0 if _cos_like(params.signed_gap, t) >= 0.0 else -1.0
        phi_b = cmath.phase(sign * complex(params.kappa))
    summary = SqueezeSummary(
        S=S, phi_plus=0.5 * (phi_b + phi_a), phi_minus=0.5 * (phi_b - phi_a)
    )
    s = params.signed_gap
    if s > 0.0:
        lam0 = math.sqrt(s)
        ad, ak = abs(params.delta), abs(params.kappa)
        summary = SqueezeSummary(
            S=summary.S,
            phi_plus=summary.phi_plus,
            phi_minus=summary.phi_minus,
            period_T=math.pi / lam0,
            s_max=math.sqrt((ad + ak) / (ad - ak)),
        )
    return summary


def _heisenberg_mean(params: ModelParams, t: float, alphas: CoherentPair, mode: int) -> complex:
    coeffs = transfer_coeffs(params, t)
    if mode == 1:
        return coeffs.A * alphas.alpha1 + coeffs.B * np.conj(alphas.alpha2)
    if mode == 2:
        return coeffs.A * alphas.alpha2 + coeffs.B * np.conj(alphas.alpha1)
    raise ValueError(f"mode must be 1 or 2, got {mode}")


def quadrature_mean(
    params: ModelParams,
    t: float,
    alphas: CoherentPair,
    phi: float = 0.0,
    mode: int = 1,
) -> float:
    """Mean of the quadrature ``[exp(-i phi) a_mode(t) + h.c.]/2``.

    Equals ``Re[exp(-i phi) (A alpha_j + B conj(alpha_jbar))]`` for a coherent
    initial state.
    """
    return (cmath.exp(-1j * phi) * _heisenberg_mean(params, t, alphas, mode)).real


def quadrature_variance(params: ModelParams, t: float) -> float:
    """Quadrature variance ``(|A|^2 + |B|^2)/4``.

    Independent of the measurement angle, the mode, and the coherent
    amplitudes; equals the vacuum value 1/4 exactly when B = 0.
    """
    coeffs = transfer_coeffs(params, t)
    return 0.25 * (coeffs.A0**2 + coeffs.B0**2)


def quadrature_stats(
    params: ModelParams,
    t: float,
    alphas: CoherentPair,
    phi: float = 0.0,
    mode: int = 1,
) -> QuadratureStats:
    return QuadratureStats(
        mean=quadrature_mean(params, t, alphas, phi, mode),
        variance=quadrature_variance(params, t),
    )


def ground_state_param(params: ModelParams) -> complex:
    """Pair-squeezing parameter q of the quadratic Hamiltonian's ground state.

    The normalizable state ``sqrt(1-|q|^2) sum_n q^n |n,n>`` annihilated by
    both Bogoliubov eigenmodes has ``q = i*(lambda0 - delta)/kappa``, which
    exists only for ``delta > |kappa| > 0`` (elsewhere the Hamiltonian cannot
    be diagonalized into bosonic modes or is unbounded from below).
    """
    kappa = complex(params.kappa)
    if kappa == 0:
        raise NoGroundStateError("kappa = 0 has a trivial decoupled ground state")
    if params.delta <= abs(kappa):
        raise NoGroundStateError(
            "no normalizable ground state unless delta > |kappa|"
        )
    # i*(lambda0 - delta)/kappa rewritten without the small-kappa cancellation
    q = -1j * np.conj(kappa) / (params.delta + lambda0(params))
    assert abs(q) < 1.0
    return q
