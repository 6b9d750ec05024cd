"""Map four-wave-mixing laboratory parameters onto the two-mode model.

Two weak fields co-propagating through a pumped atomic vapor couple through
the third-order nonlinearity; the propagation distance plays the role of the
evolution time (t = z).  The phase mismatch sets the detuning and the
nonlinear coupling sets kappa, after a gauge rotation of one mode.

All inputs are SI-derived (rad/m for wave vectors, rad/s for rates); no unit
inference is attempted.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .dynamics import ModelParams

__all__ = ["FwmParams", "fwm_coupling", "phase_mismatch"]


@dataclass(frozen=True)
class FwmParams:
    """Pump/coupling lasers, medium, and geometry of the mixing scheme.

    ``omega_c``, ``omega_p``: coupling and pump Rabi frequencies;
    ``delta_p``: pump detuning; ``n_a``: atomic density; ``sigma_13``,
    ``sigma_24``: absorption cross sections; ``gamma_12/13/14``: dephasing
    and decay rates; ``k1``, ``k2``, ``kc``, ``kp``: wave-vector magnitudes
    of the two weak fields and the coupling/pump beams (rad/m);
    ``theta_cp``: pump-coupling angle (radians).
    """

    omega_c: float
    omega_p: float
    delta_p: float
    n_a: float
    sigma_13: float
    sigma_24: float
    gamma_12: float
    gamma_13: float
    gamma_14: float
    k1: float
    k2: float
    kc: float
    kp: float
    theta_cp: float

    def __post_init__(self):
        for name in ("n_a", "sigma_13", "sigma_24", "gamma_12", "gamma_13", "gamma_14"):
            if getattr(self, name) <= 0.0:
                raise ValueError(f"{name} must be positive")
        if self.delta_p == 0.0:
            raise ValueError("delta_p must be nonzero")
        for name in ("k1", "k2", "kc", "kp"):
            if getattr(self, name) <= 0.0:
                raise ValueError(f"{name} must be positive")


def fwm_coupling(p: FwmParams) -> float:
    """Nonlinear coupling strength (rad/m):

        kt = n_a*sqrt(sigma_13*sigma_24*gamma_13*gamma_14)
             / (|omega_c|^2 + 4*gamma_13*gamma_12) * omega_p*omega_c/(2*delta_p)

    Linear in 1/delta_p; the sign follows sign(omega_p*omega_c/delta_p).
    """
    prefactor = (
        p.n_a
        * math.sqrt(p.sigma_13 * p.sigma_24 * p.gamma_13 * p.gamma_14)
        / (abs(p.omega_c) ** 2 + 4.0 * p.gamma_13 * p.gamma_12)
    )
    return prefactor * p.omega_p * p.omega_c / (2.0 * p.delta_p)


def phase_mismatch(p: FwmParams) -> tuple[float, ModelParams]:
    """Phase mismatch and the mapped model parameters.

    ``dk = k1 + k2 - (kc + kp) cos(theta_cp)``; the gauge-rotated mode
    equations then read off ``delta = -dk/2`` and ``kappa = -kt``, with the
    medium length playing the role of the evolution time.
    """
    dk = p.k1 + p.k2 - (p.kc + p.kp) * math.cos(p.theta_cp)
    return dk, ModelParams(delta=-dk / 2.0, kappa=-fwm_coupling(p))
