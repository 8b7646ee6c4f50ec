"""Chain parameters, dispersion relation and thermal mode weights.

The chain couples n = 2**m spins with an XX+YY interaction of anisotropy
``delta`` and a transverse field of strength ``g`` (in units of the
coupling).  Everything downstream is driven by the mode data computed
here: the mixing angles ``theta_j``, the mode energies ``eps_j`` and the
Bogoliubov coefficients ``u_j = cos(theta_j/2)``, ``v_j = sin(theta_j/2)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "ModelParams",
    "Spectrum",
    "ThermalWeights",
    "dispersion",
    "eigenenergy",
    "thermal_weights",
]


@dataclass(frozen=True)
class ModelParams:
    """Size and couplings of the chain; ``n`` must be a power of two >= 4."""

    n: int
    g: float
    delta: float
    m: int = field(init=False)

    def __post_init__(self):
        n = self.n
        if n < 4 or (n & (n - 1)) != 0:
            raise ValueError(f"n must be a power of two >= 4, got {n}")
        if not 0.0 <= self.delta <= 1.0:
            raise ValueError(f"delta must lie in [0, 1], got {self.delta}")
        if self.g < 0.0:
            raise ValueError(f"g must be >= 0, got {self.g}")
        object.__setattr__(self, "m", n.bit_length() - 1)


def _freeze(a: np.ndarray) -> np.ndarray:
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class Spectrum:
    """Mode data of the diagonalized chain (all arrays indexed by mode j)."""

    params: ModelParams
    alpha: np.ndarray
    beta: np.ndarray
    theta: np.ndarray
    eps: np.ndarray
    u: np.ndarray
    v: np.ndarray
    e0: float


def dispersion(params: ModelParams) -> Spectrum:
    """Mixing angles and mode energies for the given couplings.

    The angle branch is fixed by requiring eps_j >= 0 for every mode:
    theta_j = atan2(beta_j, alpha_j) shifted by pi (mod 2*pi) whenever the
    unshifted branch gives a negative energy.  The degenerate case
    alpha_j = beta_j = 0 keeps theta_j = 0.
    """
    n, g, delta = params.n, params.g, params.delta
    j = np.arange(n)
    ang = 2.0 * np.pi * j / n
    alpha = np.cos(ang) * (1.0 + delta) - g
    beta = np.sin(ang) * (1.0 - delta)

    base = np.arctan2(beta, alpha)
    eps_base = -2.0 * (alpha * np.cos(base) + beta * np.sin(base))
    theta = np.where(eps_base < 0.0, np.mod(base + np.pi, 2.0 * np.pi), base)
    eps = 2.0 * np.hypot(alpha, beta)

    u = np.cos(theta / 2.0)
    v = np.sin(theta / 2.0)
    e0 = -0.5 * float(eps.sum())
    return Spectrum(
        params=params,
        alpha=_freeze(alpha),
        beta=_freeze(beta),
        theta=_freeze(theta),
        eps=_freeze(eps),
        u=_freeze(u),
        v=_freeze(v),
        e0=e0,
    )


def eigenenergy(spec: Spectrum, k: int) -> float:
    """Energy of the eigenstate labelled by the mode word k.

    Bit l of k (the coefficient of 2**l) marks mode l as excited, so the
    returned value is e0 plus the sum of the excited mode energies.
    """
    n = spec.params.n
    if not 0 <= k < (1 << n):
        raise ValueError(f"mode word out of range: {k}")
    e = spec.e0
    eps = spec.eps
    l = 0
    while k:
        if k & 1:
            e += eps[l]
        k >>= 1
        l += 1
    return float(e)


@dataclass(frozen=True)
class ThermalWeights:
    """Per-mode occupation weights (a_k empty, b_k occupied) at temperature T."""

    T: float
    a: np.ndarray
    b: np.ndarray


def thermal_weights(spec: Spectrum, T: float) -> ThermalWeights:
    """Boltzmann weights of each mode; T = 0 is taken as the explicit limit."""
    if T < 0.0:
        raise ValueError(f"temperature must be >= 0, got {T}")
    eps = spec.eps
    if T == 0.0:
        a = np.where(eps > 0.0, 1.0, 0.5)
    elif math.isinf(T):
        a = np.full_like(eps, 0.5)
    else:
        a = 1.0 / (1.0 + np.exp(-eps / T))
    b = 1.0 - a
    return ThermalWeights(T=float(T), a=_freeze(a), b=_freeze(b))
