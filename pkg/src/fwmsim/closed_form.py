"""Closed-form photon statistics and duality metrics of the dual-cell model.

All expressions depend on the seed only through its mean photon number
|alpha|^2 and on the path transmittance only through |T|; complex values are
accepted at the boundary and reduced immediately.  The mode-overlap scalar
``gamma`` enters the induced counting-rate component only.

Note: with gamma < 1 the visibility drops below the ideal-overlap value, so
the complementarity residuals reported by :func:`duality_metrics` are always
evaluated against the gamma = 1 visibility, where the identities are exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


@dataclass(frozen=True)
class InterferometerParams:
    """Knobs of the coupled double-path interferometer."""

    T: complex = 1.0
    gamma: float = 1.0
    alpha_sq: float = 0.0
    coupling_sq: float = 1.0
    dphi: float = 0.0

    def __post_init__(self):
        if abs(self.T) > 1.0:
            raise ValueError(f"|T| = {abs(self.T):.6g} > 1")
        if not 0.0 <= self.gamma <= 1.0:
            raise ValueError(f"gamma = {self.gamma} outside [0, 1]")
        if self.alpha_sq < 0.0:
            raise ValueError("alpha_sq must be >= 0")
        if self.coupling_sq < 0.0:
            raise ValueError("coupling_sq must be >= 0")


@dataclass(frozen=True)
class CountingRate:
    """Idler counting rate split into its induced and stimulated parts."""

    total: float
    induced: float
    stimulated: float


@dataclass(frozen=True)
class DualityMetrics:
    V: float
    K: float
    P: float
    C: float
    residual_VK: float
    residual_KPC: float


def mean_signal_photons(alpha_sq: float, r: float) -> float:
    """<n_s> = |alpha|^2 cosh^2 r + sinh^2 r."""
    return alpha_sq * math.cosh(abs(r)) ** 2 + math.sinh(abs(r)) ** 2


def mean_idler_photons(alpha_sq: float, r: float) -> float:
    """<n_i> = (|alpha|^2 + 1) sinh^2 r."""
    return (alpha_sq + 1.0) * math.sinh(abs(r)) ** 2


def g2_signal(alpha_sq: float, r: float) -> float:
    """Zero-delay g2 of the seeded (signal) mode of a squeezed coherent state."""
    if alpha_sq < 0.0:
        raise ValueError("alpha_sq must be >= 0")
    c2 = math.cosh(abs(r)) ** 2
    s2 = math.sinh(abs(r)) ** 2
    denom = alpha_sq * c2 + s2
    if denom == 0.0:
        raise ValueError("g2 undefined for vacuum input (alpha_sq = 0, r = 0)")
    num = alpha_sq**2 * c2**2 + 4.0 * alpha_sq * c2 * s2 + 2.0 * s2**2
    return num / denom**2


def g2_idler(alpha_sq: float) -> float:
    """g2_i(0) = 1 + (2|alpha|^2 + 1) / (|alpha|^2 + 1)^2; r-independent."""
    if alpha_sq < 0.0:
        raise ValueError("alpha_sq must be >= 0")
    return 1.0 + (2.0 * alpha_sq + 1.0) / (alpha_sq + 1.0) ** 2


def counting_rate(p: InterferometerParams) -> CountingRate:
    """Single-photon idler rate R = R_induced + R_stimulated.

    induced    = |gtA|^2 [2 + 2 |T| gamma cos(dphi)]
    stimulated = |gtA|^2 |alpha|^2 [|T|^2 + 1 + 2 |T| cos(dphi)]

    At gamma = 1 the sum reduces to the ideal-overlap rate
    |gtA|^2 [|alpha|^2 (|T|^2 + 1) + 2 + 2 |T| (|alpha|^2 + 1) cos(dphi)].
    """
    t = abs(p.T)
    cos = math.cos(p.dphi)
    induced = p.coupling_sq * (2.0 + 2.0 * t * p.gamma * cos)
    stimulated = p.coupling_sq * p.alpha_sq * (t * t + 1.0 + 2.0 * t * cos)
    return CountingRate(induced + stimulated, induced, stimulated)


def counting_rate_ideal(T: complex, alpha_sq: float, dphi: float,
                        coupling_sq: float = 1.0) -> float:
    """The gamma = 1 rate evaluated in its un-split form (for cross-checks)."""
    t = abs(T)
    return coupling_sq * (
        alpha_sq * (t * t + 1.0)
        + 2.0
        + 2.0 * t * (alpha_sq + 1.0) * math.cos(dphi)
    )


def _coherence_fraction(T: complex, alpha_sq: float) -> float:
    """2 |T| (|alpha|^2 + 1) / (|alpha|^2 (1 + |T|^2) + 2), shared by V and K.

    The denominator grouping matters: written this way, numerator and
    denominator round to the same float at |T| = 1, so V = 1 and K = 0 come
    out exact instead of sqrt(eps)-contaminated.
    """
    t = abs(T)
    return 2.0 * t * (alpha_sq + 1.0) / (alpha_sq * (1.0 + t * t) + 2.0)


def visibility(T: complex, alpha_sq: float, gamma: float = 1.0) -> float:
    """Fringe visibility V = 2|T|(|alpha|^2 + gamma) / (|alpha|^2(1+|T|^2) + 2)."""
    if abs(T) > 1.0:
        raise ValueError("|T| > 1")
    if not 0.0 <= gamma <= 1.0:
        raise ValueError("gamma outside [0, 1]")
    if alpha_sq < 0.0:
        raise ValueError("alpha_sq must be >= 0")
    t = abs(T)
    if gamma == 1.0:
        return _coherence_fraction(T, alpha_sq)
    return 2.0 * t * (alpha_sq + gamma) / (alpha_sq * (1.0 + t * t) + 2.0)


def distinguishability(T: complex, alpha_sq: float) -> float:
    """Which-path knowledge K = sqrt(1 - 4 |rho_12|^2) of the idler path qubit."""
    x = _coherence_fraction(T, alpha_sq)
    return math.sqrt(max(0.0, 1.0 - x * x))


def predictability(T: complex, alpha_sq: float) -> float:
    """A-priori path imbalance P = |alpha|^2 (1 - |T|^2) / (2 + |alpha|^2 + |alpha T|^2)."""
    t = abs(T)
    return alpha_sq * (1.0 - t * t) / (2.0 + alpha_sq + alpha_sq * t * t)


def concurrence(T: complex, alpha_sq: float) -> float:
    """Path-qubit entanglement C = 2 sqrt((1-|T|^2)(1+|alpha|^2)) / (2+|alpha|^2+|alpha T|^2)."""
    t = abs(T)
    return (
        2.0
        * math.sqrt(max(0.0, (1.0 - t * t) * (1.0 + alpha_sq)))
        / (2.0 + alpha_sq + alpha_sq * t * t)
    )


def duality_metrics(T: complex, alpha_sq: float, gamma: float = 1.0) -> DualityMetrics:
    """Bundle V (at the given gamma), K, P, C and the identity residuals.

    The residuals |V^2 + K^2 - 1| and |K^2 - P^2 - C^2| use the gamma = 1
    visibility; imperfect mode overlap only degrades the observed V.
    """
    V = visibility(T, alpha_sq, gamma)
    V1 = _coherence_fraction(T, alpha_sq)
    K = distinguishability(T, alpha_sq)
    P = predictability(T, alpha_sq)
    C = concurrence(T, alpha_sq)
    residual_vk = abs(V1 * V1 + K * K - 1.0)
    residual_kpc = abs(K * K - P * P - C * C)
    return DualityMetrics(V, K, P, C, residual_vk, residual_kpc)
