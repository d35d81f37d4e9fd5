"""State-level model of the dual-cell coupled Mach-Zehnder interferometer.

Two squeezing cells share one signal path: Cell1 squeezes (i1, s1) seeded by
a coherent state, a beam splitter with transmittance T couples s1 to an
auxiliary vacuum port s0, and Cell2 squeezes (i2, s) on the transmitted
port.  Idler detection interferes i1 and i2 with a relative phase dphi.

Two constructions are provided: the first-order (single pair) superposition,
and a full-unitary chain on the truncated Fock space that converges to it as
the squeezing goes to zero.  Both feed the same metric extractors, which is
what makes them useful as mutual cross-checks against the closed forms.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass

import numpy as np

from . import fock
from .closed_form import DualityMetrics
from .fock import SourceParams, TruncatedState

MODES = ("i1", "i2", "s1", "s0")

PERTURBATIVE_COUPLING_WARN = 0.1


@dataclass(frozen=True)
class JointState:
    """Four-mode state over (i1, i2, s1, s0) plus its construction metadata."""

    state: TruncatedState
    c1: complex
    c2: complex
    alpha: complex
    T: complex
    perturbative: bool


@dataclass(frozen=True)
class IdlerPathDensity:
    """2x2 idler density matrix on the path basis {|1,0>, |0,1>}.

    ``sector_weight`` is the probability of the single-excitation sector in
    the full state, i.e. the constant the raw block was divided by to reach
    unit trace ("excluding the vacuum state").
    """

    entries: np.ndarray
    sector_weight: float

    def __post_init__(self):
        rho = np.asarray(self.entries, dtype=complex)
        object.__setattr__(self, "entries", rho)
        if rho.shape != (2, 2):
            raise ValueError("path density must be 2x2")
        if np.max(np.abs(rho - rho.conj().T)) > 1e-10:
            raise ValueError("path density not Hermitian")
        if abs(np.trace(rho).real - 1.0) > 1e-10:
            raise ValueError("path density trace != 1")
        rho.setflags(write=False)


def build_perturbative_state(
    src1: SourceParams,
    src2: SourceParams,
    T: complex,
    alpha: complex,
    signal_dim: int | None = None,
) -> JointState:
    """First-order joint state of the two cells.

    Keeps the vacuum term plus the three single-idler-excitation terms:
    c1 on (i1 photon, photon-added seed), c2 T* on (i2 photon, photon-added
    seed), c2 R on (i2 photon, untouched seed, one photon in s0).  Idler and
    s0 cutoffs are exactly 2 because the construction never populates them
    further; only the seeded signal mode needs a real cutoff.
    """
    if abs(T) > 1.0:
        raise ValueError(f"|T| = {abs(T):.6g} > 1")
    c1, c2 = src1.c, src2.c
    alpha = complex(alpha)
    for k, c in (("1", c1), ("2", c2)):
        if abs(c * alpha) > PERTURBATIVE_COUPLING_WARN:
            warnings.warn(
                f"|c{k} * alpha| = {abs(c * alpha):.3g} is not small; "
                "the first-order state is unreliable",
                stacklevel=2,
            )
    ds = signal_dim if signal_dim is not None else fock.default_dim(abs(alpha) ** 2)
    coh = fock.coherent_state(alpha, ds)
    coh_amps = coh.amplitudes
    added = fock.create(ds) @ coh_amps  # a† |alpha>, unnormalized
    # weight that a† pushed past the cutoff
    leakage = coh.leakage + ds * abs(coh_amps[-1]) ** 2
    R = math.sqrt(max(0.0, 1.0 - abs(T) ** 2))

    amps = np.zeros((2, 2, ds, 2), dtype=complex)
    amps[0, 0, :, 0] = coh_amps
    amps[1, 0, :, 0] = c1 * added
    amps[0, 1, :, 0] = c2 * np.conj(T) * added
    amps[0, 1, :, 1] = c2 * R * coh_amps
    state = TruncatedState(amps, MODES, leakage).normalized()
    return JointState(state, c1, c2, alpha, complex(T), perturbative=True)


def idler_reduced_density(joint: JointState) -> IdlerPathDensity:
    """Trace out both signal modes and restrict to one idler excitation.

    The restriction is a projection onto span{|1,0>, |0,1>} followed by
    renormalization, which drops the vacuum block and any multi-photon
    weight of the full chain.
    """
    dm = fock.partial_trace(joint.state, ("i1", "i2"))
    labels = dm.basis_labels
    try:
        idx = [labels.index((1, 0)), labels.index((0, 1))]
    except ValueError:
        raise ValueError("idler cutoffs too small for the path basis") from None
    block = dm.entries[np.ix_(idx, idx)]
    weight = float(np.trace(block).real)
    if weight <= 1e-30:
        raise ValueError("no single-idler-excitation weight (vacuum-only state)")
    return IdlerPathDensity(block / weight, weight)


def metrics_from_density(rho: IdlerPathDensity) -> DualityMetrics:
    """Operational duality metrics of the path qubit.

    V = 2|rho_12|, K = sqrt(1 - 4|rho_12|^2), P = |rho_11 - rho_22|,
    C = 2 sqrt(det rho).
    """
    m = rho.entries
    off = abs(m[0, 1])
    v = 2.0 * off
    k = math.sqrt(max(0.0, 1.0 - 4.0 * off * off))
    p = abs(float(m[0, 0].real - m[1, 1].real))
    det = float(np.linalg.det(m).real)
    c = 2.0 * math.sqrt(max(0.0, det))
    return DualityMetrics(
        V=v,
        K=k,
        P=p,
        C=c,
        residual_VK=abs(v * v + k * k - 1.0),
        residual_KPC=abs(k * k - p * p - c * c),
    )


def detection_rate(state: TruncatedState, dphi: float) -> float:
    """Idler counting rate <E- E+> with E+ = a_i1 + e^{i dphi} a_i2."""
    amp = fock.annihilated(state, "i1") + cmath.exp(1j * dphi) * fock.annihilated(
        state, "i2"
    )
    return float(np.vdot(amp, amp).real / state.norm_sq())


def fringe_scan(joint: JointState, phi_grid) -> list[tuple[float, float]]:
    """Evaluate the idler rate on the built state for each phase in the grid."""
    phis = list(phi_grid)
    if not phis:
        raise ValueError("phase grid is empty")
    return [(float(phi), detection_rate(joint.state, float(phi))) for phi in phis]


def fringe_visibility(joint: JointState) -> float:
    """(max - min)/(max + min) of the phase-scanned rate, evaluated exactly."""
    n1 = fock.mean_photon(joint.state, "i1")
    n2 = fock.mean_photon(joint.state, "i2")
    if n1 + n2 == 0.0:
        raise ValueError("no idler population; nothing interferes")
    x = abs(fock.mode_coherence(joint.state, "i1", "i2"))
    return 2.0 * x / (n1 + n2)


def nonperturbative_chain(
    src1: SourceParams,
    src2: SourceParams,
    T: complex,
    alpha: complex,
    dphi: float = 0.0,
    dim: int | None = None,
    idler_dim: int = 6,
    eps_trunc: float = fock.DEFAULT_EPS_TRUNC,
) -> tuple[float, JointState]:
    """Full-unitary chain: squeeze (i1,s1), split (s1,s0), squeeze (i2,s1).

    The transmitted output of the splitter is the signal input of Cell2.
    Returns the detected idler rate at ``dphi`` together with the state;
    converges to the first-order construction as the squeezing shrinks.
    """
    alpha = complex(alpha)
    r_max = max(abs(src1.r), abs(src2.r))
    ds = dim if dim is not None else fock.default_dim(abs(alpha) ** 2, r_max)
    psi = fock.tensor(
        fock.vacuum_state(("i1", "i2"), (idler_dim, idler_dim)),
        fock.coherent_state(alpha, ds, "s1"),
        fock.vacuum_state(("s0",), (ds,)),
    )
    psi = fock.two_mode_squeeze(psi, src1.r, ("i1", "s1"), eps_trunc)
    psi = fock.beam_splitter(psi, ("s1", "s0"), T, eps_trunc=eps_trunc)
    psi = fock.two_mode_squeeze(psi, src2.r, ("i2", "s1"), eps_trunc)
    joint = JointState(psi, src1.c, src2.c, alpha, complex(T), perturbative=False)
    return detection_rate(psi, dphi), joint


def nonperturbative_metrics(
    src1: SourceParams,
    src2: SourceParams,
    T: complex,
    alpha: complex,
    dim: int | None = None,
    idler_dim: int = 6,
) -> DualityMetrics:
    """Duality metrics from the full chain: V from the fringe contrast,
    K/P/C from the single-excitation idler path density."""
    _, joint = nonperturbative_chain(src1, src2, T, alpha, dim=dim, idler_dim=idler_dim)
    v = fringe_visibility(joint)
    kpc = metrics_from_density(idler_reduced_density(joint))
    return DualityMetrics(
        V=v,
        K=kpc.K,
        P=kpc.P,
        C=kpc.C,
        residual_VK=abs(v * v + kpc.K * kpc.K - 1.0),
        residual_KPC=kpc.residual_KPC,
    )
