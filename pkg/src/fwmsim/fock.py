"""Truncated Fock-space linear algebra for few-mode quantum optics.

States live on a dense complex tensor with one axis per optical mode and a
finite occupation cutoff per mode.  Unitaries (two-mode squeezer, beam
splitter) are built by exponentiating the truncated generator, so they are
exactly unitary on the truncated space; the error of working on a truncated
space is surfaced as a "leakage" estimate instead of being hidden.

Everything here is a pure function of its inputs; states are immutable and
safe to share across threads.
"""

from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm, logm

DEFAULT_EPS_TRUNC = 1e-8


class TruncationError(RuntimeError):
    """Raised when the estimated truncation leakage exceeds its budget."""


@dataclass(frozen=True)
class TruncatedState:
    """Pure state of ``len(modes)`` bosonic modes on a truncated Fock basis.

    ``amplitudes[n1, ..., nM]`` is the amplitude of the occupation state
    ``|n1, ..., nM>``; axis k belongs to ``modes[k]`` and has length equal to
    that mode's cutoff.  ``leakage`` is a conservative estimate of the
    probability the untruncated state would carry outside the kept basis.
    """

    amplitudes: np.ndarray
    modes: tuple[str, ...]
    leakage: float = 0.0

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex)
        object.__setattr__(self, "amplitudes", amps)
        object.__setattr__(self, "modes", tuple(self.modes))
        if amps.ndim != len(self.modes):
            raise ValueError(
                f"{len(self.modes)} mode labels for a rank-{amps.ndim} tensor"
            )
        if len(set(self.modes)) != len(self.modes):
            raise ValueError(f"duplicate mode labels: {self.modes}")
        if not self.modes:
            raise ValueError("need at least one mode")
        if any(d < 2 for d in amps.shape):
            raise ValueError(f"every mode needs cutoff >= 2, got {amps.shape}")
        amps.setflags(write=False)

    @property
    def dims(self) -> tuple[int, ...]:
        return self.amplitudes.shape

    def axis(self, mode: str) -> int:
        try:
            return self.modes.index(mode)
        except ValueError:
            raise ValueError(f"unknown mode {mode!r}; have {self.modes}") from None

    def dim(self, mode: str) -> int:
        return self.amplitudes.shape[self.axis(mode)]

    def norm_sq(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    def normalized(self) -> "TruncatedState":
        n = math.sqrt(self.norm_sq())
        if n == 0.0:
            raise ValueError("cannot normalize a zero state")
        return TruncatedState(self.amplitudes / n, self.modes, self.leakage)

    def occupation_probabilities(self, mode: str) -> np.ndarray:
        """Marginal occupation distribution of one mode."""
        p = np.abs(self.amplitudes) ** 2
        ax = self.axis(mode)
        other = tuple(i for i in range(p.ndim) if i != ax)
        out = p.sum(axis=other)
        return out / out.sum()


@dataclass(frozen=True)
class DensityMatrix:
    """Density matrix over an occupation basis, with basic sanity checks."""

    entries: np.ndarray
    basis_labels: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        rho = np.asarray(self.entries, dtype=complex)
        object.__setattr__(self, "entries", rho)
        object.__setattr__(self, "basis_labels", tuple(self.basis_labels))
        if rho.shape != (len(self.basis_labels),) * 2:
            raise ValueError("entries shape does not match basis labels")
        herm = np.max(np.abs(rho - rho.conj().T))
        if herm > 1e-12:
            raise ValueError(f"not Hermitian: max deviation {herm:.3e}")
        tr = float(np.trace(rho).real)
        if abs(tr - 1.0) > 1e-10:
            raise ValueError(f"trace {tr} != 1")
        evals = np.linalg.eigvalsh(rho)
        if evals.min() < -1e-10:
            raise ValueError(f"negative eigenvalue {evals.min():.3e}")
        rho.setflags(write=False)

    def purity(self) -> float:
        return float(np.trace(self.entries @ self.entries).real)

    def diagonal(self) -> np.ndarray:
        return np.diag(self.entries).real.copy()


@dataclass(frozen=True)
class SourceParams:
    """One squeezing cell: squeezing r, seed amplitude, coupling c = gAt.

    The nonperturbative oracle identifies |coupling| with |r| when coupling
    is not given; at first order the pair-creation amplitude equals r.
    """

    r: complex = 0.0
    alpha: complex = 0.0
    coupling: complex | None = None

    @property
    def c(self) -> complex:
        return complex(self.r) if self.coupling is None else complex(self.coupling)


def default_dim(alpha_sq: float, r: float = 0.0) -> int:
    """Per-mode cutoff heuristic: generous headroom over the mean occupation."""
    return max(12, math.ceil(6.0 * (alpha_sq + math.sinh(abs(r)) ** 2) + 6.0))


def destroy(dim: int) -> np.ndarray:
    """Single-mode annihilation operator on a ``dim``-level truncation."""
    return np.diag(np.sqrt(np.arange(1, dim, dtype=float)), k=1).astype(complex)


def create(dim: int) -> np.ndarray:
    return destroy(dim).conj().T


# ---------------------------------------------------------------------------
# state constructors


def basis_state(modes, dims, occupations) -> TruncatedState:
    """Occupation-number basis state ``|n1, ..., nM>``."""
    dims = tuple(int(d) for d in dims)
    occ = tuple(int(n) for n in occupations)
    if len(occ) != len(dims):
        raise ValueError("occupations and dims length mismatch")
    if any(n < 0 or n >= d for n, d in zip(occ, dims)):
        raise ValueError(f"occupation {occ} outside cutoffs {dims}")
    amps = np.zeros(dims, dtype=complex)
    amps[occ] = 1.0
    return TruncatedState(amps, tuple(modes))


def vacuum_state(modes, dims) -> TruncatedState:
    return basis_state(modes, dims, (0,) * len(tuple(modes)))


def coherent_state(alpha: complex, dim: int, mode: str = "s") -> TruncatedState:
    """Coherent state ``|alpha>`` truncated to ``dim`` levels and renormalized.

    The reported leakage is exact: the Poisson weight the untruncated state
    carries at n >= dim.
    """
    if dim < 2:
        raise ValueError(f"dim must be >= 2, got {dim}")
    alpha = complex(alpha)
    nbar = abs(alpha) ** 2
    if nbar > dim / 4.0:
        warnings.warn(
            f"|alpha|^2 = {nbar:.3g} exceeds dim/4 = {dim / 4:.3g}; "
            "truncation unreliable",
            stacklevel=2,
        )
    amps = np.empty(dim, dtype=complex)
    amps[0] = 1.0
    for n in range(1, dim):
        amps[n] = amps[n - 1] * alpha / math.sqrt(n)
    # Poisson tail mass beyond the cutoff
    p = math.exp(-nbar)
    kept = p
    for n in range(1, dim):
        p *= nbar / n
        kept += p
    leakage = max(0.0, 1.0 - kept)
    amps /= np.linalg.norm(amps)
    return TruncatedState(amps.reshape(dim), (mode,), leakage)


def tensor(*states: TruncatedState) -> TruncatedState:
    """Tensor product; mode labels must stay distinct."""
    amps = states[0].amplitudes
    modes: tuple[str, ...] = states[0].modes
    leakage = states[0].leakage
    for s in states[1:]:
        amps = np.tensordot(amps, s.amplitudes, axes=0)
        modes = modes + s.modes
        leakage += s.leakage
    return TruncatedState(amps, modes, leakage)


# ---------------------------------------------------------------------------
# applying operators


def _apply_single(amps: np.ndarray, op: np.ndarray, ax: int) -> np.ndarray:
    out = np.tensordot(op, amps, axes=([1], [ax]))
    return np.moveaxis(out, 0, ax)


def _apply_pair(amps: np.ndarray, U: np.ndarray, ax1: int, ax2: int) -> np.ndarray:
    da, db = amps.shape[ax1], amps.shape[ax2]
    U4 = U.reshape(da, db, da, db)
    out = np.tensordot(U4, amps, axes=([2, 3], [ax1, ax2]))
    return np.moveaxis(out, [0, 1], [ax1, ax2])


def _edge_mass(amps: np.ndarray, axes) -> float:
    """Probability of any listed mode sitting at its top retained level."""
    p = np.abs(amps) ** 2
    sl = [slice(None)] * p.ndim
    for ax in axes:
        sl[ax] = slice(0, -1)
    return float(p.sum() - p[tuple(sl)].sum())


def annihilated(state: TruncatedState, mode: str, power: int = 1) -> np.ndarray:
    """Raw amplitude tensor of ``a_mode^power |psi>`` (not normalized)."""
    ax = state.axis(mode)
    a = destroy(state.dim(mode))
    out = state.amplitudes
    for _ in range(power):
        out = _apply_single(out, a, ax)
    return out


_SQUEEZE_CACHE: dict[tuple, np.ndarray] = {}
_BS_CACHE: dict[tuple, np.ndarray] = {}


def _squeeze_unitary(r: complex, da: int, db: int) -> np.ndarray:
    key = (r.real, r.imag, da, db)
    U = _SQUEEZE_CACHE.get(key)
    if U is None:
        a, b = destroy(da), destroy(db)
        G = r * np.kron(a.conj().T, b.conj().T) - np.conj(r) * np.kron(a, b)
        U = expm(G)
        _SQUEEZE_CACHE[key] = U
    return U


def _bs_unitary(T: complex, da: int, db: int, convention: str) -> np.ndarray:
    key = (T.real, T.imag, da, db, convention)
    U = _BS_CACHE.get(key)
    if U is not None:
        return U
    R = math.sqrt(max(0.0, 1.0 - abs(T) ** 2))
    if convention == "real":
        # transmitted port picks up T a1 + R a0; reflected amplitude real >= 0
        W = np.array([[T, R], [-R, np.conj(T)]], dtype=complex)
    elif convention == "symmetric":
        W = np.array([[T, 1j * R], [1j * R, np.conj(T)]], dtype=complex)
    else:
        raise ValueError(f"unknown beam-splitter convention {convention!r}")
    h = 1j * logm(W)  # Hermitian generator of the mode map
    a, b = destroy(da), destroy(db)
    eye_a, eye_b = np.eye(da), np.eye(db)
    H = (
        h[0, 0] * np.kron(a.conj().T @ a, eye_b)
        + h[1, 1] * np.kron(eye_a, b.conj().T @ b)
        + h[0, 1] * np.kron(a.conj().T, b)
        + h[1, 0] * np.kron(a, b.conj().T)
    )
    # exponentiate block-by-block in total photon number so the lifted
    # unitary conserves n_a + n_b exactly, not just to round-off
    U = np.zeros((da * db, da * db), dtype=complex)
    for n in range(da + db - 1):
        idx = [
            na * db + nb
            for na in range(min(n, da - 1) + 1)
            for nb in (n - na,)
            if 0 <= nb < db
        ]
        block = np.ix_(idx, idx)
        U[block] = expm(-1j * H[block])
    _BS_CACHE[key] = U
    return U


def two_mode_squeeze(
    state: TruncatedState,
    r: complex,
    modes: tuple[str, str],
    eps_trunc: float = DEFAULT_EPS_TRUNC,
) -> TruncatedState:
    """Apply ``exp(r a† b† - r* a b)`` to the given mode pair.

    Computed as a dense matrix exponential of the truncated generator, which
    is exactly unitary on the truncated space.  Fails if the result pushes
    more than ``eps_trunc`` probability onto the top retained levels.
    """
    ax1, ax2 = state.axis(modes[0]), state.axis(modes[1])
    U = _squeeze_unitary(complex(r), state.dims[ax1], state.dims[ax2])
    out = _apply_pair(state.amplitudes, U, ax1, ax2)
    edge = _edge_mass(out, (ax1, ax2))
    if edge > eps_trunc:
        raise TruncationError(
            f"squeeze leakage estimate {edge:.3e} exceeds budget {eps_trunc:.3e}; "
            "increase the cutoff"
        )
    return TruncatedState(out, state.modes, state.leakage + edge)


def beam_splitter(
    state: TruncatedState,
    modes: tuple[str, str],
    T: complex,
    convention: str = "real",
    eps_trunc: float = DEFAULT_EPS_TRUNC,
) -> TruncatedState:
    """Two-mode beam splitter with transmittance coefficient ``T``.

    Default convention ("real"): the first listed mode is the transmitted
    port, ``a_out = T a_1 + R a_0`` with ``R = sqrt(1 - |T|^2)`` real and
    non-negative; the second port gets ``-R a_1 + T* a_0``.  The "symmetric"
    convention puts ``iR`` on both off-diagonals instead.  Total photon
    number across the pair is conserved exactly by construction.
    """
    if abs(T) > 1.0:
        raise ValueError(f"|T| = {abs(T):.6g} > 1")
    ax1, ax2 = state.axis(modes[0]), state.axis(modes[1])
    U = _bs_unitary(complex(T), state.dims[ax1], state.dims[ax2], convention)
    out = _apply_pair(state.amplitudes, U, ax1, ax2)
    edge = _edge_mass(out, (ax1, ax2))
    if edge > eps_trunc:
        raise TruncationError(
            f"beam-splitter leakage estimate {edge:.3e} exceeds {eps_trunc:.3e}"
        )
    return TruncatedState(out, state.modes, state.leakage + edge)


# ---------------------------------------------------------------------------
# expectation values


def mean_photon(state: TruncatedState, mode: str) -> float:
    """<a† a> of one mode."""
    av = annihilated(state, mode)
    return float(np.vdot(av, av).real / state.norm_sq())


def g2_zero(state: TruncatedState, mode: str) -> float:
    """Second-order coherence <a†a†aa> / <a†a>^2 at zero delay."""
    av = annihilated(state, mode)
    n_num = float(np.vdot(av, av).real)
    if n_num == 0.0:
        raise ValueError(f"mode {mode!r} has zero mean photon number")
    aav = annihilated(state, mode, power=2)
    return float(np.vdot(aav, aav).real) * state.norm_sq() / n_num**2


def mode_coherence(state: TruncatedState, mode_a: str, mode_b: str) -> complex:
    """<a†_A a_B> between two modes."""
    av = annihilated(state, mode_a)
    bv = annihilated(state, mode_b)
    return complex(np.vdot(av, bv) / state.norm_sq())


def partial_trace(state: TruncatedState, keep) -> DensityMatrix:
    """Reduced density matrix over ``keep`` (a proper, nonempty mode subset)."""
    keep = tuple(keep)
    if not keep:
        raise ValueError("keep must be nonempty")
    axes_keep = sorted(state.axis(m) for m in keep)
    if len(axes_keep) != len(set(axes_keep)):
        raise ValueError("duplicate modes in keep")
    if len(axes_keep) == len(state.modes):
        raise ValueError("keep must be a proper subset of the modes")
    traced = [i for i in range(len(state.modes)) if i not in axes_keep]
    amps = state.amplitudes
    rho = np.tensordot(amps, amps.conj(), axes=(traced, traced))
    K = int(np.prod([state.dims[i] for i in axes_keep]))
    rho = rho.reshape(K, K)
    rho /= np.trace(rho).real
    labels = tuple(itertools.product(*[range(state.dims[i]) for i in axes_keep]))
    return DensityMatrix(rho, labels)


def fidelity(a: TruncatedState, b: TruncatedState) -> float:
    """|<a|b>|^2 between two normalized states on identical mode layouts."""
    if a.modes != b.modes or a.dims != b.dims:
        raise ValueError("states live on different mode layouts")
    ov = np.vdot(a.amplitudes, b.amplitudes)
    return float(abs(ov) ** 2 / (a.norm_sq() * b.norm_sq()))
