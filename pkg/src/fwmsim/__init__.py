"""Simulator of induced and stimulated coherence in a dual four-wave-mixing
double-path interferometer: squeezed-coherent photon statistics, fringes,
wave-particle duality metrics, a truncated Fock-space oracle, and a
detector-jitter model."""

__version__ = "0.1.0"
