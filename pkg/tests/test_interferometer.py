"""Tests for the state-level interferometer model and its two oracles."""

import math

import numpy as np
import pytest

from fwmsim import closed_form as cf, interferometer as itf
from fwmsim.fock import SourceParams
from fwmsim.interferometer import IdlerPathDensity

SRC = SourceParams(coupling=1e-3)


def _metrics(T, alpha_sq, **kw):
    j = itf.build_perturbative_state(SRC, SRC, T, math.sqrt(alpha_sq), **kw)
    return itf.metrics_from_density(itf.idler_reduced_density(j))


# ---------------------------------------------------------------------------
# perturbative construction


def test_unseeded_full_transmission_is_balanced_path_superposition():
    j = itf.build_perturbative_state(SRC, SRC, 1.0, 0.0)
    a = j.state.amplitudes
    # both idler branches carry the photon-added (now single-photon) signal
    assert a[1, 0, 1, 0] == a[0, 1, 1, 0]
    assert abs(a[1, 0, 1, 0]) > 0.0
    rho = itf.idler_reduced_density(j)
    assert rho.entries[0, 1] == pytest.approx(0.5, abs=1e-14)
    assert float(np.trace(rho.entries @ rho.entries).real) == pytest.approx(1.0, abs=1e-12)


def test_blocked_path_marks_which_way():
    j = itf.build_perturbative_state(SRC, SRC, 0.0, 0.0)
    rho = itf.idler_reduced_density(j)
    assert abs(rho.entries[0, 1]) == 0.0


def test_idler_sector_populations_match_reduced_matrix_diagonal():
    alpha_sq, T = 4.0, 0.5
    j = itf.build_perturbative_state(SRC, SRC, T, math.sqrt(alpha_sq))
    amps = j.state.amplitudes
    # independent brute-force trace over the signal occupations
    p10 = float(np.sum(np.abs(amps[1, 0]) ** 2))
    p01 = float(np.sum(np.abs(amps[0, 1]) ** 2))
    expected_ratio = (1.0 + alpha_sq) / (T * T * (1.0 + alpha_sq) + 1.0 - T * T)
    assert p10 / p01 == pytest.approx(expected_ratio, rel=1e-10)
    rho = itf.idler_reduced_density(j)
    assert rho.entries[0, 0].real == pytest.approx(p10 / (p10 + p01), abs=1e-12)


def test_perturbative_keeps_at_most_one_idler_excitation():
    j = itf.build_perturbative_state(SRC, SRC, 0.5, 1.0)
    assert np.all(j.state.amplitudes[1, 1] == 0.0)
    assert j.perturbative


def test_unbalanced_cells_supported():
    # c2 = 2 c1 at full transmission: pure path qubit with amplitude
    # imbalance, so V = 4/5 and K = P = 3/5 with no entanglement left
    j = itf.build_perturbative_state(
        SourceParams(coupling=1e-3), SourceParams(coupling=2e-3), 1.0, 0.0
    )
    m = itf.metrics_from_density(itf.idler_reduced_density(j))
    assert m.V == pytest.approx(0.8, abs=1e-12)
    assert m.P == pytest.approx(0.6, abs=1e-12)
    assert m.K == pytest.approx(0.6, abs=1e-12)
    assert m.C == pytest.approx(0.0, abs=1e-7)


def test_perturbative_warns_on_strong_coupling():
    with pytest.warns(UserWarning, match="not small"):
        itf.build_perturbative_state(
            SourceParams(coupling=0.2), SourceParams(coupling=0.2), 1.0, 1.0
        )


def test_perturbative_rejects_bad_transmittance():
    with pytest.raises(ValueError, match="> 1"):
        itf.build_perturbative_state(SRC, SRC, 1.1, 0.0)


def test_vacuum_only_state_has_no_path_sector():
    zero = SourceParams(coupling=0.0)
    j = itf.build_perturbative_state(zero, zero, 1.0, 0.3)
    with pytest.raises(ValueError, match="vacuum"):
        itf.idler_reduced_density(j)


# ---------------------------------------------------------------------------
# reduced density matrix vs the printed entries


def test_reduced_density_unseeded_distinguishability():
    j = itf.build_perturbative_state(SRC, SRC, 0.6, 0.0)
    rho = itf.idler_reduced_density(j)
    assert 4.0 * abs(rho.entries[0, 1]) ** 2 == pytest.approx(0.36, abs=1e-12)
    assert itf.metrics_from_density(rho).K == pytest.approx(0.8, abs=1e-12)


def test_reduced_density_matches_normalized_entries():
    alpha_sq, T = 4.0, 0.5
    # sum_n n |<n-1|alpha>|^2 = |alpha|^2 + 1, checked by direct series
    poisson = [math.exp(-alpha_sq) * alpha_sq**m / math.factorial(m) for m in range(80)]
    series = sum((m + 1) * p for m, p in enumerate(poisson))
    assert series == pytest.approx(alpha_sq + 1.0, abs=1e-10)

    j = itf.build_perturbative_state(SRC, SRC, T, math.sqrt(alpha_sq))
    rho = itf.idler_reduced_density(j)
    norm = 1.0 / (2.0 + alpha_sq + T * T * alpha_sq)  # 1/(2+4+1) = 1/7
    assert norm == pytest.approx(1.0 / 7.0)
    assert rho.entries[0, 0].real == pytest.approx((alpha_sq + 1.0) * norm, abs=1e-10)
    assert rho.entries[0, 1].real == pytest.approx(T * (alpha_sq + 1.0) * norm, abs=1e-10)
    assert rho.entries[1, 1].real == pytest.approx(
        (T * T * (alpha_sq + 1.0) + 1.0 - T * T) * norm, abs=1e-10
    )
    # the sector carries ~|c|^2 (2 + a2 + |T a|^2) of the total population
    assert rho.sector_weight == pytest.approx(abs(SRC.c) ** 2 / norm, rel=1e-4)


# ---------------------------------------------------------------------------
# metrics from the path qubit


def test_metrics_maximally_mixed():
    rho = IdlerPathDensity(np.diag([0.5, 0.5]).astype(complex), 1.0)
    m = itf.metrics_from_density(rho)
    assert (m.V, m.P) == (0.0, 0.0)
    assert m.K == 1.0
    assert m.C == pytest.approx(1.0, abs=1e-15)


def test_metrics_unseeded_point():
    m = _metrics(0.6, 0.0)
    assert m.C == pytest.approx(0.8, abs=1e-12)
    assert m.P == pytest.approx(0.0, abs=1e-12)
    assert m.V == pytest.approx(0.6, abs=1e-12)


def test_metrics_cross_module_equivalence_point():
    m = _metrics(0.3, 9.0)
    ref = cf.duality_metrics(0.3, 9.0)
    for name in ("V", "K", "P", "C"):
        assert abs(getattr(m, name) - getattr(ref, name)) <= 1e-10


def test_metrics_cross_module_equivalence_grid():
    for t in np.linspace(0.0, 1.0, 6):
        for a2 in (0.0, 0.2, 0.45):
            m = _metrics(float(t), a2, signal_dim=12)
            ref = cf.duality_metrics(float(t), a2)
            for name in ("V", "K", "P", "C"):
                assert abs(getattr(m, name) - getattr(ref, name)) <= 1e-10


def test_determinant_is_quarter_concurrence_squared():
    j = itf.build_perturbative_state(SRC, SRC, 0.4, 1.0)
    rho = itf.idler_reduced_density(j)
    det = float(np.linalg.det(rho.entries).real)
    assert det >= 0.0
    m = itf.metrics_from_density(rho)
    assert m.C**2 / 4.0 == pytest.approx(det, abs=1e-15)


# ---------------------------------------------------------------------------
# fringe scans


def test_fringe_scan_matches_closed_rate_up_to_scale():
    # signal cutoff 20 keeps the truncated moments within the 1e-10 window
    j = itf.build_perturbative_state(SRC, SRC, 0.8, 1.0, signal_dim=20)
    grid = np.linspace(0.0, 2.0 * math.pi, 17)
    rates = np.array([r for _, r in itf.fringe_scan(j, grid)])
    ref = np.array(
        [
            cf.counting_rate(
                cf.InterferometerParams(T=0.8, gamma=1.0, alpha_sq=1.0, dphi=float(p))
            ).total
            for p in grid
        ]
    )
    scale = rates.mean() / ref.mean()
    assert np.max(np.abs(rates - scale * ref)) <= 1e-10 * scale * ref.max()


def test_fringe_scan_periodicity():
    j = itf.build_perturbative_state(SRC, SRC, 1.0, 0.0)
    grid = np.linspace(0.0, math.pi, 7)
    once = np.array([r for _, r in itf.fringe_scan(j, grid)])
    shifted = np.array([r for _, r in itf.fringe_scan(j, grid + 2.0 * math.pi)])
    assert np.allclose(once, shifted, atol=1e-12)


def test_fringe_scan_full_contrast_when_unseeded():
    j = itf.build_perturbative_state(SRC, SRC, 1.0, 0.0)
    scan = dict(itf.fringe_scan(j, [0.0, math.pi]))
    assert scan[math.pi] <= 1e-12 * scan[0.0]  # R(0)/R(pi) -> infinity


@pytest.mark.parametrize("alpha_sq", [0.0, 1.0, 4.0, 9.0])
def test_fitted_visibility_reproduces_closed_form(alpha_sq):
    j = itf.build_perturbative_state(SRC, SRC, 1.0, math.sqrt(alpha_sq))
    grid = np.linspace(0.0, 2.0 * math.pi, 81)
    rates = [r for _, r in itf.fringe_scan(j, grid)]
    fitted = (max(rates) - min(rates)) / (max(rates) + min(rates))
    assert fitted == pytest.approx(cf.visibility(1.0, alpha_sq, 1.0), abs=1e-10)


def test_fringe_scan_rejects_empty_grid():
    j = itf.build_perturbative_state(SRC, SRC, 1.0, 0.0)
    with pytest.raises(ValueError, match="empty"):
        itf.fringe_scan(j, [])


# ---------------------------------------------------------------------------
# nonperturbative chain


def test_chain_without_squeezing_gives_zero_rate():
    rate, _ = itf.nonperturbative_chain(
        SourceParams(r=0.0), SourceParams(r=0.0), 1.0, 0.5
    )
    assert rate == 0.0


def test_chain_induced_visibility_near_unity():
    m = itf.nonperturbative_metrics(SourceParams(r=0.05), SourceParams(r=0.05), 1.0, 0.0)
    assert m.V == pytest.approx(1.0, abs=1e-3)


def test_chain_metrics_close_to_closed_forms():
    src = SourceParams(r=0.05)
    m = itf.nonperturbative_metrics(src, src, 0.5, 1.0)
    ref = cf.duality_metrics(0.5, 1.0)
    for name in ("V", "K", "P", "C"):
        assert abs(getattr(m, name) - getattr(ref, name)) <= 5e-3


@pytest.mark.parametrize("T,alpha_sq", [(1.0, 0.0), (0.5, 1.0), (0.7, 2.0)])
def test_chain_error_contracts_quadratically(T, alpha_sq):
    ref = cf.duality_metrics(T, alpha_sq)

    def err(r):
        m = itf.nonperturbative_metrics(
            SourceParams(r=r), SourceParams(r=r), T, math.sqrt(alpha_sq)
        )
        return max(abs(getattr(m, n) - getattr(ref, n)) for n in ("V", "K", "P", "C"))

    e1, e2 = err(0.05), err(0.025)
    assert e2 <= 0.3 * e1


def test_chain_rate_agrees_with_scan_of_state():
    src = SourceParams(r=0.05)
    rate, joint = itf.nonperturbative_chain(src, src, 0.8, 0.6, dphi=1.1)
    assert rate == pytest.approx(itf.detection_rate(joint.state, 1.1), abs=1e-15)
    assert not joint.perturbative
