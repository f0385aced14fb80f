import numpy as np
import pytest

from kgflow import (
    DegenerateStateError,
    Event,
    GridMismatchError,
    GridSpec,
    TruncationError,
    evaluate_dpsi,
    evaluate_psi,
    inner,
    invariant_norm,
    make_gaussian_packet,
    superpose,
)
from kgflow.states import psi_grid


def test_packet_unit_norm(rest_packet):
    assert abs(invariant_norm(rest_packet) - 1.0) < 1e-10


def test_translation_is_pure_momentum_phase():
    grid = GridSpec(-3.0, 3.0)
    s0 = make_gaussian_packet(1.0, 0.0, 0.25, 0.0, grid)
    s2 = make_gaussian_packet(1.0, 0.0, 0.25, 2.0, grid)
    assert np.allclose(np.abs(s0.amplitudes), np.abs(s2.amplitudes), rtol=0, atol=1e-14)
    phase = s2.amplitudes / s0.amplitudes
    assert np.allclose(phase, np.exp(-2j * s0.momenta), rtol=0, atol=1e-12)


def test_narrow_packet_mean_energy_matches_plane_wave(narrow_boosted):
    mean = float(
        np.sum(narrow_boosted.weights * np.abs(narrow_boosted.amplitudes) ** 2
               * narrow_boosted.energies)
    )
    assert abs(mean - np.sqrt(10.0)) / np.sqrt(10.0) < 0.01
    # oracle: the same mean on a twice-refined quadrature
    fine = make_gaussian_packet(1.0, 3.0, 0.05, 0.0, GridSpec(2.5, 3.5, 16, 32))
    mean_fine = float(np.sum(fine.weights * np.abs(fine.amplitudes) ** 2 * fine.energies))
    assert abs(mean - mean_fine) < 1e-10


def test_packet_argument_errors():
    grid = GridSpec(-3.0, 3.0)
    with pytest.raises(ValueError):
        make_gaussian_packet(-1.0, 0.0, 0.25, 0.0, grid)
    with pytest.raises(ValueError):
        make_gaussian_packet(1.0, 0.0, -0.25, 0.0, grid)
    with pytest.raises(ValueError):
        make_gaussian_packet(1.0, 0.0, 0.25, 0.0, GridSpec(-3.0, 3.0, 1, 8))
    with pytest.raises(ValueError):
        # grid does not contain p_center + 6 widths
        make_gaussian_packet(1.0, 2.9, 0.25, 0.0, grid)


def test_packet_truncation_error():
    with pytest.raises(TruncationError):
        make_gaussian_packet(1.0, 0.0, 0.5, 0.0, GridSpec(-3.1, 3.1))
    # same packet on a wide enough grid is fine
    make_gaussian_packet(1.0, 0.0, 0.5, 0.0, GridSpec(-4.5, 4.5))


def test_superpose_identity_and_scale(rest_packet):
    one = superpose([rest_packet], [1.0])
    assert np.allclose(one.amplitudes, rest_packet.amplitudes, rtol=0, atol=1e-14)
    two = superpose([rest_packet], [2.0 + 0.0j])
    assert np.allclose(two.amplitudes, rest_packet.amplitudes, rtol=0, atol=1e-14)


def test_superpose_well_separated_packets():
    grid = GridSpec(-6.0, 6.0)
    left = make_gaussian_packet(1.0, -3.0, 0.25, 0.0, grid)
    right = make_gaussian_packet(1.0, 3.0, 0.25, 0.0, grid)
    assert abs(inner(left, right)) < 1e-8
    combined = left.amplitudes + right.amplitudes
    pre_norm = np.sqrt(np.sum(left.weights * np.abs(combined) ** 2))
    assert abs(pre_norm - np.sqrt(2.0)) < 1e-6
    both = superpose([left, right], [1.0, 1.0])
    assert abs(invariant_norm(both) - 1.0) < 1e-10


def test_superpose_errors(rest_packet):
    other = make_gaussian_packet(1.0, 0.0, 0.25, 0.0, GridSpec(-4.0, 4.0))
    with pytest.raises(GridMismatchError):
        superpose([rest_packet, other], [1.0, 1.0])
    heavier = make_gaussian_packet(2.0, 0.0, 0.25, 0.0, GridSpec(-3.0, 3.0))
    with pytest.raises(GridMismatchError):
        superpose([rest_packet, heavier], [1.0, 1.0])
    with pytest.raises(DegenerateStateError):
        superpose([rest_packet, rest_packet], [1.0, -1.0])
    with pytest.raises(ValueError):
        superpose([], [])


def test_inner_product_properties(rest_packet, s1_state):
    assert abs(inner(rest_packet, rest_packet) - 1.0) < 1e-10
    grid = GridSpec(-6.0, 6.0)
    a = make_gaussian_packet(1.0, -3.0, 0.25, 1.0, grid)
    b = make_gaussian_packet(1.0, 3.0, 0.25, -0.5, grid)
    assert inner(a, b) == pytest.approx(np.conj(inner(b, a)), abs=1e-15)
    assert abs(inner(a, b)) < 1e-8
    with pytest.raises(GridMismatchError):
        inner(rest_packet, a)


def test_psi_real_positive_at_origin(rest_packet):
    val = evaluate_psi(rest_packet, Event(0.0, 0.0))
    assert val.real > 0
    assert abs(val.imag) < 1e-14 * val.real


def test_psi_translation_identity():
    grid = GridSpec(-3.0, 3.0)
    s0 = make_gaussian_packet(1.0, 0.0, 0.25, 0.0, grid)
    s2 = make_gaussian_packet(1.0, 0.0, 0.25, 2.0, grid)
    for x in (-1.0, 0.3, 2.0, 4.5):
        lhs = evaluate_psi(s2, Event(0.0, x))
        rhs = evaluate_psi(s0, Event(0.0, x - 2.0))
        assert lhs == pytest.approx(rhs, rel=1e-12)


def test_psi_even_profile(rest_packet):
    xs = np.linspace(-5.0, 5.0, 101)
    mags = np.abs(psi_grid(rest_packet, 0.0, xs))
    assert np.max(np.abs(mags - mags[::-1])) < 1e-10


def test_dpsi_plane_wave_ratio(narrow_boosted):
    e = Event(0.0, 0.0)
    psi = evaluate_psi(narrow_boosted, e)
    d0, _ = evaluate_dpsi(narrow_boosted, e)
    ratio = d0 / psi
    assert abs(ratio - (-1j * np.sqrt(10.0))) < 0.01 * np.sqrt(10.0)


def test_dpsi_matches_finite_differences(s1_state):
    h = 1e-4
    for e in (Event(0.3, -0.7), Event(-0.2, 1.1), Event(0.0, 0.0), Event(0.5, 2.0)):
        d0, d1 = evaluate_dpsi(s1_state, e)
        fd_t = (
            evaluate_psi(s1_state, Event(e.t + h, e.x))
            - evaluate_psi(s1_state, Event(e.t - h, e.x))
        ) / (2 * h)
        fd_x = (
            evaluate_psi(s1_state, Event(e.t, e.x + h))
            - evaluate_psi(s1_state, Event(e.t, e.x - h))
        ) / (2 * h)
        # d^0 = d/dt, d^1 = -d/dx
        assert abs(d0 - fd_t) / abs(d0) < 1e-6
        assert abs(d1 - (-fd_x)) / abs(d1) < 1e-6


def test_dpsi_rest_packet_odd_integrand(rest_packet):
    _, d1 = evaluate_dpsi(rest_packet, Event(0.0, 0.0))
    assert abs(d1) < 1e-10


def test_norm_is_time_independent(rest_packet):
    # amplitudes carry no time dependence; the momentum-space norm is static
    before = invariant_norm(rest_packet)
    _ = evaluate_psi(rest_packet, Event(5.0, 1.0))
    assert invariant_norm(rest_packet) == before


def test_states_are_immutable(rest_packet):
    with pytest.raises(ValueError):
        rest_packet.amplitudes[0] = 0.0
    with pytest.raises(ValueError):
        rest_packet.weights[0] = 1.0


def test_superposition_stays_positive_energy(s1_state):
    assert float(s1_state.energies.min()) >= s1_state.mass > 0


def test_concurrent_evaluation_is_pure(s1_state):
    from concurrent.futures import ThreadPoolExecutor

    events = [Event(0.1 * k, 0.05 * k - 1.0) for k in range(40)]
    serial = [evaluate_psi(s1_state, e) for e in events]
    with ThreadPoolExecutor(max_workers=8) as pool:
        threaded = list(pool.map(lambda e: evaluate_psi(s1_state, e), events))
    assert serial == threaded
