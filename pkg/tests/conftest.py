import numpy as np
import pytest

from kgflow import GridSpec, load_scenario, make_gaussian_packet, superpose
from kgflow.scenarios import build_state


@pytest.fixture(scope="session")
def rest_packet():
    return make_gaussian_packet(1.0, 0.0, 0.25, 0.0, GridSpec(-3.0, 3.0))


@pytest.fixture(scope="session")
def narrow_boosted():
    # p_width / p0 = 0.016, deep in the plane-wave regime
    return make_gaussian_packet(1.0, 3.0, 0.05, 0.0, GridSpec(2.5, 3.5))


@pytest.fixture(scope="session")
def s1_state():
    grid = GridSpec(-1.6, 4.6)
    a = make_gaussian_packet(1.0, 3.0, 0.15, 0.0, grid)
    b = make_gaussian_packet(1.0, 0.0, 0.15, 0.0, grid)
    return superpose([a, b], [1.0, 1.5])


@pytest.fixture(scope="session")
def s1_scenario():
    return load_scenario("s1_negative_density")


@pytest.fixture(scope="session")
def s1_conditional_scenario():
    return load_scenario("s1_conditional")


@pytest.fixture(scope="session")
def rest_scenario():
    return load_scenario("single_rest")


@pytest.fixture(scope="session")
def boosted_scenario():
    return load_scenario("single_boosted")


@pytest.fixture(scope="session")
def bundled_states(s1_scenario, s1_conditional_scenario, rest_scenario, boosted_scenario):
    return {
        sc.name: build_state(sc)
        for sc in (s1_scenario, s1_conditional_scenario, rest_scenario, boosted_scenario)
    }


def two_plane_wave_extrema(amp1, e1, p1, amp2, e2, p2):
    """Density extrema of a two-plane-wave superposition over the relative phase.

    For psi = A1 exp(-i(E1 t - p1 x)) + A2 exp(-i(E2 t - p2 x)) the density is
    A1^2 E1 + A2^2 E2 + A1 A2 (E1 + E2) cos(phase), so the extrema follow
    from cos(phase) = -1 and +1.
    """
    cross = amp1 * amp2 * (e1 + e2)
    base = amp1 * amp1 * e1 + amp2 * amp2 * e2
    return base - cross, base + cross


def max_turn_deg(traj):
    events = traj.events
    worst = 0.0
    for k in range(1, len(events) - 1):
        d1 = np.array([events[k].t - events[k - 1].t, events[k].x - events[k - 1].x])
        d2 = np.array([events[k + 1].t - events[k].t, events[k + 1].x - events[k].x])
        d1 /= np.linalg.norm(d1)
        d2 /= np.linalg.norm(d2)
        worst = max(worst, float(np.degrees(np.arccos(np.clip(d1 @ d2, -1.0, 1.0)))))
    return worst
