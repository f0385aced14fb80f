import numpy as np
import pytest

from kgflow import (
    CausalOrderError,
    CoverageError,
    Event,
    FinalOutcome,
    GridSpec,
    ZeroProbabilityOutcomeError,
    conditional_current,
    current,
    decompose_check,
    inner,
    make_final_outcome,
    make_gaussian_packet,
    make_outcome_ensemble,
    nw_amplitude,
    outcome_probabilities,
    weighted_integrand,
)
from kgflow.conditional import conditional_current_grid, _bilinear_grid
from kgflow.states import psi_grid
from kgflow._quad import gauss_panels

EVENTS = [Event(t, x) for t in (0.0, 0.5, 1.0) for x in (-2.0, 0.0, 2.0)]


@pytest.fixture(scope="module")
def s1_ensemble(s1_state):
    return make_outcome_ensemble(s1_state, 2.0, -16.0, 20.0, 41)


def collapse_outcome(state, T=2.0):
    return FinalOutcome(
        q_value=0.0, T=T, backward_state=state, amplitude_fi=inner(state, state)
    )


def test_outcome_amplitude_equals_nw_amplitude(s1_state):
    f = make_final_outcome(1.3, 2.0, s1_state)
    assert abs(f.amplitude_fi - nw_amplitude(s1_state, 1.3, 2.0)) < 1e-10


def test_outcome_state_localizes_at_q(s1_state):
    f = make_final_outcome(1.3, 2.0, s1_state)
    xs = np.linspace(-6.0, 9.0, 3001)
    profile = np.abs(psi_grid(f.backward_state, 2.0, xs))
    assert abs(xs[int(np.argmax(profile))] - 1.3) < 0.01


def test_distant_outcomes_nearly_orthogonal():
    # resolving exp(i p dq) at dq = 500 needs a dense momentum grid
    dense = make_gaussian_packet(1.0, 0.0, 0.15, 0.0, GridSpec(-1.6, 4.6, 400, 16))
    f1 = make_final_outcome(0.0, 2.0, dense)
    f2 = make_final_outcome(500.0, 2.0, dense)
    assert abs(inner(f1.backward_state, f2.backward_state)) < 1e-3


def test_outcome_beyond_grid_resolution_rejected(s1_state):
    with pytest.raises(ValueError):
        make_final_outcome(500.0, 2.0, s1_state)


def test_collapse_identity(s1_state):
    f = collapse_outcome(s1_state)
    for e in EVENTS:
        cond = conditional_current(s1_state, f, e)
        direct = current(s1_state, e)
        scale = direct.euclidean_norm()
        assert abs(cond.v0 - direct.v0) < 1e-12 * scale
        assert abs(cond.v1 - direct.v1) < 1e-12 * scale


def test_collapse_case_imaginary_residue(s1_state):
    # before projecting out the flow, the collapse-case bilinear over the
    # overlap is purely imaginary; its real part probes the phase algebra
    f = collapse_outcome(s1_state)
    for e in EVENTS:
        e0, e1 = _bilinear_grid(s1_state, f, e.t, np.asarray([e.x]))
        for z in (complex(e0[0]), complex(e1[0])):
            ratio = z / f.amplitude_fi
            assert abs(ratio.real) < 1e-12 * abs(ratio)


def test_weighted_integrand_is_conditional_times_probability(s1_state):
    for q in (-3.0, 0.5, 4.0):
        f = make_final_outcome(q, 2.0, s1_state)
        rho = abs(f.amplitude_fi) ** 2
        assert rho > 1e-6
        for e in EVENTS[:4]:
            w = weighted_integrand(s1_state, f, e)
            c = conditional_current(s1_state, f, e)
            assert w.v0 == pytest.approx(c.v0 * rho, rel=1e-8, abs=1e-300)
            assert w.v1 == pytest.approx(c.v1 * rho, rel=1e-8, abs=1e-300)


def test_weighted_integrand_finite_at_negligible_amplitude(s1_state):
    f = make_final_outcome(40.0, 2.0, s1_state)
    assert abs(f.amplitude_fi) < 1e-12
    w = weighted_integrand(s1_state, f, Event(0.0, 0.0))
    assert np.isfinite(w.v0) and np.isfinite(w.v1)
    with pytest.raises(ZeroProbabilityOutcomeError):
        conditional_current(s1_state, f, Event(0.0, 0.0))


def test_causal_order_enforced(s1_state):
    f = make_final_outcome(0.5, 2.0, s1_state)
    with pytest.raises(CausalOrderError):
        conditional_current(s1_state, f, Event(2.5, 0.0))
    with pytest.raises(CausalOrderError):
        weighted_integrand(s1_state, f, Event(2.5, 0.0))


def test_conditional_density_normalized(s1_state, s1_ensemble):
    rho = np.asarray(outcome_probabilities(s1_state, s1_ensemble))
    keep = np.nonzero(rho >= 1e-4 * rho.max())[0]
    xs, w = gauss_panels(-34.0, 38.0, 144, 16)
    for idx in keep[::6]:
        f = s1_ensemble.outcomes[idx]
        for t in (0.4, 1.0, 1.6):
            j0, _ = conditional_current_grid(s1_state, f, t, xs)
            assert abs(float(np.dot(w, j0)) - 1.0) < 1e-3


def test_conditional_continuity(s1_state):
    from kgflow.validation import richardson_divergence

    f = make_final_outcome(1.0, 2.0, s1_state)

    def j_fn(t, x):
        j0, j1 = conditional_current_grid(s1_state, f, t, np.asarray([x]))
        return float(j0[0]), float(j1[0])

    events = [Event(t, x) for t in (0.4, 1.0, 1.6) for x in (-3.0, 0.0, 3.0)]
    j_max = max(np.hypot(*j_fn(e.t, e.x)) for e in events)
    for e in events:
        est, _, _ = richardson_divergence(j_fn, e, 1e-3)
        assert abs(est) < 1e-5 * j_max / 20.0


def test_decomposition_identity(s1_state, s1_ensemble):
    assert decompose_check(s1_state, s1_ensemble, EVENTS) < 1e-4


def test_decomposition_single_packet(rest_packet):
    ens = make_outcome_ensemble(rest_packet, 2.0, -13.0, 13.0, 41)
    assert decompose_check(rest_packet, ens, EVENTS) < 1e-4


def test_decomposition_refines(s1_state):
    errors = [
        decompose_check(
            s1_state, make_outcome_ensemble(s1_state, 2.0, -16.0, 20.0, n), EVENTS
        )
        for n in (41, 81, 161)
    ]
    assert errors[0] > errors[1] > errors[2]


def test_outcome_probabilities(s1_state, s1_ensemble):
    rho = outcome_probabilities(s1_state, s1_ensemble)
    assert all(p >= 0 for p in rho)
    assert abs(float(np.dot(s1_ensemble.weights, rho)) - 1.0) < 1e-4


def test_outcome_distribution_symmetric_for_rest_packet():
    packet = make_gaussian_packet(1.0, 0.0, 0.25, 2.0, GridSpec(-3.0, 3.0))
    ens = make_outcome_ensemble(packet, 2.0, 2.0 - 12.0, 2.0 + 12.0, 49)
    rho = np.asarray(outcome_probabilities(packet, ens))
    assert np.max(np.abs(rho - rho[::-1])) < 1e-8


def test_ensemble_coverage_guard(s1_state):
    with pytest.raises(CoverageError):
        make_outcome_ensemble(s1_state, 2.0, -4.0, 4.0, 41)
    with pytest.raises(CoverageError):
        decompose_check(
            s1_state,
            make_outcome_ensemble(s1_state, 2.0, -4.0, 4.0, 41, coverage_tol=1.0),
            EVENTS,
        )


def test_retrocausal_dependence(s1_state):
    f1 = make_final_outcome(-2.0, 2.0, s1_state)
    f2 = make_final_outcome(4.0, 2.0, s1_state)
    for f in (f1, f2):
        assert abs(f.amplitude_fi) ** 2 > 1e-4 * 0.21
    e = Event(0.0, 0.5)
    j1 = conditional_current(s1_state, f1, e)
    j2 = conditional_current(s1_state, f2, e)
    gap = np.hypot(j1.v0 - j2.v0, j1.v1 - j2.v1)
    assert gap / max(j1.euclidean_norm(), j2.euclidean_norm()) > 1e-3


def test_weighted_sum_reality(s1_state, s1_ensemble):
    # the ensemble-summed bilinear collapses to 2i Im(...) in the
    # continuum; the leftover real part is outcome-quadrature error and
    # sits at the same scale as the decomposition gap
    for e in EVENTS[:3]:
        acc0 = 0.0 + 0.0j
        for w_q, f in zip(s1_ensemble.weights, s1_ensemble.outcomes):
            e0, _ = _bilinear_grid(s1_state, f, e.t, np.asarray([e.x]))
            acc0 += w_q * np.conj(f.amplitude_fi) * complex(e0[0])
        assert abs(acc0.real) < 1e-4 * abs(acc0)


def test_conditional_rejects_mismatched_grids(s1_state, rest_packet):
    from kgflow import GridMismatchError

    stranger = make_final_outcome(0.0, 2.0, rest_packet)
    with pytest.raises(GridMismatchError):
        conditional_current(s1_state, stranger, Event(0.0, 0.0))
