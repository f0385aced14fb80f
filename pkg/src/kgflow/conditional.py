"""Probability current conditioned on a later position-measurement outcome.

Given a prepared state and the recorded Newton-Wigner position q at a
later time T, the flow at intermediate events is described by a
current built from both boundary states,

    j^a(x|f)  ~  Im[ (<f|x> d^a<x|i> - d^a<f|x> <x|i>) / <f|i> ] / (2m),

oriented to agree with the unconditional current when the conditioning
state is the evolved prepared state itself.  Averaging over all
outcomes with Born weights |<f|i>|^2 reproduces the unconditional
current exactly; `weighted_integrand` supplies the pole-free product
j^a(x|f) |<f|i>|^2 used in that average, finite even at outcomes of
vanishing probability.

Ensemble sums run in a fixed outcome order, so results are reproducible
under any parallel scheduling of the per-outcome evaluations.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .current import current
from .errors import CausalOrderError, CoverageError, ZeroProbabilityOutcomeError
from .states import (
    INV_SQRT_2PI,
    Event,
    FourVector,
    SpectralState,
    _require_same_grid,
    inner,
    psi_dpsi_grid,
)

COVERAGE_TOL = 1e-4
DEFAULT_AMPLITUDE_FLOOR = 1e-8


@dataclass(frozen=True)
class FinalOutcome:
    """A recorded Newton-Wigner position q_value at measurement time T.

    backward_state holds the momentum representation <p|f> of the
    outcome projector on the same grid as the prepared state (it is not
    unit-normalized); amplitude_fi caches <f|i> against that state.
    """

    q_value: float
    T: float
    backward_state: SpectralState
    amplitude_fi: complex


@dataclass(frozen=True)
class OutcomeEnsemble:
    """Uniform grid of final outcomes with trapezoid quadrature weights."""

    q_grid: np.ndarray
    weights: np.ndarray
    T: float
    outcomes: tuple

    def __post_init__(self):
        self.q_grid.setflags(write=False)
        self.weights.setflags(write=False)


def make_final_outcome(q: float, T: float, template: SpectralState) -> FinalOutcome:
    """Build the outcome state for position q measured at time T.

    The backward amplitudes are <p|f> = (2 pi)^-1/2 sqrt(p0)
    exp(-i (p q - p0 T)); evaluating its position amplitude at t = T
    gives a packet concentrated near x = q.  amplitude_fi is computed
    against the template, which is the prepared state.

    q is limited to the range the template's momentum grid can resolve:
    the phase p*q must advance by less than pi between adjacent nodes,
    or the quadrature returns aliasing noise instead of amplitudes.
    """
    q_bound = np.pi / float(np.diff(template.momenta).max())
    if abs(q) > q_bound:
        raise ValueError(
            f"outcome position {q} is beyond the grid's resolvable range "
            f"|q| <= {q_bound:.1f}"
        )
    p0 = template.energies
    b = INV_SQRT_2PI * np.sqrt(p0) * np.exp(-1j * (template.momenta * q - p0 * T))
    backward = SpectralState(
        mass=template.mass,
        momenta=np.array(template.momenta),
        amplitudes=b,
        weights=np.array(template.weights),
        energies=np.array(p0),
    )
    return FinalOutcome(
        q_value=float(q),
        T=float(T),
        backward_state=backward,
        amplitude_fi=inner(backward, template),
    )


def _bilinear_grid(initial: SpectralState, f: FinalOutcome, t: float, xs):
    """Both-sided derivative combination E^a = g d^a psi - d^a g psi."""
    _require_same_grid(initial, f.backward_state)
    psi_i, di0, di1 = psi_dpsi_grid(initial, t, xs)
    psi_f, df0, df1 = psi_dpsi_grid(f.backward_state, t, xs)
    g = np.conj(psi_f)
    e0 = g * di0 - np.conj(df0) * psi_i
    e1 = g * di1 - np.conj(df1) * psi_i
    return e0, e1


def conditional_current_grid(
    initial: SpectralState,
    f: FinalOutcome,
    t: float,
    xs,
    amplitude_floor: float = DEFAULT_AMPLITUDE_FLOOR,
):
    """Vectorized conditional (j0, j1) over positions at fixed t."""
    if abs(f.amplitude_fi) <= amplitude_floor:
        raise ZeroProbabilityOutcomeError(
            f"outcome amplitude {abs(f.amplitude_fi):.3e} at or below floor "
            f"{amplitude_floor:.3e}"
        )
    if t > f.T:
        raise CausalOrderError(f"evaluation time {t} lies after measurement time {f.T}")
    e0, e1 = _bilinear_grid(initial, f, t, xs)
    scale = -0.5 / initial.mass
    j0 = scale * np.imag(e0 / f.amplitude_fi)
    j1 = scale * np.imag(e1 / f.amplitude_fi)
    return j0, j1


def conditional_current(
    initial: SpectralState,
    f: FinalOutcome,
    e: Event,
    amplitude_floor: float = DEFAULT_AMPLITUDE_FLOOR,
) -> FourVector:
    """Conditional 4-current at an event given a final outcome.

    Real and normalized over x by construction; divergence-free because
    both boundary states solve the wave equation.  Raises
    ZeroProbabilityOutcomeError below the amplitude floor and
    CausalOrderError for e.t > T.
    """
    j0, j1 = conditional_current_grid(initial, f, e.t, e.x, amplitude_floor)
    return FourVector(float(j0), float(j1))


def weighted_integrand_grid(initial: SpectralState, f: FinalOutcome, t: float, xs):
    """Vectorized pole-free product j^a(x|f) |<f|i>|^2 over positions."""
    if t > f.T:
        raise CausalOrderError(f"evaluation time {t} lies after measurement time {f.T}")
    e0, e1 = _bilinear_grid(initial, f, t, xs)
    scale = -0.5 / initial.mass
    amp_bar = np.conj(f.amplitude_fi)
    return scale * np.imag(amp_bar * e0), scale * np.imag(amp_bar * e1)


def weighted_integrand(initial: SpectralState, f: FinalOutcome, e: Event) -> FourVector:
    """Conditional current weighted by the outcome probability.

    Algebraically equal to conditional_current(...) * |<f|i>|^2 wherever
    the quotient form exists, but finite for every outcome, so ensemble
    averages never divide by a small amplitude.
    """
    j0, j1 = weighted_integrand_grid(initial, f, e.t, e.x)
    return FourVector(float(j0), float(j1))


def make_outcome_ensemble(
    initial: SpectralState,
    T: float,
    q_lo: float,
    q_hi: float,
    n_q: int,
    coverage_tol: float = COVERAGE_TOL,
) -> OutcomeEnsemble:
    """Uniform outcome grid over [q_lo, q_hi] with trapezoid weights.

    Validates that the grid captures the outcome distribution: the
    weighted Born probabilities must sum to 1 within coverage_tol.
    """
    if n_q < 2:
        raise ValueError("need at least two outcomes")
    if not q_lo < q_hi:
        raise ValueError("q_lo must be below q_hi")
    qs = np.linspace(q_lo, q_hi, n_q)
    dq = qs[1] - qs[0]
    weights = np.full(n_q, dq)
    weights[0] = weights[-1] = 0.5 * dq
    outcomes = tuple(make_final_outcome(q, T, initial) for q in qs)
    ens = OutcomeEnsemble(q_grid=qs, weights=weights, T=float(T), outcomes=outcomes)
    total = float(np.dot(weights, outcome_probabilities(initial, ens)))
    if abs(total - 1.0) > coverage_tol:
        raise CoverageError(
            f"ensemble captures probability {total:.6f}, outside 1 +/- {coverage_tol}"
        )
    return ens


def outcome_probabilities(initial: SpectralState, ens: OutcomeEnsemble):
    """Born probability density at each ensemble outcome."""
    return [float(abs(inner(f.backward_state, initial)) ** 2) for f in ens.outcomes]


def decompose_check(initial: SpectralState, ens: OutcomeEnsemble, events) -> float:
    """Relative L2 gap between the outcome-averaged and direct currents.

    Sums the pole-free weighted integrand over the ensemble at each
    event and compares against the unconditional current; by
    completeness of the outcome basis the gap measures quadrature error
    only.
    """
    rho = outcome_probabilities(initial, ens)
    covered = float(np.dot(ens.weights, rho))
    if covered < 1.0 - COVERAGE_TOL:
        raise CoverageError(
            f"ensemble captures probability {covered:.6f}, below 1 - {COVERAGE_TOL}"
        )
    num = 0.0
    den = 0.0
    for e in events:
        acc0 = 0.0
        acc1 = 0.0
        for w_q, f in zip(ens.weights, ens.outcomes):
            w0, w1 = weighted_integrand_grid(initial, f, e.t, e.x)
            acc0 += w_q * float(w0)
            acc1 += w_q * float(w1)
        direct = current(initial, e)
        num += (acc0 - direct.v0) ** 2 + (acc1 - direct.v1) ** 2
        den += direct.v0**2 + direct.v1**2
    return float(np.sqrt(num / den))
