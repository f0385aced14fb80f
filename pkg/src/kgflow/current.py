"""Conserved probability 4-current of the scalar relativistic wave equation.

The current is the bidirectional-derivative bilinear of the wavefunction,
j^a = Im(conj(d^a psi) * psi) / m, oriented so that a forward-propagating
plane wave carries j^a = + p^a |psi|^2 / m.  Its zeroth component plays
the role of a density but is not positive definite: superpositions of
purely positive-energy packets develop pockets of negative density.  The
divergence d_t j^0 + d_x j^1 vanishes identically for solutions, which
the finite-difference residual here probes without reusing the spectral
derivatives.

All functions are pure; grid scans are safe to parallelize.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import DomainError
from .states import Event, FourVector, SpectralState, psi_dpsi_grid


class CausalClass(str, Enum):
    """Causal character of a 4-vector under metric (+, -)."""

    TIMELIKE_FORWARD = "timelike-forward"
    TIMELIKE_BACKWARD = "timelike-backward"
    SPACELIKE = "spacelike"
    LIGHTLIKE = "lightlike"
    NULL_VECTOR = "null-vector"


@dataclass(frozen=True)
class DensityInterval:
    """A maximal x-interval of negative density at fixed time."""

    t: float
    x_lo: float
    x_hi: float
    min_j0: float

    def __post_init__(self):
        if not self.x_lo < self.x_hi:
            raise ValueError("x_lo must be below x_hi")
        if not self.min_j0 < 0:
            raise ValueError("min_j0 must be negative")


def current_grid(state: SpectralState, t: float, xs):
    """Vectorized (j0, j1) over an array of positions at fixed t."""
    psi, d0, d1 = psi_dpsi_grid(state, t, xs)
    j0 = np.imag(np.conj(d0) * psi) / state.mass
    j1 = np.imag(np.conj(d1) * psi) / state.mass
    return j0, j1


def current(state: SpectralState, e: Event) -> FourVector:
    """The 4-current j^a at an event."""
    j0, j1 = current_grid(state, e.t, e.x)
    return FourVector(float(j0), float(j1))


def density(state: SpectralState, e: Event) -> float:
    """Zeroth (time) component of the current; real, sign-indefinite."""
    return current(state, e).v0


def continuity_residual(state: SpectralState, e: Event, h: float) -> float:
    """Central-difference estimate of d_t j0 + d_x j1 at the event.

    Second order in h.  Deliberately avoids the spectral time
    derivative so it checks the evaluator instead of restating it.
    """
    if not h > 0:
        raise ValueError("h must be positive")
    dj0_dt = (
        density(state, Event(e.t + h, e.x)) - density(state, Event(e.t - h, e.x))
    ) / (2 * h)
    j1_plus = current(state, Event(e.t, e.x + h)).v1
    j1_minus = current(state, Event(e.t, e.x - h)).v1
    return dj0_dt + (j1_plus - j1_minus) / (2 * h)


def scan_negative_density(
    state: SpectralState, t: float, x_lo: float, x_hi: float, n: int
):
    """Maximal sign-connected intervals with j0 < 0 on a sampled grid.

    Interval edges sit at midpoints between the last nonnegative sample
    and the first negative one (or at the scan boundary), so reported
    intervals are disjoint and each carries its sampled minimum.
    """
    if n < 2:
        raise ValueError("need at least two samples")
    if not x_lo < x_hi:
        raise ValueError("x_lo must be below x_hi")
    xs = np.linspace(x_lo, x_hi, n)
    j0, _ = current_grid(state, t, xs)
    neg = j0 < 0
    intervals = []
    k = 0
    while k < n:
        if not neg[k]:
            k += 1
            continue
        start = k
        while k + 1 < n and neg[k + 1]:
            k += 1
        end = k
        lo = x_lo if start == 0 else 0.5 * (xs[start - 1] + xs[start])
        hi = x_hi if end == n - 1 else 0.5 * (xs[end] + xs[end + 1])
        intervals.append(
            DensityInterval(
                t=float(t),
                x_lo=float(lo),
                x_hi=float(hi),
                min_j0=float(j0[start : end + 1].min()),
            )
        )
        k += 1
    return intervals


def _default_tol(v: FourVector) -> float:
    return 1e-9 * (1.0 + v.euclidean_norm())


def classify(v: FourVector, tol: float | None = None) -> CausalClass:
    """Causal character of v with a scale-aware lightlike band.

    timelike-forward/backward for v.v > tol^2 split on sign(v0),
    spacelike for v.v < -tol^2, lightlike within the band when the
    vector itself is not negligible, null-vector otherwise.
    """
    if tol is None:
        tol = _default_tol(v)
    if tol < 0:
        raise ValueError("tol must be nonnegative")
    s = v.minkowski_sq()
    if s > tol * tol:
        return (
            CausalClass.TIMELIKE_FORWARD if v.v0 > 0 else CausalClass.TIMELIKE_BACKWARD
        )
    if s < -tol * tol:
        return CausalClass.SPACELIKE
    if v.euclidean_norm() > tol:
        return CausalClass.LIGHTLIKE
    return CausalClass.NULL_VECTOR


def boost(v: FourVector, velocity: float) -> FourVector:
    """Lorentz boost of a 4-vector; preserves the Minkowski square."""
    if not abs(velocity) < 1:
        raise ValueError("|velocity| must be below 1")
    gamma = 1.0 / np.sqrt(1.0 - velocity * velocity)
    return FourVector(
        float(gamma * (v.v0 - velocity * v.v1)),
        float(gamma * (v.v1 - velocity * v.v0)),
    )


def rest_density(v: FourVector) -> float:
    """Density sqrt(v.v) seen in the frame co-moving with the current.

    Positive for any timelike current, whichever way it points in
    coordinate time.  Raises DomainError for non-timelike input.
    """
    cls = classify(v)
    if cls not in (CausalClass.TIMELIKE_FORWARD, CausalClass.TIMELIKE_BACKWARD):
        raise DomainError(f"rest density undefined for {cls.value} current")
    return float(np.sqrt(v.minkowski_sq()))
