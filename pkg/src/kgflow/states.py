"""Positive-energy Klein-Gordon states sampled in momentum space.

Conventions, used consistently across the package: natural units
(hbar = c = 1), metric signature (+, -), so p.x = p0*t - p*x.  Plane waves
enter position amplitudes as <x|p> = (2*pi)**-0.5 * exp(-i p.x) and
momentum amplitudes are normalized against the invariant measure dp/p0,
i.e. <p|p'> = p0 * delta(p - p').  Quadrature weights stored on a state
already include the 1/p0 factor, so the invariant norm is sum(w |a|^2).

Time evolution is exact in momentum space: amplitudes are static and the
phase exp(-i p0 t) enters only when a position amplitude is evaluated.
States are immutable after construction; every evaluation here is a pure
function of (state, event) and safe to call from any number of threads.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._quad import gauss_panels
from .errors import DegenerateStateError, GridMismatchError, TruncationError

INV_SQRT_2PI = 1.0 / np.sqrt(2.0 * np.pi)

# endpoint amplitude above this fraction of the peak means the grid
# truncates the packet
TRUNCATION_TOL = 1e-8


@dataclass(frozen=True)
class Event:
    """A spacetime point (t, x)."""

    t: float
    x: float


@dataclass(frozen=True)
class FourVector:
    """Contravariant components (v0, v1) under metric (+, -)."""

    v0: float
    v1: float

    def minkowski_sq(self) -> float:
        """Invariant square v.v = v0^2 - v1^2."""
        return self.v0 * self.v0 - self.v1 * self.v1

    def euclidean_norm(self) -> float:
        """Plain 2-norm of the component pair."""
        return float(np.hypot(self.v0, self.v1))


@dataclass(frozen=True)
class GridSpec:
    """Composite Gauss-Legendre momentum grid on [p_min, p_max]."""

    p_min: float
    p_max: float
    panels: int = 8
    nodes_per_panel: int = 32

    @property
    def n_nodes(self) -> int:
        return self.panels * self.nodes_per_panel


@dataclass(frozen=True)
class SpectralState:
    """A positive-energy state as sampled momentum amplitudes.

    Attributes
    ----------
    mass : particle mass, > 0.
    momenta : strictly increasing quadrature nodes p_k.
    amplitudes : complex a(p_k).
    weights : quadrature weights including the invariant 1/p0 factor.
    energies : p0_k = sqrt(p_k^2 + mass^2).
    """

    mass: float
    momenta: np.ndarray
    amplitudes: np.ndarray
    weights: np.ndarray
    energies: np.ndarray

    def __post_init__(self):
        if not self.mass > 0:
            raise ValueError("mass must be positive")
        if np.any(np.diff(self.momenta) <= 0):
            raise ValueError("momenta must be strictly increasing")
        if np.any(self.weights <= 0):
            raise ValueError("weights must be strictly positive")
        for arr in (self.momenta, self.amplitudes, self.weights, self.energies):
            if not np.all(np.isfinite(arr.view(float))):
                raise ValueError("state arrays must be finite")
            arr.setflags(write=False)


def _freeze(mass, momenta, amplitudes, weights) -> SpectralState:
    energies = np.sqrt(momenta * momenta + mass * mass)
    return SpectralState(
        mass=float(mass),
        momenta=np.array(momenta, dtype=float),
        amplitudes=np.array(amplitudes, dtype=complex),
        weights=np.array(weights, dtype=float),
        energies=energies,
    )


def invariant_norm(state: SpectralState) -> float:
    """Norm under the invariant measure, sqrt(sum w |a|^2)."""
    return float(np.sqrt(np.sum(state.weights * np.abs(state.amplitudes) ** 2)))


def make_gaussian_packet(
    mass: float,
    p_center: float,
    p_width: float,
    x_center: float,
    grid: GridSpec,
    check_truncation: bool = True,
) -> SpectralState:
    """Build a normalized Gaussian wave packet in momentum space.

    The amplitude is a(p) = exp(-(p - p_center)^2 / (4 p_width^2))
    * exp(-i p x_center), normalized to unit invariant norm.  Raises
    TruncationError when the grid endpoints clip the envelope above
    1e-8 of its peak (disable with check_truncation=False).
    """
    if not mass > 0:
        raise ValueError("mass must be positive")
    if not p_width > 0:
        raise ValueError("p_width must be positive")
    if grid.n_nodes < 16:
        raise ValueError("grid must carry at least 16 nodes")
    if grid.p_min > p_center - 6 * p_width or grid.p_max < p_center + 6 * p_width:
        raise ValueError(
            "grid [%g, %g] must contain p_center +/- 6 p_width" % (grid.p_min, grid.p_max)
        )
    if check_truncation:
        defect = max(
            np.exp(-((grid.p_min - p_center) ** 2) / (4 * p_width**2)),
            np.exp(-((grid.p_max - p_center) ** 2) / (4 * p_width**2)),
        )
        if defect > TRUNCATION_TOL:
            raise TruncationError(
                f"endpoint amplitude {defect:.3e} of peak exceeds {TRUNCATION_TOL:.0e}; "
                "widen the momentum grid"
            )
    p, gl_w = gauss_panels(grid.p_min, grid.p_max, grid.panels, grid.nodes_per_panel)
    p0 = np.sqrt(p * p + mass * mass)
    w = gl_w / p0
    a = np.exp(-((p - p_center) ** 2) / (4 * p_width**2)) * np.exp(-1j * p * x_center)
    a /= np.sqrt(np.sum(w * np.abs(a) ** 2))
    return _freeze(mass, p, a, w)


def _require_same_grid(a: SpectralState, b: SpectralState):
    if a.mass != b.mass:
        raise GridMismatchError("states have different masses")
    if a.momenta.shape != b.momenta.shape or not (
        np.array_equal(a.momenta, b.momenta) and np.array_equal(a.weights, b.weights)
    ):
        raise GridMismatchError("states live on different momentum grids")


def superpose(states, coeffs) -> SpectralState:
    """Combine states on a shared grid, then renormalize.

    Amplitudes become sum_j c_j a_j(p) scaled back to unit invariant
    norm, so only the relative coefficients matter.
    """
    if len(states) == 0:
        raise ValueError("need at least one state")
    if len(states) != len(coeffs):
        raise ValueError("one coefficient per state required")
    first = states[0]
    acc = np.zeros_like(first.amplitudes)
    for st, c in zip(states, coeffs):
        _require_same_grid(first, st)
        acc = acc + complex(c) * st.amplitudes
    norm_sq = np.sum(first.weights * np.abs(acc) ** 2)
    if norm_sq < 1e-24:
        raise DegenerateStateError("superposition cancelled to the zero state")
    acc /= np.sqrt(norm_sq)
    return _freeze(first.mass, first.momenta, acc, first.weights)


def inner(a: SpectralState, b: SpectralState) -> complex:
    """Invariant-measure inner product <a|b> = sum w conj(a) b."""
    _require_same_grid(a, b)
    return complex(np.sum(a.weights * np.conj(a.amplitudes) * b.amplitudes))


def _mode_table(state: SpectralState, t: float, x):
    """Per-node contributions w * <x|p> * a at fixed t, broadcast over x."""
    x = np.asarray(x, dtype=float)
    phase = np.exp(
        -1j * (state.energies * t - np.multiply.outer(x, state.momenta))
    )
    return (state.weights * state.amplitudes * INV_SQRT_2PI) * phase


def evaluate_psi(state: SpectralState, e: Event) -> complex:
    """Position amplitude <x|state> at the event, psi(t, x)."""
    return complex(_mode_table(state, e.t, e.x).sum())


def evaluate_dpsi(state: SpectralState, e: Event):
    """Contravariant derivatives (d^0 psi, d^1 psi) at the event.

    Spectral differentiation: each mode picks up -i p0 for d^0 = d/dt
    and -i p for d^1 = -d/dx (metric (+, -)).
    """
    table = _mode_table(state, e.t, e.x)
    d0 = complex((-1j * state.energies * table).sum())
    d1 = complex((-1j * state.momenta * table).sum())
    return d0, d1


def psi_grid(state: SpectralState, t: float, xs):
    """Vectorized psi(t, x) over an array of positions."""
    return _mode_table(state, t, xs).sum(axis=-1)


def psi_dpsi_grid(state: SpectralState, t: float, xs):
    """Vectorized (psi, d0 psi, d1 psi) over an array of positions."""
    table = _mode_table(state, t, xs)
    psi = table.sum(axis=-1)
    d0 = (-1j * state.energies * table).sum(axis=-1)
    d1 = (-1j * state.momenta * table).sum(axis=-1)
    return psi, d0, d1
