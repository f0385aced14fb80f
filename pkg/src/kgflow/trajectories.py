"""Integral curves of a current field through 1+1 spacetime.

Curves are parametrized by Euclidean arc length in the (t, x) plane
rather than by coordinate time: current lines can bend backwards in t,
and exactly there a t-parametrization would break down.  At each step
the unit tangent is the normalized field with its sign chosen to stay
aligned with the previous tangent, so the traced line passes smoothly
through density-sign reversals, where the field direction swings
through spacelike orientations.

Each trace depends only on its (pure) field handle, so bundles of seeds
can run in parallel.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import NodeError
from .current import CausalClass, classify, current
from .conditional import FinalOutcome, conditional_current
from .states import Event, FourVector, SpectralState

FieldHandle = Callable[[Event], FourVector]


@dataclass(frozen=True)
class Box:
    """Rectangular spacetime region t in [t_lo, t_hi], x in [x_lo, x_hi]."""

    t_lo: float
    t_hi: float
    x_lo: float
    x_hi: float

    def __post_init__(self):
        if not (self.t_lo < self.t_hi and self.x_lo < self.x_hi):
            raise ValueError("box must have positive extent on both axes")

    def contains(self, e: Event) -> bool:
        return self.t_lo <= e.t <= self.t_hi and self.x_lo <= e.x <= self.x_hi


@dataclass(frozen=True)
class Trajectory:
    """A traced current line.

    events are the visited spacetime points, arc the cumulative
    Euclidean curve parameter (same length), classes the causal class
    of each step displacement (one fewer entry), densities the field
    time component at each event, reversals the step indices whose
    endpoints carry opposite-sign densities, and stop_reason one of
    "box-exit", "node", or "max-steps".
    """

    events: tuple
    arc: tuple
    classes: tuple
    densities: tuple
    reversals: tuple
    stop_reason: str


def standard_field(state: SpectralState) -> FieldHandle:
    """Field handle for the unconditional current of a state."""

    def field(e: Event) -> FourVector:
        return current(state, e)

    return field


def conditional_field(
    initial: SpectralState, outcome: FinalOutcome, amplitude_floor: float = 1e-8
) -> FieldHandle:
    """Field handle for the current conditioned on a final outcome."""

    def field(e: Event) -> FourVector:
        return conditional_current(initial, outcome, e, amplitude_floor)

    return field


def trace(
    field: FieldHandle,
    seed: Event,
    step: float,
    max_steps: int,
    box: Box,
    node_floor: float | None = None,
) -> Trajectory:
    """Fourth-order Runge-Kutta integration of de/ds = j(e)/|j(e)|.

    The normalization uses the Euclidean norm of (j0, j1): the Minkowski
    norm vanishes on lightlike stretches, exactly where the interesting
    turning happens.  Stage directions are sign-aligned with the
    incoming tangent so the field orientation never flips inside a
    step.  Stops on box exit, node (|j| below node_floor, default
    1e-10 of the field scale at the seed), or after max_steps.
    """
    if not step > 0:
        raise ValueError("step must be positive")
    if max_steps < 1:
        raise ValueError("max_steps must be at least 1")
    if not box.contains(seed):
        raise ValueError(f"seed {seed} lies outside the box")

    j_seed = field(seed)
    n_seed = j_seed.euclidean_norm()
    floor = 1e-10 * n_seed if node_floor is None else float(node_floor)
    if n_seed <= floor or n_seed == 0.0:
        raise NodeError(f"field magnitude {n_seed:.3e} at the seed is below the floor")

    def direction(e: Event, ref: np.ndarray, cached: FourVector | None = None):
        j = cached if cached is not None else field(e)
        n = np.hypot(j.v0, j.v1)
        if n <= floor:
            return None, j
        d = np.array([j.v0 / n, j.v1 / n])
        if float(d @ ref) < 0.0:
            d = -d
        return d, j

    events = [seed]
    arc = [0.0]
    classes: list[CausalClass] = []
    densities = [j_seed.v0]
    tangent = np.array([j_seed.v0 / n_seed, j_seed.v1 / n_seed])
    stop_reason = "max-steps"
    cached = j_seed

    h = step
    for _ in range(max_steps):
        e = events[-1]
        k1, _ = direction(e, tangent, cached)
        k2 = k3 = k4 = None
        if k1 is not None:
            k2, _ = direction(
                Event(e.t + 0.5 * h * k1[0], e.x + 0.5 * h * k1[1]), tangent
            )
        if k2 is not None:
            k3, _ = direction(
                Event(e.t + 0.5 * h * k2[0], e.x + 0.5 * h * k2[1]), tangent
            )
        if k3 is not None:
            k4, _ = direction(Event(e.t + h * k3[0], e.x + h * k3[1]), tangent)
        if k4 is None:
            stop_reason = "node"
            break
        delta = (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        norm = float(np.hypot(delta[0], delta[1]))
        if norm == 0.0:
            # stages cancelled pairwise; only possible hard against a node
            stop_reason = "node"
            break
        e_new = Event(e.t + delta[0], e.x + delta[1])
        if not box.contains(e_new):
            stop_reason = "box-exit"
            break
        j_new = field(e_new)
        events.append(e_new)
        arc.append(arc[-1] + norm)
        classes.append(classify(FourVector(float(delta[0]), float(delta[1]))))
        densities.append(j_new.v0)
        tangent = delta / norm
        cached = j_new

    reversals = tuple(
        k for k in range(len(densities) - 1) if densities[k] * densities[k + 1] < 0
    )
    return Trajectory(
        events=tuple(events),
        arc=tuple(arc),
        classes=tuple(classes),
        densities=tuple(densities),
        reversals=reversals,
        stop_reason=stop_reason,
    )


def segment_stats(traj: Trajectory) -> dict:
    """Arc-length-weighted fractions of each causal step class.

    The four fractions sum to one; a curve that reverses its time
    direction necessarily spends arc length on spacelike steps in
    between, since the tangent turns continuously.
    """
    if len(traj.events) < 2:
        raise ValueError("trajectory has no steps")
    lengths = np.diff(np.asarray(traj.arc))
    total = float(lengths.sum())
    acc = {
        CausalClass.TIMELIKE_FORWARD: 0.0,
        CausalClass.TIMELIKE_BACKWARD: 0.0,
        CausalClass.SPACELIKE: 0.0,
        CausalClass.LIGHTLIKE: 0.0,
    }
    for cls, ds in zip(traj.classes, lengths):
        acc[cls] += float(ds)
    return {
        "fraction_forward": acc[CausalClass.TIMELIKE_FORWARD] / total,
        "fraction_backward": acc[CausalClass.TIMELIKE_BACKWARD] / total,
        "fraction_spacelike": acc[CausalClass.SPACELIKE] / total,
        "fraction_lightlike": acc[CausalClass.LIGHTLIKE] / total,
    }


def detect_closed(traj: Trajectory, tol: float):
    """First index whose event returns near the seed with similar tangent.

    Skips an initial stretch of arc length max(4 tol, 5 mean step) so
    the departure neighborhood cannot trigger a match; requires the
    unit tangents to agree within 45 degrees.  Returns None for open
    curves.
    """
    if len(traj.events) < 3:
        return None
    seed = traj.events[0]
    first = traj.events[1]
    d0 = np.array([first.t - seed.t, first.x - seed.x])
    d0 /= np.hypot(*d0)
    mean_step = traj.arc[-1] / (len(traj.events) - 1)
    skip = max(4.0 * tol, 5.0 * mean_step)
    for k in range(1, len(traj.events)):
        if traj.arc[k] < skip:
            continue
        e = traj.events[k]
        if np.hypot(e.t - seed.t, e.x - seed.x) > tol:
            continue
        prev = traj.events[k - 1]
        d = np.array([e.t - prev.t, e.x - prev.x])
        norm = np.hypot(*d)
        if norm == 0.0:
            continue
        if float((d / norm) @ d0) >= np.cos(np.pi / 4):
            return k
    return None
