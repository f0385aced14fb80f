"""Scenario descriptions: strict JSON loading and state/ensemble builders.

A scenario fixes the mass, the Gaussian packets of the prepared state,
the momentum grid, the spacetime box for scans and traces, and
optionally a final measurement block (time T plus the outcome grid).
Unknown fields are rejected everywhere so a typo in a physics parameter
cannot pass silently.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from .conditional import OutcomeEnsemble, make_outcome_ensemble
from .errors import ScenarioError
from .states import GridSpec, SpectralState, make_gaussian_packet, superpose
from .trajectories import Box

BUNDLED_NAMES = ("single_rest", "single_boosted", "s1_negative_density", "s1_conditional")

_NAME_RE = re.compile(r"[A-Za-z0-9._-]+")


@dataclass(frozen=True)
class PacketSpec:
    """One Gaussian packet and its complex superposition coefficient."""

    p_center: float
    p_width: float
    x_center: float
    coeff_re: float
    coeff_im: float

    @property
    def coeff(self) -> complex:
        return complex(self.coeff_re, self.coeff_im)


@dataclass(frozen=True)
class FinalSpec:
    """Final Newton-Wigner measurement block."""

    T: float
    q_lo: float
    q_hi: float
    n_q: int


@dataclass(frozen=True)
class Scenario:
    name: str
    mass: float
    packets: tuple
    grid: GridSpec
    box: Box
    final: FinalSpec | None


def _take(mapping: dict, context: str, required: dict, optional: dict | None = None):
    """Pull typed fields out of a dict, rejecting unknown keys."""
    optional = optional or {}
    unknown = set(mapping) - set(required) - set(optional)
    if unknown:
        raise ScenarioError(f"unknown field(s) {sorted(unknown)} in {context}")
    out = {}
    for key, typ in required.items():
        if key not in mapping:
            raise ScenarioError(f"missing field {key!r} in {context}")
        out[key] = _coerce(mapping[key], typ, f"{context}.{key}")
    for key, typ in optional.items():
        if key in mapping:
            out[key] = _coerce(mapping[key], typ, f"{context}.{key}")
    return out


def _coerce(value, typ, context: str):
    if typ is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ScenarioError(f"{context} must be a number")
        value = float(value)
        if not np.isfinite(value):
            raise ScenarioError(f"{context} must be finite")
        return value
    if typ is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ScenarioError(f"{context} must be an integer")
        return value
    if typ is str:
        if not isinstance(value, str):
            raise ScenarioError(f"{context} must be a string")
        return value
    if typ is list:
        if not isinstance(value, list):
            raise ScenarioError(f"{context} must be a list")
        return value
    if typ is dict:
        if not isinstance(value, dict):
            raise ScenarioError(f"{context} must be an object")
        return value
    raise AssertionError(f"unhandled type {typ}")


def scenario_from_dict(raw: dict, context: str = "scenario") -> Scenario:
    """Validate a raw scenario mapping into a Scenario."""
    top = _take(
        raw,
        context,
        required={"name": str, "mass": float, "packets": list, "grid": dict, "box": dict},
        optional={"final": dict},
    )
    name = top["name"]
    if not name or not _NAME_RE.fullmatch(name):
        raise ScenarioError("scenario name must be nonempty and filesystem-safe")
    if not top["mass"] > 0:
        raise ScenarioError("mass must be positive")
    if not top["packets"]:
        raise ScenarioError("scenario needs at least one packet")

    packets = []
    for i, entry in enumerate(top["packets"]):
        fields = _take(
            _coerce(entry, dict, f"{context}.packets[{i}]"),
            f"{context}.packets[{i}]",
            required={
                "p_center": float,
                "p_width": float,
                "x_center": float,
                "coeff_re": float,
                "coeff_im": float,
            },
        )
        if not fields["p_width"] > 0:
            raise ScenarioError(f"packets[{i}].p_width must be positive")
        packets.append(PacketSpec(**fields))

    g = _take(
        top["grid"],
        f"{context}.grid",
        required={"p_min": float, "p_max": float, "panels": int, "nodes_per_panel": int},
    )
    if not g["p_min"] < g["p_max"]:
        raise ScenarioError("grid.p_min must be below grid.p_max")
    if g["panels"] < 1 or g["nodes_per_panel"] < 2:
        raise ScenarioError("grid needs at least 1 panel and 2 nodes per panel")
    grid = GridSpec(**g)
    if grid.n_nodes < 16:
        raise ScenarioError("grid must carry at least 16 nodes")

    b = _take(
        top["box"],
        f"{context}.box",
        required={"t_lo": float, "t_hi": float, "x_lo": float, "x_hi": float},
    )
    if not (b["t_lo"] < b["t_hi"] and b["x_lo"] < b["x_hi"]):
        raise ScenarioError("box must have positive extent on both axes")
    box = Box(**b)

    final = None
    if "final" in top:
        f = _take(
            top["final"],
            f"{context}.final",
            required={"T": float, "q_lo": float, "q_hi": float, "n_q": int},
        )
        if not f["q_lo"] < f["q_hi"]:
            raise ScenarioError("final.q_lo must be below final.q_hi")
        if f["n_q"] < 2:
            raise ScenarioError("final.n_q must be at least 2")
        final = FinalSpec(**f)

    return Scenario(
        name=name, mass=top["mass"], packets=tuple(packets), grid=grid, box=box, final=final
    )


def load_scenario(source) -> Scenario:
    """Load a scenario from a file path or a bundled scenario name."""
    path = Path(source)
    if path.exists():
        text = path.read_text(encoding="utf-8")
        context = str(path)
    elif str(source) in BUNDLED_NAMES:
        text = (
            resources.files("kgflow").joinpath(f"data/{source}.json").read_text("utf-8")
        )
        context = f"bundled scenario {source!r}"
    else:
        raise ScenarioError(
            f"{source!r} is neither an existing file nor one of the bundled "
            f"scenarios {list(BUNDLED_NAMES)}"
        )
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as err:
        raise ScenarioError(f"invalid JSON in {context}: {err}") from err
    if not isinstance(raw, dict):
        raise ScenarioError(f"{context} must contain a JSON object")
    return scenario_from_dict(raw, context)


def truncation_defect(scenario: Scenario) -> float:
    """Largest packet envelope amplitude at the grid endpoints, over peak."""
    worst = 0.0
    for pk in scenario.packets:
        for edge in (scenario.grid.p_min, scenario.grid.p_max):
            worst = max(
                worst, float(np.exp(-((edge - pk.p_center) ** 2) / (4 * pk.p_width**2)))
            )
    return worst


def build_state(scenario: Scenario, check_truncation: bool = True) -> SpectralState:
    """Prepared state of a scenario: superposed Gaussian packets."""
    parts = [
        make_gaussian_packet(
            scenario.mass,
            pk.p_center,
            pk.p_width,
            pk.x_center,
            scenario.grid,
            check_truncation=check_truncation,
        )
        for pk in scenario.packets
    ]
    return superpose(parts, [pk.coeff for pk in scenario.packets])


def build_ensemble(scenario: Scenario, state: SpectralState) -> OutcomeEnsemble:
    """Outcome ensemble of a scenario's final measurement block."""
    if scenario.final is None:
        raise ScenarioError(f"scenario {scenario.name!r} has no final block")
    f = scenario.final
    return make_outcome_ensemble(state, f.T, f.q_lo, f.q_hi, f.n_q)
