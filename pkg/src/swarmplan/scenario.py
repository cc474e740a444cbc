"""Scenario model: workspace, cylindrical threats, vehicles, formation graph.

A scenario bundles everything a planning run needs. Instances are immutable;
build them in code, via :func:`builtin_scenario`, or from a YAML file with
:func:`load_scenario`. :func:`validate` returns every violated rule (with a
field path) instead of stopping at the first, so files can be fixed in one
round.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import yaml

from .formation import FormationGraph

BUILTIN_IDS = ("scenario1", "scenario2")
THREAT_KINDS = ("crane", "virtual", "generic")

DEFAULT_SAFE_DISTANCE = 1.0
DEFAULT_DANGER_DISTANCE = 2.0
DEFAULT_BODY_RADIUS = 0.5


class ScenarioError(Exception):
    """Base class for scenario file problems."""


class ScenarioFormatError(ScenarioError):
    """Malformed file: unparseable text or missing/badly typed fields."""


class ScenarioValidationError(ScenarioError):
    """Structurally sound file whose values violate scenario rules."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


@dataclass(frozen=True)
class Workspace:
    """Axis-aligned flight volume; [z_min, z_max] is also the preferred
    altitude band with the preferred altitude at its midpoint."""

    x_min: float
    x_max: float
    y_min: float
    y_max: float
    z_min: float
    z_max: float

    @property
    def mid_altitude(self) -> float:
        return 0.5 * (self.z_min + self.z_max)

    @property
    def diagonal(self) -> float:
        return math.sqrt(
            (self.x_max - self.x_min) ** 2
            + (self.y_max - self.y_min) ** 2
            + (self.z_max - self.z_min) ** 2
        )


@dataclass(frozen=True)
class Threat:
    """Vertical cylindrical no-fly zone (infinite height within the workspace)."""

    center_x: float
    center_y: float
    radius: float
    kind: str = "generic"

    @property
    def center(self) -> np.ndarray:
        return np.array([self.center_x, self.center_y])


@dataclass(frozen=True)
class CostWeights:
    """Per-vehicle objective weights.

    beta scales the formation term; omega holds the five single-vehicle term
    weights (path length, threat, altitude, turning, climb-rate).
    """

    beta: float
    omega: tuple

    def __post_init__(self):
        object.__setattr__(self, "beta", float(self.beta))
        object.__setattr__(self, "omega", tuple(float(w) for w in self.omega))
        if len(self.omega) != 5:
            raise ValueError("omega must hold exactly five weights")


@dataclass(frozen=True)
class SafetyParams:
    """Hard separation distance and soft threat-avoidance band width."""

    safe_distance: float = DEFAULT_SAFE_DISTANCE
    danger_distance: float = DEFAULT_DANGER_DISTANCE


def _vec3(value) -> np.ndarray:
    arr = np.asarray(value, dtype=float)
    if arr.shape != (3,):
        raise ValueError("expected a 3-vector")
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class VehicleSpec:
    """One vehicle: endpoints, formation reference position, size, weights."""

    start: np.ndarray
    goal: np.ndarray
    reference: np.ndarray
    body_radius: float
    weights: CostWeights

    def __post_init__(self):
        object.__setattr__(self, "start", _vec3(self.start))
        object.__setattr__(self, "goal", _vec3(self.goal))
        object.__setattr__(self, "reference", _vec3(self.reference))
        object.__setattr__(self, "body_radius", float(self.body_radius))


@dataclass(frozen=True)
class Scenario:
    workspace: Workspace
    threats: tuple
    vehicles: tuple
    graph: FormationGraph
    safety: SafetyParams
    waypoint_count: int

    @property
    def n_vehicles(self) -> int:
        return len(self.vehicles)

    @property
    def body_radii(self) -> np.ndarray:
        return np.array([v.body_radius for v in self.vehicles])

    @property
    def betas(self) -> np.ndarray:
        return np.array([v.weights.beta for v in self.vehicles])

    @property
    def starts(self) -> np.ndarray:
        return np.stack([v.start for v in self.vehicles])

    @property
    def goals(self) -> np.ndarray:
        return np.stack([v.goal for v in self.vehicles])

    @property
    def references(self) -> np.ndarray:
        return np.stack([v.reference for v in self.vehicles])


# ----- validation ------------------------------------------------------------


def _point_in_workspace(p, w: Workspace) -> bool:
    return (
        w.x_min <= p[0] <= w.x_max
        and w.y_min <= p[1] <= w.y_max
        and w.z_min <= p[2] <= w.z_max
    )


def _validate_parts(workspace, threats, vehicles, safety, waypoint_count, graph,
                    graph_error=None):
    out = []
    w = workspace
    if not w.x_min < w.x_max:
        out.append("workspace.x_min: must be below x_max")
    if not w.y_min < w.y_max:
        out.append("workspace.y_min: must be below y_max")
    if not 0.0 <= w.z_min:
        out.append("workspace.z_min: must be nonnegative")
    if not w.z_min < w.z_max:
        out.append("workspace.z_min: must be below z_max")

    for i, t in enumerate(threats):
        if not t.radius > 0.0:
            out.append(f"threats[{i}].radius: must be positive")
        if not (w.x_min <= t.center_x <= w.x_max and w.y_min <= t.center_y <= w.y_max):
            out.append(f"threats[{i}].center: must lie inside workspace xy bounds")
        if t.kind not in THREAT_KINDS:
            out.append(f"threats[{i}].kind: must be one of {', '.join(THREAT_KINDS)}")

    if len(vehicles) < 2:
        out.append("vehicles: at least two vehicles required")
    for i, v in enumerate(vehicles):
        if np.array_equal(v.start, v.goal):
            out.append(f"vehicles[{i}].goal: must differ from start")
        if not _point_in_workspace(v.start, w):
            out.append(f"vehicles[{i}].start: must lie inside the workspace")
        if not _point_in_workspace(v.goal, w):
            out.append(f"vehicles[{i}].goal: must lie inside the workspace")
        if not np.isfinite(v.reference).all():
            out.append(f"vehicles[{i}].reference: must be finite")
        if not v.body_radius > 0.0:
            out.append(f"vehicles[{i}].body_radius: must be positive")
        wt = (v.weights.beta,) + v.weights.omega
        if any(x < 0.0 for x in wt):
            out.append(f"vehicles[{i}].weights: components must be nonnegative")
        if not any(x > 0.0 for x in wt):
            out.append(f"vehicles[{i}].weights: at least one component must be positive")

    if not safety.safe_distance > 0.0:
        out.append("safety.safe_distance: must be positive")
    if safety.danger_distance < 0.0:
        out.append("safety.danger_distance: must be nonnegative")
    if waypoint_count < 1:
        out.append("waypoint_count: must be at least 1")

    if graph_error is not None:
        out.append(f"graph: {graph_error}")
    elif graph is not None:
        if graph.n_vehicles != len(vehicles):
            out.append("graph.incidence: row count must equal the vehicle count")
        else:
            refs = np.stack([v.reference for v in vehicles])
            if not np.allclose(graph.references, refs, rtol=0.0, atol=1e-12):
                out.append("graph.references: must match the vehicle references")
    return out


def validate(scenario: Scenario) -> list:
    """Return every violated scenario rule as 'field.path: message' strings."""
    return _validate_parts(
        scenario.workspace,
        scenario.threats,
        scenario.vehicles,
        scenario.safety,
        scenario.waypoint_count,
        scenario.graph,
    )


# ----- dict / YAML round trip -------------------------------------------------


def _require(mapping, key, path):
    if not isinstance(mapping, dict):
        raise ScenarioFormatError(f"{path}: expected a mapping")
    if key not in mapping:
        raise ScenarioFormatError(f"{path}.{key}: missing")
    return mapping[key]


def _floats(value, path, length=None):
    try:
        seq = [float(x) for x in value]
    except (TypeError, ValueError):
        raise ScenarioFormatError(f"{path}: expected a list of numbers") from None
    if length is not None and len(seq) != length:
        raise ScenarioFormatError(f"{path}: expected {length} numbers")
    return seq


def scenario_from_dict(data) -> Scenario:
    """Build and validate a Scenario from a plain dict (parsed YAML)."""
    if not isinstance(data, dict):
        raise ScenarioFormatError("top level: expected a mapping")

    wd = _require(data, "workspace", "workspace")
    workspace = Workspace(
        x_min=float(_require(wd, "x_min", "workspace")),
        x_max=float(_require(wd, "x_max", "workspace")),
        y_min=float(_require(wd, "y_min", "workspace")),
        y_max=float(_require(wd, "y_max", "workspace")),
        z_min=float(_require(wd, "z_min", "workspace")),
        z_max=float(_require(wd, "z_max", "workspace")),
    )

    threats = []
    for i, td in enumerate(data.get("threats", []) or []):
        threats.append(
            Threat(
                center_x=float(_require(td, "center_x", f"threats[{i}]")),
                center_y=float(_require(td, "center_y", f"threats[{i}]")),
                radius=float(_require(td, "radius", f"threats[{i}]")),
                kind=str(td.get("kind", "generic")),
            )
        )

    vehicles = []
    for i, vd in enumerate(_require(data, "vehicles", "vehicles") or []):
        path = f"vehicles[{i}]"
        wdict = _require(vd, "weights", path)
        weights = CostWeights(
            beta=float(_require(wdict, "beta", f"{path}.weights")),
            omega=_floats(_require(wdict, "omega", f"{path}.weights"), f"{path}.weights.omega", 5),
        )
        vehicles.append(
            VehicleSpec(
                start=_floats(_require(vd, "start", path), f"{path}.start", 3),
                goal=_floats(_require(vd, "goal", path), f"{path}.goal", 3),
                reference=_floats(_require(vd, "reference", path), f"{path}.reference", 3),
                body_radius=float(vd.get("body_radius", DEFAULT_BODY_RADIUS)),
                weights=weights,
            )
        )

    gd = _require(data, "graph", "graph")
    incidence = _require(gd, "incidence", "graph")
    edge_weights = _require(gd, "edge_weights", "graph")

    sd = data.get("safety", {}) or {}
    safety = SafetyParams(
        safe_distance=float(sd.get("safe_distance", DEFAULT_SAFE_DISTANCE)),
        danger_distance=float(sd.get("danger_distance", DEFAULT_DANGER_DISTANCE)),
    )
    try:
        waypoint_count = int(_require(data, "waypoint_count", "waypoint_count"))
    except (TypeError, ValueError):
        raise ScenarioFormatError("waypoint_count: expected an integer") from None

    graph = None
    graph_error = None
    refs = [v.reference for v in vehicles]
    try:
        graph = FormationGraph(incidence, edge_weights, refs if refs else np.zeros((0, 3)))
    except ValueError as exc:
        graph_error = str(exc)

    violations = _validate_parts(
        workspace, threats, vehicles, safety, waypoint_count, graph, graph_error
    )
    if violations:
        raise ScenarioValidationError(violations)
    return Scenario(
        workspace=workspace,
        threats=tuple(threats),
        vehicles=tuple(vehicles),
        graph=graph,
        safety=safety,
        waypoint_count=waypoint_count,
    )


def scenario_to_dict(scenario: Scenario) -> dict:
    """Plain-dict form of a scenario, in the documented section order."""
    w = scenario.workspace
    return {
        "workspace": {
            "x_min": float(w.x_min),
            "x_max": float(w.x_max),
            "y_min": float(w.y_min),
            "y_max": float(w.y_max),
            "z_min": float(w.z_min),
            "z_max": float(w.z_max),
        },
        "threats": [
            {
                "center_x": float(t.center_x),
                "center_y": float(t.center_y),
                "radius": float(t.radius),
                "kind": t.kind,
            }
            for t in scenario.threats
        ],
        "vehicles": [
            {
                "start": [float(x) for x in v.start],
                "goal": [float(x) for x in v.goal],
                "reference": [float(x) for x in v.reference],
                "body_radius": float(v.body_radius),
                "weights": {
                    "beta": float(v.weights.beta),
                    "omega": [float(x) for x in v.weights.omega],
                },
            }
            for v in scenario.vehicles
        ],
        "graph": {
            "incidence": [[int(x) for x in row] for row in scenario.graph.incidence],
            "edge_weights": [[float(x) for x in row] for row in scenario.graph.edge_weights],
        },
        "safety": {
            "safe_distance": float(scenario.safety.safe_distance),
            "danger_distance": float(scenario.safety.danger_distance),
        },
        "waypoint_count": int(scenario.waypoint_count),
    }


def scenario_to_yaml(scenario: Scenario) -> str:
    return yaml.safe_dump(scenario_to_dict(scenario), sort_keys=False, default_flow_style=None)


def load_scenario(path) -> Scenario:
    """Load and validate a scenario file.

    Raises ScenarioFormatError for unparseable/malformed files,
    ScenarioValidationError (with the full violation list) for bad values, and
    OSError when the file cannot be read.
    """
    text = Path(path).read_text(encoding="utf-8")
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ScenarioFormatError(f"unparseable scenario file: {exc}") from exc
    return scenario_from_dict(data)


def save_scenario(scenario: Scenario, path) -> None:
    """Write the canonical text form; load_scenario(save_scenario(s)) == s bit-exactly."""
    target = Path(path)
    tmp = target.with_name(target.name + ".tmp")
    tmp.write_text(scenario_to_yaml(scenario), encoding="utf-8")
    tmp.replace(target)


# ----- built-in scenarios -----------------------------------------------------

# Equilateral-triangle fleet: side 10 m, so the lateral offset is 5*sqrt(3).
_TRI_DY = 5.0 * math.sqrt(3.0)


def _builtin_vehicles():
    starts = [
        (15.0, 10.0 + _TRI_DY, 20.0),
        (10.0, 10.0, 20.0),
        (20.0, 10.0, 20.0),
    ]
    goals = [
        (85.0, 80.0 + _TRI_DY, 20.0),
        (80.0, 80.0, 20.0),
        (90.0, 80.0, 20.0),
    ]
    # vehicle 0 prioritizes a short clear route; the others prioritize holding
    # the triangle around it
    weights = [
        CostWeights(beta=1.0, omega=(100.0, 100.0, 1.0, 1.0, 1.0)),
        CostWeights(beta=100.0, omega=(1.0, 100.0, 1.0, 1.0, 1.0)),
        CostWeights(beta=100.0, omega=(1.0, 100.0, 1.0, 1.0, 1.0)),
    ]
    return [
        VehicleSpec(start=s, goal=g, reference=g, body_radius=DEFAULT_BODY_RADIUS, weights=wt)
        for s, g, wt in zip(starts, goals, weights)
    ]


def builtin_scenario(scenario_id: str) -> Scenario:
    """Bundled construction-site scenarios.

    scenario1: two wide cylindrical obstructions on the diagonal.
    scenario2: four narrow obstructions (two cranes, two virtual keep-outs).
    """
    if scenario_id == "scenario1":
        threats = (
            Threat(40.0, 40.0, 9.0, "generic"),
            Threat(60.0, 60.0, 9.0, "generic"),
        )
    elif scenario_id == "scenario2":
        threats = (
            Threat(40.0, 48.0, 4.0, "crane"),
            Threat(74.0, 43.0, 4.0, "crane"),
            Threat(20.0, 70.0, 4.0, "virtual"),
            Threat(70.0, 60.0, 4.0, "virtual"),
        )
    else:
        raise ValueError(f"unknown builtin scenario id: {scenario_id!r}")

    vehicles = _builtin_vehicles()
    # triangle graph, edges ordered (0-1, 0-2, 1-2); every vehicle weights its
    # two incident edges equally
    incidence = [[1, 1, 0], [-1, 0, 1], [0, -1, -1]]
    edge_weights = [[1.0, 1.0, 0.0], [1.0, 0.0, 1.0], [0.0, 1.0, 1.0]]
    graph = FormationGraph(incidence, edge_weights, [v.reference for v in vehicles])
    return Scenario(
        workspace=Workspace(0.0, 100.0, 0.0, 100.0, 5.0, 35.0),
        threats=threats,
        vehicles=tuple(vehicles),
        graph=graph,
        safety=SafetyParams(),
        waypoint_count=10,
    )
