"""Scenario files: JSON descriptions of a formation plus run settings.

A scenario bundles a formation spec with per-clique gains and, optionally,
initial positions, the hierarchy root edge, and integrator overrides.  The
parser is strict: unknown fields and malformed entries are rejected with a
message naming the offender, and load - save - load is an identity.
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass
from importlib import resources

import numpy as np

from .formation import FormationSpec, LayerAssignment, extract_layers
from .geometry import as_state
from .potentials import CanonicalTriangleParams
from .simulate import IntegratorConfig

__all__ = [
    "ScenarioError",
    "Scenario",
    "scenario_from_dict",
    "scenario_to_dict",
    "load_scenario",
    "save_scenario",
    "bundled_scenario",
    "canonical_scenario",
]

_TOP_FIELDS = {"agent_count", "edges", "cliques", "gains", "initial", "root_edge", "integrator"}
_INTEGRATOR_FIELDS = {"method", "step", "rtol", "atol", "t_max", "gradient_stop", "sample_stride"}


class ScenarioError(ValueError):
    """A scenario file or dictionary could not be understood."""


@dataclass(eq=False)
class Scenario:
    """In-memory form of a scenario file.

    gains always holds one value per clique (a scalar in the file is
    broadcast on load).  integrator_overrides keeps only the fields the
    file actually set, so command-line flags can still win over defaults
    the file never mentioned.
    """

    spec: FormationSpec
    gains: tuple[float, ...]
    initial: np.ndarray | None = None
    root_edge: tuple[int, int] | None = None
    integrator_overrides: dict = dataclasses.field(default_factory=dict)

    def default_root_edge(self) -> tuple[int, int]:
        if self.root_edge is not None:
            return self.root_edge
        return min(self.spec.edges)

    def layer_assignment(self) -> LayerAssignment:
        return extract_layers(self.spec, self.default_root_edge(), self.gains)

    def integrator_config(self, **overrides) -> IntegratorConfig:
        merged = {**self.integrator_overrides, **overrides}
        return IntegratorConfig(**merged)


def _expect(cond: bool, msg: str):
    if not cond:
        raise ScenarioError(msg)


def scenario_from_dict(data: dict) -> Scenario:
    """Build a Scenario from parsed JSON, rejecting anything off-schema."""
    _expect(isinstance(data, dict), "scenario must be a JSON object")
    unknown = set(data) - _TOP_FIELDS
    _expect(not unknown, f"unknown scenario fields: {sorted(unknown)}")
    _expect("agent_count" in data, "scenario needs an agent_count")
    _expect("edges" in data, "scenario needs an edges list")

    n = data["agent_count"]
    _expect(isinstance(n, int) and n >= 1, "agent_count must be a positive integer")

    edges = []
    _expect(isinstance(data["edges"], list), "edges must be a list of [i, j, distance]")
    for row in data["edges"]:
        _expect(isinstance(row, list) and len(row) == 3, f"bad edge entry {row!r}")
        i, j, d = row
        _expect(isinstance(i, int) and isinstance(j, int), f"edge agents must be integers: {row!r}")
        _expect(isinstance(d, (int, float)), f"edge distance must be a number: {row!r}")
        edges.append((i, j, float(d)))

    cliques = []
    for row in data.get("cliques", []):
        _expect(isinstance(row, list) and len(row) == 4, f"bad clique entry {row!r}")
        i, j, k, z = row
        _expect(all(isinstance(a, int) for a in (i, j, k)), f"clique agents must be integers: {row!r}")
        _expect(isinstance(z, (int, float)), f"clique signed area must be a number: {row!r}")
        cliques.append((i, j, k, float(z)))

    try:
        spec = FormationSpec.from_lists(n, edges, cliques)
    except ValueError as exc:
        raise ScenarioError(f"bad formation data: {exc}") from exc

    raw_gains = data.get("gains", 4.0)
    if isinstance(raw_gains, (int, float)):
        gains = tuple(float(raw_gains) for _ in cliques)
    else:
        _expect(isinstance(raw_gains, list) and len(raw_gains) == len(cliques),
                f"gains must be a number or a list with one entry per clique "
                f"({len(cliques)} cliques)")
        _expect(all(isinstance(g, (int, float)) for g in raw_gains),
                "gains must be numbers")
        gains = tuple(float(g) for g in raw_gains)
    for g in gains:
        _expect(np.isfinite(g) and g > 0.0, f"gains must be positive, got {g}")

    initial = None
    if data.get("initial") is not None:
        rows = data["initial"]
        _expect(isinstance(rows, list) and len(rows) == n,
                f"initial must list one [x, y] per agent ({n} agents)")
        for row in rows:
            _expect(isinstance(row, list) and len(row) == 2
                    and all(isinstance(v, (int, float)) for v in row),
                    f"bad initial position {row!r}")
        try:
            initial = as_state([[float(v) for v in row] for row in rows], n)
        except ValueError as exc:
            raise ScenarioError(f"bad initial positions: {exc}") from exc

    root_edge = None
    if data.get("root_edge") is not None:
        row = data["root_edge"]
        _expect(isinstance(row, list) and len(row) == 2
                and all(isinstance(a, int) for a in row),
                f"root_edge must be a pair of agent indices, got {row!r}")
        root_edge = (row[0], row[1])
        _expect(spec.has_edge(*root_edge), f"root_edge {row!r} is not an edge of the spec")

    overrides = {}
    if data.get("integrator") is not None:
        raw = data["integrator"]
        _expect(isinstance(raw, dict), "integrator must be an object")
        unknown = set(raw) - _INTEGRATOR_FIELDS
        _expect(not unknown, f"unknown integrator fields: {sorted(unknown)}")
        overrides = dict(raw)
        try:
            IntegratorConfig(**overrides)
        except (TypeError, ValueError) as exc:
            raise ScenarioError(f"bad integrator settings: {exc}") from exc

    return Scenario(spec=spec, gains=gains, initial=initial,
                    root_edge=root_edge, integrator_overrides=overrides)


def scenario_to_dict(sc: Scenario) -> dict:
    """Inverse of scenario_from_dict (gains always written as a list)."""
    out: dict = {
        "agent_count": sc.spec.agent_count,
        "edges": [[i, j, d] for (i, j), d in sorted(sc.spec.edges.items())],
        "cliques": [[c.i, c.j, c.k, c.z_star] for c in sc.spec.cliques],
        "gains": list(sc.gains),
    }
    if sc.initial is not None:
        out["initial"] = [[float(x), float(y)] for x, y in sc.initial]
    if sc.root_edge is not None:
        out["root_edge"] = list(sc.root_edge)
    if sc.integrator_overrides:
        out["integrator"] = dict(sc.integrator_overrides)
    return out


def load_scenario(path) -> Scenario:
    """Read and validate a scenario file."""
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ScenarioError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"{path} is not valid JSON: {exc}") from exc
    return scenario_from_dict(data)


def save_scenario(sc: Scenario, path) -> None:
    with open(path, "w") as fh:
        json.dump(scenario_to_dict(sc), fh, indent=2)
        fh.write("\n")


def bundled_scenario(name: str = "eight_agent") -> Scenario:
    """Load a scenario shipped with the package (see triform/data)."""
    ref = resources.files("triform").joinpath("data", f"{name}.json")
    try:
        text = ref.read_text()
    except FileNotFoundError as exc:
        raise ScenarioError(f"no bundled scenario named {name!r}") from exc
    return scenario_from_dict(json.loads(text))


def canonical_scenario(params: CanonicalTriangleParams, p0) -> Scenario:
    """Three-agent scenario realizing the pinned-leader follower problem.

    Agents 1 and 2 start at the leader positions (so the root pair is
    already settled and never moves); agent 3 is the follower starting at
    p0.  Running the hierarchy on this scenario reproduces the canonical
    single-follower flow.
    """
    p0 = np.asarray(p0, dtype=float)
    pi, pj = params.leaders()
    spec = FormationSpec.from_lists(
        3,
        edges=[(1, 2, params.d_ij), (2, 3, params.d_jk), (3, 1, params.d_ki)],
        cliques=[(1, 2, 3, params.z_star)],
    )
    return Scenario(
        spec=spec,
        gains=(params.gain,),
        initial=as_state([pi, pj, p0], 3),
        root_edge=(1, 2),
    )
