"""Formation specifications, validation, and hierarchical layer extraction.

A formation is a set of desired inter-agent distances plus a set of oriented
triangles with desired signed areas.  The layer extraction turns a valid
triangulated specification into a cascade: one stationary root agent, one
agent holding a single distance, and every further agent holding one
triangle against two agents from strictly lower layers.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .geometry import as_state, heron_area, signed_area, triangle_inequality_ok
from .potentials import HERON_REL_TOL, PairTerm, TriangleTerm

__all__ = [
    "Clique",
    "FormationSpec",
    "Violation",
    "ValidationReport",
    "validate_spec",
    "LayerAssignment",
    "NotTriangulatedFromRootError",
    "extract_layers",
    "TargetCheck",
    "target_membership",
]


def _edge_key(i: int, j: int) -> tuple[int, int]:
    return (i, j) if i < j else (j, i)


@dataclass(frozen=True)
class Clique:
    """Oriented triangle (i, j, k) with desired signed area z_star."""

    i: int
    j: int
    k: int
    z_star: float

    @property
    def agents(self) -> tuple[int, int, int]:
        return (self.i, self.j, self.k)

    def edge_keys(self) -> tuple[tuple[int, int], ...]:
        return (
            _edge_key(self.i, self.j),
            _edge_key(self.j, self.k),
            _edge_key(self.k, self.i),
        )


@dataclass(frozen=True)
class FormationSpec:
    """Desired distances and oriented triangle areas for n agents.

    Agent indices are 1-based.  The constructor rejects malformed input
    (bad indices, nonpositive or nonfinite distances); semantic consistency
    of a well-formed spec is the job of validate_spec, which reports
    problems instead of raising.
    """

    agent_count: int
    edges: dict[tuple[int, int], float] = field(default_factory=dict)
    cliques: tuple[Clique, ...] = ()

    def __post_init__(self):
        if self.agent_count < 1:
            raise ValueError("agent_count must be at least 1")
        norm_edges: dict[tuple[int, int], float] = {}
        for (i, j), d in dict(self.edges).items():
            self._check_index(i)
            self._check_index(j)
            if i == j:
                raise ValueError(f"edge ({i}, {j}) joins an agent to itself")
            d = float(d)
            if not (np.isfinite(d) and d > 0.0):
                raise ValueError(f"edge ({i}, {j}) needs a positive finite distance")
            key = _edge_key(i, j)
            if key in norm_edges and norm_edges[key] != d:
                raise ValueError(f"edge {key} given twice with different distances")
            norm_edges[key] = d
        object.__setattr__(self, "edges", norm_edges)
        cliques = tuple(self.cliques)
        for cl in cliques:
            for a in cl.agents:
                self._check_index(a)
            if len(set(cl.agents)) != 3:
                raise ValueError(f"clique {cl.agents} repeats an agent")
            if not np.isfinite(cl.z_star):
                raise ValueError(f"clique {cl.agents} needs a finite signed area")
        object.__setattr__(self, "cliques", cliques)

    def _check_index(self, a: int):
        if not (isinstance(a, (int, np.integer)) and 1 <= a <= self.agent_count):
            raise ValueError(f"agent index {a!r} out of range 1..{self.agent_count}")

    @classmethod
    def from_lists(cls, agent_count, edges, cliques=()) -> "FormationSpec":
        """Build from (i, j, d) edge triples and (i, j, k, z) clique tuples."""
        return cls(
            agent_count=agent_count,
            edges={(int(i), int(j)): float(d) for i, j, d in edges},
            cliques=tuple(Clique(int(i), int(j), int(k), float(z)) for i, j, k, z in cliques),
        )

    def has_edge(self, i: int, j: int) -> bool:
        return _edge_key(i, j) in self.edges

    def edge_distance(self, i: int, j: int) -> float:
        return self.edges[_edge_key(i, j)]


@dataclass(frozen=True)
class Violation:
    code: str
    message: str

    def __str__(self):
        return f"{self.code}: {self.message}"


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...]

    @property
    def ok(self) -> bool:
        return not self.violations

    def __str__(self):
        if self.ok:
            return "valid"
        return "\n".join(str(v) for v in self.violations)


def validate_spec(spec: FormationSpec) -> ValidationReport:
    """Check a well-formed spec for semantic consistency.

    All problems are collected and reported; nothing raises.  The checks:
    every clique edge carries a desired distance, clique distances satisfy
    the strict triangle inequality, |z_star| agrees with the area implied
    by the distances, z_star is nonzero, the edge count matches the
    minimally rigid value 2n - 3, and the cliques hang together through
    shared edges and cover every agent.
    """
    out: list[Violation] = []
    n = spec.agent_count

    expected = 2 * n - 3
    if n >= 2 and len(spec.edges) != expected:
        out.append(Violation(
            "edge-count",
            f"{len(spec.edges)} edges, minimal rigidity needs {expected} for {n} agents",
        ))

    for cl in spec.cliques:
        missing = [e for e in cl.edge_keys() if e not in spec.edges]
        if missing:
            out.append(Violation(
                "missing-clique-edge",
                f"clique {cl.agents} uses edges {missing} that carry no desired distance",
            ))
            continue
        d1 = spec.edge_distance(cl.i, cl.j)
        d2 = spec.edge_distance(cl.j, cl.k)
        d3 = spec.edge_distance(cl.k, cl.i)
        if not triangle_inequality_ok(d1, d2, d3):
            out.append(Violation(
                "triangle-inequality",
                f"clique {cl.agents} distances ({d1}, {d2}, {d3}) cannot form a triangle",
            ))
            continue
        if cl.z_star == 0.0:
            out.append(Violation(
                "zero-area",
                f"clique {cl.agents} has zero desired signed area; orientation is undefined",
            ))
            continue
        area = heron_area(d1, d2, d3)
        if abs(abs(cl.z_star) - area) > HERON_REL_TOL * max(area, 1.0):
            out.append(Violation(
                "area-distance-mismatch",
                f"clique {cl.agents} desired |area| {abs(cl.z_star)} does not match "
                f"the value {area} implied by its distances",
            ))

    if spec.cliques:
        covered = set()
        for cl in spec.cliques:
            covered.update(cl.agents)
        uncovered = sorted(set(range(1, n + 1)) - covered)
        if uncovered:
            out.append(Violation(
                "uncovered-agents",
                f"agents {uncovered} belong to no clique",
            ))
        # cliques must hang together through shared edges for a single
        # hierarchy to exist
        m = len(spec.cliques)
        if m > 1:
            seen = {0}
            frontier = [0]
            keysets = [set(cl.edge_keys()) for cl in spec.cliques]
            while frontier:
                cur = frontier.pop()
                for other in range(m):
                    if other not in seen and keysets[cur] & keysets[other]:
                        seen.add(other)
                        frontier.append(other)
            if len(seen) != m:
                out.append(Violation(
                    "disconnected-cliques",
                    "the cliques do not form a single edge-connected cluster",
                ))
    elif n >= 3:
        out.append(Violation(
            "uncovered-agents",
            f"no cliques given for {n} agents; orientation is unconstrained",
        ))

    return ValidationReport(tuple(out))


class NotTriangulatedFromRootError(ValueError):
    """The spec cannot be ordered into layers from the requested root edge."""


@dataclass(frozen=True)
class LayerAssignment:
    """Result of ordering a formation into a control hierarchy.

    layer_of maps agent -> layer number (root agent is 1); terms_of maps
    agent -> the potential terms it owns.  The root owns nothing, the
    agent across the root edge owns one distance term, and every other
    agent owns triangle terms whose other two agents sit in strictly
    lower layers.
    """

    layer_of: dict[int, int]
    terms_of: dict[int, tuple[PairTerm | TriangleTerm, ...]]

    def layers(self) -> dict[int, list[int]]:
        """Layer number -> sorted list of agents on that layer."""
        out: dict[int, list[int]] = {}
        for agent, layer in self.layer_of.items():
            out.setdefault(layer, []).append(agent)
        for agents in out.values():
            agents.sort()
        return out


def _rotate_clique(cl: Clique, owner: int) -> tuple[int, int, int]:
    """Cyclic rotation of the clique triple putting the owner last.

    Cyclic rotations preserve the signed area, so the stored z_star stays
    valid for the rotated order.
    """
    i, j, k = cl.agents
    if owner == k:
        return i, j, k
    if owner == i:
        return j, k, i
    return k, i, j


def extract_layers(spec: FormationSpec, root_edge: tuple[int, int], gains=4.0) -> LayerAssignment:
    """Order a triangulated spec into layers from a root edge.

    The first endpoint of root_edge becomes the stationary layer-1 agent,
    the second holds the root distance on layer 2.  Remaining agents are
    absorbed in deterministic order: repeatedly take the smallest-index
    unassigned agent that forms a clique with two already-assigned agents,
    give it that clique's triangle term (first matching clique in spec
    order), and place it one layer above the deeper of its two leaders.

    gains weights the signed-area penalty: a single positive number for
    all cliques or a sequence with one entry per clique in spec order.
    """
    r1, r2 = int(root_edge[0]), int(root_edge[1])
    if not spec.has_edge(r1, r2):
        raise NotTriangulatedFromRootError(f"root edge ({r1}, {r2}) is not in the spec")

    n_cl = len(spec.cliques)
    if np.isscalar(gains):
        gain_of = [float(gains)] * n_cl
    else:
        gain_of = [float(g) for g in gains]
        if len(gain_of) != n_cl:
            raise ValueError(f"expected {n_cl} gains, got {len(gain_of)}")
    for g in gain_of:
        if not (np.isfinite(g) and g > 0.0):
            raise ValueError("area gains must be positive and finite")

    layer_of = {r1: 1, r2: 2}
    terms_of: dict[int, tuple[PairTerm | TriangleTerm, ...]] = {
        r1: (),
        r2: (PairTerm(i=r1, j=r2, d_star=spec.edge_distance(r1, r2)),),
    }

    unassigned = set(range(1, spec.agent_count + 1)) - {r1, r2}
    while unassigned:
        placed = None
        for agent in sorted(unassigned):
            for idx, cl in enumerate(spec.cliques):
                if agent not in cl.agents:
                    continue
                others = [a for a in cl.agents if a != agent]
                if all(o in layer_of for o in others):
                    i, j, k = _rotate_clique(cl, agent)
                    term = TriangleTerm(
                        i=i, j=j, k=k,
                        d_ij=spec.edge_distance(i, j),
                        d_jk=spec.edge_distance(j, k),
                        d_ki=spec.edge_distance(k, i),
                        z_star=cl.z_star,
                        gain=gain_of[idx],
                    )
                    layer_of[agent] = max(layer_of[i], layer_of[j]) + 1
                    terms_of[agent] = (term,)
                    placed = agent
                    break
            if placed is not None:
                break
        if placed is None:
            raise NotTriangulatedFromRootError(
                f"agents {sorted(unassigned)} cannot be reached by gluing triangles "
                f"onto the structure grown from root edge ({r1}, {r2})"
            )
        unassigned.discard(placed)

    return LayerAssignment(layer_of=layer_of, terms_of=terms_of)


@dataclass(frozen=True)
class TargetCheck:
    """Outcome of testing a state against the desired formation."""

    in_target: bool
    edge_residuals: dict[tuple[int, int], float]
    clique_residuals: dict[tuple[int, int, int], float]
    max_residual: float


def target_membership(state, spec: FormationSpec, tol: float) -> TargetCheck:
    """Is the state in the desired set, and how far off is each constraint.

    Edge residuals are distance errors (actual minus desired), clique
    residuals signed-area errors.  Membership requires every residual
    magnitude to be at most tol.
    """
    p = as_state(state, spec.agent_count)
    edge_res: dict[tuple[int, int], float] = {}
    for (i, j), d in spec.edges.items():
        edge_res[(i, j)] = float(np.linalg.norm(p[j - 1] - p[i - 1])) - d
    clique_res: dict[tuple[int, int, int], float] = {}
    for cl in spec.cliques:
        clique_res[cl.agents] = signed_area(p[cl.i - 1], p[cl.j - 1], p[cl.k - 1]) - cl.z_star
    worst = 0.0
    for r in list(edge_res.values()) + list(clique_res.values()):
        worst = max(worst, abs(r))
    return TargetCheck(
        in_target=bool(worst <= tol),
        edge_residuals=edge_res,
        clique_residuals=clique_res,
        max_residual=worst,
    )
