"""Gradient-flow integration for followers and layered formations.

Every agent descends its own potential, so the collective dynamics is a
cascade of gradient flows.  A hand-rolled fixed-step RK4 keeps runs exactly
reproducible (and lets whole grids of followers march in lockstep for basin
maps); an adaptive RK45 is available when step-size control matters more
than bit-level determinism.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .equilibria import EquilibriumRecord
from .formation import FormationSpec, LayerAssignment, TargetCheck, target_membership
from .geometry import as_point, as_state
from .potentials import (
    PairTerm,
    CanonicalTriangleParams,
    canonical_grad,
    pair_grad,
    pair_potential,
    triangle_potential,
    _tri_grad,
)

__all__ = [
    "GRADIENT_STOP",
    "TIME_LIMIT",
    "NON_FINITE",
    "RK4",
    "RK45",
    "NON_CONVERGENT",
    "IntegratorConfig",
    "Trajectory",
    "integrate_follower",
    "integrate_hierarchy",
    "BasinMap",
    "basin_sample",
    "potential_series",
    "monotone_audit",
    "ConvergenceReport",
    "convergence_report",
    "write_trajectory",
    "write_basin",
]

GRADIENT_STOP = "gradient_stop"
TIME_LIMIT = "time_limit"
NON_FINITE = "non_finite"

RK4 = "rk4"
RK45 = "rk45"

NON_CONVERGENT = "NonConvergent"


@dataclass(frozen=True)
class IntegratorConfig:
    """Settings for the gradient-flow integrators.

    method is "rk4" (fixed step, exactly reproducible) or "rk45" (adaptive,
    controlled by rtol and atol; step is ignored).  Integration stops when
    the total gradient norm falls below gradient_stop, when t_max is
    reached, or when the state leaves the representable range.  Every
    sample_stride-th accepted step is recorded, plus the final one.
    """

    method: str = RK4
    step: float = 1e-3
    rtol: float = 1e-9
    atol: float = 1e-9
    t_max: float = 100.0
    gradient_stop: float = 1e-10
    sample_stride: int = 10

    def __post_init__(self):
        if self.method not in (RK4, RK45):
            raise ValueError(f"unknown method {self.method!r}, expected {RK4!r} or {RK45!r}")
        if not (np.isfinite(self.step) and self.step > 0.0):
            raise ValueError("step must be positive and finite")
        if not (np.isfinite(self.rtol) and self.rtol > 0.0):
            raise ValueError("rtol must be positive and finite")
        if not (np.isfinite(self.atol) and self.atol > 0.0):
            raise ValueError("atol must be positive and finite")
        if not (np.isfinite(self.t_max) and self.t_max > 0.0):
            raise ValueError("t_max must be positive and finite")
        if not (np.isfinite(self.gradient_stop) and self.gradient_stop > 0.0):
            raise ValueError("gradient_stop must be positive and finite")
        if int(self.sample_stride) != self.sample_stride or self.sample_stride < 1:
            raise ValueError("sample_stride must be a positive integer")


@dataclass(frozen=True)
class Trajectory:
    """Sampled gradient-flow run.

    times has shape (m,), states (m, n_agents, 2); row order follows agent
    index.  terminal_reason tells why the run ended: "gradient_stop" for
    convergence, "time_limit", or "non_finite" when the state blew up (the
    offending state is excluded, the last finite one kept).
    """

    times: np.ndarray
    states: np.ndarray
    terminal_reason: str

    @property
    def final_state(self) -> np.ndarray:
        return self.states[-1]

    @property
    def agent_count(self) -> int:
        return self.states.shape[1]


def _total_norm(v: np.ndarray) -> float:
    return float(np.sqrt(np.sum(v * v)))


def _rk4_run(vel, y0: np.ndarray, cfg: IntegratorConfig):
    """Fixed-step RK4 on an (n, 2) state with stride sampling."""
    h = cfg.step
    stride = int(cfg.sample_stride)
    n_steps = int(np.floor(cfg.t_max / h + 1e-9))
    y = y0.copy()
    times = [0.0]
    states = [y.copy()]
    reason = TIME_LIMIT
    k = 0
    while k < n_steps:
        v1 = vel(y)
        if _total_norm(v1) < cfg.gradient_stop:
            reason = GRADIENT_STOP
            break
        v2 = vel(y + (0.5 * h) * v1)
        v3 = vel(y + (0.5 * h) * v2)
        v4 = vel(y + h * v3)
        y_new = y + (h / 6.0) * (v1 + 2.0 * v2 + 2.0 * v3 + v4)
        if not np.all(np.isfinite(y_new)):
            reason = NON_FINITE
            break
        y = y_new
        k += 1
        if k % stride == 0:
            times.append(k * h)
            states.append(y.copy())
    else:
        # ran to t_max; the endpoint may happen to satisfy the stop test
        if _total_norm(vel(y)) < cfg.gradient_stop:
            reason = GRADIENT_STOP
    if times[-1] != k * h:
        times.append(k * h)
        states.append(y.copy())
    return np.array(times), np.array(states), reason


def _rk45_run(vel, y0: np.ndarray, cfg: IntegratorConfig):
    """Adaptive RK45 on an (n, 2) state with stride sampling of accepted steps."""
    n = y0.shape[0]

    def f(t, y):
        return vel(y.reshape(n, 2)).ravel()

    def stop_event(t, y):
        return _total_norm(vel(y.reshape(n, 2))) - cfg.gradient_stop

    stop_event.terminal = True
    sol = solve_ivp(
        f, (0.0, cfg.t_max), y0.ravel(), method="RK45",
        rtol=cfg.rtol, atol=cfg.atol, events=[stop_event],
    )
    if sol.status == 1:
        reason = GRADIENT_STOP
    elif sol.status == 0:
        reason = TIME_LIMIT
    else:
        reason = NON_FINITE
    stride = int(cfg.sample_stride)
    sel = list(range(0, len(sol.t), stride))
    if sel[-1] != len(sol.t) - 1:
        sel.append(len(sol.t) - 1)
    times = sol.t[sel]
    states = sol.y.T[sel].reshape(len(sel), n, 2)
    keep = np.all(np.isfinite(states.reshape(len(sel), -1)), axis=1)
    if not keep.all():
        reason = NON_FINITE
        times = times[keep]
        states = states[keep]
    return times, states, reason


def _run(vel, y0: np.ndarray, cfg: IntegratorConfig) -> Trajectory:
    v0 = vel(y0)
    if not np.all(np.isfinite(v0)):
        raise ValueError("gradient is not finite at the initial state")
    if _total_norm(v0) < cfg.gradient_stop:
        return Trajectory(np.array([0.0]), y0[None].copy(), GRADIENT_STOP)
    runner = _rk4_run if cfg.method == RK4 else _rk45_run
    times, states, reason = runner(vel, y0, cfg)
    return Trajectory(times, states, reason)


def integrate_follower(
    params: CanonicalTriangleParams, p0, cfg: IntegratorConfig | None = None
) -> Trajectory:
    """Gradient flow of a single follower under pinned leaders.

    Starts at p0 and descends the canonical-frame potential.  The returned
    trajectory has one agent; its terminal state is an equilibrium exactly
    when the run ends with "gradient_stop".
    """
    cfg = cfg if cfg is not None else IntegratorConfig()
    y0 = as_point(p0)[None]

    def vel(pts):
        return -canonical_grad(params, pts)

    return _run(vel, y0, cfg)


# ---------------------------------------------------------------------------
# layered collective flow

@dataclass(frozen=True)
class _TermTables:
    """Index arrays for evaluating every owned term in one vectorized pass."""

    pair_i: np.ndarray
    pair_j: np.ndarray
    pair_d: np.ndarray
    tri_i: np.ndarray
    tri_j: np.ndarray
    tri_k: np.ndarray
    tri_djk: np.ndarray
    tri_dki: np.ndarray
    tri_z: np.ndarray
    tri_gain: np.ndarray


def _compile_tables(assignment: LayerAssignment) -> _TermTables:
    pi, pj, pd = [], [], []
    ti, tj, tk, djk, dki, tz, tg = [], [], [], [], [], [], []
    for agent in sorted(assignment.terms_of):
        for term in assignment.terms_of[agent]:
            if isinstance(term, PairTerm):
                pi.append(term.i - 1)
                pj.append(term.j - 1)
                pd.append(term.d_star)
            else:
                ti.append(term.i - 1)
                tj.append(term.j - 1)
                tk.append(term.k - 1)
                djk.append(term.d_jk)
                dki.append(term.d_ki)
                tz.append(term.z_star)
                tg.append(term.gain)
    return _TermTables(
        pair_i=np.array(pi, dtype=int), pair_j=np.array(pj, dtype=int),
        pair_d=np.array(pd, dtype=float),
        tri_i=np.array(ti, dtype=int), tri_j=np.array(tj, dtype=int),
        tri_k=np.array(tk, dtype=int),
        tri_djk=np.array(djk, dtype=float), tri_dki=np.array(dki, dtype=float),
        tri_z=np.array(tz, dtype=float), tri_gain=np.array(tg, dtype=float),
    )


def _tables_velocity(state: np.ndarray, tables: _TermTables) -> np.ndarray:
    """Collective velocity: minus every term gradient, scattered to owners.

    Uses the same elementwise arithmetic as agent_control, so each agent's
    row is bit-identical to its individually computed command and depends
    only on rows of agents in its own terms.
    """
    u = np.zeros_like(state)
    if tables.pair_i.size:
        g = pair_grad(state[tables.pair_i], state[tables.pair_j], tables.pair_d)
        np.subtract.at(u, tables.pair_j, g)
    if tables.tri_i.size:
        g = _tri_grad(
            state[tables.tri_i], state[tables.tri_j], state[tables.tri_k],
            tables.tri_djk ** 2, tables.tri_dki ** 2, tables.tri_z, tables.tri_gain,
        )
        np.subtract.at(u, tables.tri_k, g)
    return u


def integrate_hierarchy(
    spec: FormationSpec,
    assignment: LayerAssignment,
    state0,
    cfg: IntegratorConfig | None = None,
) -> Trajectory:
    """Collective gradient flow of a layered formation.

    Each agent follows minus the gradient of its own terms, so layer 1
    never moves and every layer is driven only by the layers below it.
    state0 holds one row per agent, ordered by agent index.
    """
    cfg = cfg if cfg is not None else IntegratorConfig()
    y0 = as_state(state0, spec.agent_count)
    if set(assignment.layer_of) != set(range(1, spec.agent_count + 1)):
        raise ValueError("assignment does not cover exactly the spec's agents")
    tables = _compile_tables(assignment)

    def vel(state):
        return _tables_velocity(state, tables)

    return _run(vel, y0, cfg)


# ---------------------------------------------------------------------------
# basin mapping

def _rk4_basin(vel, pts: np.ndarray, cfg: IntegratorConfig):
    """March a whole grid of independent followers with one RK4 loop.

    Rows that converge are frozen immediately and never touched again, so
    every row is bit-identical to a run of the single-follower integrator
    from the same start.
    """
    h = cfg.step
    n_steps = int(np.floor(cfg.t_max / h + 1e-9))
    p = pts.copy()
    converged = np.zeros(len(p), dtype=bool)
    act = np.arange(len(p))
    for _ in range(n_steps):
        if act.size == 0:
            break
        q = p[act]
        v1 = vel(q)
        gn = np.hypot(v1[:, 0], v1[:, 1])
        done = gn < cfg.gradient_stop
        if done.any():
            converged[act[done]] = True
            act = act[~done]
            q = q[~done]
            v1 = v1[~done]
            if act.size == 0:
                break
        v2 = vel(q + (0.5 * h) * v1)
        v3 = vel(q + (0.5 * h) * v2)
        v4 = vel(q + h * v3)
        qn = q + (h / 6.0) * (v1 + 2.0 * v2 + 2.0 * v3 + v4)
        finite = np.all(np.isfinite(qn), axis=1)
        p[act[finite]] = qn[finite]
        # rows that left the representable range keep their last finite state
        act = act[finite]
    if act.size:
        v = vel(p[act])
        gn = np.hypot(v[:, 0], v[:, 1])
        converged[act[gn < cfg.gradient_stop]] = True
    return p, converged


@dataclass(frozen=True)
class BasinMap:
    """Grid of follower starts, each labeled by the equilibrium it reached.

    labels holds an index into equilibria per node, or -1 where the run did
    not converge to any known equilibrium; label_names gives a unique
    printable name per equilibrium.  terminal stores the final positions.
    Node (iy, ix) started at (xs[ix], ys[iy]).
    """

    xs: np.ndarray
    ys: np.ndarray
    labels: np.ndarray
    terminal: np.ndarray
    equilibria: tuple[EquilibriumRecord, ...]
    label_names: tuple[str, ...]

    def counts(self) -> dict[str, int]:
        """Node count per label name, plus NonConvergent when present."""
        out: dict[str, int] = {}
        for idx, name in enumerate(self.label_names):
            n = int(np.sum(self.labels == idx))
            if n:
                out[name] = n
        n_bad = int(np.sum(self.labels < 0))
        if n_bad:
            out[NON_CONVERGENT] = n_bad
        return out


def _unique_names(records) -> tuple[str, ...]:
    names = []
    seen: dict[str, int] = {}
    for r in records:
        k = seen.get(r.label, 0) + 1
        seen[r.label] = k
        names.append(r.label)
    # disambiguate repeated labels with an ordinal
    counts = {n: 0 for n in names}
    out = []
    for r, n in zip(records, names):
        if names.count(n) > 1:
            counts[n] += 1
            out.append(f"{n}{counts[n]}")
        else:
            out.append(n)
    return tuple(out)


def basin_sample(
    params: CanonicalTriangleParams,
    bounds,
    resolution,
    cfg: IntegratorConfig | None = None,
    equilibria=(),
) -> BasinMap:
    """Label a grid of follower starts by the equilibrium each converges to.

    bounds is (xmin, xmax, ymin, ymax); resolution a node count per axis
    (one number or a pair nx, ny).  Each node is integrated to termination
    and matched to the nearest of the given equilibria within one
    thousandth of the problem's length scale; nodes that hit the time
    limit, blow up, or stop far from every listed equilibrium are labeled
    NonConvergent (-1).
    """
    cfg = cfg if cfg is not None else IntegratorConfig()
    xmin, xmax, ymin, ymax = (float(v) for v in bounds)
    if np.isscalar(resolution):
        nx = ny = int(resolution)
    else:
        nx, ny = (int(v) for v in resolution)
    if nx < 1 or ny < 1:
        raise ValueError("resolution must be at least 1 node per axis")
    xs = np.linspace(xmin, xmax, nx)
    ys = np.linspace(ymin, ymax, ny)
    xx, yy = np.meshgrid(xs, ys)
    nodes = np.stack([xx.ravel(), yy.ravel()], axis=-1)

    def vel(pts):
        return -canonical_grad(params, pts)

    if cfg.method == RK4:
        terminal, converged = _rk4_basin(vel, nodes, cfg)
    else:
        terminal = np.empty_like(nodes)
        converged = np.zeros(len(nodes), dtype=bool)
        for r, node in enumerate(nodes):
            traj = integrate_follower(params, node, cfg)
            terminal[r] = traj.final_state[0]
            converged[r] = traj.terminal_reason == GRADIENT_STOP

    records = tuple(equilibria)
    labels = np.full(len(nodes), -1, dtype=int)
    if records:
        positions = np.stack([r.position for r in records])
        d = np.linalg.norm(terminal[:, None, :] - positions[None, :, :], axis=2)
        nearest = np.argmin(d, axis=1)
        radius = 1e-3 * params.length_scale()
        hit = converged & (d[np.arange(len(nodes)), nearest] <= radius)
        labels[hit] = nearest[hit]

    return BasinMap(
        xs=xs,
        ys=ys,
        labels=labels.reshape(ny, nx),
        terminal=terminal.reshape(ny, nx, 2),
        equilibria=records,
        label_names=_unique_names(records),
    )


# ---------------------------------------------------------------------------
# audits and reports

def potential_series(states, assignment: LayerAssignment) -> np.ndarray:
    """Per-agent potential along a trajectory, shape (m, n_agents).

    Column a holds the value of agent (a + 1)'s own terms at each sample;
    the stationary root contributes a zero column.
    """
    S = np.asarray(states, dtype=float)
    if S.ndim != 3 or S.shape[2] != 2:
        raise ValueError("states must have shape (m, n_agents, 2)")
    V = np.zeros(S.shape[:2])
    for agent, terms in assignment.terms_of.items():
        for term in terms:
            if isinstance(term, PairTerm):
                V[:, agent - 1] += pair_potential(
                    S[:, term.i - 1, :], S[:, term.j - 1, :], term.d_star
                )
            else:
                V[:, agent - 1] += triangle_potential(
                    S[:, term.i - 1, :], S[:, term.j - 1, :], S[:, term.k - 1, :], term
                )
    return V


def monotone_audit(series, rel_tol: float = 1e-9) -> tuple[bool, float]:
    """Check that each column of a sampled series never rises beyond slack.

    The allowed rise per step is rel_tol times the larger of the column's
    initial value and its value at the step's start.  Returns the verdict
    and the worst excess over the slack (negative when everything fell).
    """
    V = np.asarray(series, dtype=float)
    if V.ndim == 1:
        V = V[:, None]
    if V.shape[0] < 2:
        return True, float("-inf")
    rises = np.diff(V, axis=0)
    slack = rel_tol * np.maximum(V[0][None, :], V[:-1])
    excess = rises - slack
    return bool(np.all(excess <= 0.0)), float(excess.max())


@dataclass(frozen=True)
class ConvergenceReport:
    """Residuals of a finished run against its formation spec."""

    target: TargetCheck
    terminal_reason: str
    potential_monotone: bool | None
    max_potential_rise: float | None

    @property
    def converged(self) -> bool:
        return self.terminal_reason == GRADIENT_STOP and self.target.in_target


def convergence_report(
    traj: Trajectory,
    spec: FormationSpec,
    tol: float,
    assignment: LayerAssignment | None = None,
) -> ConvergenceReport:
    """Judge a finished run: final-state residuals plus an optional audit
    that the total potential never rose along the samples."""
    check = target_membership(traj.final_state, spec, tol)
    monotone = None
    worst_rise = None
    if assignment is not None:
        series = potential_series(traj.states, assignment)
        monotone, worst_rise = monotone_audit(series.sum(axis=1))
    return ConvergenceReport(
        target=check,
        terminal_reason=traj.terminal_reason,
        potential_monotone=monotone,
        max_potential_rise=worst_rise,
    )


# ---------------------------------------------------------------------------
# text exports

def _fmt(v: float) -> str:
    return f"{v:.12g}"


def write_trajectory(traj: Trajectory, path) -> None:
    """Write a trajectory as headered columns: time, then x, y per agent."""
    n = traj.agent_count
    names = ["time"]
    for a in range(1, n + 1):
        names += [f"x{a}", f"y{a}"]
    with open(path, "w") as fh:
        fh.write(f"# gradient-flow trajectory: {n} agents, "
                 f"terminal reason {traj.terminal_reason}\n")
        fh.write(" ".join(names) + "\n")
        flat = traj.states.reshape(len(traj.times), -1)
        for t, row in zip(traj.times, flat):
            fh.write(" ".join(_fmt(v) for v in [t, *row]) + "\n")


def write_basin(basin: BasinMap, path) -> None:
    """Write a basin map as headered columns: start x, start y, label."""
    with open(path, "w") as fh:
        fh.write("# basin map: follower start position and the equilibrium reached\n")
        fh.write("x y label\n")
        ny, nx = basin.labels.shape
        for iy in range(ny):
            for ix in range(nx):
                lab = basin.labels[iy, ix]
                name = basin.label_names[lab] if lab >= 0 else NON_CONVERGENT
                fh.write(f"{_fmt(basin.xs[ix])} {_fmt(basin.ys[iy])} {name}\n")
