"""Equilibrium enumeration and stability classification for the pinned-leader
follower problem.

With both leaders fixed, the follower flows down a quartic potential whose
critical points have closed forms when the target is isosceles (a = 0) and
in the infinite-gain limit for a general target.  Away from those regimes a
damped Newton search on the gradient provides numeric equilibria.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .potentials import CanonicalTriangleParams, canonical_grad, canonical_hessian

__all__ = [
    "STABLE",
    "UNSTABLE",
    "SADDLE",
    "DEGENERATE",
    "EquilibriumRecord",
    "classify_hessian",
    "k_star",
    "k_zero",
    "enumerate_isosceles",
    "CaseReport",
    "case_table",
    "enumerate_general_large_k",
    "RefineResult",
    "refine_numeric",
]

STABLE = "stable"
UNSTABLE = "unstable"
SADDLE = "saddle"
DEGENERATE = "degenerate"

# any eigenvalue within this relative band around zero makes the verdict
# Degenerate rather than a sign call
EIG_REL_TOL = 1e-9


@dataclass(frozen=True)
class EquilibriumRecord:
    """One critical point of the follower potential.

    hessian and eigenvalues are None for records produced by an asymptotic
    (infinite-gain) analysis, where the Hessian has no finite limit; the
    classification is then taken from the limit signs instead.
    """

    position: np.ndarray
    hessian: np.ndarray | None
    eigenvalues: np.ndarray | None
    classification: str
    label: str

    def __str__(self):
        x, y = self.position
        return f"{self.label} [{x:.12g}, {y:.12g}] {self.classification}"


def classify_hessian(hessian, rel_tol: float = EIG_REL_TOL) -> tuple[str, np.ndarray]:
    """Stability verdict from Hessian eigenvalues.

    Both positive: stable.  Both negative: unstable.  Mixed signs: saddle.
    Any eigenvalue within rel_tol of zero (relative to the spectral radius)
    makes the verdict degenerate, since the sign is then not trustworthy.
    """
    H = np.asarray(hessian, dtype=float)
    eig = np.linalg.eigvalsh(H)
    tol = rel_tol * max(np.abs(eig).max(), 1e-300)
    if np.any(np.abs(eig) <= tol):
        cls = DEGENERATE
    elif np.all(eig > 0.0):
        cls = STABLE
    elif np.all(eig < 0.0):
        cls = UNSTABLE
    else:
        cls = SADDLE
    return cls, eig


def _record(params: CanonicalTriangleParams, x: float, y: float, label: str) -> EquilibriumRecord:
    pos = np.array([x, y])
    H = canonical_hessian(params, pos)
    cls, eig = classify_hessian(H)
    return EquilibriumRecord(position=pos, hessian=H, eigenvalues=eig,
                             classification=cls, label=label)


def k_star(b: float, c: float) -> float:
    """Gain threshold above which the isosceles follower flow is globally
    convergent: b^2 / (2 c^2).

    Below it a second stable point (a reflected, distance-correct copy)
    exists; above it the desired point is the only attractor.
    """
    b = float(b)
    c = float(c)
    if not (np.isfinite(b) and b > 0.0 and np.isfinite(c) and c > 0.0):
        raise ValueError("b and c must be positive and finite")
    return b * b / (2.0 * c * c)


def k_zero(b: float, c: float) -> float | None:
    """Secondary gain threshold 2 h sqrt(h^2 - 2) - 2 (h^2 - 2), h = b / c.

    Marks where the on-axis mirror point changes character and bounds the
    gain range in which the off-axis saddle pair exists.  Undefined (None)
    when h^2 < 2, where no off-axis equilibria occur at any gain.
    """
    b = float(b)
    c = float(c)
    if not (np.isfinite(b) and b > 0.0 and np.isfinite(c) and c > 0.0):
        raise ValueError("b and c must be positive and finite")
    h2 = (b / c) ** 2
    if h2 < 2.0:
        return None
    return 2.0 * (b / c) * np.sqrt(h2 - 2.0) - 2.0 * (h2 - 2.0)


def enumerate_isosceles(params: CanonicalTriangleParams) -> list[EquilibriumRecord]:
    """All equilibria of the isosceles (a = 0) follower flow, in closed form.

    Pa = [0, b] always exists and is always stable.  For gain below the
    global-convergence threshold two further on-axis points appear at
    y = (-b +/- sqrt(b^2 - 2 K c^2)) / 2 (labels Pb, Pc; a single
    degenerate double root exactly at the threshold).  For gain below
    min(k_zero, 4) an off-axis pair Pd, Pe completes the list.  Each record
    carries the exact Hessian and its eigenvalue classification.
    """
    if params.a != 0.0:
        raise ValueError("closed-form enumeration needs an isosceles target (a = 0)")
    b, c, K = params.b, params.c, params.gain
    recs = [_record(params, 0.0, b, "Pa")]

    disc = b * b - 2.0 * K * c * c
    if disc > 0.0:
        root = np.sqrt(disc)
        recs.append(_record(params, 0.0, (-b + root) / 2.0, "Pb"))
        recs.append(_record(params, 0.0, (-b - root) / 2.0, "Pc"))
    elif disc == 0.0:
        # double root at the threshold gain; the Hessian is singular there
        recs.append(_record(params, 0.0, -b / 2.0, "Pb"))

    if K < 4.0:
        kz = k_zero(b, c)
        if kz is not None and K <= kz:
            y = K * b / (K - 4.0)
            x2 = b * b - 2.0 * c * c - y * y
            # x2 = 0 exactly at K = k_zero would duplicate the on-axis root
            if x2 > 0.0:
                x = np.sqrt(x2)
                recs.append(_record(params, x, y, "Pd"))
                recs.append(_record(params, -x, y, "Pe"))
    return recs


@dataclass(frozen=True)
class CaseReport:
    """Threshold values, equilibrium list, and convergence verdicts for one
    isosceles parameter point."""

    params: CanonicalTriangleParams
    k_star: float
    k_zero: float | None
    equilibria: tuple[EquilibriumRecord, ...]
    globally_convergent: bool
    almost_globally_convergent: bool


def case_table(params: CanonicalTriangleParams) -> CaseReport:
    """Full analytic report for an isosceles parameter point.

    Global convergence holds exactly when the gain exceeds k_star.  The
    flow is almost globally convergent when no equilibrium other than the
    desired point is stable, so at most a measure-zero set of starts is
    captured elsewhere.
    """
    recs = enumerate_isosceles(params)
    ks = k_star(params.b, params.c)
    kz = k_zero(params.b, params.c)
    almost = all(r.label == "Pa" or r.classification != STABLE for r in recs)
    return CaseReport(
        params=params,
        k_star=ks,
        k_zero=kz,
        equilibria=tuple(recs),
        globally_convergent=bool(params.gain > ks),
        almost_globally_convergent=bool(almost),
    )


def enumerate_general_large_k(a: float, b: float, c: float) -> list[EquilibriumRecord]:
    """Equilibria of the general-target follower flow in the infinite-gain
    limit, where every equilibrium is pinned to the line y = b.

    The horizontal coordinates solve (x - a)(x^2 + a x + 2 c^2) = 0.  The
    desired point [a, b] is always stable.  When a^2 > 8 c^2 the quadratic
    factor contributes two more points, exactly one of which is stable:
    the one at x = (-a + sqrt(a^2 - 8 c^2)) / 2 for a < 0, the one at
    x = (-a - sqrt(...)) / 2 for a > 0.  So a distance-and-area correct
    but misplaced attractor survives arbitrarily large gains whenever
    |a| / c exceeds sqrt(8).  At a^2 = 8 c^2 the pair merges into one
    degenerate double root.  Records carry no Hessian: it grows without
    bound with the gain, so only the limiting sign pattern is meaningful.
    """
    a = float(a)
    b = float(b)
    c = float(c)
    if not (np.isfinite(a) and np.isfinite(b) and b > 0.0 and np.isfinite(c) and c > 0.0):
        raise ValueError("need finite a and positive b, c")

    def rec(x, cls, label):
        return EquilibriumRecord(position=np.array([x, b]), hessian=None,
                                 eigenvalues=None, classification=cls, label=label)

    recs = [rec(a, STABLE, "Pa")]
    disc = a * a - 8.0 * c * c
    if disc > 0.0:
        root = np.sqrt(disc)
        xb = (-a + root) / 2.0
        xc = (-a - root) / 2.0
        recs.append(rec(xb, STABLE if a < 0.0 else SADDLE, "Pb"))
        recs.append(rec(xc, STABLE if a > 0.0 else SADDLE, "Pc"))
    elif disc == 0.0:
        recs.append(rec(-a / 2.0, DEGENERATE, "Pb"))
    return recs


@dataclass(frozen=True)
class RefineResult:
    """Outcome of a Newton search: deduplicated roots plus the seeds that
    failed to converge (recorded, never raised)."""

    records: tuple[EquilibriumRecord, ...]
    failed_seeds: np.ndarray


def refine_numeric(
    params: CanonicalTriangleParams,
    seeds,
    max_iter: int = 200,
    max_halvings: int = 50,
) -> RefineResult:
    """Damped Newton search for follower equilibria from many seeds at once.

    Works for any target offset a, which makes it the equilibrium finder of
    record away from the two closed-form regimes.  Each seed takes full
    Newton steps on the gradient, halving the step until the gradient norm
    decreases.  Converged endpoints (gradient norm below 1e-12 at the
    problem's length-scale cubed) are sorted lexicographically and merged
    within a 1e-8 length-scale radius; each surviving root is classified
    through its exact Hessian.
    """
    pts = np.atleast_2d(np.asarray(seeds, dtype=float)).copy()
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise ValueError("seeds must have shape (m, 2)")
    L = params.length_scale()
    gtol = 1e-12 * L ** 3
    ptol = 1e-8 * L

    g = canonical_grad(params, pts)
    gn = np.hypot(g[:, 0], g[:, 1])
    active = gn >= gtol
    for _ in range(max_iter):
        if not active.any():
            break
        idx = np.flatnonzero(active)
        p = pts[idx]
        ga = g[idx]
        H = canonical_hessian(params, p)
        h11, h12, h22 = H[:, 0, 0], H[:, 0, 1], H[:, 1, 1]
        det = h11 * h22 - h12 * h12
        with np.errstate(divide="ignore", invalid="ignore"):
            dx = (h22 * ga[:, 0] - h12 * ga[:, 1]) / det
            dy = (h11 * ga[:, 1] - h12 * ga[:, 0]) / det
        step = np.stack([dx, dy], axis=-1)
        bad = ~np.all(np.isfinite(step), axis=1)
        if bad.any():
            # singular Hessian: fall back to a plain descent direction
            step[bad] = ga[bad]

        t = np.ones(len(idx))
        gn_old = gn[idx]
        trial = p - step
        gt = canonical_grad(params, trial)
        tn = np.hypot(gt[:, 0], gt[:, 1])
        for _ in range(max_halvings):
            worse = ~(tn < gn_old)
            if not worse.any():
                break
            t[worse] *= 0.5
            trial[worse] = p[worse] - t[worse, None] * step[worse]
            gt[worse] = canonical_grad(params, trial[worse])
            tn[worse] = np.hypot(gt[worse, 0], gt[worse, 1])

        pts[idx] = trial
        g[idx] = gt
        gn[idx] = tn
        active[idx] = tn >= gtol

    converged = gn < gtol
    roots = pts[converged]
    order = np.lexsort((roots[:, 1], roots[:, 0]))
    reps: list[np.ndarray] = []
    for p in roots[order]:
        if all(np.hypot(*(p - r)) >= ptol for r in reps):
            reps.append(p)
    records = []
    for p in reps:
        H = canonical_hessian(params, p)
        cls, eig = classify_hessian(H)
        records.append(EquilibriumRecord(position=p, hessian=H, eigenvalues=eig,
                                         classification=cls, label="numeric"))
    return RefineResult(records=tuple(records), failed_seeds=pts[~converged])
