"""Pair and triangle potentials with closed-form follower derivatives.

Distance errors enter through squared-norm mismatches (quartic overall), and
orientation enters through a quadratic penalty on the signed area of each
triangle.  The area term is what distinguishes a target triangle from its
mirror image: a pure distance potential has a second, reflected minimum,
while the augmented potential does not once the gain is large enough.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import heron_area, signed_area, triangle_inequality_ok

__all__ = [
    "HERON_REL_TOL",
    "PairTerm",
    "TriangleTerm",
    "CanonicalTriangleParams",
    "pair_potential",
    "pair_grad",
    "triangle_potential",
    "triangle_grad",
    "triangle_hessian",
    "agent_control",
    "canonical_potential",
    "canonical_grad",
    "canonical_hessian",
]

# Relative agreement required between |desired signed area| and the area
# implied by the three desired distances.
HERON_REL_TOL = 1e-9


@dataclass(frozen=True)
class PairTerm:
    """Distance-keeping potential between anchor agent i and owner agent j.

    Only the owner j moves under this term; the value is
    ((|p_j - p_i|^2 - d_star^2)^2) / 4.
    """

    i: int
    j: int
    d_star: float

    def __post_init__(self):
        if self.i == self.j:
            raise ValueError("pair term needs two distinct agents")
        if not (np.isfinite(self.d_star) and self.d_star > 0.0):
            raise ValueError("desired distance must be positive and finite")


@dataclass(frozen=True)
class TriangleTerm:
    """Triangle potential owned by follower k against leaders i and j.

    Three quartic distance terms plus the signed-area penalty
    gain / 2 * (Z(p_i, p_j, p_k) - z_star)^2.  The desired distances must
    form a nondegenerate triangle whose area matches |z_star|; a mismatch
    means the term has an empty zero set and is rejected outright.
    """

    i: int
    j: int
    k: int
    d_ij: float
    d_jk: float
    d_ki: float
    z_star: float
    gain: float

    def __post_init__(self):
        if len({self.i, self.j, self.k}) != 3:
            raise ValueError("triangle term needs three distinct agents")
        for d in (self.d_ij, self.d_jk, self.d_ki):
            if not (np.isfinite(d) and d > 0.0):
                raise ValueError("desired distances must be positive and finite")
        if not (np.isfinite(self.gain) and self.gain > 0.0):
            raise ValueError("area gain must be positive and finite")
        if not np.isfinite(self.z_star):
            raise ValueError("desired signed area must be finite")
        if not triangle_inequality_ok(self.d_ij, self.d_jk, self.d_ki):
            raise ValueError("desired distances violate the triangle inequality")
        area = heron_area(self.d_ij, self.d_jk, self.d_ki)
        if abs(abs(self.z_star) - area) > HERON_REL_TOL * max(area, 1.0):
            raise ValueError(
                f"desired signed area {self.z_star} inconsistent with the "
                f"area {area} implied by the desired distances"
            )


# ---------------------------------------------------------------------------
# pair potential

def pair_potential(p_i, p_j, d_star):
    """Value of the distance-keeping potential.  Broadcasts over (..., 2)."""
    p_i = np.asarray(p_i, dtype=float)
    p_j = np.asarray(p_j, dtype=float)
    dx = p_j[..., 0] - p_i[..., 0]
    dy = p_j[..., 1] - p_i[..., 1]
    e = dx * dx + dy * dy - np.asarray(d_star, dtype=float) ** 2
    out = 0.25 * e * e
    return float(out) if np.ndim(out) == 0 else out


def pair_grad(p_i, p_j, d_star):
    """Gradient of pair_potential with respect to the owner position p_j."""
    p_i = np.asarray(p_i, dtype=float)
    p_j = np.asarray(p_j, dtype=float)
    dx = p_j[..., 0] - p_i[..., 0]
    dy = p_j[..., 1] - p_i[..., 1]
    e = dx * dx + dy * dy - np.asarray(d_star, dtype=float) ** 2
    return np.stack([e * dx, e * dy], axis=-1)


# ---------------------------------------------------------------------------
# triangle potential
#
# The low-level routines take raw parameter arrays so the simulator can
# evaluate many terms at once; the public wrappers unpack a TriangleTerm.
# Both paths share the same elementwise arithmetic, so a stacked evaluation
# is bit-identical to term-by-term calls.

def _tri_value(pi, pj, pk, d_ij2, d_jk2, d_ki2, z_star, gain):
    bx = pj[..., 0] - pi[..., 0]
    by = pj[..., 1] - pi[..., 1]
    e_ij = bx * bx + by * by - d_ij2
    jx = pk[..., 0] - pj[..., 0]
    jy = pk[..., 1] - pj[..., 1]
    e_jk = jx * jx + jy * jy - d_jk2
    ix = pk[..., 0] - pi[..., 0]
    iy = pk[..., 1] - pi[..., 1]
    e_ki = ix * ix + iy * iy - d_ki2
    z = 0.5 * (bx * (pk[..., 1] - pi[..., 1]) - by * (pk[..., 0] - pi[..., 0]))
    dz = z - z_star
    return 0.25 * (e_ij * e_ij + e_jk * e_jk + e_ki * e_ki) + 0.5 * gain * dz * dz


def _tri_grad(pi, pj, pk, d_jk2, d_ki2, z_star, gain):
    jx = pk[..., 0] - pj[..., 0]
    jy = pk[..., 1] - pj[..., 1]
    e_jk = jx * jx + jy * jy - d_jk2
    ix = pk[..., 0] - pi[..., 0]
    iy = pk[..., 1] - pi[..., 1]
    e_ki = ix * ix + iy * iy - d_ki2
    z = signed_area(pi, pj, pk)
    w = 0.5 * gain * (z - z_star)
    # quarter-turn of (p_i - p_j): the direction along which the signed area
    # grows with the follower position
    ux = pi[..., 1] - pj[..., 1]
    uy = pj[..., 0] - pi[..., 0]
    return np.stack([e_jk * jx + e_ki * ix + w * ux, e_jk * jy + e_ki * iy + w * uy], axis=-1)


def _tri_hess(pi, pj, pk, d_jk2, d_ki2, gain):
    jx = pk[..., 0] - pj[..., 0]
    jy = pk[..., 1] - pj[..., 1]
    e_jk = jx * jx + jy * jy - d_jk2
    ix = pk[..., 0] - pi[..., 0]
    iy = pk[..., 1] - pi[..., 1]
    e_ki = ix * ix + iy * iy - d_ki2
    ux = pi[..., 1] - pj[..., 1]
    uy = pj[..., 0] - pi[..., 0]
    # area Jacobian is constant in the follower, so its second derivative
    # contributes the rank-one block gain * (u/2)(u/2)^T only
    h11 = e_jk + e_ki + 2.0 * (jx * jx + ix * ix) + 0.25 * gain * ux * ux
    h12 = 2.0 * (jx * jy + ix * iy) + 0.25 * gain * ux * uy
    h22 = e_jk + e_ki + 2.0 * (jy * jy + iy * iy) + 0.25 * gain * uy * uy
    return np.stack(
        [np.stack([h11, h12], axis=-1), np.stack([h12, h22], axis=-1)], axis=-2
    )


def triangle_potential(p_i, p_j, p_k, term: TriangleTerm):
    """Value of the triangle potential.  Broadcasts over (..., 2) inputs."""
    p_i = np.asarray(p_i, dtype=float)
    p_j = np.asarray(p_j, dtype=float)
    p_k = np.asarray(p_k, dtype=float)
    out = _tri_value(
        p_i, p_j, p_k,
        term.d_ij ** 2, term.d_jk ** 2, term.d_ki ** 2,
        term.z_star, term.gain,
    )
    return float(out) if np.ndim(out) == 0 else out


def triangle_grad(p_i, p_j, p_k, term: TriangleTerm):
    """Gradient of the triangle potential with respect to the follower p_k.

    The two distance errors pull the follower along (p_k - p_j) and
    (p_k - p_i); the area error pushes it along the quarter-turn of the
    leader baseline (p_i - p_j).
    """
    p_i = np.asarray(p_i, dtype=float)
    p_j = np.asarray(p_j, dtype=float)
    p_k = np.asarray(p_k, dtype=float)
    return _tri_grad(p_i, p_j, p_k, term.d_jk ** 2, term.d_ki ** 2, term.z_star, term.gain)


def triangle_hessian(p_i, p_j, p_k, term: TriangleTerm):
    """Hessian of the triangle potential with respect to the follower p_k."""
    p_i = np.asarray(p_i, dtype=float)
    p_j = np.asarray(p_j, dtype=float)
    p_k = np.asarray(p_k, dtype=float)
    return _tri_hess(p_i, p_j, p_k, term.d_jk ** 2, term.d_ki ** 2, term.gain)


def agent_control(agent: int, state, assignment) -> np.ndarray:
    """Velocity command for one agent: minus the gradient of its owned terms.

    Agents own the terms assigned to them by the layer extraction; an agent
    with no terms (the root of the hierarchy) is stationary.  The command
    never reads positions of agents in layers above the owner, which is what
    keeps the hierarchy triangular.
    """
    state = np.asarray(state, dtype=float)
    u = np.zeros(2)
    for term in assignment.terms_of.get(agent, ()):
        if isinstance(term, PairTerm):
            u -= pair_grad(state[term.i - 1], state[term.j - 1], term.d_star)
        else:
            u -= triangle_grad(
                state[term.i - 1], state[term.j - 1], state[term.k - 1], term
            )
    return u


# ---------------------------------------------------------------------------
# canonical frame
#
# Leaders pinned at (-c, 0) and (c, 0), follower desired at (a, b) with
# b > 0.  In this frame the follower gradient collapses to two short
# component expressions, which is what the equilibrium analysis and the
# basin sampler run on.

@dataclass(frozen=True)
class CanonicalTriangleParams:
    """Pinned-leader triangle problem in normal coordinates.

    a is the horizontal offset of the desired follower position (zero for
    an isosceles target), b its height, c the leader half-separation, and
    gain the weight on the signed-area penalty.
    """

    a: float
    b: float
    c: float
    gain: float

    def __post_init__(self):
        for name in ("a", "b", "c", "gain"):
            if not np.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if self.b <= 0.0:
            raise ValueError("target height b must be positive")
        if self.c <= 0.0:
            raise ValueError("leader half-separation c must be positive")
        if self.gain <= 0.0:
            raise ValueError("area gain must be positive")

    @property
    def d_ij(self) -> float:
        return 2.0 * self.c

    @property
    def d_jk(self) -> float:
        return float(np.hypot(self.a - self.c, self.b))

    @property
    def d_ki(self) -> float:
        return float(np.hypot(self.a + self.c, self.b))

    @property
    def z_star(self) -> float:
        return self.b * self.c

    def leaders(self) -> tuple[np.ndarray, np.ndarray]:
        return np.array([-self.c, 0.0]), np.array([self.c, 0.0])

    def term(self, i: int = 1, j: int = 2, k: int = 3) -> TriangleTerm:
        return TriangleTerm(
            i=i, j=j, k=k,
            d_ij=self.d_ij, d_jk=self.d_jk, d_ki=self.d_ki,
            z_star=self.z_star, gain=self.gain,
        )

    def length_scale(self) -> float:
        return max(1.0, abs(self.a), self.b, self.c)


def canonical_potential(params: CanonicalTriangleParams, pts):
    """Triangle potential in the canonical frame, as a function of the follower."""
    p = np.asarray(pts, dtype=float)
    x = p[..., 0]
    y = p[..., 1]
    e_ki = (x + params.c) ** 2 + y * y - params.d_ki ** 2
    e_jk = (x - params.c) ** 2 + y * y - params.d_jk ** 2
    dz = params.c * y - params.z_star
    # the leader baseline sits exactly at its desired length, so its term
    # vanishes identically
    out = 0.25 * (e_ki * e_ki + e_jk * e_jk) + 0.5 * params.gain * dz * dz
    return float(out) if np.ndim(out) == 0 else out


def canonical_grad(params: CanonicalTriangleParams, pts):
    """Follower gradient in the canonical frame.  Broadcasts over (..., 2)."""
    p = np.asarray(pts, dtype=float)
    x = p[..., 0]
    y = p[..., 1]
    s = x * x + y * y - (params.a ** 2 + params.b ** 2)
    c2 = params.c ** 2
    gx = 2.0 * x * s + 4.0 * c2 * (x - params.a)
    gy = 2.0 * y * s + params.gain * c2 * (y - params.b)
    return np.stack([gx, gy], axis=-1)


def canonical_hessian(params: CanonicalTriangleParams, pts):
    """Follower Hessian in the canonical frame, shape (..., 2, 2)."""
    p = np.asarray(pts, dtype=float)
    x = p[..., 0]
    y = p[..., 1]
    r2 = params.a ** 2 + params.b ** 2
    c2 = params.c ** 2
    h11 = 6.0 * x * x + 2.0 * y * y - 2.0 * r2 + 4.0 * c2
    h12 = 4.0 * x * y
    h22 = 2.0 * x * x + 6.0 * y * y - 2.0 * r2 + params.gain * c2
    return np.stack(
        [np.stack([h11, h12], axis=-1), np.stack([h12, h22], axis=-1)], axis=-2
    )
