"""Planar geometry primitives shared by the formation modules."""

from __future__ import annotations

import numpy as np

__all__ = [
    "as_point",
    "as_state",
    "signed_area",
    "heron_area",
    "triangle_inequality_ok",
    "rotation_matrix",
]


def as_point(p) -> np.ndarray:
    """Coerce to a finite float vector of shape (2,)."""
    q = np.asarray(p, dtype=float)
    if q.shape != (2,):
        raise ValueError(f"expected a 2-vector, got shape {q.shape}")
    if not np.all(np.isfinite(q)):
        raise ValueError("position coordinates must be finite")
    return q


def as_state(points, agent_count: int | None = None) -> np.ndarray:
    """Coerce to a finite float array of agent positions, shape (n, 2).

    Row r holds the position of agent r + 1; agent indices are 1-based
    throughout the public API.
    """
    q = np.asarray(points, dtype=float)
    if q.ndim != 2 or q.shape[1] != 2:
        raise ValueError(f"expected an (n, 2) position array, got shape {q.shape}")
    if agent_count is not None and q.shape[0] != agent_count:
        raise ValueError(f"expected {agent_count} positions, got {q.shape[0]}")
    if not np.all(np.isfinite(q)):
        raise ValueError("positions must be finite")
    return q


def signed_area(p_i, p_j, p_k):
    """Signed area of the triangle (p_i, p_j, p_k).

    Half the cross product of (p_j - p_i) and (p_k - p_i): positive when
    the vertices wind counterclockwise, negative when clockwise, zero when
    collinear.  Its magnitude is the ordinary triangle area.  Inputs may be
    single points of shape (2,) or stacks of shape (..., 2); the result
    broadcasts over the leading axes.
    """
    p_i = np.asarray(p_i, dtype=float)
    p_j = np.asarray(p_j, dtype=float)
    p_k = np.asarray(p_k, dtype=float)
    out = 0.5 * (
        (p_j[..., 0] - p_i[..., 0]) * (p_k[..., 1] - p_i[..., 1])
        - (p_k[..., 0] - p_i[..., 0]) * (p_j[..., 1] - p_i[..., 1])
    )
    return float(out) if out.ndim == 0 else out


def triangle_inequality_ok(d1: float, d2: float, d3: float) -> bool:
    """True when the three lengths form a nondegenerate triangle (strict)."""
    a, b, c = sorted((float(d1), float(d2), float(d3)))
    return a > 0.0 and a + b > c


def heron_area(d1: float, d2: float, d3: float) -> float:
    """Area of the triangle with side lengths d1, d2, d3.

    Uses the numerically stable rearrangement of Heron's formula (operands
    ordered so the small factors are formed by subtraction of nearby
    quantities), which stays accurate for thin triangles.
    """
    a, b, c = sorted((float(d1), float(d2), float(d3)), reverse=True)
    if c <= 0.0 or c - (a - b) < 0.0:
        raise ValueError("side lengths do not satisfy the triangle inequality")
    s = (a + (b + c)) * (c - (a - b)) * (c + (a - b)) * (a + (b - c))
    return 0.25 * np.sqrt(s)


def rotation_matrix(theta: float) -> np.ndarray:
    """Counterclockwise rotation by theta radians."""
    ct, st = np.cos(theta), np.sin(theta)
    return np.array([[ct, -st], [st, ct]])
