"""Central finite-difference oracles used to cross-check analytic derivatives."""

from __future__ import annotations

from typing import Callable

import numpy as np

__all__ = ["fd_gradient", "fd_hessian"]


def _default_step(x: np.ndarray, scale: float) -> float:
    return scale * max(1.0, float(np.linalg.norm(x)))


def fd_gradient(f: Callable[[np.ndarray], float], x, step: float | None = None) -> np.ndarray:
    """Gradient of a scalar function by second-order central differences.

    The default step is 1e-6 scaled by max(1, |x|), a good compromise
    between truncation and roundoff for smooth polynomial-like functions.
    """
    x = np.asarray(x, dtype=float)
    h = _default_step(x, 1e-6) if step is None else float(step)
    g = np.empty(x.size)
    flat = x.ravel()
    for a in range(flat.size):
        e = np.zeros_like(flat)
        e[a] = h
        g[a] = (f((flat + e).reshape(x.shape)) - f((flat - e).reshape(x.shape))) / (2.0 * h)
    return g.reshape(x.shape)


def fd_hessian(f: Callable[[np.ndarray], float], x, step: float | None = None) -> np.ndarray:
    """Hessian of a scalar function from function values only.

    Diagonal entries use the three-point second-difference formula, off
    diagonals the four-point cross formula.  Independent of any analytic
    gradient, so it can serve as an oracle for both.
    """
    x = np.asarray(x, dtype=float)
    h = _default_step(x, 1e-4) if step is None else float(step)
    n = x.size
    flat = x.ravel()
    H = np.empty((n, n))
    fx = f(x)

    def at(delta):
        return f((flat + delta).reshape(x.shape))

    for a in range(n):
        ea = np.zeros(n)
        ea[a] = h
        H[a, a] = (at(ea) - 2.0 * fx + at(-ea)) / (h * h)
        for b in range(a + 1, n):
            eb = np.zeros(n)
            eb[b] = h
            H[a, b] = H[b, a] = (at(ea + eb) - at(ea - eb) - at(-ea + eb) + at(-ea - eb)) / (4.0 * h * h)
    return H
