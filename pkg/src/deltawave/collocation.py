"""Jump-corrected interpolation and differentiation on a spectral grid.

A function that is smooth on either side of a single point ``xi`` but
jumps there (in value and derivatives) is represented by its node values
together with the prescribed jumps ``J[m] = f^(m)(xi+) - f^(m)(xi-)``.
The jump data are folded into a per-node weight ``kappa`` (the jump
Taylor polynomial about ``xi``), and derivatives are corrected by
``D f + (D kappa) * theta - D (kappa * theta)`` with ``theta`` the
Heaviside step of the node offsets.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .spectral_grid import SpectralGrid

__all__ = [
    "SpatialJumps",
    "heaviside",
    "kappa",
    "delta_correction",
    "interpolate",
    "disc_derivative",
    "derivative_correction",
    "correction_from_kappa",
    "NODE_TOL",
]

NODE_TOL = 1e-13


def heaviside(x):
    """Step function with the half-maximum convention at zero."""
    x = np.asarray(x, dtype=float)
    return np.where(x > 0, 1.0, np.where(x < 0, 0.0, 0.5))


@dataclass(frozen=True)
class SpatialJumps:
    """Derivative jumps ``J[0..M]`` of a function at ``xi`` (right minus left)."""

    xi: float
    J: np.ndarray

    def __post_init__(self):
        J = np.atleast_1d(np.asarray(self.J, dtype=float))
        if J.ndim != 1:
            raise ValueError("J must be one-dimensional")
        object.__setattr__(self, "J", J)

    @property
    def M(self) -> int:
        return self.J.size - 1

    @classmethod
    def none(cls, xi: float = 0.0) -> "SpatialJumps":
        return cls(xi, np.zeros(0))


def kappa(J, delta_xi):
    """Jump Taylor polynomial ``sum_m J[m] d**m / m!`` in nested (Horner) form.

    ``J`` may carry trailing batch axes after the order axis; they broadcast
    against ``delta_xi``.
    """
    J = np.asarray(J, dtype=float)
    d = np.asarray(delta_xi, dtype=float)
    if J.shape[0] == 0:
        return np.zeros(np.broadcast_shapes(d.shape, J.shape[1:]))
    M = J.shape[0] - 1
    acc = J[M] + 0.0 * d
    for m in range(M, 0, -1):
        acc = J[m - 1] + acc * d / m
    return acc


def delta_correction(x_j, x_i, xi, kappa_j):
    """Two-point correction ``[theta(x_i - xi) - theta(x_j - xi)] * kappa_j``."""
    return (heaviside(np.asarray(x_i) - xi) - heaviside(np.asarray(x_j) - xi)) * kappa_j


def _check_location(grid: SpectralGrid, xi: float):
    if not (grid.a < xi < grid.b):
        raise ValueError(f"discontinuity at {xi} is outside ({grid.a}, {grid.b})")
    gap = np.min(np.abs(grid.nodes - xi))
    if gap <= NODE_TOL * (grid.b - grid.a):
        raise ValueError(f"discontinuity at {xi} coincides with a grid node")


def _barycentric_weights(N: int) -> np.ndarray:
    w = (-1.0) ** np.arange(N + 1)
    w[0] *= 0.5
    w[-1] *= 0.5
    return w


def interpolate(values, grid: SpectralGrid, jumps: SpatialJumps | None, x):
    """Evaluate the piecewise interpolant at ``x`` (scalar or array).

    With no jumps (or ``M = -1``) this is ordinary polynomial interpolation.
    """
    f = np.asarray(values, dtype=float)
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    span = grid.b - grid.a
    if np.any(xs < grid.a - 1e-14 * span) or np.any(xs > grid.b + 1e-14 * span):
        raise ValueError("query point outside the grid interval")
    nodes = grid.nodes
    if jumps is not None and jumps.M >= 0:
        _check_location(grid, jumps.xi)
        k = kappa(jumps.J, nodes - jumps.xi)
        theta_j = heaviside(nodes - jumps.xi)
    else:
        k = np.zeros_like(nodes)
        theta_j = np.zeros_like(nodes)

    w = _barycentric_weights(grid.N)
    out = np.empty_like(xs)
    for q, xq in enumerate(xs):
        theta_x = heaviside(xq - jumps.xi) if jumps is not None and jumps.M >= 0 else 0.0
        data = f + k * (theta_x - theta_j)
        hit = np.nonzero(xq == nodes)[0]
        if hit.size:
            out[q] = f[hit[0]]
            continue
        t = w / (xq - nodes)
        out[q] = np.dot(t, data) / np.sum(t)
    return out if np.ndim(x) else out[0]


def correction_from_kappa(D: np.ndarray, k: np.ndarray, theta: np.ndarray) -> np.ndarray:
    """``(D k) * theta - D (k * theta)`` for precomputed node weights ``k``."""
    return (D @ k) * theta - D @ (k * theta)


def derivative_correction(grid: SpectralGrid, xi: float, J, n: int):
    """Correction ``(Dn kappa) * theta - Dn (kappa * theta)`` added to ``Dn f``.

    ``J`` may have trailing batch axes, in which case a correction is
    returned for each batch entry (node axis first).
    """
    if n not in (1, 2):
        raise ValueError(f"derivative order must be 1 or 2, got {n}")
    J = np.asarray(J, dtype=float)
    nodes = grid.nodes
    if J.shape[0] == 0:
        return np.zeros((nodes.size,) + J.shape[1:])
    _check_location(grid, xi)
    D = grid.D1 if n == 1 else grid.D2
    d = (nodes - xi).reshape((-1,) + (1,) * (J.ndim - 1))
    k = kappa(J[:, None, ...], d)
    return correction_from_kappa(D, k, heaviside(d))


def disc_derivative(values, grid: SpectralGrid, jumps: SpatialJumps | None, n: int = 1):
    """Jump-corrected n-th derivative (n = 1 or 2) at the nodes."""
    if n not in (1, 2):
        raise ValueError(f"derivative order must be 1 or 2, got {n}")
    f = np.asarray(values, dtype=float)
    D = grid.D1 if n == 1 else grid.D2
    out = D @ f
    if jumps is not None and jumps.M >= 0:
        out = out + derivative_correction(grid, jumps.xi, jumps.J, n)
    return out
