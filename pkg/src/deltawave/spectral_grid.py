"""Chebyshev-Gauss-Lobatto grids and closed-form differentiation matrices."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "SpectralGrid",
    "chebyshev_nodes",
    "first_derivative_matrix",
    "second_derivative_matrix",
]


def _reference_nodes(N: int) -> np.ndarray:
    z = -np.cos(np.arange(N + 1) * np.pi / N)
    # enforce exact endpoints and antisymmetry of the cosine samples
    z = 0.5 * (z - z[::-1])
    z[0], z[-1] = -1.0, 1.0
    return z


def _weights(N: int) -> np.ndarray:
    c = np.ones(N + 1)
    c[0] = c[-1] = 2.0
    return c


def chebyshev_nodes(N: int, a: float, b: float) -> np.ndarray:
    """Return the N+1 Gauss-Lobatto nodes on ``[a, b]`` in increasing order."""
    if int(N) != N or N < 1:
        raise ValueError(f"N must be an integer >= 1, got {N}")
    if not (np.isfinite(a) and np.isfinite(b)) or a >= b:
        raise ValueError(f"need finite a < b, got a={a}, b={b}")
    z = _reference_nodes(int(N))
    x = 0.5 * (a + b) + 0.5 * (b - a) * z
    x[0], x[-1] = a, b
    return x


def _d1_reference(N: int) -> np.ndarray:
    z = _reference_nodes(N)
    c = _weights(N)
    i = np.arange(N + 1)
    sign = np.where((i[:, None] + i[None, :]) % 2 == 0, 1.0, -1.0)
    diff = z[:, None] - z[None, :]
    np.fill_diagonal(diff, 1.0)
    D = sign * c[:, None] / (c[None, :] * diff)
    inner = z[1:-1]
    D[i[1:-1], i[1:-1]] = -inner / (2.0 * (1.0 - inner**2))
    D[0, 0] = -(2.0 * N**2 + 1.0) / 6.0
    D[N, N] = (2.0 * N**2 + 1.0) / 6.0
    return D


def _d2_reference(N: int) -> np.ndarray:
    if N < 2:
        raise ValueError("second derivative matrix needs N >= 2")
    z = _reference_nodes(N)
    c = _weights(N)
    i = np.arange(N + 1)
    sign = np.where((i[:, None] + i[None, :]) % 2 == 0, 1.0, -1.0)
    D = np.empty((N + 1, N + 1))

    zi = z[1:-1, None]
    zj = z[None, :]
    diff = zi - zj
    with np.errstate(divide="ignore", invalid="ignore"):
        rows = sign[1:-1] / c[None, :] * (zi**2 + zi * zj - 2.0) / ((1.0 - zi**2) * diff**2)
    D[1:-1] = rows
    s = 1.0 - z[1:-1] ** 2
    D[i[1:-1], i[1:-1]] = -((N**2 - 1.0) * s + 3.0) / (3.0 * s**2)

    q = 2.0 * N**2 + 1.0
    j = i[1:]
    D[0, 1:] = (2.0 / 3.0) * sign[0, 1:] / c[j] * (q * (1.0 + z[j]) - 6.0) / (1.0 + z[j]) ** 2
    j = i[:-1]
    D[N, :-1] = (2.0 / 3.0) * sign[N, :-1] / c[j] * (q * (1.0 - z[j]) - 6.0) / (1.0 - z[j]) ** 2
    D[0, 0] = D[N, N] = (N**4 - 1.0) / 15.0
    return D


@dataclass(frozen=True)
class SpectralGrid:
    """Gauss-Lobatto nodes on ``[a, b]`` with first and second derivative matrices.

    Parameters
    ----------
    N : int
        Polynomial degree; the grid has ``N + 1`` nodes.
    a, b : float
        Interval endpoints with ``a < b``.
    """

    N: int
    a: float = -1.0
    b: float = 1.0
    nodes: np.ndarray = field(init=False, repr=False)
    D1: np.ndarray = field(init=False, repr=False)
    D2: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        nodes = chebyshev_nodes(self.N, self.a, self.b)
        scale = 2.0 / (self.b - self.a)
        D1 = scale * _d1_reference(self.N)
        D2 = scale**2 * _d2_reference(self.N) if self.N >= 2 else D1 @ D1
        for arr in (nodes, D1, D2):
            arr.setflags(write=False)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "D1", D1)
        object.__setattr__(self, "D2", D2)

    @property
    def size(self) -> int:
        return self.N + 1

    def as_dict(self) -> dict:
        return {"N": self.N, "a": self.a, "b": self.b}


def first_derivative_matrix(grid: SpectralGrid) -> np.ndarray:
    return grid.D1


def second_derivative_matrix(grid: SpectralGrid) -> np.ndarray:
    if grid.N < 2:
        raise ValueError("second derivative matrix needs N >= 2")
    return grid.D2
