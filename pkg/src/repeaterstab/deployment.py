"""Repeater geometries in the plane and their pairwise distances."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np

from .errors import DegenerateDeploymentError, InvalidInputError, StructureError

__all__ = [
    "Deployment",
    "make_pair",
    "make_ring",
    "make_ring_even",
    "make_grid",
    "make_multicell",
    "make_custom",
    "distance_matrix",
]

KINDS = ("pair", "ring", "grid", "multicell", "custom")


@dataclass(frozen=True, eq=False)
class Deployment:
    """Repeater positions (meters) plus the source location.

    Attributes
    ----------
    positions : ndarray, shape (N, 2)
    source : ndarray, shape (2,)
    kind : str
        One of ``pair``, ``ring``, ``grid``, ``multicell``, ``custom``.
    kind_params : dict
        Constructor parameters, e.g. ``{"N": 15, "R": 1000.0}`` for a ring.
    """

    positions: np.ndarray
    source: np.ndarray
    kind: str = "custom"
    kind_params: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        pos = np.array(self.positions, dtype=float).reshape(-1, 2) if np.size(self.positions) else None
        if pos is None or pos.shape[0] < 1:
            raise InvalidInputError("a deployment needs at least one repeater")
        src = np.array(self.source, dtype=float).reshape(2)
        if not (np.all(np.isfinite(pos)) and np.all(np.isfinite(src))):
            raise InvalidInputError("coordinates must be finite")
        if self.kind not in KINDS:
            raise InvalidInputError(f"unknown deployment kind {self.kind!r}")
        pos.setflags(write=False)
        src.setflags(write=False)
        object.__setattr__(self, "positions", pos)
        object.__setattr__(self, "source", src)
        object.__setattr__(self, "kind_params", dict(self.kind_params))

    @property
    def n(self) -> int:
        return self.positions.shape[0]

    @property
    def is_odd_ring(self) -> bool:
        return self.kind == "ring" and self.n % 2 == 1 and self.n >= 3

    def with_extra(self, points: Sequence[Sequence[float]]) -> "Deployment":
        """Return a ``custom`` deployment with ``points`` appended."""
        extra = np.asarray(points, dtype=float).reshape(-1, 2)
        return make_custom(np.vstack([self.positions, extra]), source=self.source)


def _check_positive(name: str, value: float) -> float:
    value = float(value)
    if not (math.isfinite(value) and value > 0):
        raise InvalidInputError(f"{name} must be > 0, got {value}")
    return value


def make_pair(d: float) -> Deployment:
    """Two repeaters ``d`` meters apart, source midway."""
    d = _check_positive("d", d)
    return Deployment(np.array([[0.0, 0.0], [d, 0.0]]), np.array([d / 2, 0.0]), "pair", {"d": d})


def _ring_points(N: int, R: float) -> np.ndarray:
    # repeater 1 at the top, then clockwise
    angles = np.pi / 2 - 2 * np.pi * np.arange(N) / N
    return R * np.column_stack([np.cos(angles), np.sin(angles)])


def make_ring(N: int, R: float) -> Deployment:
    """``N = 2K + 1`` repeaters equally spaced on a circle of radius ``R``, source at the center.

    Raises
    ------
    StructureError
        For even ``N``; use :func:`make_ring_even` for those.
    """
    if int(N) != N or N < 3:
        raise InvalidInputError(f"ring needs an integer N >= 3, got {N}")
    N = int(N)
    if N % 2 == 0:
        raise StructureError("make_ring supports odd N only; use make_ring_even")
    R = _check_positive("R", R)
    return Deployment(_ring_points(N, R), np.zeros(2), "ring", {"N": N, "R": R})


def make_ring_even(N: int, R: float) -> Deployment:
    """``N = 2K`` repeaters equally spaced on a circle of radius ``R``."""
    if int(N) != N or N < 2 or int(N) % 2:
        raise InvalidInputError(f"make_ring_even needs an even N >= 2, got {N}")
    N = int(N)
    R = _check_positive("R", R)
    return Deployment(_ring_points(N, R), np.zeros(2), "ring", {"N": N, "R": R})


def _grid_side(W: float, s: float) -> int:
    # tolerate W/s landing a hair below an integer
    return int(math.floor(W / s + 1e-9)) + 1


def make_grid(W: float, s: float) -> Deployment:
    """Square lattice with spacing ``s`` covering a ``W x W`` cell, boundary included.

    >>> make_grid(2000, 200).n
    121
    """
    W = _check_positive("W", W)
    s = _check_positive("s", s)
    if s > W:
        raise InvalidInputError(f"spacing s={s} exceeds cell width W={W}")
    m = _grid_side(W, s)
    ij = np.arange(m) * s
    xx, yy = np.meshgrid(ij, ij, indexing="xy")
    pos = np.column_stack([xx.ravel(), yy.ravel()])
    return Deployment(pos, np.array([W / 2, W / 2]), "grid", {"W": W, "s": s})


def make_multicell(M: int, W: float, s: float) -> Deployment:
    """``M`` grid cells side by side along x; repeaters on shared edges kept once."""
    if int(M) != M or M < 1:
        raise InvalidInputError(f"cell count M must be an integer >= 1, got {M}")
    M = int(M)
    cell = make_grid(W, s)
    if M == 1:
        return Deployment(cell.positions, cell.source, "multicell", {"M": 1, "W": cell.kind_params["W"],
                                                                      "s": cell.kind_params["s"]})
    W = cell.kind_params["W"]
    blocks = [cell.positions + np.array([i * W, 0.0]) for i in range(M)]
    pos = np.vstack(blocks)
    # dedupe at micrometer resolution, keep first occurrence order
    key = np.round(pos, 6)
    _, first = np.unique(key, axis=0, return_index=True)
    pos = pos[np.sort(first)]
    return Deployment(pos, np.array([M * W / 2, W / 2]), "multicell", {"M": M, "W": W, "s": cell.kind_params["s"]})


def make_custom(points, source=(0.0, 0.0)) -> Deployment:
    """Deployment from an explicit list of ``(x, y)`` coordinates."""
    dep = Deployment(np.asarray(points, dtype=float), np.asarray(source, dtype=float), "custom", {})
    distance_matrix(dep)
    return dep


def distance_matrix(dep: Deployment) -> np.ndarray:
    """Euclidean pairwise distances; exactly symmetric with a zero diagonal.

    Raises
    ------
    DegenerateDeploymentError
        If two repeaters coincide.
    """
    p = dep.positions
    diff = p[:, None, :] - p[None, :, :]
    d = np.hypot(diff[..., 0], diff[..., 1])
    np.fill_diagonal(d, 0.0)
    off = d[~np.eye(dep.n, dtype=bool)]
    if off.size and np.min(off) <= 0:
        i, j = np.argwhere((d == 0) & ~np.eye(dep.n, dtype=bool))[0]
        raise DegenerateDeploymentError(f"repeaters {i} and {j} coincide")
    return d
