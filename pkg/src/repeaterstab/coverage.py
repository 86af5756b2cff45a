"""Coverage extension for an even ring of repeaters around the source.

The unaided source covers radius ``R``. A destination at ``R + delta``,
equidistant from its two nearest repeaters, is covered once the repeated
power makes up for the extra path loss.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .channel import ChannelModel
from .deployment import make_ring_even
from .errors import InvalidInputError
from .numerics import bisect
from .stability import FrequencyGrid, gershgorin_bound

__all__ = [
    "CoverageScenario",
    "CoverageRecord",
    "CoverageResult",
    "destination_distances",
    "required_gain",
    "achieved_extension",
    "power_limit_gain",
    "coverage_curve",
]


@dataclass(frozen=True)
class CoverageScenario:
    N: int
    R: float
    ch: ChannelModel
    gamma_db: float

    def __post_init__(self):
        _check_even(self.N)
        if not self.R > 0:
            raise InvalidInputError("R must be > 0")


@dataclass(frozen=True)
class CoverageRecord:
    N: int
    alpha_g: float
    alpha_power: float
    alpha_used: float
    limiting: str
    delta: float


@dataclass
class CoverageResult:
    R: float
    gamma_db: float
    records: list[CoverageRecord] = field(default_factory=list)

    @property
    def limiting(self) -> list[str]:
        return [r.limiting for r in self.records]

    def transitions(self) -> int:
        """Number of changes of the limiting constraint along the N list."""
        tags = self.limiting
        return sum(a != b for a, b in zip(tags, tags[1:]))


def _check_even(N) -> int:
    if int(N) != N or N < 2 or int(N) % 2:
        raise InvalidInputError(f"coverage analysis needs an even N >= 2, got {N}")
    return int(N)


def destination_distances(N: int, R: float, delta: float) -> np.ndarray:
    """Distances ``L_1..L_K`` from the repeaters to the destination (each occurs twice).

    >>> destination_distances(2, 1.0, 0.0)
    array([1.41421356])
    """
    N = _check_even(N)
    if delta < 0:
        raise InvalidInputError("delta must be >= 0")
    k = np.arange(1, N // 2 + 1)
    half = (2 * k - 1) * np.pi / (2 * N)
    D = 2 * R * np.sin(half)
    theta = half + np.pi / 2
    return np.sqrt(delta ** 2 + D ** 2 - 2 * delta * D * np.cos(theta))


def required_gain(N: int, R: float, delta: float, ch: ChannelModel) -> float:
    """Smallest gain for which the repeaters restore edge-of-cell power at ``R + delta``."""
    if delta < 0:
        raise InvalidInputError("delta must be >= 0")
    L = destination_distances(N, R, delta)
    bR = ch.path_gain(R)
    num = bR - ch.path_gain(R + delta)
    den = 2 * bR * np.sum(ch.path_gain(L))
    return math.sqrt(max(num, 0.0) / den)


def achieved_extension(N: int, R: float, alpha: float, ch: ChannelModel,
                       delta_max: float | None = None, tol: float = 1e-4) -> float:
    """Invert :func:`required_gain` by bisection on ``[0, delta_max]`` (default ``10 R``)."""
    if alpha < 0:
        raise InvalidInputError("alpha must be >= 0")
    if delta_max is None:
        delta_max = 10 * R
    if not delta_max > 0:
        raise InvalidInputError("delta_max must be > 0")
    if alpha == 0:
        return 0.0
    if required_gain(N, R, delta_max, ch) <= alpha:
        return float(delta_max)
    return bisect(lambda d: required_gain(N, R, d, ch) - alpha, 0.0, delta_max, tol)


def power_limit_gain(gamma_db: float, convention: str = "power") -> float:
    """Gain cap from a dB figure: ``10**(g/20)`` for a power gain, ``10**(g/10)`` for an amplitude."""
    if convention == "power":
        return 10 ** (gamma_db / 20)
    if convention == "amplitude":
        return 10 ** (gamma_db / 10)
    raise InvalidInputError(f"unknown gain convention {convention!r}")


def coverage_curve(N_list: Iterable[int], R: float, gamma_db: float, ch: ChannelModel,
                   grid: FrequencyGrid | None = None, delta_max: float | None = None,
                   convention: str = "power") -> CoverageResult:
    """Extension reached with ``alpha = min(alpha_G, power cap)`` for each ring size."""
    alpha_power = power_limit_gain(gamma_db, convention)
    result = CoverageResult(float(R), float(gamma_db))
    for N in N_list:
        N = _check_even(N)
        ag = gershgorin_bound(make_ring_even(N, R), ch, grid)
        if ag <= alpha_power:
            used, limiting = ag, "stability"
        else:
            used, limiting = alpha_power, "power"
        delta = achieved_extension(N, R, used, ch, delta_max)
        result.records.append(CoverageRecord(N, ag, alpha_power, used, limiting, delta))
    return result
