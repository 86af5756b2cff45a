"""Time-domain ping-pong between two repeaters.

Each repeater re-emits ``alpha`` times what it hears; what it hears is its
own source signal plus the other repeater's output delayed by ``tau`` and
scaled by ``sqrt(beta)``. Delays are whole samples.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, InvalidInputError

__all__ = ["EchoConfig", "simulate_pair", "impulse_train_coefficients", "echo_peaks"]


@dataclass(frozen=True)
class EchoConfig:
    alpha: float
    beta: float
    tau: float
    sample_rate: float
    duration: float

    def __post_init__(self):
        if not self.sample_rate > 0 or not self.duration > 0:
            raise ConfigurationError("sample_rate and duration must be > 0")
        if self.alpha < 0 or self.beta < 0:
            raise ConfigurationError("alpha and beta must be >= 0")
        if not self.tau > 0:
            raise ConfigurationError("tau must be > 0")
        D = self.tau * self.sample_rate
        if abs(D - round(D)) > 1e-9 * max(abs(D), 1.0) or round(D) < 1:
            raise ConfigurationError(
                f"tau * sample_rate = {D!r} is not a positive whole number of samples")

    @property
    def delay_samples(self) -> int:
        return int(round(self.tau * self.sample_rate))

    @property
    def n_samples(self) -> int:
        return int(round(self.duration * self.sample_rate))

    @property
    def loop_gain(self) -> float:
        """Round-trip factor ``alpha**2 * beta``."""
        return self.alpha ** 2 * self.beta


def simulate_pair(cfg: EchoConfig, x1, x2) -> tuple[np.ndarray, np.ndarray]:
    """Run ``y1[t] = a x1[t] + a sqrt(b) y2[t-D]`` and its mirror image, zero initial state.

    Both inputs must have ``cfg.n_samples`` samples; the outputs have the
    same length, so echoes past the horizon are dropped.
    """
    x1 = np.asarray(x1, dtype=float)
    x2 = np.asarray(x2, dtype=float)
    if x1.shape != x2.shape or x1.ndim != 1:
        raise InvalidInputError("x1 and x2 must be 1-D signals of equal length")
    if x1.size != cfg.n_samples:
        raise InvalidInputError(f"signals have {x1.size} samples, configuration expects {cfg.n_samples}")
    D = cfg.delay_samples
    a = cfg.alpha
    g = a * math.sqrt(cfg.beta)
    y1 = a * x1
    y2 = a * x2
    # block t depends only on block t-1, so whole blocks of D samples update at once
    for start in range(D, x1.size, D):
        stop = min(start + D, x1.size)
        y1[start:stop] += g * y2[start - D:stop - D]
        y2[start:stop] += g * y1[start - D:stop - D]
    return y1, y2


def impulse_train_coefficients(alpha: float, beta: float, K_terms: int) -> np.ndarray:
    """Weights ``(alpha**2 beta)**k`` of the round-trip echo train, ``k = 0..K_terms-1``."""
    if int(K_terms) != K_terms or K_terms < 1:
        raise InvalidInputError("K_terms must be an integer >= 1")
    return (alpha ** 2 * beta) ** np.arange(int(K_terms), dtype=float)


def echo_peaks(y: np.ndarray, period: int, offset: int = 0) -> np.ndarray:
    """Samples ``y[offset], y[offset + period], ...``."""
    return np.asarray(y)[offset::period]
