"""Propagation models: distance and angular frequency to a complex channel coefficient."""

from __future__ import annotations

import abc
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidInputError

__all__ = ["ChannelModel", "FreeSpaceLOS", "SPEED_OF_LIGHT"]

SPEED_OF_LIGHT = 3.0e8


def _positive_distance(d) -> np.ndarray:
    d = np.asarray(d, dtype=float)
    if np.any(~np.isfinite(d)) or np.any(d <= 0):
        raise InvalidInputError("distance must be finite and > 0 (free-space gain diverges at d = 0)")
    return d


class ChannelModel(abc.ABC):
    """Interface for reciprocal inter-repeater channels.

    Subclasses map a distance (m) and an angular frequency (rad/s) to a
    complex transfer coefficient. ``frequency_flat_amplitude`` tells the
    stability code whether ``|transfer|`` can depend on frequency.
    """

    carrier_frequency: float
    speed_of_light: float
    frequency_flat_amplitude: bool = False

    @property
    def wavelength(self) -> float:
        return self.speed_of_light / self.carrier_frequency

    @abc.abstractmethod
    def path_gain(self, d):
        """Power gain at distance ``d``."""

    def delay(self, d):
        """Propagation delay ``d / c`` in seconds."""
        d = np.asarray(d, dtype=float)
        if np.any(d < 0):
            raise InvalidInputError("distance must be >= 0")
        out = d / self.speed_of_light
        return float(out) if out.ndim == 0 else out

    @abc.abstractmethod
    def transfer(self, d, omega):
        """Complex coefficient for distance ``d`` at angular frequency ``omega``."""

    def amplitude(self, d, omega=None):
        """``|transfer(d, omega)|``; ``omega`` may be omitted for flat-amplitude models."""
        if omega is None:
            if not self.frequency_flat_amplitude:
                raise InvalidInputError("omega is required for a frequency-selective channel")
            omega = 2 * np.pi * self.carrier_frequency
        return np.abs(self.transfer(d, omega))


@dataclass(frozen=True)
class FreeSpaceLOS(ChannelModel):
    """Isotropic antennas, line of sight: ``sqrt(beta(d)) * exp(-j omega d / c)``.

    ``beta(d) = lambda^2 / ((4 pi)^2 d^2)`` with no near-field correction, so
    gains above one are returned for very small ``d``.

    >>> ch = FreeSpaceLOS(2e9)
    >>> round(ch.wavelength, 3)
    0.15
    """

    carrier_frequency: float = 2.0e9
    speed_of_light: float = SPEED_OF_LIGHT
    frequency_flat_amplitude: bool = field(default=True, init=False)

    def __post_init__(self):
        if not (np.isfinite(self.carrier_frequency) and self.carrier_frequency > 0):
            raise InvalidInputError("carrier_frequency must be > 0")
        if not (np.isfinite(self.speed_of_light) and self.speed_of_light > 0):
            raise InvalidInputError("speed_of_light must be > 0")

    def path_gain(self, d):
        d = _positive_distance(d)
        out = self.wavelength ** 2 / ((4 * np.pi) ** 2 * d ** 2)
        return float(out) if out.ndim == 0 else out

    def amplitude(self, d, omega=None):
        d = _positive_distance(d)
        out = self.wavelength / (4 * np.pi * d)
        return float(out) if out.ndim == 0 else out

    def transfer(self, d, omega):
        d = _positive_distance(d)
        out = self.amplitude(d) * np.exp(-1j * np.asarray(omega, dtype=float) * (d / self.speed_of_light))
        return complex(out) if np.ndim(out) == 0 else out
