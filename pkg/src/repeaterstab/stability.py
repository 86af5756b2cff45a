"""Feedback stability of a repeater network.

The closed loop ``alpha (I - alpha H(jw))^{-1}`` loses stability at the
smallest gain for which ``I - alpha H(jw)`` becomes singular at some
frequency. This module builds ``H``, evaluates the Gershgorin lower bound on
that gain, and sweeps determinant or circulant-eigenvalue measures over a
frequency grid to locate the transition numerically.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy import optimize

from .channel import ChannelModel
from .deployment import Deployment, distance_matrix
from .errors import InvalidInputError, StructureError
from .numerics import bisect, dft, lu_det

__all__ = [
    "FrequencyGrid",
    "StabilityReport",
    "build_h",
    "row_amplitude_sums",
    "gershgorin_bound",
    "stability_measure_det",
    "circulant_eigenvalues",
    "stability_measure_circulant",
    "measure_curve",
    "alpha_grid",
    "estimate_alpha_max",
    "STABLE_OVER_RANGE",
]

STABLE_OVER_RANGE = "stable-over-range"

# complex entries per LU batch; bounds peak memory at a few tens of MB
_CHUNK_ELEMENTS = 2_000_000


@dataclass(frozen=True)
class FrequencyGrid:
    """Uniform grid of frequencies ``carrier - bandwidth/2 + k * spacing``.

    The grid has ``floor(bandwidth / spacing) + 1`` points, all in Hz.
    The defaults are a 20 MHz band around 2 GHz at 10 kHz spacing.
    """

    carrier: float = 2.0e9
    bandwidth: float = 20.0e6
    spacing: float = 10.0e3

    def __post_init__(self):
        if not self.spacing > 0:
            raise InvalidInputError("spacing must be > 0")
        if not self.bandwidth >= 0:
            raise InvalidInputError("bandwidth must be >= 0")
        if not self.carrier - self.bandwidth / 2 > 0:
            raise InvalidInputError("all grid frequencies must be > 0")

    @property
    def size(self) -> int:
        return int(math.floor(self.bandwidth / self.spacing + 1e-9)) + 1

    @property
    def frequencies(self) -> np.ndarray:
        return self.carrier - self.bandwidth / 2 + self.spacing * np.arange(self.size)

    @property
    def omegas(self) -> np.ndarray:
        return 2 * np.pi * self.frequencies

    def metadata(self) -> dict:
        return {"carrier": self.carrier, "bandwidth": self.bandwidth,
                "spacing": self.spacing, "size": self.size}


@dataclass
class StabilityReport:
    """Outcome of a gain sweep.

    ``alpha_max_estimate`` is ``None`` when no gain on the grid crossed the
    threshold; ``status`` then reads ``"stable-over-range"``.
    """

    alpha_grid: np.ndarray
    measure: np.ndarray
    alpha_g: float
    measure_kind: str
    alpha_max_estimate: float | None = None
    status: str = STABLE_OVER_RANGE
    eps_stab: float | None = None
    grid: dict = field(default_factory=dict)

    @property
    def ratio(self) -> float | None:
        if self.alpha_max_estimate is None or not math.isfinite(self.alpha_g):
            return None
        return self.alpha_max_estimate / self.alpha_g


def build_h(dep: Deployment, ch: ChannelModel, omega) -> np.ndarray:
    """Inter-repeater transfer matrix ``H(j omega)``.

    Entry ``(n, m)`` is ``ch.transfer(d_nm, omega)`` off the diagonal and
    exactly zero on it. A vector ``omega`` gives a stack of shape
    ``(len(omega), N, N)``.
    """
    omega = np.asarray(omega, dtype=float)
    if np.any(omega <= 0):
        raise InvalidInputError("omega must be > 0")
    d = distance_matrix(dep)
    n = dep.n
    iu = np.triu_indices(n, k=1)
    vals = ch.transfer(d[iu], omega[..., None])
    h = np.zeros(omega.shape + (n, n), dtype=np.complex128)
    h[..., iu[0], iu[1]] = vals
    h[..., iu[1], iu[0]] = vals
    return h


def row_amplitude_sums(dep: Deployment, ch: ChannelModel, omega=None) -> np.ndarray:
    """``sum_{m != n} |h_nm(j omega)|`` for every row ``n`` (shape ``(..., N)``)."""
    d = distance_matrix(dep)
    off = ~np.eye(dep.n, dtype=bool)
    amp = np.zeros(np.shape(omega) + d.shape) if omega is not None else np.zeros_like(d)
    if omega is None:
        amp[off] = ch.amplitude(d[off])
    else:
        w = np.asarray(omega, dtype=float)
        amp[..., off] = np.abs(ch.transfer(d[off], w[..., None]))
    return amp.sum(axis=-1)


def gershgorin_bound(dep: Deployment, ch: ChannelModel, grid: FrequencyGrid | None = None) -> float:
    """Lower bound on the maximum stable gain: ``inf_w min_n 1 / rowsum_n(w)``.

    Flat-amplitude channels are evaluated at the carrier only. A single
    repeater has no feedback path and returns ``math.inf``.
    """
    if dep.n == 1:
        return math.inf
    if ch.frequency_flat_amplitude:
        sums = row_amplitude_sums(dep, ch)
    else:
        if grid is None:
            raise InvalidInputError("a frequency grid is required for a frequency-selective channel")
        sums = row_amplitude_sums(dep, ch, grid.omegas)
    return float(1.0 / np.max(sums))


def _map_chunks(fn, omegas: np.ndarray, n: int, threads: int | None) -> list:
    per = max(1, _CHUNK_ELEMENTS // (n * n))
    chunks = [omegas[i:i + per] for i in range(0, omegas.size, per)]
    if threads and threads > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(fn, chunks))
    return [fn(c) for c in chunks]


def _omegas(grid) -> np.ndarray:
    if isinstance(grid, FrequencyGrid):
        return grid.omegas
    return np.atleast_1d(np.asarray(grid, dtype=float))


def stability_measure_det(dep: Deployment, ch: ChannelModel, alpha: float, grid,
                          threads: int | None = None) -> float:
    """``min over the grid of |det(I - alpha H(j omega))|``.

    ``grid`` is a :class:`FrequencyGrid` or an array of angular frequencies.
    """
    if alpha < 0:
        raise InvalidInputError("alpha must be >= 0")
    omegas = _omegas(grid)
    n = dep.n
    if alpha == 0 or n == 1:
        return 1.0
    d = distance_matrix(dep)
    off = ~np.eye(n, dtype=bool)
    eye = np.eye(n, dtype=np.complex128)

    def chunk_min(w):
        h = np.zeros((w.size, n, n), dtype=np.complex128)
        h[:, off] = ch.transfer(d[off], w[:, None])
        return float(np.min(np.abs(lu_det(eye - alpha * h))))

    return min(_map_chunks(chunk_min, omegas, n, threads))


def _ring_params(ring: Deployment) -> tuple[int, float]:
    if not ring.is_odd_ring:
        raise StructureError("circulant analysis needs a ring deployment with odd N >= 3")
    return ring.kind_params["N"], ring.kind_params["R"]


def circulant_eigenvalues(ring: Deployment, ch: ChannelModel, alpha: float, omega,
                          method: str = "closed") -> np.ndarray:
    """Eigenvalues of ``alpha H(j omega)`` for an odd ring, ordered by DFT bin.

    ``method="closed"`` evaluates
    ``2 alpha sum_k sqrt(beta_k) cos(2 pi k (n-1) / N) exp(-j omega tau_k)``
    with chord lengths ``d_k = 2 R sin(k pi / N)``; ``method="dft"`` takes the
    DFT of the first column of ``alpha H``. Output shape is
    ``np.shape(omega) + (N,)``.
    """
    N, R = _ring_params(ring)
    omega = np.asarray(omega, dtype=float)
    if method == "dft":
        h = build_h(ring, ch, omega)
        col = alpha * h[..., :, 0]
        if col.ndim == 1:
            return dft(col)
        return np.stack([dft(c) for c in col.reshape(-1, N)]).reshape(col.shape)
    if method != "closed":
        raise InvalidInputError(f"unknown method {method!r}")
    K = (N - 1) // 2
    k = np.arange(1, K + 1)
    dk = 2 * R * np.sin(k * np.pi / N)
    hk = ch.transfer(dk, omega[..., None])                       # (..., K)
    cos = np.cos(2 * np.pi * np.outer(k, np.arange(N)) / N)     # (K, N)
    return 2 * alpha * hk @ cos


def stability_measure_circulant(ring: Deployment, ch: ChannelModel, alpha: float, grid) -> float:
    """``min over the grid and n of |lambda_n(alpha, omega) - 1|`` for an odd ring."""
    if alpha < 0:
        raise InvalidInputError("alpha must be >= 0")
    lam = circulant_eigenvalues(ring, ch, 1.0, _omegas(grid))
    return float(np.min(np.abs(alpha * lam - 1)))


def _measure_kind(dep: Deployment, kind: str) -> str:
    if kind == "auto":
        return "circulant-eigen" if dep.is_odd_ring else "determinant"
    if kind not in ("determinant", "circulant-eigen"):
        raise InvalidInputError(f"unknown measure kind {kind!r}")
    if kind == "circulant-eigen":
        _ring_params(dep)
    return kind


def _measure_fn(dep, ch, grid, kind, threads):
    if kind == "circulant-eigen":
        # eigenvalues scale linearly in alpha: compute the unit-gain set once
        lam = circulant_eigenvalues(dep, ch, 1.0, _omegas(grid))
        return lambda a: float(np.min(np.abs(a * lam - 1)))
    return lambda a: stability_measure_det(dep, ch, a, grid, threads=threads)


def measure_curve(dep: Deployment, ch: ChannelModel, grid, alphas: Sequence[float],
                  kind: str = "auto", threads: int | None = None) -> StabilityReport:
    """Evaluate the stability measure at every gain in ``alphas`` (no estimate)."""
    kind = _measure_kind(dep, kind)
    f = _measure_fn(dep, ch, grid, kind, threads)
    alphas = np.asarray(alphas, dtype=float)
    values = np.array([f(a) for a in alphas])
    meta = grid.metadata() if isinstance(grid, FrequencyGrid) else {"size": _omegas(grid).size}
    return StabilityReport(alphas, values, gershgorin_bound(dep, ch, grid if isinstance(grid, FrequencyGrid) else None),
                           kind, grid=meta)


def alpha_grid(alpha_lo: float, alpha_hi: float, n_alpha: int) -> np.ndarray:
    """Log-spaced gains; ``alpha_lo = 0`` puts 0 first and starts the log part at ``1e-3 * alpha_hi``."""
    if not (0 <= alpha_lo < alpha_hi) or not math.isfinite(alpha_hi):
        raise InvalidInputError(f"need 0 <= alpha_lo < alpha_hi, got [{alpha_lo}, {alpha_hi}]")
    if int(n_alpha) != n_alpha or n_alpha < 2:
        raise InvalidInputError("n_alpha must be an integer >= 2")
    n_alpha = int(n_alpha)
    if alpha_lo == 0:
        return np.concatenate([[0.0], np.geomspace(1e-3 * alpha_hi, alpha_hi, n_alpha - 1)])
    return np.geomspace(alpha_lo, alpha_hi, n_alpha)


def estimate_alpha_max(dep: Deployment, ch: ChannelModel, grid, alpha_lo: float, alpha_hi: float,
                       n_alpha: int = 200, eps_stab: float | None = None, rtol: float = 1e-3,
                       kind: str = "auto", threads: int | None = None) -> StabilityReport:
    """Estimate the smallest gain at which the loop becomes singular on the grid.

    Gains are swept on a log grid; the first gain whose measure falls below
    ``eps_stab`` (default ``1e-3`` times the measure at zero gain) is refined
    by bisection against the previous grid gain down to a relative bracket
    width ``rtol``. A local minimum of the sampled measure is also searched
    between its neighbours, since the dip below ``eps_stab`` can be narrower
    than the grid step (the two-repeater case is one such). The sweep stops
    at the first crossing, so ``alpha_grid`` in the report may be truncated.
    """
    alphas = alpha_grid(alpha_lo, alpha_hi, n_alpha)
    if rtol <= 0:
        raise InvalidInputError("rtol must be > 0")
    kind = _measure_kind(dep, kind)
    f = _measure_fn(dep, ch, grid, kind, threads)
    if eps_stab is None:
        eps_stab = 1e-3 * f(0.0)
    if not eps_stab > 0:
        raise InvalidInputError("eps_stab must be > 0")

    g = lambda x: f(x) - eps_stab  # noqa: E731
    values = []
    estimate = None
    for i, a in enumerate(alphas):
        m = f(a)
        values.append(m)
        if m < eps_stab:
            if i == 0:
                estimate = float(a)
            else:
                lo = float(alphas[i - 1])
                estimate = bisect(g, lo, float(a), rtol * lo)
            break
        if i >= 2 and values[i - 2] > values[i - 1] <= m:
            # a dip narrower than the gain grid can hide between two samples
            lo, hi = float(alphas[i - 2]), float(a)
            res = optimize.minimize_scalar(f, bounds=(lo, hi), method="bounded",
                                           options={"xatol": 1e-3 * rtol * lo})
            if res.fun < eps_stab:
                estimate = bisect(g, lo, float(res.x), rtol * lo)
                break

    fg = grid if isinstance(grid, FrequencyGrid) else None
    meta = grid.metadata() if fg is not None else {"size": _omegas(grid).size}
    report = StabilityReport(alphas[:len(values)], np.array(values), gershgorin_bound(dep, ch, fg),
                             kind, estimate, "crossed" if estimate is not None else STABLE_OVER_RANGE,
                             eps_stab, meta)
    return report
