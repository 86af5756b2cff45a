"""
Echoes between two repeaters
============================

An impulse fed to one repeater bounces back and forth. Every round trip
multiplies it by alpha^2 beta, so the echo train decays when that loop
gain is below one and grows without bound otherwise.
"""

import numpy as np

from repeaterstab import EchoConfig, echo_peaks, simulate_pair

fs, D = 1e7, 10
for g in (0.25, 0.9, 1.1):
    cfg = EchoConfig(alpha=0.5, beta=g / 0.25, tau=D / fs, sample_rate=fs, duration=2 * D * 50 / fs)
    x = np.zeros(cfg.n_samples)
    x[0] = 1.0
    y1, y2 = simulate_pair(cfg, x, np.zeros_like(x))
    peaks = echo_peaks(y1, 2 * D)
    print(f"loop gain {g}: first peaks {np.round(peaks[:4], 4)}  "
          f"ratio {peaks[1] / peaks[0]:.3f}  peak 50 = {peaks[-1]:.3e}")
