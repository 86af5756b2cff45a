"""
Dense grids and rows of cells
=============================

Square grids of repeaters inside one cell, then several such cells side
by side. The Gershgorin bound only needs the row sums of the amplitude
matrix, so it scales to hundreds of repeaters without any frequency sweep.
"""

import numpy as np

from repeaterstab import FreeSpaceLOS, gershgorin_bound, make_grid, make_multicell

ch = FreeSpaceLOS(2.0e9)

# Halving the spacing quadruples the repeater count and pulls every
# neighbour closer, so the bound drops quickly.
for s in (500.0, 250.0, 200.0, 100.0):
    dep = make_grid(2000.0, s)
    ag = gershgorin_bound(dep, ch)
    print(f"s = {s:5.0f} m  N = {dep.n:4d}  alpha_G = {ag:.3e} ({20 * np.log10(ag):5.1f} dB)")

# Adding cells adds far-away repeaters. Their contribution to each row sum
# is small, so the bound barely moves after the first neighbour cell.
for M in (1, 2, 3, 5):
    dep = make_multicell(M, 2000.0, 200.0)
    print(f"M = {M}  N = {dep.n:4d}  alpha_G = {gershgorin_bound(dep, ch):.4e}")
