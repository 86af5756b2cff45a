"""
Coverage: power cap or stability cap
====================================

Even rings of repeaters push the cell edge outward. Each repeater's gain
is capped twice, by the transmit power budget and by the Gershgorin
stability bound. With few repeaters the power cap binds; as the ring
fills in, neighbours get close enough that stability takes over.
"""

from repeaterstab import FreeSpaceLOS, achieved_extension, coverage_curve, required_gain

ch = FreeSpaceLOS(2.0e9)
R = 1000.0

# Forward and inverse formulas round trip.
a = required_gain(10, R, 100.0, ch)
print(f"gain for 100 m with N = 10: {a:.4e}; it reaches {achieved_extension(10, R, a, ch):.4f} m")

res = coverage_curve(range(2, 41, 2), R, 80.0, ch)
for r in res.records:
    print(f"N = {r.N:2d}  alpha_G = {r.alpha_g:.3e}  used = {r.alpha_used:.3e}  "
          f"{r.limiting:9s}  delta = {r.delta:7.1f} m")
print("power -> stability transitions:", res.transitions())
