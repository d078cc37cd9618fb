"""Dynamic beat in the delayed count rate.

The modulation argument grows like sqrt(t/tau_d), so minima sit at
quadratically spaced times and the beat slows as it ages.  This prints
an accumulated-intensity curve with an ASCII profile and the ladder of
minima against the closed spacing law.
"""

import numpy as np

from mossbeat import BeatParams, accumulated_intensity, beat_minima

p = BeatParams(n0=3.0, tau0=4857.0, tau_d=485.7, phi0=0.3, t_pump=3600.0)

print(f"tau0 {p.tau0:.0f} s, tau_d {p.tau_d:.1f} s, phi0 {p.phi0}, pump {p.t_pump:.0f} s")
print()
print("      t [s]    accumulated intensity")
grid = np.linspace(0.0, 14400.0, 49)
vals = np.array([accumulated_intensity(float(t), p) for t in grid])
peak = vals.max()
for t, v in zip(grid, vals):
    bar = "#" * int(round(58 * v / peak))
    print(f"  {t:9.0f}    {v:12.2f} {bar}")

print()
print("minima of the instantaneous rate vs the spacing law tau_d*(pi/2 + m*pi - phi0)^2:")
minima = beat_minima(p, n=6)
for m, t_min in enumerate(minima):
    law = p.tau_d * (np.pi / 2 + m * np.pi - p.phi0) ** 2
    print(f"  m = {m}:  located {t_min:12.4f} s   law {law:12.4f} s   rel diff {abs(t_min - law) / law:.1e}")
gaps = np.diff(minima)
print(f"consecutive gaps grow linearly: {np.array2string(gaps, precision=1)}")
