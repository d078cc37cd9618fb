"""Back-of-envelope numbers for the rhodium 40 keV resonance.

Prints the handful of scalars everything else hangs on: the natural
linewidth, the Doppler speed that shifts the line by one width, the
initial thermal strain rate after irradiation, and the beat constant
for a plausible absorber thickness.
"""

from mossbeat import (
    DEFAULT_RHODIUM,
    doppler_speed_per_linewidth,
    natural_linewidth,
    tau_d,
    thermal_strain_rate,
)

p = DEFAULT_RHODIUM

gamma = natural_linewidth(p.tau0)
print(f"lifetime tau0            : {p.tau0:.0f} s  (~{p.tau0 / 3600:.2f} h)")
print(f"natural linewidth        : {gamma:.4e} eV")
print(f"Doppler speed / linewidth: {doppler_speed_per_linewidth(p):.4e} m/s")
print(f"thermal strain rate      : {thermal_strain_rate(p):.4e} /s")

# resonant-thickness figure: half the nuclei recoil-free, nuclear depth
# 22 um against 50 um of photo-electric path
td = tau_d(p.tau0, 0.5, 1.0 / p.depth_nuclear, p.depth_photoelectric)
print(f"beat constant tau_d      : {td:.2f} s  (tau_d/tau0 = {td / p.tau0:.3f})")

print()
print("the linewidth sits at 1e-19 eV and one linewidth of Doppler shift")
print("is a femtometer per second, so the lattice must hold still to that")
print("level over hours; the strain-rate line above says how fast the")
print("lattice is still creeping right after the pump.")
