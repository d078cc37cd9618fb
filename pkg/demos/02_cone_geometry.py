"""Find cone openings where the three-photon mode locks to the lattice.

The three wavevectors share a polar angle theta around the (1,1,1)
axis, 120 degrees apart in azimuth.  Their pairwise differences must be
reciprocal lattice vectors for the phases to repeat from site to site,
which singles out discrete theta values.
"""

import numpy as np

from mossbeat import (
    DEFAULT_RHODIUM,
    LatticeSpec,
    bragg_angle_solve,
    build_trigamma,
    photon_wavenumber,
    verify_bragg,
)

k = photon_wavenumber(DEFAULT_RHODIUM.gamma_energy)
lattice = LatticeSpec(a=DEFAULT_RHODIUM.lattice_constant)

print(f"photon wavenumber k = {k:.4e} /m   (lambda = {2 * np.pi / k * 1e12:.3f} pm)")
print(f"fcc lattice constant a = {lattice.a * 1e10:.4f} A, channel axis {lattice.channel_axis}")
print()

candidates = bragg_angle_solve(k, lattice)
print(f"{len(candidates)} matching opening angle(s) with |G| shells up to cutoff {lattice.g_shell_cutoff}:")
for i, c in enumerate(candidates):
    families = sorted({tuple(sorted(abs(int(v)) for v in m)) for m in c.miller})
    print(
        f"  [{i}] theta = {np.degrees(c.theta):9.5f} deg"
        f"   residual {c.residual:.1e}"
        f"   reflection family {families}"
    )

geom = build_trigamma(k, candidates[0].theta)
ok, worst = verify_bragg(geom, lattice)
print()
print(f"re-check of candidate 0: matched = {ok}, worst relative residual {worst:.2e}")
print("each difference k_n - k_m lands on a reciprocal vector, so every")
print("lattice site sees the three waves with one common phase and the")
print("polarization sum cancels the field there (see 03_field_structure).")
