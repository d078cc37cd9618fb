"""Map the entangled field near lattice sites.

Shows three things: |E| over a transverse cut (coarse ASCII picture),
the cancellation residual over random sites, and how the antisymmetry
of the field about a site sharpens as the probe offset shrinks.
"""

import numpy as np

from mossbeat import (
    DEFAULT_RHODIUM,
    LatticeSpec,
    bragg_angle_solve,
    build_trigamma,
    cancellation_residual,
    evaluate_E,
    photon_wavenumber,
    transverse_antisymmetry,
)

k = photon_wavenumber(DEFAULT_RHODIUM.gamma_energy)
lattice = LatticeSpec(a=DEFAULT_RHODIUM.lattice_constant)
geom = build_trigamma(k, bragg_angle_solve(k, lattice)[0].theta)

# coarse |E| picture over a 2x2-cell transverse window through a site
n = 33
span = 2.0 * lattice.a
axis = np.linspace(-span / 2, span / 2, n)
shades = " .:-=+*#%@"
print(f"|E| over a {span / lattice.a:.0f}a x {span / lattice.a:.0f}a window (z = 0, @ = bright):")
rows = []
for y in axis[::-1]:
    pts = np.column_stack([axis, np.full(n, y), np.zeros(n)])
    amp = np.linalg.norm(evaluate_E(geom, pts), axis=1)
    rows.append(amp)
peak = max(r.max() for r in rows)
for amp in rows:
    idx = np.minimum((amp / peak * (len(shades) - 1)).astype(int), len(shades) - 1)
    print("    " + "".join(shades[i] for i in idx))

residual = cancellation_residual(geom, lattice, n_sites=1000, seed=1)
print(f"\nworst relative |E| over 1000 random lattice sites: {residual:.2e}")

site = lattice.primitive_vectors[0] + lattice.primitive_vectors[1]
print("\nantisymmetry about a site, |E(+d) + E(-d)| / |E(+d) - E(-d)|:")
for frac in (1e-2, 1e-3, 1e-4, 1e-5):
    delta = np.array([frac * lattice.a, 0.0, 0.0])
    print(f"  |d| = {frac:.0e} a -> {transverse_antisymmetry(geom, site, delta):.3e}")
print("the ratio falls off linearly with |d|: the even part of the field")
print("only enters at second order around a dark site.")
