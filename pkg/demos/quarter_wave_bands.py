"""Band structure of a two-layer dielectric stack at normal incidence.

Counting unit-modulus Floquet multipliers over a frequency grid separates pass
bands (count 4: two polarizations, two directions) from gaps (count 0).  The
edges are refined by bisection and compared with the closed-form trace of the
2x2 transfer matrix.
"""

import numpy as np

from canondae import band_scan
from canondae.propagation import monodromy_at
from canondae.maxwell import assemble, quarter_wave_stack

na, nb, da, db = 1.0, 2.0, 2 / 3, 1 / 3
_, coeffs, sp = assemble(quarter_wave_stack(na, nb, da, db))
scan = band_scan(coeffs, sp, 0.1, 8.0, 400)


def trace(lam):
    a, b = lam * na * da, lam * nb * db
    return 2 * np.cos(a) * np.cos(b) - (na / nb + nb / na) * np.sin(a) * np.sin(b)


print("gaps (lam = omega d / c):")
for lo, hi in scan.gaps():
    print(f"  [{lo:.10f}, {hi:.10f}]  |tr| at edges: {abs(trace(lo)):.10f}, {abs(trace(hi)):.10f}")

mid = 3 * np.pi / 4
mu = np.sort_complex(np.linalg.eigvals(monodromy_at(coeffs, sp, mid).M))
print(f"multipliers at the first gap center lam = 3 pi / 4: {np.round(mu.real, 8)}")
