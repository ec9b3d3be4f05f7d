"""The smallest index-1 DAE: J = i diag(1, 0), H = 0, W = I.

The second component carries no derivative, so it is pinned by the algebraic
row  0 = lam f2.  At lam = 0 that row is empty and every function supported in
the normal direction is an eigenfunction: an eigenvalue of infinite
multiplicity.  Everywhere else the problem reduces to f1' = -i lam f1.
"""

import numpy as np

from canondae import certify_self_adjoint, check_index1, monodromy, point_spectrum, reduce_at
from canondae.samples import example_dae

J, coeffs, sp = example_dae(period=1.0)

print("index-1 check at z0 = 0:")
report = check_index1(coeffs, sp, 0.0)
for c in report.failures:
    print(f"  fails: {c.label}, smallest singular value {c.witness:.1e}")

print("index-1 check at z0 = i:", "passes" if check_index1(coeffs, sp, 1j).overall else "fails")
print("self-adjoint certificate:", certify_self_adjoint(coeffs, sp).passed)

for lam in (0.5, 2.0):
    M = monodromy(reduce_at(coeffs, sp, lam)).M
    print(f"lam = {lam}: monodromy {M[0, 0]:.6f}, exp(-i lam d) = {np.exp(-1j * lam):.6f}")

finding = point_spectrum(coeffs, sp, 0.0)
print("lam = 0:", finding.verdict, "kernel dims", finding.kernel_dims)
print("lam = 1:", point_spectrum(coeffs, sp, 1.0).verdict)
