"""Maxwell's equations in a layered magnetoelectric medium.

The curl operator only differentiates the tangential fields, so J has rank 4
and the normal components E3, H3 are algebraic.  With a Hermitian positive
definite constitutive matrix the index-1 hypotheses hold at every non-real
shift and the problem is self-adjoint.
"""

import numpy as np

from canondae import certify_self_adjoint
from canondae.maxwell import MaterialTensor, MaxwellLayer, MaxwellProblem, assemble, band_structure

rng = np.random.default_rng(7)
X = 0.2 * (rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3)))
chiral = MaterialTensor(eps=np.diag([2.0, 3.0, 2.5]), mu=np.eye(3), xi=X)
chiral.check()

problem = MaxwellProblem(
    (MaxwellLayer(0.4, chiral), MaxwellLayer(0.6, MaterialTensor.isotropic(1.5))),
    k1=0.3,
    k2=-0.2,
)
J, coeffs, sp = assemble(problem)
print("rank J =", np.linalg.matrix_rank(J), " J+ = -J:", np.allclose(sp.Jplus, -J))

cert = certify_self_adjoint(coeffs, sp, 1j)
print("certificate:", cert.passed)

scan, table = band_structure(problem, 0.1, 6.0, 200)
print("gaps (the first lies below the light line, where no field propagates):", [(round(float(lo), 6), round(float(hi), 6)) for lo, hi in scan.gaps()])
below = sum(1 for row in table if not row[-1])
print(f"{below} grid points below the light line |k_perp| = {problem.k_perp:.4f}")
