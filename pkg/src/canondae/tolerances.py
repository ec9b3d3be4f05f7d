"""Default numerical tolerances shared across modules."""

#: Absolute tolerance on structural identities (skew-/Hermiticity, unitarity)
#: and relative factor for rank decisions on J.
TOL_STRUCT = 1e-12

#: Relative smallest-singular-value threshold below which a block is singular.
TOL_SING = 1e-10

#: Allowed deviation ||mu| - 1| for a Floquet multiplier to count as unimodular.
TOL_CIRCLE = 1e-8
