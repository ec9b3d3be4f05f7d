"""Periodic linear DAEs in canonical form ``J f' + H f = lam W f``.

Index-1 hypothesis checks, reduction to an ODE on ``ran J``, exact layer
propagation, Floquet analysis and the layered Maxwell model.
"""

from .canonical import CanonicalSplitting, build_splitting, pseudoinverse, project_tangential, assemble_from_blocks
from .coefficients import (
    Layer,
    LayeredCoefficients,
    PiecewiseExponential,
    shift_pencil,
    validate,
    weighted_inner_period,
    weighted_norm_period,
)
from .errors import *  # noqa: F401,F403
from .expm import expm
from .hypotheses import Index1Report, SelfAdjointCertificate, certify_self_adjoint, check_index1
from .propagation import Monodromy, TransferMatrix, layer_transfer, monodromy, solve_ivp, transfer
from .reduction import ReducedGenerator, recover_normal, reduce, reduce_at, schur
from .spectral import (
    BandScan,
    FloquetSet,
    PointSpectrumFinding,
    band_scan,
    certified_point_spectrum,
    floquet,
    kernel_dimension_one_period,
    point_spectrum,
)
from .tolerances import TOL_CIRCLE, TOL_SING, TOL_STRUCT

__version__ = "0.1.0"
