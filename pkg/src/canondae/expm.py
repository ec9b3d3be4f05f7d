"""Matrix exponential by scaling and squaring with diagonal Pade approximants.

Degrees 3, 5, 7, 9 are used for small norms and degree 13 with scaling
otherwise.  The thresholds ``theta_m`` bound the backward error of the
``[m/m]`` approximant by unit roundoff for ``||A|| <= theta_m`` in any
consistent norm; the spectral norm is used here.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import NonFiniteGeneratorError

_THETA = {
    3: 1.495585217958292e-2,
    5: 2.539398330063230e-1,
    7: 9.504178996162932e-1,
    9: 2.097847961257068e0,
    13: 5.371920351148152e0,
}


def _pade_coefficients(m):
    f = math.factorial
    return [f(2 * m - j) * f(m) / (f(2 * m) * f(j) * f(m - j)) for j in range(m + 1)]


_COEFFS = {m: _pade_coefficients(m) for m in _THETA}


def _pade_uv(A, m):
    n = A.shape[0]
    b = _COEFFS[m]
    ident = np.eye(n, dtype=A.dtype)
    A2 = A @ A
    if m != 13:
        powers = [ident, A2]
        for _ in range(2, m // 2 + 1):
            powers.append(powers[-1] @ A2)
        U = sum(b[2 * j + 1] * powers[j] for j in range(m // 2 + 1))
        V = sum(b[2 * j] * powers[j] for j in range(m // 2 + 1))
        return A @ U, V
    A4 = A2 @ A2
    A6 = A4 @ A2
    U = A @ (A6 @ (b[13] * A6 + b[11] * A4 + b[9] * A2) + b[7] * A6 + b[5] * A4 + b[3] * A2 + b[1] * ident)
    V = A6 @ (b[12] * A6 + b[10] * A4 + b[8] * A2) + b[6] * A6 + b[4] * A4 + b[2] * A2 + b[0] * ident
    return U, V


def expm(A):
    """``exp(A)`` for a square (complex) matrix."""
    A = np.asarray(A)
    if A.dtype.kind not in "fc":
        A = A.astype(float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"expm needs a square matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise NonFiniteGeneratorError("matrix has non-finite entries")
    n = A.shape[0]
    if n == 0:
        return A.copy()
    norm = np.linalg.norm(A, 2)
    for m in (3, 5, 7, 9):
        if norm <= _THETA[m]:
            U, V = _pade_uv(A, m)
            return np.linalg.solve(V - U, V + U)
    s = max(0, int(math.ceil(math.log2(norm / _THETA[13]))))
    U, V = _pade_uv(A / 2.0**s, 13)
    X = np.linalg.solve(V - U, V + U)
    for _ in range(s):
        X = X @ X
    return X
