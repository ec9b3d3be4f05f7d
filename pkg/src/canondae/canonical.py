"""Structural splitting of a constant skew-Hermitian matrix J.

Given ``J* = -J`` we build a unitary ``V = [V1 | V2]`` whose first ``n1``
columns span ``ran J`` and whose last ``n2`` columns span ``ker J``.  Then

    V* J V = [[J11, 0], [0, 0]],   det J11 != 0,

and the Moore-Penrose pseudoinverse of J is ``V1 J11^{-1} V1*``.  Every other
module works in these rotated coordinates: ``f1 = V1* f`` are the components
that get differentiated, ``f2 = V2* f`` are determined algebraically.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    InvalidSplittingError,
    NonSkewHermitianError,
    NotUnitaryError,
    ShapeMismatchError,
    ZeroMatrixError,
)
from .tolerances import TOL_STRUCT


def _frozen(a):
    a = np.array(a, dtype=complex)
    a.flags.writeable = False
    return a


def as_skew_hermitian(J, tol=TOL_STRUCT):
    """Validate ``J`` and return it as a complex square array.

    Raises
    ------
    ShapeMismatchError
        If ``J`` is not square.
    NonSkewHermitianError
        If ``max |J* + J| > tol``.
    ZeroMatrixError
        If every entry of ``J`` has modulus ``<= tol``.
    """
    J = np.asarray(J, dtype=complex)
    if J.ndim != 2 or J.shape[0] != J.shape[1] or J.shape[0] == 0:
        raise ShapeMismatchError(f"J must be a non-empty square matrix, got shape {J.shape}")
    defect = np.max(np.abs(J + J.conj().T))
    if defect > tol:
        raise NonSkewHermitianError(f"J is not skew-Hermitian: max|J* + J| = {defect:.3e} > {tol:.1e}")
    if np.max(np.abs(J)) <= tol:
        raise ZeroMatrixError("J must be nonzero")
    return J


def numerical_rank(J, tol=TOL_STRUCT):
    """Rank of ``J`` with singular values below ``n * sigma_max * tol`` treated as zero."""
    s = np.linalg.svd(np.asarray(J, dtype=complex), compute_uv=False)
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.sum(s > J.shape[0] * s[0] * tol))


def _normalize_phase(v, rel=1e-8):
    # Make the first significant entry real and positive so the basis is
    # reproducible regardless of the phase LAPACK happens to return.
    idx = int(np.argmax(np.abs(v) > rel * np.max(np.abs(v))))
    return v * (np.conj(v[idx]) / abs(v[idx])), idx


@dataclass(frozen=True)
class CanonicalSplitting:
    """Unitary block splitting of a skew-Hermitian J.

    Attributes
    ----------
    J : ndarray (n, n)
    V : ndarray (n, n)
        Unitary; columns ``[:n1]`` span ran J, columns ``[n1:]`` span ker J.
    n1, n2 : int
        ``rank J`` and ``n - rank J``.
    J11 : ndarray (n1, n1)
        Invertible skew-Hermitian block of ``V* J V``.
    Jplus : ndarray (n, n)
        Moore-Penrose pseudoinverse of J.
    P : ndarray (n, n)
        Orthogonal projection onto ran J, ``P = J+ J = J J+``.
    """

    J: np.ndarray
    V: np.ndarray
    n1: int
    n2: int
    J11: np.ndarray
    Jplus: np.ndarray
    P: np.ndarray

    @property
    def n(self):
        return self.n1 + self.n2

    @property
    def V1(self):
        return self.V[:, : self.n1]

    @property
    def V2(self):
        return self.V[:, self.n1 :]

    @property
    def J11_inv(self):
        return np.linalg.inv(self.J11)

    def rotate(self, M):
        """Return ``V* M V`` for a single matrix or a stack ``(..., n, n)``."""
        M = np.asarray(M, dtype=complex)
        return self.V.conj().T @ M @ self.V

    def blocks(self, M):
        """Blocks ``(M11, M12, M21, M22)`` of ``V* M V`` conformal to the splitting."""
        R = self.rotate(M)
        k = self.n1
        return R[..., :k, :k], R[..., :k, k:], R[..., k:, :k], R[..., k:, k:]

    def with_basis_change(self, Q1, Q2):
        """Another admissible splitting ``V' = [V1 Q1 | V2 Q2]`` with unitary Q1, Q2."""
        Q1 = np.asarray(Q1, dtype=complex)
        Q2 = np.asarray(Q2, dtype=complex).reshape(self.n2, self.n2)
        V = np.hstack([self.V1 @ Q1, self.V2 @ Q2])
        return build_splitting(self.J, V=V)


def build_splitting(J, V=None, tol=TOL_STRUCT):
    """Compute the canonical splitting of a skew-Hermitian ``J``.

    Without ``V`` the range basis comes from the eigenvectors of the Hermitian
    matrix ``iJ`` with nonzero eigenvalue, ordered by decreasing modulus (ties
    by first significant component), and the kernel basis from the remaining
    eigenvectors.  An explicit unitary ``V`` may be supplied instead; it is
    checked for unitarity and for block-diagonalizing J.

    If J is invertible, ``V = I`` and ``J11 = J``.
    """
    J = as_skew_hermitian(J, tol)
    n = J.shape[0]
    n1 = numerical_rank(J, tol)

    if V is not None:
        V = np.asarray(V, dtype=complex)
        if V.shape != (n, n):
            raise ShapeMismatchError(f"V must have shape {(n, n)}, got {V.shape}")
        defect = np.max(np.abs(V.conj().T @ V - np.eye(n)))
        if defect > tol * max(1, n):
            raise NotUnitaryError(f"V is not unitary: max|V*V - I| = {defect:.3e}")
        R = V.conj().T @ J @ V
        off = R.copy()
        off[:n1, :n1] = 0
        scale = max(1.0, np.max(np.abs(J)))
        if np.max(np.abs(off)) > 1e-10 * scale:
            raise InvalidSplittingError("V* J V is not block diagonal with zero kernel blocks")
    elif n1 == n:
        V = np.eye(n, dtype=complex)
    else:
        w, U = np.linalg.eigh(1j * J)
        cut = n * np.max(np.abs(w)) * tol
        cols = []
        for j in range(n):
            v, idx = _normalize_phase(U[:, j])
            cols.append((abs(w[j]) > cut, abs(w[j]), idx, v))
        rng = [c for c in cols if c[0]]
        ker = [c for c in cols if not c[0]]
        # exact ties in |w| (e.g. +-1 pairs) must not depend on round-off
        rng.sort(key=lambda c: (-np.round(c[1] / max(np.max(np.abs(w)), 1e-300), 10), c[2]))
        ker.sort(key=lambda c: c[2])
        V = np.column_stack([c[3] for c in rng + ker])

    R = V.conj().T @ J @ V
    J11 = R[:n1, :n1]
    V1 = V[:, :n1]
    Jplus = V1 @ np.linalg.solve(J11, V1.conj().T)
    P = V1 @ V1.conj().T
    return CanonicalSplitting(
        J=_frozen(J), V=_frozen(V), n1=n1, n2=n - n1,
        J11=_frozen(J11), Jplus=_frozen(Jplus), P=_frozen(P),
    )


def pseudoinverse(J, tol=TOL_STRUCT):
    """Moore-Penrose pseudoinverse of a skew-Hermitian matrix via its splitting."""
    return np.array(build_splitting(J, tol=tol).Jplus)


def project_tangential(splitting, f):
    """Split ``f`` into tangential ``f1 = V1* f`` and normal ``f2 = V2* f`` parts.

    ``f`` may be a vector of length n or an array whose first axis has length n
    (e.g. columns of a fundamental matrix).
    """
    f = np.asarray(f, dtype=complex)
    if f.shape[:1] != (splitting.n,):
        raise ShapeMismatchError(f"expected leading dimension {splitting.n}, got shape {f.shape}")
    g = splitting.V.conj().T @ f
    return g[: splitting.n1], g[splitting.n1 :]


def assemble_from_blocks(splitting, f1, f2):
    """Inverse of :func:`project_tangential`: ``V [f1; f2]``."""
    f1 = np.asarray(f1, dtype=complex)
    f2 = np.asarray(f2, dtype=complex)
    if f1.shape[:1] != (splitting.n1,) or f2.shape[:1] != (splitting.n2,):
        raise ShapeMismatchError("block shapes do not match the splitting")
    return splitting.V @ np.concatenate([f1, f2], axis=0)
