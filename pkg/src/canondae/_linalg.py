"""Small dense linear-algebra helpers used across modules."""

from __future__ import annotations

import numpy as np

from .tolerances import TOL_SING


def sigma_min(M):
    M = np.asarray(M)
    if M.size == 0:
        return np.inf
    return float(np.linalg.svd(M, compute_uv=False)[-1])


def spectral_norm(M):
    M = np.asarray(M)
    if M.size == 0:
        return 0.0
    return float(np.linalg.svd(M, compute_uv=False)[0])


def is_singular(M, scale=None, tol=TOL_SING):
    """True when ``sigma_min(M) <= tol * scale`` (``scale`` defaults to ``||M||_2``).

    An all-zero block with zero scale counts as singular.
    """
    M = np.asarray(M)
    if M.size == 0:
        return False
    s = np.linalg.svd(M, compute_uv=False)
    if scale is None:
        scale = s[0]
    return bool(s[-1] <= tol * scale)


def sqrtm_psd(M):
    """Principal square root of a Hermitian positive semidefinite matrix."""
    M = np.asarray(M, dtype=complex)
    if M.size == 0:
        return M.copy()
    w, U = np.linalg.eigh(0.5 * (M + M.conj().T))
    return (U * np.sqrt(np.clip(w, 0, None))) @ U.conj().T


def null_space(M, scale, tol=TOL_SING):
    """Orthonormal basis (columns) of the numerical kernel of ``M``."""
    M = np.asarray(M, dtype=complex)
    ncols = M.shape[1]
    if ncols == 0:
        return np.zeros((0, 0), dtype=complex)
    if M.shape[0] == 0:
        return np.eye(ncols, dtype=complex)
    _, s, Vh = np.linalg.svd(M)
    s_full = np.zeros(ncols)
    s_full[: s.size] = s
    mask = s_full <= tol * scale
    return Vh.conj().T[:, mask]
