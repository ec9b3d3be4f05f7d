"""Reduction of the index-1 DAE to an ODE on the tangential components.

Writing ``A = V*(H - lam W)V`` and ``V*f = [f1; f2]``, ``V*g = [g1; g2]``, the
DAE ``J f' + (H - lam W) f = W g`` splits on each layer into

    J11 f1' + (A/A22) f1 = (Wg)_1 - A12 A22^-1 (Wg)_2
    f2 = A22^-1 (Wg)_2 - A22^-1 A21 f1

with the Schur complement ``A/A22 = A11 - A12 A22^-1 A21``.  The first line is
a regular ODE for ``f1``; the second recovers ``f2`` algebraically.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._linalg import sigma_min, spectral_norm
from .coefficients import shift_pencil
from .errors import GridMisalignedError, ShapeMismatchError, SingularA22Error, SingularBlockError
from .tolerances import TOL_SING


@dataclass(frozen=True)
class SchurComplement:
    which: int
    value: np.ndarray


def _check_invertible(M, scale, tol, layer, shift, exc=SingularBlockError, what="block"):
    s = sigma_min(M)
    if s <= tol * scale:
        raise exc(f"{what} is singular on layer {layer} (sigma_min={s:.3e})", layer=layer, sigma_min=s, shift=shift)


def schur(blocks, which=22, tol=TOL_SING):
    """Schur complement of a 2x2 block matrix (or a stack of them).

    ``which=22`` gives ``M11 - M12 M22^-1 M21``; ``which=11`` gives
    ``M22 - M21 M11^-1 M12``.  Blocks may carry a leading layer axis.

    Raises
    ------
    SingularBlockError
        If the eliminated block is singular relative to the norm of the full
        matrix; ``sigma_min`` and ``layer`` identify the witness.
    """
    M11, M12, M21, M22 = (np.asarray(b, dtype=complex) for b in blocks)
    stacked = M11.ndim == 3
    if not stacked:
        M11, M12, M21, M22 = (b[None] for b in (M11, M12, M21, M22))
    if which == 22:
        piv, a, b, c = M22, M11, M12, M21
    elif which == 11:
        piv, a, b, c = M11, M22, M21, M12
    else:
        raise ValueError("which must be 11 or 22")
    out = np.empty_like(a)
    for k in range(a.shape[0]):
        full = np.block([[M11[k], M12[k]], [M21[k], M22[k]]])
        _check_invertible(piv[k], spectral_norm(full), tol, k if stacked else None, None)
        out[k] = a[k] - b[k] @ np.linalg.solve(piv[k], c[k]) if piv.shape[-1] else a[k]
    return SchurComplement(which, out if stacked else out[0])


@dataclass(frozen=True)
class ReducedGenerator:
    """Per-layer reduced ODE and recovery maps at spectral parameter ``lam``.

    On layer k, with ``gh = V* g``:

    * ``f1' = A[k] f1 + B[k] gh``  (``A = -J11^-1 S``, ``S = A/A22``)
    * ``f2  = R[k] f1 + G[k] gh``  (``R = -A22^-1 A21``, ``G = A22^-1 [W21 W22]``)
    """

    lam: complex
    S: np.ndarray
    A: np.ndarray
    R: np.ndarray
    G: np.ndarray
    B: np.ndarray
    splitting: object = field(repr=False)
    coeffs: object = field(repr=False)

    @property
    def num_layers(self):
        return self.A.shape[0]

    @property
    def n1(self):
        return self.A.shape[1]


def reduce(pencil, splitting, tol=TOL_SING):
    """Build the :class:`ReducedGenerator` for a shifted pencil.

    Raises
    ------
    SingularA22Error
        If ``A22 = (H - lam W)22`` is singular on some layer; the reduction is
        undefined there.
    """
    if pencil.A11.shape[1] != splitting.n1 or pencil.A22.shape[1] != splitting.n2:
        raise ShapeMismatchError("pencil blocks do not match the splitting")
    K = pencil.num_layers
    n1, n2 = splitting.n1, splitting.n2
    n = n1 + n2
    S = np.empty((K, n1, n1), dtype=complex)
    R = np.empty((K, n2, n1), dtype=complex)
    G = np.empty((K, n2, n), dtype=complex)
    B = np.empty((K, n1, n), dtype=complex)
    for k in range(K):
        A11, A12, A21, A22 = (b[k] for b in pencil.A)
        W11, W12, W21, W22 = (b[k] for b in pencil.Wb)
        W_top = np.hstack([W11, W12])
        W_bot = np.hstack([W21, W22])
        if n2:
            _check_invertible(A22, spectral_norm(pencil.full(k)), tol, k, pencil.z, SingularA22Error, "A22")
            lu = np.linalg.solve(A22, np.hstack([A21, W_bot]))
            R[k] = -lu[:, :n1]
            G[k] = lu[:, n1:]
            S[k] = A11 + A12 @ R[k]
            F = W_top - A12 @ G[k]
        else:
            S[k] = A11
            F = W_top
        B[k] = np.linalg.solve(splitting.J11, F)
    A = -np.linalg.solve(splitting.J11[None], S)
    return ReducedGenerator(pencil.z, S, A, R, G, B, splitting, pencil.coeffs)


def reduce_at(coeffs, splitting, lam, tol=TOL_SING):
    """Shortcut for ``reduce(shift_pencil(coeffs, splitting, lam), splitting)``."""
    return reduce(shift_pencil(coeffs, splitting, lam), splitting, tol)


def recover_normal(gen, t, f1, g=None, layers=None):
    """Normal components ``f2`` from sampled ``f1`` (and source ``g``).

    Parameters
    ----------
    gen : ReducedGenerator
    t : array (m,)
        Sample times.
    f1 : array (m, n1)
        Tangential components at those times.
    g : array (m, n), optional
        Source samples in the original coordinates; zero if omitted.
    layers : int array (m,), optional
        Layer of each sample.  Needed at layer boundaries, where ``f2`` jumps;
        defaults to the half-open convention.

    Returns
    -------
    array (m, n2)
    """
    t = np.atleast_1d(np.asarray(t, dtype=float))
    f1 = np.asarray(f1, dtype=complex).reshape(t.size, -1)
    coeffs = gen.coeffs
    if f1.shape[1] != gen.n1:
        raise ShapeMismatchError(f"f1 samples must have {gen.n1} components")
    if g is not None:
        g = np.asarray(g, dtype=complex)
        if g.shape != (t.size, gen.splitting.n):
            raise GridMisalignedError("g and t have different numbers of samples")
    if layers is None:
        layers = np.atleast_1d(coeffs.layer_index(t))
    else:
        layers = np.atleast_1d(np.asarray(layers, dtype=int))
        if layers.shape != t.shape:
            raise GridMisalignedError("layers and t have different numbers of samples")
        b = coeffs.boundaries
        d = coeffs.period
        s = t - d * np.floor(t / d)
        # a sample exactly at t = d belongs to the last layer of the previous period too
        s_alt = np.where(np.isclose(s, 0.0, atol=1e-12 * d), d, s)
        lo = b[layers] - 1e-12 * d
        hi = b[layers + 1] + 1e-12 * d
        inside = ((s >= lo) & (s <= hi)) | ((s_alt >= lo) & (s_alt <= hi))
        if not np.all(inside):
            raise GridMisalignedError("some samples lie outside the layer they are assigned to")
    out = np.einsum("mij,mj->mi", gen.R[layers], f1)
    if g is not None:
        gh = g @ gen.splitting.V.conj()  # rows of V* g
        out = out + np.einsum("mij,mj->mi", gen.G[layers], gh)
    return out
