"""Piecewise-constant d-periodic coefficients H(t), W(t).

A period ``[0, d)`` is tiled by half-open layers ``[t_k, t_{k+1})``; on layer
k the coefficients are the constant matrices ``H_k`` and ``W_k``.  Evaluation
at arbitrary ``t`` uses ``t mod d``.

Also home to :class:`PiecewiseExponential`, the function class used for the
weighted norm and for IVP source terms: on each layer a finite sum
``sum_j c_j exp(mu_j t)`` in the global variable ``t``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    InvalidLayerError,
    ShapeMismatchError,
    UnsupportedFunctionClassError,
)
from .tolerances import TOL_STRUCT


def _matrix(a, name):
    a = np.array(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ShapeMismatchError(f"{name} must be square, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise InvalidLayerError(f"{name} has non-finite entries")
    a.flags.writeable = False
    return a


def hermitian_defect(M):
    M = np.asarray(M)
    return float(np.max(np.abs(M - M.conj().T))) if M.size else 0.0


def min_eigenvalue(M):
    """Smallest eigenvalue of the Hermitian part of M, with its eigenvector."""
    M = np.asarray(M, dtype=complex)
    w, U = np.linalg.eigh(0.5 * (M + M.conj().T))
    return float(w[0]), U[:, 0]


def is_positive_definite(M):
    try:
        np.linalg.cholesky(0.5 * (M + np.conj(M).T))
    except np.linalg.LinAlgError:
        return False
    return True


@dataclass(frozen=True)
class Layer:
    """One homogeneous layer.

    With ``strict=True`` (the default) the layer must already satisfy
    ``H* = H`` and ``W* = W > 0``.  ``strict=False`` accepts any finite
    square matrices so that :func:`validate` can report on them.
    """

    thickness: float
    H: np.ndarray
    W: np.ndarray
    strict: bool = field(default=True, repr=False, compare=False)

    def __post_init__(self):
        t = float(self.thickness)
        if not (np.isfinite(t) and t > 0):
            raise InvalidLayerError(f"layer thickness must be positive, got {self.thickness}")
        object.__setattr__(self, "thickness", t)
        H = _matrix(self.H, "H")
        W = _matrix(self.W, "W")
        if H.shape != W.shape:
            raise ShapeMismatchError(f"H and W shapes differ: {H.shape} vs {W.shape}")
        object.__setattr__(self, "H", H)
        object.__setattr__(self, "W", W)
        if self.strict:
            if hermitian_defect(H) > TOL_STRUCT * max(1.0, np.max(np.abs(H))):
                raise InvalidLayerError("H is not Hermitian")
            if hermitian_defect(W) > TOL_STRUCT * max(1.0, np.max(np.abs(W))):
                raise InvalidLayerError("W is not Hermitian")
            if not is_positive_definite(W):
                lam, _ = min_eigenvalue(W)
                raise InvalidLayerError(f"W is not positive definite (min eigenvalue {lam:.3e})")

    @property
    def n(self):
        return self.H.shape[0]


@dataclass(frozen=True)
class LayeredCoefficients:
    """A d-periodic stack of layers.  ``period`` must equal the total thickness."""

    period: float
    layers: tuple

    def __post_init__(self):
        layers = tuple(self.layers)
        if not layers:
            raise InvalidLayerError("at least one layer is required")
        n = layers[0].n
        if any(layer.n != n for layer in layers):
            raise ShapeMismatchError("all layers must share the same dimension")
        d = float(self.period)
        total = float(sum(layer.thickness for layer in layers))
        if not (d > 0 and abs(total - d) <= 1e-12 * d):
            raise InvalidLayerError(f"layer thicknesses sum to {total!r}, period is {d!r}")
        object.__setattr__(self, "period", d)
        object.__setattr__(self, "layers", layers)

    @classmethod
    def from_layers(cls, layers):
        layers = tuple(layers)
        return cls(period=sum(layer.thickness for layer in layers), layers=layers)

    @classmethod
    def single(cls, H, W, period=1.0, strict=True):
        return cls(period=period, layers=(Layer(period, H, W, strict=strict),))

    @property
    def n(self):
        return self.layers[0].n

    @property
    def num_layers(self):
        return len(self.layers)

    @property
    def boundaries(self):
        """Layer boundaries ``0 = t_0 < t_1 < ... < t_K = d``."""
        b = np.concatenate([[0.0], np.cumsum([layer.thickness for layer in self.layers])])
        b[-1] = self.period
        return b

    @property
    def thicknesses(self):
        return np.array([layer.thickness for layer in self.layers])

    @property
    def H_stack(self):
        return np.stack([layer.H for layer in self.layers])

    @property
    def W_stack(self):
        return np.stack([layer.W for layer in self.layers])

    def layer_index(self, t):
        """Index of the layer containing ``t mod d`` (half-open layers)."""
        t = np.asarray(t, dtype=float)
        s = np.mod(t, self.period)
        idx = np.searchsorted(self.boundaries, s, side="right") - 1
        idx = np.clip(idx, 0, self.num_layers - 1)
        return int(idx) if idx.ndim == 0 else idx

    def evaluate(self, t):
        """``(H(t), W(t))`` at a scalar time."""
        layer = self.layers[self.layer_index(t)]
        return layer.H, layer.W

    def map_layers(self, fn, strict=None):
        """New stack with each layer's ``(H, W)`` replaced by ``fn(H, W)``."""
        out = []
        for layer in self.layers:
            H, W = fn(layer.H, layer.W)
            out.append(Layer(layer.thickness, H, W, strict=layer.strict if strict is None else strict))
        return LayeredCoefficients(self.period, tuple(out))


@dataclass
class LayerCheck:
    layer: int
    hermitian_defect_H: float
    hermitian_defect_W: float
    min_eig_W: float
    witness: np.ndarray | None
    passed: bool


@dataclass
class ValidationReport:
    layers: list
    passed: bool

    def to_dict(self):
        from .io import encode

        return {
            "passed": self.passed,
            "layers": [
                {
                    "layer": c.layer,
                    "hermitian_defect_H": c.hermitian_defect_H,
                    "hermitian_defect_W": c.hermitian_defect_W,
                    "min_eig_W": c.min_eig_W,
                    "passed": c.passed,
                    "witness": None if c.witness is None else encode(c.witness),
                }
                for c in self.layers
            ],
        }


def validate(coeffs, tol=TOL_STRUCT):
    """Per-layer Hermiticity defects and smallest eigenvalue of W.

    A layer passes when both defects are within ``tol`` (relative to the
    entry scale) and W admits a Cholesky factorization.  A failing W is
    reported with the eigenvector of its smallest eigenvalue as witness.
    """
    checks = []
    for k, layer in enumerate(coeffs.layers):
        dH = hermitian_defect(layer.H)
        dW = hermitian_defect(layer.W)
        lam, vec = min_eigenvalue(layer.W)
        pd = is_positive_definite(layer.W) and lam > 0
        ok = (
            dH <= tol * max(1.0, np.max(np.abs(layer.H)))
            and dW <= tol * max(1.0, np.max(np.abs(layer.W)))
            and pd
        )
        checks.append(LayerCheck(k, dH, dW, lam, None if pd else vec, ok))
    return ValidationReport(checks, all(c.passed for c in checks))


@dataclass(frozen=True)
class BlockPencil:
    """Blocks of ``V*(H - zW)V`` and ``V*WV`` for every layer.

    Arrays carry a leading layer axis: ``A11`` has shape ``(K, n1, n1)`` etc.
    """

    z: complex
    A11: np.ndarray
    A12: np.ndarray
    A21: np.ndarray
    A22: np.ndarray
    W11: np.ndarray
    W12: np.ndarray
    W21: np.ndarray
    W22: np.ndarray
    coeffs: LayeredCoefficients = field(repr=False)

    @property
    def num_layers(self):
        return self.A11.shape[0]

    @property
    def A(self):
        return self.A11, self.A12, self.A21, self.A22

    @property
    def Wb(self):
        return self.W11, self.W12, self.W21, self.W22

    def full(self, k):
        """Full rotated pencil ``V*(H_k - z W_k)V`` on layer k."""
        return np.block([[self.A11[k], self.A12[k]], [self.A21[k], self.A22[k]]])


def shift_pencil(coeffs, splitting, z):
    """Block partition of the shifted pencil ``H - zW`` under ``splitting``."""
    if coeffs.n != splitting.n:
        raise ShapeMismatchError(f"stack dimension {coeffs.n} != J dimension {splitting.n}")
    z = complex(z)
    H = coeffs.H_stack
    W = coeffs.W_stack
    A = splitting.blocks(H - z * W)
    Wb = splitting.blocks(W)
    return BlockPencil(z, *A, *Wb, coeffs=coeffs)


@dataclass(frozen=True)
class PiecewiseExponential:
    """Vector function equal on layer k to ``sum_j coef_kj * exp(rate_kj * t)``.

    ``terms[k]`` is a tuple of ``(coef, rate)`` pairs with ``coef`` an
    n-vector and ``rate`` complex; an empty tuple means zero on that layer.
    Time ``t`` is the global variable within one period ``[0, d]``.
    """

    terms: tuple

    @classmethod
    def constant(cls, vectors):
        """Per-layer constant vectors."""
        return cls(tuple(((np.asarray(v, dtype=complex), 0j),) for v in vectors))

    @classmethod
    def exponential(cls, coef, rate, num_layers):
        """The same ``coef * exp(rate t)`` on every layer."""
        term = ((np.asarray(coef, dtype=complex), complex(rate)),)
        return cls(tuple(term for _ in range(num_layers)))

    @classmethod
    def zero(cls, num_layers):
        return cls(tuple(() for _ in range(num_layers)))

    def on_layer(self, k):
        return self.terms[k]

    def __call__(self, t, layer):
        """Value at time ``t`` using the terms of ``layer`` (no periodic wrap)."""
        out = None
        for c, mu in self.terms[layer]:
            v = c * np.exp(mu * t)
            out = v if out is None else out + v
        return out


def _check_function(coeffs, f):
    if not isinstance(f, PiecewiseExponential):
        raise UnsupportedFunctionClassError(
            "only per-layer constants and exponentials (PiecewiseExponential) are supported"
        )
    if len(f.terms) != coeffs.num_layers:
        raise ShapeMismatchError("function has a different number of layers than the stack")
    for layer_terms in f.terms:
        for c, _ in layer_terms:
            if np.shape(c) != (coeffs.n,):
                raise ShapeMismatchError(f"coefficient vectors must have length {coeffs.n}")


def _exp_integral(s, a, b):
    """Closed-form ``int_a^b exp(s t) dt``."""
    h = b - a
    if s == 0:
        return h
    x = s * h
    if abs(x) < 1e-8:
        return np.exp(s * a) * h * (1 + x / 2 + x * x / 6)
    return np.exp(s * a) * np.expm1(x) / s


def weighted_inner_period(coeffs, f, g):
    """``int_0^d <W(t) f(t), g(t)> dt`` with ``<x, y> = y* x``, exactly per layer."""
    _check_function(coeffs, f)
    _check_function(coeffs, g)
    b = coeffs.boundaries
    total = 0j
    for k, layer in enumerate(coeffs.layers):
        for cf, mf in f.on_layer(k):
            Wc = layer.W @ cf
            for cg, mg in g.on_layer(k):
                total += np.vdot(cg, Wc) * _exp_integral(mf + np.conj(mg), b[k], b[k + 1])
    return total


def weighted_norm_period(coeffs, f):
    """``int_0^d <W f, f> dt`` over one period (the squared weighted L2 norm)."""
    val = weighted_inner_period(coeffs, f, f)
    return max(float(val.real), 0.0)
