"""JSON encoding of complex matrices and stack files.

Complex numbers are written as ``[re, im]`` pairs; matrices as row-major
nested lists of such pairs.  A stack file looks like::

    {"period": 1.0, "n": 2, "J": [[...]],
     "layers": [{"thickness": 1.0, "H": [[...]], "W": [[...]]}]}

``J`` is optional in the schema but required by every command that needs
the canonical splitting.
"""

from __future__ import annotations

import json

import numpy as np

from .coefficients import Layer, LayeredCoefficients, PiecewiseExponential
from .errors import CanonDAEError, ShapeMismatchError


def encode(a):
    """Nested ``[re, im]`` lists for a complex scalar or array."""
    a = np.asarray(a, dtype=complex)
    if a.ndim == 0:
        return [float(a.real), float(a.imag)]
    return [encode(x) for x in a]


def _is_pair(x):
    return (
        isinstance(x, (list, tuple))
        and len(x) == 2
        and all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in x)
    )


def decode(obj):
    """Inverse of :func:`encode`; plain real numbers are accepted too."""
    if isinstance(obj, (int, float)) and not isinstance(obj, bool):
        return complex(obj)
    if _is_pair(obj) and not _nested_pairs(obj):
        return complex(obj[0], obj[1])
    if isinstance(obj, (list, tuple)):
        return np.array([decode(x) for x in obj], dtype=complex)
    raise CanonDAEError(f"cannot decode complex value from {obj!r}")


def _nested_pairs(obj):
    # [[re, im], [re, im]] is a length-2 vector, not a scalar
    return all(isinstance(v, (list, tuple)) for v in obj)


def decode_matrix(obj, name="matrix"):
    m = np.asarray(decode(obj), dtype=complex)
    if m.ndim != 2:
        raise ShapeMismatchError(f"{name} must be a 2-D array, got {m.ndim}-D")
    return m


def decode_vector(obj, name="vector"):
    v = np.asarray(decode(obj), dtype=complex)
    if v.ndim != 1:
        raise ShapeMismatchError(f"{name} must be a 1-D array, got {v.ndim}-D")
    return v


def stack_from_dict(data, strict=False):
    """Build ``(coeffs, J or None)`` from a stack dictionary."""
    try:
        layers = [
            Layer(
                float(entry["thickness"]),
                decode_matrix(entry["H"], "H"),
                decode_matrix(entry["W"], "W"),
                strict=strict,
            )
            for entry in data["layers"]
        ]
        period = float(data.get("period", sum(layer.thickness for layer in layers)))
    except KeyError as exc:
        raise CanonDAEError(f"stack is missing key {exc}") from None
    coeffs = LayeredCoefficients(period, tuple(layers))
    if "n" in data and int(data["n"]) != coeffs.n:
        raise ShapeMismatchError(f"declared n={data['n']} but matrices are {coeffs.n}x{coeffs.n}")
    J = decode_matrix(data["J"], "J") if "J" in data else None
    return coeffs, J


def stack_to_dict(coeffs, J=None):
    data = {"period": coeffs.period, "n": coeffs.n}
    if J is not None:
        data["J"] = encode(J)
    data["layers"] = [
        {"thickness": layer.thickness, "H": encode(layer.H), "W": encode(layer.W)}
        for layer in coeffs.layers
    ]
    return data


def load_stack(path, strict=False):
    with open(path) as fh:
        return stack_from_dict(json.load(fh), strict=strict)


def source_from_dict(data, num_layers):
    """Source ``g`` from ``{"layers": [[{"coef": [...], "rate": [re, im]}, ...], ...]}``."""
    layers = data["layers"]
    if len(layers) != num_layers:
        raise ShapeMismatchError(f"source has {len(layers)} layers, stack has {num_layers}")
    terms = tuple(
        tuple((decode_vector(t["coef"], "coef"), complex(decode(t.get("rate", 0.0)))) for t in layer)
        for layer in layers
    )
    return PiecewiseExponential(terms)
