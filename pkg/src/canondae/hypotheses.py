"""Local index-1 hypotheses and the self-adjointness certificate.

For piecewise-constant layers every local integrability requirement
(``L1_loc``, ``L2_loc``, ``Linf_loc``) collapses to "this per-layer matrix is
finite", so the substantive content of each check is invertibility of one
block per layer.  Four formulations are available:

``definition``
    The six conditions on the shifted pencil ``A = H - z0 W``: ``A22``
    invertible and the Schur-type products built from it finite.
``simplified``
    The equivalent reduced list (``W22^(1/2) A22^-1 A21`` replaces the
    combination involving ``W22^-1 W21``).
``pencil_equivalent``
    For non-real ``z0``: ``H22 - z0 W22`` invertible, ``W11`` and
    ``H11 - H12 (H22 - z0 W22)^-1 H21`` finite.
``sufficient``
    Shift-free sufficient conditions: H Hermitian, ``W22`` invertible and
    ``H11, W11, H12 W22^-1 H21`` finite.  Passing implies the local index-1
    hypotheses at every non-real shift; the converse is not known.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._linalg import is_singular, sigma_min, spectral_norm, sqrtm_psd
from .coefficients import hermitian_defect, validate
from .errors import InvalidModeError, RealShiftError, ShapeMismatchError
from .tolerances import TOL_SING, TOL_STRUCT

MODES = ("definition", "simplified", "pencil_equivalent", "sufficient")
_ALIASES = {"pencil": "pencil_equivalent", "def": "definition"}


@dataclass
class ConditionResult:
    label: str
    passed: bool
    layer: int
    #: smallest singular value for invertibility checks, max |entry| for finiteness
    witness: float
    witness_matrix: np.ndarray | None = None
    note: str = ""


@dataclass
class Index1Report:
    z0: complex
    mode: str
    conditions: list
    notes: list = field(default_factory=list)

    @property
    def overall(self):
        return all(c.passed for c in self.conditions)

    @property
    def failures(self):
        return [c for c in self.conditions if not c.passed]

    def to_dict(self):
        from .io import encode

        return {
            "z0": [self.z0.real, self.z0.imag],
            "mode": self.mode,
            "overall": self.overall,
            "conditions": [
                {
                    "label": c.label,
                    "passed": c.passed,
                    "layer": c.layer,
                    "witness": _json_float(c.witness),
                    "witness_matrix": None if c.witness_matrix is None else encode(c.witness_matrix),
                    "note": c.note,
                }
                for c in self.conditions
            ],
            "notes": list(self.notes),
        }


def _json_float(x):
    x = float(x)
    return x if np.isfinite(x) else str(x)


def normalize_mode(mode):
    mode = _ALIASES.get(mode, mode)
    if mode not in MODES:
        raise InvalidModeError(f"unknown mode {mode!r}; expected one of {MODES}")
    return mode


def _solve(A, B):
    try:
        return np.linalg.solve(A, B)
    except np.linalg.LinAlgError:
        return np.full((A.shape[0],) + np.shape(B)[1:], np.nan, dtype=complex)


def _finite(label, k, M):
    M = np.asarray(M)
    ok = bool(np.all(np.isfinite(M)))
    w = float(np.max(np.abs(M))) if M.size and ok else (0.0 if ok else np.inf)
    return ConditionResult(label, ok, k, w, None if ok else M)


def _invertible(label, k, M, scale, tol):
    s = sigma_min(M)
    ok = not is_singular(M, scale, tol)
    return ConditionResult(label, ok, k, s, None if ok else np.array(M), "" if ok else "singular")


def _undefined(labels, k, s):
    return [ConditionResult(lab, False, k, s, None, "undefined: block not invertible") for lab in labels]


def _layer_conditions(mode, k, H, W, z0, splitting, tol):
    H11, H12, H21, H22 = splitting.blocks(H)
    W11, W12, W21, W22 = splitting.blocks(W)
    A = H - z0 * W
    A11, A12, A21, A22 = splitting.blocks(A)
    scale = spectral_norm(A)

    if mode == "sufficient":
        out = [
            ConditionResult(
                "H Hermitian",
                hermitian_defect(H) <= TOL_STRUCT * max(1.0, np.max(np.abs(H))),
                k,
                hermitian_defect(H),
            ),
            _invertible("W22 invertible", k, W22, spectral_norm(W), tol),
        ]
        if not out[-1].passed:
            return out + _undefined(["H12 W22^-1 H21 in L1_loc"], k, out[-1].witness)
        return out + [
            _finite("H11 in L1_loc", k, H11),
            _finite("W11 in L1_loc", k, W11),
            _finite("H12 W22^-1 H21 in L1_loc", k, H12 @ _solve(W22, H21)),
        ]

    label22 = "H22 - z0 W22 invertible" if mode == "pencil_equivalent" else "(H - z0 W)22 invertible"
    inv = _invertible(label22, k, A22, scale, tol)
    if mode == "definition":
        dependent = [
            "A12 A22^-1 W22^(1/2) in L2_loc",
            "A/A22 in L1_loc",
            "W22^(1/2) A22^-1 W22^(1/2) in Linf_loc",
            "W22^(1/2) (W22^-1 W21 - A22^-1 A21) in L2_loc",
        ]
        tail = [_finite("W11 in L1_loc", k, W11), _finite("W/W22 in L1_loc", k, W11 - W12 @ _solve(W22, W21))]
        if not inv.passed:
            return [inv] + _undefined(dependent, k, inv.witness) + tail
        R = _solve(A22, A21)
        S = sqrtm_psd(W22)
        Ainv_S = _solve(A22, S)
        return [
            inv,
            _finite(dependent[0], k, A12 @ Ainv_S),
            _finite(dependent[1], k, A11 - A12 @ R),
            _finite(dependent[2], k, S @ Ainv_S),
            _finite(dependent[3], k, S @ (_solve(W22, W21) - R)),
        ] + tail

    if mode == "simplified":
        dependent = [
            "W22^(1/2) A22^-1 W22^(1/2) in Linf_loc",
            "A/A22 in L1_loc",
            "A12 A22^-1 W22^(1/2) in L2_loc",
            "W22^(1/2) A22^-1 A21 in L2_loc",
        ]
        tail = [_finite("W11 in L1_loc", k, W11)]
        if not inv.passed:
            return [inv] + _undefined(dependent, k, inv.witness) + tail
        S = sqrtm_psd(W22)
        Ainv_S = _solve(A22, S)
        R = _solve(A22, A21)
        return [
            inv,
            _finite(dependent[0], k, S @ Ainv_S),
            _finite(dependent[1], k, A11 - A12 @ R),
            _finite(dependent[2], k, A12 @ Ainv_S),
            _finite(dependent[3], k, S @ R),
        ] + tail

    # pencil_equivalent
    tail = [_finite("W11 in L1_loc", k, W11)]
    if not inv.passed:
        return [inv] + _undefined(["H11 - H12 (H22 - z0 W22)^-1 H21 in L1_loc"], k, inv.witness) + tail
    return [inv, _finite("H11 - H12 (H22 - z0 W22)^-1 H21 in L1_loc", k, H11 - H12 @ _solve(A22, H21))] + tail


def check_index1(coeffs, splitting, z0=1j, mode="definition", tol=TOL_SING):
    """Check the local index-1 hypotheses for ``H - z0 W, W`` w.r.t. J.

    Returns an :class:`Index1Report` with one entry per (condition, layer).
    Invertibility uses ``sigma_min <= tol * ||H_k - z0 W_k||_2`` as the
    singularity criterion (``||W_k||_2`` for the ``W22`` check).
    """
    mode = normalize_mode(mode)
    if coeffs.n != splitting.n:
        raise ShapeMismatchError(f"stack dimension {coeffs.n} != J dimension {splitting.n}")
    z0 = complex(z0)
    notes = []
    conditions = []
    if splitting.n2 == 0:
        # invertible J: only integrability of H and W, automatic for finite layers
        for k, layer in enumerate(coeffs.layers):
            conditions.append(_finite("H, W in L1_loc", k, np.hstack([layer.H, layer.W])))
        notes.append("J is invertible; the hypotheses reduce to local integrability of H and W")
        return Index1Report(z0, mode, conditions, notes)
    if mode == "pencil_equivalent" and z0.imag == 0:
        notes.append("the pencil-equivalent conditions are only known to be equivalent for non-real z0")
    for k, layer in enumerate(coeffs.layers):
        conditions.extend(_layer_conditions(mode, k, layer.H, layer.W, z0, splitting, tol))
    return Index1Report(z0, mode, conditions, notes)


@dataclass
class SelfAdjointCertificate:
    """Outcome of the self-adjointness test for the maximal operator.

    This is a report, not a proof: each flag is accompanied in ``licenses``
    by the result that justifies it given the checked hypotheses.
    """

    z0: complex
    hermitian: bool
    weight_ok: bool
    index1: Index1Report
    self_adjoint: bool
    essentially_self_adjoint_minimal: bool
    no_finite_multiplicity_eigenvalues: bool
    licenses: dict
    sufficient_failed_definition_passed: bool = False
    infinite_multiplicity_eigenvalues: list = field(default_factory=list)
    validation: object = None

    @property
    def passed(self):
        return self.self_adjoint and self.essentially_self_adjoint_minimal and self.no_finite_multiplicity_eigenvalues

    def to_dict(self):
        return {
            "z0": [self.z0.real, self.z0.imag],
            "passed": self.passed,
            "hermitian_H": self.hermitian,
            "weight_positive_definite": self.weight_ok,
            "self_adjoint": self.self_adjoint,
            "essentially_self_adjoint_minimal": self.essentially_self_adjoint_minimal,
            "no_finite_multiplicity_eigenvalues": self.no_finite_multiplicity_eigenvalues,
            "licenses": dict(self.licenses),
            "sufficient_failed_definition_passed": self.sufficient_failed_definition_passed,
            "infinite_multiplicity_eigenvalues": [float(x) for x in self.infinite_multiplicity_eigenvalues],
            "index1": self.index1.to_dict(),
            "validation": None if self.validation is None else self.validation.to_dict(),
        }


def certify_self_adjoint(coeffs, splitting, z0=1j, tol=TOL_SING):
    """Decide whether the self-adjointness theorem applies to this stack.

    The shift-free sufficient conditions are tried first; if they fail the
    definition-mode check at ``z0`` decides.  All three conclusion flags are
    true exactly when H is Hermitian, W is positive definite on every layer,
    and the local index-1 hypotheses hold at the non-real shift ``z0``.

    Raises
    ------
    RealShiftError
        If ``z0`` is real; the theorem needs ``z0`` off the real axis.
    """
    z0 = complex(z0)
    if z0.imag == 0:
        raise RealShiftError("the self-adjointness test needs a non-real shift z0")
    validation = validate(coeffs)
    hermitian = all(c.hermitian_defect_H <= TOL_STRUCT * max(1.0, np.max(np.abs(layer.H)))
                    for c, layer in zip(validation.layers, coeffs.layers))
    weight_ok = all(c.witness is None and c.hermitian_defect_W <= TOL_STRUCT * max(1.0, np.max(np.abs(layer.W)))
                    for c, layer in zip(validation.layers, coeffs.layers))

    report = check_index1(coeffs, splitting, z0, "sufficient", tol)
    odd_case = False
    if not report.overall:
        definition = check_index1(coeffs, splitting, z0, "definition", tol)
        odd_case = definition.overall and hermitian and weight_ok
        report = definition

    ok = hermitian and weight_ok and report.overall
    if ok:
        licenses = {
            "self_adjoint": "H Hermitian and local index-1 hypotheses at a non-real shift: the maximal operator is self-adjoint",
            "essentially_self_adjoint_minimal": "same hypotheses: the minimal operator is essentially self-adjoint with closure the maximal operator",
            "no_finite_multiplicity_eigenvalues": "periodicity: translation commutes with the maximal operator and has no eigenvalues, so eigenspaces are trivial or infinite dimensional",
        }
    else:
        reasons = []
        if not hermitian:
            reasons.append("H is not Hermitian")
        if not weight_ok:
            reasons.append("W is not positive definite on every layer")
        if not report.overall:
            reasons.append("local index-1 hypotheses fail at z0")
        licenses = {"none": "; ".join(reasons)}

    eigen = []
    if ok and splitting.n2 > 0:
        from .spectral import certified_point_spectrum

        eigen = [f.lam for f in certified_point_spectrum(coeffs, splitting)]

    return SelfAdjointCertificate(
        z0=z0, hermitian=hermitian, weight_ok=weight_ok, index1=report,
        self_adjoint=ok, essentially_self_adjoint_minimal=ok, no_finite_multiplicity_eigenvalues=ok,
        licenses=licenses, sufficient_failed_definition_passed=odd_case,
        infinite_multiplicity_eigenvalues=eigen, validation=validation,
    )


def dual_pencil_consistency(coeffs, splitting, z0=1j, mode="definition", tol=TOL_SING):
    """Do the checks for ``H - z0 W`` and its adjoint ``H* - conj(z0) W`` agree?"""
    adjoint = coeffs.map_layers(lambda H, W: (H.conj().T, W), strict=False)
    a = check_index1(coeffs, splitting, z0, mode, tol)
    b = check_index1(adjoint, splitting, np.conj(complex(z0)), mode, tol)
    return a.overall == b.overall
