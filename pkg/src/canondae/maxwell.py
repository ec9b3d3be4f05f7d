"""Time-harmonic Maxwell equations in a 1D layered medium as a periodic DAE.

Fields ``f = [E; H]`` depending on the stacking coordinate z, with transverse
wavevector ``(k1, k2)`` and ``lam = omega / c`` (units with c = 1), satisfy

    J f' + H f = lam W f,
    J = -i [[0, -e3x], [e3x, 0]],  H = [[0, kx], [-kx, 0]],  W = [[eps, xi], [xi*, mu]]

where ``e3x`` and ``kx`` are the cross-product matrices of ``e3`` and
``(k1, k2, 0)``.  The normal components ``E3, H3`` are not differentiated;
the permutation splitting puts the tangential ``E1, E2, H1, H2`` first.

Two variants keep J but change the roles of H and W (``omega`` fixed):

* disorder: ``eps = eps0 + lam eps1``, ``mu = mu0 + lam mu1``;
* lossy: ``eps = Re eps + i gamma Im eps`` with ``lam = i gamma``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .canonical import build_splitting
from .coefficients import Layer, LayeredCoefficients, is_positive_definite
from .errors import DegenerateWeightError, InvalidModeError, InvalidTensorError
from .io import decode_matrix
from .spectral import band_scan
from .tolerances import TOL_CIRCLE, TOL_STRUCT

MODES = ("eigenfrequency", "disorder", "lossy")

E3_CROSS = np.array([[0, -1, 0], [1, 0, 0], [0, 0, 0]], dtype=complex)

# columns e1, e2, e4, e5, e3, e6: tangential E1, E2, H1, H2 then normal E3, H3
PERMUTATION = np.eye(6, dtype=complex)[:, [0, 1, 3, 4, 2, 5]]


def cross_matrix(k1, k2):
    """Matrix of ``v -> (k1, k2, 0) x v``."""
    return np.array([[0, 0, k2], [0, 0, -k1], [-k2, k1, 0]], dtype=complex)


def maxwell_J():
    Z = np.zeros((3, 3))
    return -1j * np.block([[Z, -E3_CROSS], [E3_CROSS, Z]])


def maxwell_H(k1, k2):
    K = cross_matrix(k1, k2)
    Z = np.zeros((3, 3))
    return np.block([[Z, K], [-K, Z]])


def _tensor(a, name):
    if a is None:
        return np.zeros((3, 3), dtype=complex)
    a = np.asarray(a, dtype=complex)
    if a.shape != (3, 3) or not np.all(np.isfinite(a)):
        raise InvalidTensorError(f"{name} must be a finite 3x3 matrix")
    return a


def _hermitian_part(a):
    return 0.5 * (a + a.conj().T)


def _anti_hermitian_part(a):
    # "Im" of a matrix: (a - a*) / 2i, Hermitian
    return (a - a.conj().T) / 2j


@dataclass(frozen=True)
class MaterialTensor:
    """Constitutive matrix ``M = [[eps, xi], [xi*, mu]]``; ``zeta = xi*``."""

    eps: np.ndarray
    mu: np.ndarray
    xi: np.ndarray = None

    def __post_init__(self):
        object.__setattr__(self, "eps", _tensor(self.eps, "eps"))
        object.__setattr__(self, "mu", _tensor(self.mu, "mu"))
        object.__setattr__(self, "xi", _tensor(self.xi, "xi"))

    @property
    def zeta(self):
        return self.xi.conj().T

    @property
    def M(self):
        return np.block([[self.eps, self.xi], [self.zeta, self.mu]])

    def check(self, tol=TOL_STRUCT):
        M = self.M
        scale = max(1.0, np.max(np.abs(M)))
        if np.max(np.abs(M - M.conj().T)) > tol * scale:
            raise InvalidTensorError("constitutive matrix is not Hermitian")
        if not is_positive_definite(M):
            raise InvalidTensorError("constitutive matrix is not positive definite")

    @classmethod
    def isotropic(cls, eps=1.0, mu=1.0):
        return cls(eps * np.eye(3), mu * np.eye(3))


@dataclass(frozen=True)
class MaxwellLayer:
    """One layer.  ``eps``/``mu`` are eps0/mu0 in disorder mode and the complex
    permittivity/permeability in lossy mode; ``eps1``/``mu1`` are only used in
    disorder mode."""

    thickness: float
    material: MaterialTensor
    eps1: np.ndarray = None
    mu1: np.ndarray = None


@dataclass(frozen=True)
class MaxwellProblem:
    layers: tuple
    k1: float = 0.0
    k2: float = 0.0
    mode: str = "eigenfrequency"
    omega: float = 1.0
    meta: dict = field(default_factory=dict)

    @property
    def period(self):
        return float(sum(layer.thickness for layer in self.layers))

    @property
    def k_perp(self):
        return float(np.hypot(self.k1, self.k2))


def _layer_HW(problem, layer, K):
    mat = layer.material
    mode = problem.mode
    w = problem.omega
    Z = np.zeros((3, 3))
    if mode == "eigenfrequency":
        mat.check()
        return K, mat.M
    if mode == "disorder":
        e1, m1 = _tensor(layer.eps1, "eps1"), _tensor(layer.mu1, "mu1")
        for name, a in (("eps0", mat.eps), ("mu0", mat.mu), ("eps1", e1), ("mu1", m1)):
            if np.max(np.abs(a - a.conj().T)) > TOL_STRUCT * max(1.0, np.max(np.abs(a))):
                raise InvalidTensorError(f"{name} must be Hermitian in disorder mode")
        H = K - w * np.block([[mat.eps, Z], [Z, mat.mu]])
        W = w * np.block([[e1, Z], [Z, m1]])
    elif mode == "lossy":
        H = K - w * np.block([[_hermitian_part(mat.eps), Z], [Z, _hermitian_part(mat.mu)]])
        W = w * np.block([[_anti_hermitian_part(mat.eps), Z], [Z, _anti_hermitian_part(mat.mu)]])
    else:
        raise InvalidModeError(f"unknown Maxwell mode {mode!r}; expected one of {MODES}")
    if not is_positive_definite(W):
        raise DegenerateWeightError(
            f"weight is not positive definite in {mode} mode; every layer needs a positive definite weight"
        )
    return H, W


def assemble(problem):
    """Build ``(J, coeffs, splitting)`` for a :class:`MaxwellProblem`.

    Raises
    ------
    InvalidTensorError
        If a constitutive matrix is not Hermitian positive definite.
    DegenerateWeightError
        If the weight of a disorder/lossy layer is not positive definite.
    """
    if problem.mode not in MODES:
        raise InvalidModeError(f"unknown Maxwell mode {problem.mode!r}; expected one of {MODES}")
    if not problem.layers:
        raise InvalidTensorError("at least one layer is needed")
    J = maxwell_J()
    K = maxwell_H(problem.k1, problem.k2)
    layers = []
    for layer in problem.layers:
        H, W = _layer_HW(problem, layer, K)
        layers.append(Layer(layer.thickness, H, W))
    coeffs = LayeredCoefficients.from_layers(layers)
    splitting = build_splitting(J, V=PERMUTATION)
    return J, coeffs, splitting


def band_semantics(mode):
    if mode == "lossy":
        return "undefined (non-real spectral parameter)"
    if mode == "disorder":
        return "propagating multiplier count vs disorder strength"
    return "propagating multiplier count"


def band_structure(problem, lmin, lmax, N, tol_circle=TOL_CIRCLE, threads=None):
    """Band scan in ``lam = omega / c`` plus a dispersion table.

    Table columns: ``lam, count, k_1..k_4, |mu|_1..|mu|_4, k_perp, above_light_line``
    where ``above_light_line`` is ``lam >= |k_perp|`` (the vacuum light cone).
    """
    _, coeffs, splitting = assemble(problem)
    scan = band_scan(coeffs, splitting, lmin, lmax, N, tol_circle=tol_circle, threads=threads)
    scan.semantics = band_semantics(problem.mode)
    kp = problem.k_perp
    table = [row + [kp, int(row[0] >= kp)] for row in scan.rows()]
    return scan, table


def table_header(n1=4):
    return (
        ["lambda", "count"]
        + [f"k{i + 1}" for i in range(n1)]
        + [f"abs_mu{i + 1}" for i in range(n1)]
        + ["k_perp", "above_light_line"]
    )


def problem_from_dict(data, k1=None, k2=None, omega=None, mode=None):
    """Parse the materials JSON: ``{"layers": [{"thickness", "eps", "mu", "xi"}], "mode"}``.

    Optional keys: ``period`` (checked against the thickness sum), ``k1``,
    ``k2``, ``omega`` and per-layer ``eps1``, ``mu1`` for disorder mode.
    Scalars are accepted for ``eps``/``mu`` as isotropic shorthands.
    """

    def tens(x, name):
        if x is None:
            return None
        if isinstance(x, (int, float)):
            return x * np.eye(3)
        if isinstance(x, list) and len(x) == 2 and all(isinstance(v, (int, float)) for v in x):
            return complex(*x) * np.eye(3)
        return decode_matrix(x, name)

    try:
        raw_layers = data["layers"]
    except (KeyError, TypeError) as exc:
        raise InvalidTensorError("materials need a 'layers' list") from exc
    layers = []
    for i, item in enumerate(raw_layers):
        mat = MaterialTensor(tens(item.get("eps", 1.0), "eps"), tens(item.get("mu", 1.0), "mu"), tens(item.get("xi"), "xi"))
        layers.append(
            MaxwellLayer(float(item["thickness"]), mat, tens(item.get("eps1"), "eps1"), tens(item.get("mu1"), "mu1"))
        )
    problem = MaxwellProblem(
        tuple(layers),
        float(data.get("k1", 0.0) if k1 is None else k1),
        float(data.get("k2", 0.0) if k2 is None else k2),
        data.get("mode", "eigenfrequency") if mode is None else mode,
        float(data.get("omega", 1.0) if omega is None else omega),
    )
    if "period" in data and abs(problem.period - float(data["period"])) > 1e-12 * max(1.0, problem.period):
        raise InvalidTensorError("layer thicknesses do not add up to the period")
    return problem


def quarter_wave_stack(na=1.0, nb=2.0, da=2 / 3, db=1 / 3, k1=0.0, k2=0.0):
    """Two isotropic dielectric layers with ``eps = n^2``, ``mu = 1``."""
    return MaxwellProblem(
        (
            MaxwellLayer(da, MaterialTensor.isotropic(na**2)),
            MaxwellLayer(db, MaterialTensor.isotropic(nb**2)),
        ),
        k1,
        k2,
    )


def vacuum(d=1.0, k1=0.0, k2=0.0):
    return MaxwellProblem((MaxwellLayer(d, MaterialTensor.isotropic()),), k1, k2)
