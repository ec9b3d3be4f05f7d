"""Floquet multipliers, band scans and infinite-multiplicity eigenvalues.

A multiplier ``mu`` of the monodromy ``M(lam)`` belongs to a Bloch solution
``f(t + d) = mu f(t)``.  Multipliers on the unit circle correspond to
propagating (bounded) solutions; the scan counts them and locates the values
of ``lam`` where the count changes.

The band-scan count is the number of on-circle multipliers of the reduced
ODE.  Relating it to the multiplicity of the spectrum of the operator is
standard for regular ODEs; for the DAE it is a heuristic label, not a
theorem.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from ._linalg import null_space, spectral_norm
from .errors import EigensolverError, RangeInvalidError, SingularA22Error
from .propagation import monodromy
from .reduction import reduce_at
from .tolerances import TOL_CIRCLE, TOL_SING


@dataclass(frozen=True)
class FloquetSet:
    lam: complex
    period: float
    multipliers: np.ndarray
    on_circle: np.ndarray
    wavenumbers: np.ndarray  # nan for off-circle multipliers

    @property
    def count(self):
        return int(self.on_circle.sum())


def _principal_wavenumber(mu, d):
    ang = np.angle(mu)
    ang = np.where(ang <= -np.pi, ang + 2 * np.pi, ang)
    return ang / d


def floquet(mono, tol_circle=TOL_CIRCLE):
    """Multipliers of a :class:`Monodromy`, classified against the unit circle.

    Multipliers are sorted by wavenumber angle, then modulus, so the order is
    reproducible.  ``k = arg(mu) / d`` uses the branch ``(-pi/d, pi/d]``.
    """
    M = np.asarray(mono.M)
    if not np.all(np.isfinite(M)):
        raise EigensolverError("monodromy has non-finite entries")
    try:
        mu = np.linalg.eigvals(M)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise EigensolverError(str(exc)) from exc
    ang = _principal_wavenumber(mu, 1.0)
    order = np.lexsort((np.round(np.abs(mu), 12), np.round(ang, 12)))
    mu = mu[order]
    on = np.abs(np.abs(mu) - 1.0) <= tol_circle
    k = np.where(on, _principal_wavenumber(mu, mono.period), np.nan)
    return FloquetSet(mono.lam, mono.period, mu, on, k)


def floquet_at(coeffs, splitting, lam, tol_circle=TOL_CIRCLE):
    return floquet(monodromy(reduce_at(coeffs, splitting, lam)), tol_circle)


@dataclass(frozen=True)
class PointSpectrumFinding:
    """Outcome of the per-layer kernel test at one ``lam``.

    ``certified`` means some layer admits ``f2 != 0`` with
    ``(H - lam W) V2 f2 = 0``; then ``V2 f2`` times the indicator of any
    sub-interval of that layer is an eigenfunction, so ``lam`` has infinite
    multiplicity.  ``certified=False`` means no certificate was found, which
    does not prove ``lam`` is not an eigenvalue.
    """

    lam: complex
    kernel_dims: tuple
    certified: bool
    layer: int | None = None
    witness_f2: np.ndarray | None = None
    witness: np.ndarray | None = None  # V [0; f2] in original coordinates
    residual: float = 0.0
    scale: float = 0.0

    @property
    def verdict(self):
        return "infinite-multiplicity eigenvalue" if self.certified else "none found"

    def to_dict(self):
        from .io import encode

        return {
            "lambda": [float(np.real(self.lam)), float(np.imag(self.lam))],
            "kernel_dims": list(self.kernel_dims),
            "certified": self.certified,
            "verdict": self.verdict,
            "layer": self.layer,
            "witness_f2": None if self.witness_f2 is None else encode(self.witness_f2),
            "witness": None if self.witness is None else encode(self.witness),
            "residual": self.residual,
            "scale": self.scale,
        }


def point_spectrum(coeffs, splitting, lam, tol=TOL_SING):
    """Certify ``lam`` as an infinite-multiplicity eigenvalue via per-layer kernels."""
    n2 = splitting.n2
    dims = []
    best = None
    for k, layer in enumerate(coeffs.layers):
        P = layer.H - lam * layer.W
        if n2 == 0:
            dims.append(0)
            continue
        stacked = P @ splitting.V2  # same kernel as V* P V2 = [A12; A22]
        scale = spectral_norm(P)
        N = null_space(stacked, scale, tol)
        dims.append(N.shape[1])
        if N.shape[1] and best is None:
            f2 = N[:, 0]
            w = splitting.V2 @ f2
            best = (k, f2, w, float(np.linalg.norm(P @ w)), scale)
    if best is None:
        return PointSpectrumFinding(lam, tuple(dims), False)
    k, f2, w, res, scale = best
    return PointSpectrumFinding(lam, tuple(dims), True, k, f2, w, res, scale)


def _candidate_lambdas(coeffs, splitting):
    """Values where ``(H - lam W)22`` is singular on some layer."""
    out = []
    if splitting.n2 == 0:
        return out
    for layer in coeffs.layers:
        _, _, _, H22 = splitting.blocks(layer.H)
        _, _, _, W22 = splitting.blocks(layer.W)
        try:
            w = scipy.linalg.eigh(H22, W22, eigvals_only=True)
        except (np.linalg.LinAlgError, ValueError):
            w = scipy.linalg.eigvals(H22, W22)
            w = w[np.isfinite(w)]
        out.extend(np.asarray(w).tolist())
    return out


def singular_reduction_points(coeffs, splitting, lmin=-np.inf, lmax=np.inf):
    """Sorted real ``lam`` in ``[lmin, lmax]`` where the reduction breaks down."""
    lams = sorted({round(float(np.real(x)), 13) for x in _candidate_lambdas(coeffs, splitting) if abs(np.imag(x)) < 1e-12})
    return [x for x in lams if lmin <= x <= lmax]


def certified_point_spectrum(coeffs, splitting, tol=TOL_SING):
    """All ``lam`` certified by :func:`point_spectrum`.

    A certificate needs ``(H - lam W)22`` singular on a layer, so the
    candidates are the generalized eigenvalues of ``(H22, W22)`` per layer;
    each is then tested on the full stacked block.
    """
    found = []
    for lam in sorted(_candidate_lambdas(coeffs, splitting), key=lambda x: (np.real(x), np.imag(x))):
        if any(abs(lam - f.lam) <= 1e-9 * max(1.0, abs(lam)) for f in found):
            continue
        finding = point_spectrum(coeffs, splitting, lam, tol)
        if finding.certified:
            found.append(finding)
    return found


def eigenfunction_translates(coeffs, finding, count=3):
    """Disjointly supported translates of a certified witness.

    Returns ``(supports, gram)``: ``supports[j] = (start, end, vector)`` is the
    eigenfunction equal to ``vector`` on ``[start, end)`` (layer ``finding.layer``
    in period ``j``) and zero elsewhere; ``gram`` is their weighted Gram
    matrix, diagonal positive definite when the translates are independent.
    """
    if not finding.certified:
        raise ValueError("finding carries no certificate")
    k = finding.layer
    b = coeffs.boundaries
    d = coeffs.period
    W = coeffs.layers[k].W
    supports = [(j * d + b[k], j * d + b[k + 1], finding.witness) for j in range(count)]
    gram = np.zeros((count, count), dtype=complex)
    for i, (ai, bi, fi) in enumerate(supports):
        for j, (aj, bj, fj) in enumerate(supports):
            overlap = max(0.0, min(bi, bj) - max(ai, aj))
            gram[i, j] = overlap * np.vdot(fj, W @ fi)
    return supports, gram


def kernel_dimension_one_period(coeffs, splitting, lam):
    """Dimension of the solution space of the homogeneous DAE on one period.

    Every solution is fixed by ``f1(0)``, and the monodromy is invertible, so
    the dimension is ``n1 = rank J``.
    """
    mono = monodromy(reduce_at(coeffs, splitting, lam))
    if splitting.n1 and not np.isfinite(mono.cond):
        raise EigensolverError("monodromy is not invertible")
    return splitting.n1


@dataclass(frozen=True)
class BandEdge:
    lam: float
    count_below: int
    count_above: int


@dataclass
class BandScan:
    """Uniform-grid scan of the on-circle multiplier count.

    ``counts[i] = -1`` marks grid points where the reduction is singular.
    """

    lams: np.ndarray
    counts: np.ndarray
    multipliers: np.ndarray
    wavenumbers: np.ndarray
    edges: list
    flagged: list
    findings: list = field(default_factory=list)
    period: float = 1.0
    semantics: str = "propagating multiplier count"

    def gaps(self):
        """Intervals between consecutive edges where the count is zero."""
        out = []
        pts = [self.lams[0]] + [e.lam for e in self.edges] + [self.lams[-1]]
        for a, b in zip(pts[:-1], pts[1:]):
            inside = (self.lams > a) & (self.lams < b) & (self.counts >= 0)
            if inside.any() and np.all(self.counts[inside] == 0):
                out.append((a, b))
        return out

    def rows(self):
        """CSV rows ``(lam, count, k_1..k_n1, |mu|_1..|mu|_n1)``; blanks for off-circle k."""
        for lam, c, mu, k in zip(self.lams, self.counts, self.multipliers, self.wavenumbers):
            ks = ["" if not np.isfinite(x) else x for x in k]
            yield [lam, int(c), *ks, *np.abs(mu)]


def _count(coeffs, splitting, lam, tol_circle):
    try:
        fs = floquet_at(coeffs, splitting, lam, tol_circle)
    except SingularA22Error:
        return None
    return fs


def band_scan(coeffs, splitting, lmin, lmax, N, tol_circle=TOL_CIRCLE, threads=None, edge_tol=1e-10):
    """Count propagating multipliers on a uniform real grid and bisect edges.

    Edges are refined until the bracket is below ``edge_tol * (lmax - lmin)``.
    Points where ``(H - lam W)22`` is singular are flagged and examined with
    :func:`point_spectrum`.

    Raises
    ------
    RangeInvalidError
        If the range is not finite and increasing or ``N < 2``.
    """
    try:
        lmin, lmax, N = float(lmin), float(lmax), int(N)
    except (TypeError, ValueError) as exc:
        raise RangeInvalidError(str(exc)) from exc
    if not (np.isfinite(lmin) and np.isfinite(lmax) and lmin < lmax and N >= 2):
        raise RangeInvalidError(f"need finite lmin < lmax and N >= 2, got ({lmin}, {lmax}, {N})")
    lams = np.linspace(lmin, lmax, N)
    n1 = splitting.n1
    workers = threads or min(8, os.cpu_count() or 1)

    def work(lam):
        return _count(coeffs, splitting, lam, tol_circle)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            sets = list(pool.map(work, lams))
    else:
        sets = [work(x) for x in lams]

    counts = np.array([-1 if s is None else s.count for s in sets])
    mult = np.full((N, n1), np.nan + 0j)
    waves = np.full((N, n1), np.nan)
    for i, s in enumerate(sets):
        if s is not None:
            mult[i] = s.multipliers
            waves[i] = s.wavenumbers

    flagged = sorted(set(singular_reduction_points(coeffs, splitting, lmin, lmax)) | {float(x) for x in lams[counts < 0]})
    width = edge_tol * (lmax - lmin)

    def count_or_none(x):
        s = work(x)
        return None if s is None else s.count

    edges = []
    for i in range(N - 1):
        c0, c1 = counts[i], counts[i + 1]
        if c0 < 0 or c1 < 0 or c0 == c1:
            continue
        lo, hi = lams[i], lams[i + 1]
        if any(lo < f < hi for f in flagged):
            continue  # count change explained by a singular point
        while hi - lo > width:
            mid = 0.5 * (lo + hi)
            c = count_or_none(mid)
            if c is None:
                break
            if c == c0:
                lo = mid
            else:
                hi = mid
        edges.append(BandEdge(0.5 * (lo + hi), int(c0), int(c1)))

    findings = [point_spectrum(coeffs, splitting, x) for x in flagged]
    return BandScan(lams, counts, mult, waves, edges, flagged, findings, coeffs.period)
