"""Exact per-layer propagation of the reduced ODE.

On a layer the reduced generator is constant, so the transfer matrix over a
sub-interval of length ``dt`` is ``expm(dt * A_k)``.  Products of these give
transfer matrices over arbitrary intervals and the monodromy over one period.
Source terms that are sums of exponentials are integrated exactly with an
augmented matrix exponential.

The RK4 integrator at the bottom is a verification oracle; production code
never calls it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .canonical import project_tangential
from .coefficients import PiecewiseExponential
from .errors import (
    InitialNotInRangeError,
    NonFiniteGeneratorError,
    ShapeMismatchError,
    StepUnderflowError,
    UnsupportedSourceError,
)
from .expm import expm
from .reduction import recover_normal, reduce_at


@dataclass(frozen=True)
class TransferMatrix:
    lam: complex
    interval: tuple
    Phi: np.ndarray


@dataclass(frozen=True)
class Monodromy:
    lam: complex
    M: np.ndarray
    cond: float
    period: float


def layer_transfer(gen, k, dt):
    """``expm(dt * A_k)``, the transfer matrix across ``dt`` inside layer ``k``."""
    thickness = gen.coeffs.layers[k].thickness
    if not (0 < dt <= thickness * (1 + 1e-12)):
        raise ValueError(f"dt must lie in (0, {thickness}], got {dt}")
    A = gen.A[k]
    if not np.all(np.isfinite(A)):
        raise NonFiniteGeneratorError(f"generator on layer {k} is not finite")
    return expm(dt * A)


def segments(coeffs, t0, t1):
    """Split ``[t0, t1]`` into ``(layer, start, end, period_index)`` pieces."""
    if t1 < t0:
        raise ValueError("t1 must not precede t0")
    d = coeffs.period
    b = coeffs.boundaries[:-1]
    m0, m1 = int(np.floor(t0 / d)), int(np.ceil(t1 / d))
    cuts = (np.arange(m0, m1 + 1)[:, None] * d + b[None, :]).ravel()
    eps = 1e-14 * max(d, abs(t0), abs(t1))
    cuts = cuts[(cuts > t0 + eps) & (cuts < t1 - eps)]
    pts = np.concatenate([[t0], cuts, [t1]])
    out = []
    for a, e in zip(pts[:-1], pts[1:]):
        if e - a <= 0:
            continue
        mid = 0.5 * (a + e)
        out.append((int(coeffs.layer_index(mid)), float(a), float(e), int(np.floor(mid / d))))
    return out


def transfer(gen, t0, t1):
    """Transfer matrix of ``f1`` from ``t0`` to ``t1 >= t0`` (periodically extended)."""
    Phi = np.eye(gen.n1, dtype=complex)
    for k, a, b, _ in segments(gen.coeffs, t0, t1):
        if not np.all(np.isfinite(gen.A[k])):
            raise NonFiniteGeneratorError(f"generator on layer {k} is not finite")
        Phi = expm((b - a) * gen.A[k]) @ Phi
    return TransferMatrix(gen.lam, (t0, t1), Phi)


def monodromy(gen):
    """Transfer matrix over one full period ``[0, d]``."""
    M = np.eye(gen.n1, dtype=complex)
    for k, layer in enumerate(gen.coeffs.layers):
        M = layer_transfer(gen, k, layer.thickness) @ M
    return Monodromy(gen.lam, M, float(np.linalg.cond(M)), gen.coeffs.period)


def monodromy_at(coeffs, splitting, lam):
    return monodromy(reduce_at(coeffs, splitting, lam))


@dataclass
class Trajectory:
    """Sampled solution of the IVP.  Rows of ``f``, ``f1``, ``f2`` match ``t``."""

    lam: complex
    t: np.ndarray
    layers: np.ndarray
    f1: np.ndarray
    f2: np.ndarray
    f: np.ndarray
    g: np.ndarray


def _source_terms(g, coeffs):
    if g is None:
        return PiecewiseExponential.zero(coeffs.num_layers)
    if not isinstance(g, PiecewiseExponential):
        raise UnsupportedSourceError("sources must be per-layer constants or exponentials")
    if len(g.terms) != coeffs.num_layers:
        raise ShapeMismatchError("source has a different number of layers than the stack")
    return g


def _advance(gen, k, y, tau, terms, shift):
    """Exact step of ``y' = A y + B V* g(t)`` over ``tau`` from local time ``shift``."""
    A = gen.A[k]
    if not terms:
        return expm(tau * A) @ y
    n1 = gen.n1
    cols = np.column_stack([gen.B[k] @ (gen.splitting.V.conj().T @ c) * np.exp(mu * shift) for c, mu in terms])
    rates = np.array([mu for _, mu in terms], dtype=complex)
    q = rates.size
    aug = np.zeros((n1 + q, n1 + q), dtype=complex)
    aug[:n1, :n1] = A
    aug[:n1, n1:] = cols
    aug[n1:, n1:] = np.diag(rates)
    X = expm(tau * aug)
    return X[:n1, :n1] @ y + X[:n1, n1:].sum(axis=1)


def solve_ivp(coeffs, splitting, z, f0, t0, t1, g=None, t_eval=None, samples_per_layer=50):
    """Solve ``J f' + (H - zW) f = W g`` with ``(Jf)(t0) = f0`` on ``[t0, t1]``.

    Parameters
    ----------
    f0 : array (n,)
        Initial value of ``Jf``; must lie in ``ran J``.
    g : PiecewiseExponential, optional
        Source term, periodically extended from ``[0, d]``.
    t_eval : array, optional
        Sample times in ``[t0, t1]``; defaults to ``samples_per_layer`` evenly
        spaced interior points on every layer piece.

    Raises
    ------
    InitialNotInRangeError
        If ``||(I - P) f0|| > 1e-10 ||f0||``.
    SingularA22Error
        If the index-1 reduction fails at ``z``.
    """
    f0 = np.asarray(f0, dtype=complex)
    if f0.shape != (splitting.n,):
        raise ShapeMismatchError(f"f0 must have length {splitting.n}")
    resid = np.linalg.norm(f0 - splitting.P @ f0)
    if resid > 1e-10 * np.linalg.norm(f0):
        raise InitialNotInRangeError(f"f0 is not in ran J (distance {resid:.3e})")
    g = _source_terms(g, coeffs)
    gen = reduce_at(coeffs, splitting, z)
    d = coeffs.period
    segs = segments(coeffs, t0, t1)

    if t_eval is None:
        pts = [a + (b - a) * (np.arange(samples_per_layer) + 0.5) / samples_per_layer for _, a, b, _ in segs]
        t_eval = np.concatenate(pts) if pts else np.array([t0])
    t_eval = np.sort(np.asarray(t_eval, dtype=float))
    if t_eval.size and (t_eval[0] < t0 - 1e-12 or t_eval[-1] > t1 + 1e-12):
        raise ValueError("t_eval must lie inside [t0, t1]")

    fh1, _ = project_tangential(splitting, f0)
    y = np.linalg.solve(splitting.J11, fh1)

    m_samples = t_eval.size
    f1 = np.empty((m_samples, splitting.n1), dtype=complex)
    layers = np.empty(m_samples, dtype=int)
    gvals = np.zeros((m_samples, splitting.n), dtype=complex)
    i = 0
    if not segs:
        f1[:] = y
        layers[:] = coeffs.layer_index(t_eval)
    for s_idx, (k, a, b, m) in enumerate(segs):
        last = s_idx == len(segs) - 1
        terms = g.on_layer(k)
        while i < m_samples and (t_eval[i] < b or (last and t_eval[i] <= b + 1e-12)):
            tau = max(t_eval[i] - a, 0.0)
            f1[i] = _advance(gen, k, y, tau, terms, a - m * d) if tau > 0 else y
            layers[i] = k
            val = g(t_eval[i] - m * d, k)
            if val is not None:
                gvals[i] = val
            i += 1
        y = _advance(gen, k, y, b - a, terms, a - m * d)

    # explicit labels: the terminal sample of a run belongs to its last piece
    f2 = recover_normal(gen, t_eval, f1, gvals, layers=layers)
    f = np.hstack([f1, f2]) @ splitting.V.T
    return Trajectory(complex(z), t_eval, layers, f1, f2, f, gvals)


@dataclass
class OracleResult:
    t: np.ndarray
    y: list
    h: float
    steps: int
    difference: float


def oracle_integrate(rhs, breakpoints, y0, tol=1e-8, h_max=None, max_halvings=14):
    """Classical fixed-step RK4 between breakpoints, refined until converged.

    ``rhs(t, y, seg)`` gives ``dy/dt`` on segment ``seg`` (between
    ``breakpoints[seg]`` and ``breakpoints[seg + 1]``); steps never straddle a
    breakpoint.  The step starts at ``min(segment length) / 64`` (or ``h_max``
    if smaller) and is halved until two successive runs agree to ``tol``
    relative to the solution size.

    Raises
    ------
    StepUnderflowError
        If ``max_halvings`` refinements do not reach agreement.
    """
    bp = np.asarray(breakpoints, dtype=float)
    lengths = np.diff(bp)
    h = lengths.min() / 64
    if h_max is not None:
        h = min(h, h_max)
    y0 = np.asarray(y0, dtype=complex)

    def run(h):
        y = y0.copy()
        states = [y.copy()]
        steps = 0
        for seg, (a, L) in enumerate(zip(bp[:-1], lengths)):
            N = int(np.ceil(L / h - 1e-9))
            dt = L / N
            for j in range(N):
                t = a + j * dt
                k1 = rhs(t, y, seg)
                k2 = rhs(t + dt / 2, y + dt / 2 * k1, seg)
                k3 = rhs(t + dt / 2, y + dt / 2 * k2, seg)
                k4 = rhs(t + dt, y + dt * k3, seg)
                y = y + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
            steps += N
            states.append(y.copy())
        return states, steps

    prev, _ = run(h)
    for _ in range(max_halvings):
        h /= 2
        cur, steps = run(h)
        diff = max(np.linalg.norm(c - p) / max(1.0, np.linalg.norm(c)) for c, p in zip(cur, prev))
        if diff <= tol:
            return OracleResult(bp, cur, h, steps, diff)
        prev = cur
    raise StepUnderflowError(f"RK4 did not converge to {tol} after {max_halvings} halvings")


def oracle_monodromy(gens, tol=1e-8):
    """RK4 monodromy for one generator or a list sharing the same stack.

    Returns a single matrix or a stacked array ``(len(gens), n1, n1)``.
    """
    single = not isinstance(gens, (list, tuple))
    gens = [gens] if single else list(gens)
    coeffs = gens[0].coeffs
    A = np.stack([gen.A for gen in gens])  # (L, K, n1, n1)
    n1 = A.shape[-1]
    y0 = np.broadcast_to(np.eye(n1, dtype=complex), (len(gens), n1, n1)).copy()
    res = oracle_integrate(lambda t, y, k: A[:, k] @ y, coeffs.boundaries, y0, tol=tol)
    M = res.y[-1]
    return M[0] if single else M
