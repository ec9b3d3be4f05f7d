"""Reference stacks and random generators for tests, demos and ``selftest``."""

from __future__ import annotations

import numpy as np
from scipy.stats import unitary_group

from .canonical import build_splitting
from .coefficients import Layer, LayeredCoefficients


def example_dae(period=1.0):
    """``J = i diag(1, 0)``, ``H = 0``, ``W = I``: the smallest index-1 example.

    Returns ``(J, coeffs, splitting)``.  The reduced ODE is ``f1' = -i lam f1``
    and ``lam = 0`` is an eigenvalue of infinite multiplicity.
    """
    J = 1j * np.diag([1.0, 0.0])
    coeffs = LayeredCoefficients.single(np.zeros((2, 2)), np.eye(2), period)
    return J, coeffs, build_splitting(J)


def random_unitary(rng, n):
    return unitary_group.rvs(n, random_state=rng) if n > 1 else np.exp(2j * np.pi * rng.random()) * np.ones((1, 1))


def random_skew_hermitian(rng, n, rank=None):
    """``i U diag(s) U*`` with ``|s|`` in ``[0.5, 2]`` and ``n - rank`` zeros."""
    rank = n if rank is None else rank
    s = np.zeros(n)
    s[:rank] = rng.choice([-1.0, 1.0], rank) * rng.uniform(0.5, 2.0, rank)
    U = random_unitary(rng, n)
    J = 1j * (U * s) @ U.conj().T
    return 0.5 * (J - J.conj().T)


def random_hermitian(rng, n, scale=1.0):
    X = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    H = 0.5 * (X + X.conj().T)
    return scale * H / max(np.linalg.norm(H, 2), 1e-300)


def random_positive_definite(rng, n, lo=0.5, hi=2.0):
    U = random_unitary(rng, n)
    W = (U * rng.uniform(lo, hi, n)) @ U.conj().T
    return 0.5 * (W + W.conj().T)


def random_stack(rng, n, num_layers, h_scale=1.0, thickness=(0.2, 1.0)):
    """Hermitian piecewise-constant stack with positive definite weights."""
    layers = [
        Layer(rng.uniform(*thickness), random_hermitian(rng, n, h_scale * rng.uniform(0.5, 1.5)), random_positive_definite(rng, n))
        for _ in range(num_layers)
    ]
    return LayeredCoefficients.from_layers(layers)


def random_problem(rng, n_max=8, layers_max=5, singular=None):
    """Random ``(J, coeffs, splitting)`` with ``2 <= n <= n_max``.

    ``singular`` forces ``det J = 0`` (True) or ``!= 0`` (False); by default
    rank deficiency is chosen at random.
    """
    n = int(rng.integers(2, n_max + 1))
    if singular is None:
        singular = bool(rng.random() < 0.7)
    rank = int(rng.integers(1, n)) if singular else n
    J = random_skew_hermitian(rng, n, rank)
    coeffs = random_stack(rng, n, int(rng.integers(1, layers_max + 1)))
    return J, coeffs, build_splitting(J)


def random_basis_change(rng, splitting):
    """Another admissible splitting of the same J."""
    return splitting.with_basis_change(random_unitary(rng, splitting.n1), random_unitary(rng, splitting.n2) if splitting.n2 else np.zeros((0, 0)))
