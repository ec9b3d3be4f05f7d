import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from canondae.canonical import build_splitting
from canondae.coefficients import LayeredCoefficients, PiecewiseExponential
from canondae.errors import InitialNotInRangeError, StepUnderflowError, UnsupportedSourceError
from canondae.maxwell import assemble, quarter_wave_stack, vacuum
from canondae.propagation import (
    layer_transfer,
    monodromy,
    oracle_integrate,
    oracle_monodromy,
    segments,
    solve_ivp,
    transfer,
)
from canondae.reduction import reduce_at
from canondae.samples import example_dae, random_hermitian, random_problem
from helpers import central_derivative, quarter_wave_trace


@pytest.mark.parametrize("lam", [0.3, -1.1, 4.0])
def test_example_transfer(lam):
    _, coeffs, sp = example_dae(1.7)
    gen = reduce_at(coeffs, sp, lam)
    assert layer_transfer(gen, 0, 1.7)[0, 0] == pytest.approx(np.exp(-1j * lam * 1.7), abs=1e-14)
    assert monodromy(gen).M[0, 0] == pytest.approx(np.exp(-1j * lam * 1.7), abs=1e-14)


def test_zero_generator_identity():
    J = 1j * np.eye(2)
    coeffs = LayeredCoefficients.single(np.zeros((2, 2)), np.eye(2))
    gen = reduce_at(coeffs, build_splitting(J), 0.0)
    np.testing.assert_array_equal(layer_transfer(gen, 0, 1.0), np.eye(2))
    np.testing.assert_array_equal(monodromy(gen).M, np.eye(2))


def test_layer_transfer_range():
    _, coeffs, sp = example_dae(1.0)
    gen = reduce_at(coeffs, sp, 1.0)
    with pytest.raises(ValueError):
        layer_transfer(gen, 0, 1.5)


def test_maxwell_vacuum_transfer():
    _, coeffs, sp = assemble(vacuum(d=1.3))
    lam = 2.2
    Phi = layer_transfer(reduce_at(coeffs, sp, lam), 0, 1.3)
    ev = np.linalg.eigvals(Phi)
    expected = [np.exp(-1j * lam * 1.3)] * 2 + [np.exp(1j * lam * 1.3)] * 2
    from helpers import multiset_distance

    assert multiset_distance(ev, expected) <= 1e-12


@pytest.mark.parametrize("lam", [0.5, 1.2, 2.0, 3.3, 4.4])
def test_quarter_wave_trace(lam):
    _, coeffs, sp = assemble(quarter_wave_stack())
    M = monodromy(reduce_at(coeffs, sp, lam)).M
    # two decoupled polarizations, each a 2x2 block with unit determinant
    for mu in np.linalg.eigvals(M):
        assert mu + 1 / mu == pytest.approx(quarter_wave_trace(lam), abs=1e-9)
    assert np.trace(M) == pytest.approx(2 * quarter_wave_trace(lam), abs=1e-10)


def test_segments_cover_interval():
    _, coeffs, _ = random_problem(np.random.default_rng(3), layers_max=4)
    d = coeffs.period
    segs = segments(coeffs, 0.3 * d, 2.6 * d)
    assert segs[0][1] == 0.3 * d and segs[-1][2] == 2.6 * d
    for (k, a, b, m), nxt in zip(segs, segs[1:]):
        assert b == nxt[1]
        assert coeffs.layer_index(0.5 * (a + b)) == k


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), lam=st.floats(-5, 5), s=st.floats(0.01, 0.99))
def test_semigroup(seed, lam, s):
    rng = np.random.default_rng(seed)
    _, coeffs, sp = random_problem(rng)
    gen = reduce_at(coeffs, sp, lam)
    d = coeffs.period
    M = monodromy(gen).M
    comp = transfer(gen, s * d, d).Phi @ transfer(gen, 0, s * d).Phi
    assert np.linalg.norm(M - comp) <= 1e-10 * np.linalg.norm(M)
    # the same over two periods with an off-grid start
    a, b, c = 0.1 * d, (1 + s) * d, 2.05 * d
    lhs = transfer(gen, a, c).Phi
    rhs = transfer(gen, b, c).Phi @ transfer(gen, a, b).Phi
    assert np.linalg.norm(lhs - rhs) <= 1e-10 * np.linalg.norm(lhs)


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), lam=st.floats(-5, 5))
def test_liouville_and_unitarity(seed, lam):
    rng = np.random.default_rng(seed)
    _, coeffs, sp = random_problem(rng)
    gen = reduce_at(coeffs, sp, lam)
    M = monodromy(gen).M
    expected = np.exp(sum(layer.thickness * np.trace(gen.A[k]) for k, layer in enumerate(coeffs.layers)))
    assert abs(np.linalg.det(M) - expected) <= 1e-9 * abs(expected)
    assert np.max(np.abs(M.conj().T @ sp.J11 @ M - sp.J11)) <= 1e-9


def test_ivp_example_trajectory():
    _, coeffs, sp = example_dae(1.0)
    lam, t0 = 1.3, 0.25
    traj = solve_ivp(coeffs, sp, lam, np.array([1j, 0]), t0, 3.0)
    np.testing.assert_allclose(traj.f[:, 0], np.exp(-1j * lam * (traj.t - t0)), atol=1e-13)
    np.testing.assert_allclose(traj.f[:, 1], 0, atol=1e-15)
    # the initial condition is on Jf
    at_start = solve_ivp(coeffs, sp, lam, np.array([1j, 0]), t0, 3.0, t_eval=[t0])
    np.testing.assert_allclose(sp.J @ at_start.f[0], [1j, 0])


def test_ivp_zero():
    _, coeffs, sp = random_problem(np.random.default_rng(5))
    traj = solve_ivp(coeffs, sp, 0.7, np.zeros(coeffs.n), 0.0, coeffs.period)
    assert not np.any(traj.f)


def test_ivp_rejects():
    _, coeffs, sp = example_dae()
    with pytest.raises(InitialNotInRangeError):
        solve_ivp(coeffs, sp, 1.0, np.array([0, 1.0]), 0, 1)
    with pytest.raises(UnsupportedSourceError):
        solve_ivp(coeffs, sp, 1.0, np.array([1j, 0]), 0, 1, g=lambda t: t)


def _ivp_case(seed):
    rng = np.random.default_rng(seed)
    J, coeffs, sp = random_problem(rng, n_max=6, layers_max=3)
    n, K = coeffs.n, coeffs.num_layers
    g = PiecewiseExponential(
        tuple(
            ((rng.standard_normal(n) + 1j * rng.standard_normal(n), complex(*rng.uniform(-1, 1, 2))),
             (rng.standard_normal(n) + 0j, 0j))
            for _ in range(K)
        )
    )
    f0 = sp.P @ (rng.standard_normal(n) + 1j * rng.standard_normal(n))
    lam = complex(rng.uniform(-3, 3), rng.uniform(-0.5, 0.5))
    return J, coeffs, sp, g, f0, lam


@pytest.mark.parametrize("seed", range(5))
def test_ivp_residual(seed):
    J, coeffs, sp, g, f0, lam = _ivp_case(seed)
    d = coeffs.period
    b = coeffs.boundaries
    h = 1e-3
    for k, layer in enumerate(coeffs.layers):
        ts = np.linspace(b[k] + 3 * h, b[k + 1] - 3 * h, 7) + d  # second period
        offsets = np.array([-h, -h / 2, 0, h / 2, h])
        grid = (ts[:, None] + offsets[None]).ravel()
        traj = solve_ivp(coeffs, sp, lam, f0, 0.0, 2 * d, g=g, t_eval=grid)
        F = traj.f.reshape(ts.size, 5, -1)
        fprime = (4 * (F[:, 3] - F[:, 1]) / h - (F[:, 4] - F[:, 0]) / (2 * h)) / 3
        f = F[:, 2]
        gv = np.array([g(t - d, k) for t in ts])
        res = fprime @ J.T + f @ (layer.H - lam * layer.W).T - gv @ layer.W.T
        scale = np.linalg.norm(fprime, axis=1) + np.linalg.norm(f, axis=1) * (1 + abs(lam)) * 2 + 2 * np.linalg.norm(gv, axis=1)
        assert np.all(np.linalg.norm(res, axis=1) <= 1e-8 * scale)


@pytest.mark.parametrize("seed", range(3))
def test_ivp_matches_oracle(seed):
    J, coeffs, sp, g, f0, lam = _ivp_case(seed)
    traj = solve_ivp(coeffs, sp, lam, f0, 0.0, coeffs.period, t_eval=coeffs.boundaries, g=g)
    gen = reduce_at(coeffs, sp, lam)
    Vh = sp.V.conj().T

    def rhs(t, y, k):
        return gen.A[k] @ y + gen.B[k] @ (Vh @ g(t, k))

    y0 = np.linalg.solve(sp.J11, (Vh @ f0)[: sp.n1])
    res = oracle_integrate(rhs, coeffs.boundaries, y0)
    for got, want in zip(traj.f1, res.y):
        assert np.linalg.norm(got - want) <= 1e-6 * max(1.0, np.linalg.norm(want))


def test_oracle_example_and_constant():
    _, coeffs, sp = example_dae(2.0)
    gen = reduce_at(coeffs, sp, 0.9)
    assert oracle_monodromy(gen)[0, 0] == pytest.approx(np.exp(-1.8j), abs=1e-8)
    res = oracle_integrate(lambda t, y, k: np.zeros_like(y), [0.0, 1.0], np.array([2.0 + 1j]))
    np.testing.assert_array_equal(res.y[-1], [2.0 + 1j])


def test_oracle_single_random_layer(rng):
    J = 1j * np.diag([1.0, -2.0, 0.5, 1.5])
    coeffs = LayeredCoefficients.single(random_hermitian(rng, 4, 2.0), np.eye(4))
    gen = reduce_at(coeffs, build_splitting(J), 1.7)
    np.testing.assert_allclose(oracle_monodromy(gen), layer_transfer(gen, 0, 1.0), atol=1e-6)


def test_oracle_underflow():
    with pytest.raises(StepUnderflowError):
        oracle_integrate(lambda t, y, k: 50 * y, [0.0, 1.0], np.array([1.0]), max_halvings=1)
