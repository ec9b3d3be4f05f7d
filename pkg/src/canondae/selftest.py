"""Quick invariant suite behind ``canondae selftest``.

A reduced-size version of the acceptance properties, meant to run in a few
seconds as a smoke test of an installation.
"""

from __future__ import annotations

import numpy as np

from .hypotheses import certify_self_adjoint, check_index1
from .maxwell import assemble, quarter_wave_stack, vacuum
from .propagation import monodromy, oracle_monodromy
from .reduction import reduce_at
from .samples import example_dae, random_basis_change, random_problem
from .spectral import band_scan, floquet, point_spectrum


def _example():
    J, coeffs, sp = example_dae(1.0)
    ok = not check_index1(coeffs, sp, 0.0).overall and check_index1(coeffs, sp, 1j).overall
    ok &= certify_self_adjoint(coeffs, sp).passed
    ok &= point_spectrum(coeffs, sp, 0.0).certified and not point_spectrum(coeffs, sp, 1.0).certified
    lam = 0.8
    M = monodromy(reduce_at(coeffs, sp, lam)).M
    return ok and abs(M[0, 0] - np.exp(-1j * lam)) <= 1e-12, ""


def _random_suite(rng, count):
    unit, recip, orc = 0.0, 0.0, 0.0
    for i in range(count):
        _, coeffs, sp = random_problem(rng)
        gens = [reduce_at(coeffs, sp, lam) for lam in rng.uniform(-5, 5, 2)]
        for gen in gens:
            M = monodromy(gen)
            unit = max(unit, np.max(np.abs(M.M.conj().T @ sp.J11 @ M.M - sp.J11)))
            mu = floquet(M).multipliers
            recip = max(recip, _multiset_distance(mu, 1 / mu.conj()))
        if i < 3:
            for gen, Mo in zip(gens, oracle_monodromy(gens)):
                M = monodromy(gen).M
                orc = max(orc, np.linalg.norm(M - Mo) / np.linalg.norm(M))
    return unit <= 1e-9 and recip <= 1e-8 and orc <= 1e-6, f"unitarity {unit:.2e}, reciprocity {recip:.2e}, oracle {orc:.2e}"


def _multiset_distance(a, b):
    """Max distance under the best matching (Hungarian) between two multisets."""
    from scipy.optimize import linear_sum_assignment

    cost = np.abs(a[:, None] - b[None, :])
    r, c = linear_sum_assignment(cost)
    return float(cost[r, c].max()) if r.size else 0.0


def _modes(rng, count):
    for _ in range(count):
        _, coeffs, sp = random_problem(rng)
        for z0 in (1j, 0.3 - 2j, rng.uniform(-3, 3)):
            d = check_index1(coeffs, sp, z0, "definition").overall
            if d != check_index1(coeffs, sp, z0, "pencil_equivalent").overall:
                return False, f"mode disagreement at z0={z0}"
            if np.imag(z0) != 0 and check_index1(coeffs, sp, z0, "sufficient").overall and not d:
                return False, "sufficient passed but definition failed"
    return True, ""


def _maxwell():
    J, coeffs, sp = assemble(vacuum())
    ok = np.linalg.matrix_rank(J) == 4 and np.allclose(sp.Jplus, -J, atol=1e-15)
    ok &= bool(np.all(band_scan(coeffs, sp, 0.1, 5, 50, threads=1).counts == 4))
    _, coeffs, sp = assemble(quarter_wave_stack())
    edges = band_scan(coeffs, sp, 1.0, 3.5, 60, threads=1).edges
    x1 = np.arcsin(2 * np.sqrt(2) / 3)
    expect = np.array([x1, np.pi - x1]) * 1.5
    ok &= len(edges) == 2 and np.allclose([e.lam for e in edges], expect, atol=1e-8, rtol=0)
    return bool(ok), ""


def _v_independence(rng, count):
    for _ in range(count):
        _, coeffs, sp = random_problem(rng)
        sp2 = random_basis_change(rng, sp)
        lam = rng.uniform(-5, 5)
        a = floquet(monodromy(reduce_at(coeffs, sp, lam))).multipliers
        b = floquet(monodromy(reduce_at(coeffs, sp2, lam))).multipliers
        if _multiset_distance(a, b) > 1e-9:
            return False, "multipliers depend on V"
        if check_index1(coeffs, sp, 1j).overall != check_index1(coeffs, sp2, 1j).overall:
            return False, "verdict depends on V"
    return True, ""


def run(seed=0):
    """Run the suite; returns a list of ``(name, passed, detail)``."""
    rng = np.random.default_rng(seed)
    checks = [
        ("example DAE", _example),
        ("random monodromy invariants", lambda: _random_suite(rng, 10)),
        ("hypothesis mode equivalence", lambda: _modes(rng, 20)),
        ("maxwell structure and bands", _maxwell),
        ("splitting independence", lambda: _v_independence(rng, 5)),
    ]
    out = []
    for name, fn in checks:
        passed, detail = fn()
        out.append((name, bool(passed), detail))
    return out
