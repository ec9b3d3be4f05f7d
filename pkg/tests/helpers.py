"""Independent oracles shared by the test modules."""

import numpy as np
from scipy.optimize import brentq, linear_sum_assignment


def multiset_distance(a, b):
    """Largest distance under the optimal one-to-one matching of two multisets."""
    a, b = np.asarray(a), np.asarray(b)
    cost = np.abs(a[:, None] - b[None, :])
    r, c = linear_sum_assignment(cost)
    return float(cost[r, c].max()) if r.size else 0.0


def quarter_wave_trace(lam, na=1.0, nb=2.0, da=2 / 3, db=1 / 3):
    """Trace of the 2x2 transfer matrix of a two-layer dielectric cell."""
    a, b = lam * na * da, lam * nb * db
    return 2 * np.cos(a) * np.cos(b) - (na / nb + nb / na) * np.sin(a) * np.sin(b)


def trace_gap_edges(lmin, lmax, num=4000, **kw):
    """Roots of |trace| = 2 found by sign scan plus Brent refinement."""
    x = np.linspace(lmin, lmax, num)
    f = lambda t: abs(quarter_wave_trace(t, **kw)) - 2
    v = np.array([f(t) for t in x])
    roots = []
    for i in range(num - 1):
        if v[i] == 0:
            roots.append(x[i])
        elif v[i] * v[i + 1] < 0:
            roots.append(brentq(f, x[i], x[i + 1], xtol=1e-15, rtol=1e-15))
    return np.array(roots)


def central_derivative(fun, t, h=1e-3):
    """Richardson-extrapolated central difference, O(h^4)."""
    d1 = (fun(t + h) - fun(t - h)) / (2 * h)
    d2 = (fun(t + h / 2) - fun(t - h / 2)) / h
    return (4 * d2 - d1) / 3
