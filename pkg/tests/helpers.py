"""Shared test oracles: root finders and throwaway systems."""

import numpy as np

from conedyn import flow, geometry


def bisect_root(g, lo, hi, iters=200):
    """Sign-change bisection; the independent oracle for fixed points."""
    glo = g(lo)
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if glo * g(mid) <= 0:
            hi = mid
        else:
            lo = mid
            glo = g(lo)
    return 0.5 * (lo + hi)


def tanh_fixed_point(gain):
    """Positive root of u = tanh(gain * u) for gain > 1."""
    return bisect_root(lambda u: u - np.tanh(gain * u), 0.5, 1.5)


def linear_system(A, name="linear"):
    A = np.asarray(A, dtype=float)
    n = A.shape[0]

    def f(x):
        return np.asarray(x) @ A.T

    def jac(x):
        x = np.asarray(x)
        return np.broadcast_to(A, x.shape[:-1] + (n, n))

    return flow.FlowSystem(geometry.euclidean(n), f, jac, name)


def constant_system(v, name="constant"):
    v = np.asarray(v, dtype=float)
    n = v.shape[0]

    def f(x):
        x = np.asarray(x)
        return np.broadcast_to(v, x.shape)

    def jac(x):
        x = np.asarray(x)
        return np.zeros(x.shape[:-1] + (n, n))

    return flow.FlowSystem(geometry.euclidean(n), f, jac, name)
