"""Built-in example systems.

Systems are code-defined (vector field and Jacobian hand-written, both
vectorized over leading axes) so the Jacobians are exact:

* coop2d         dx_i/dt = -x_i + tanh((Ax)_i), A = [[2, 0.5], [0.5, 2]];
                 cooperative and strongly positive for the orthant field.
* metzler_linear dx/dt = Ax, A = [[-1, 2], [0, -1]]; Metzler, so the flow
                 is orthant-positive but only weakly (a Jordan block with
                 the rank-deficient direction staying on the boundary).
* rotation2d     dx/dt = [[0, 1], [-1, 0]] x; the control case that
                 violates orthant positivity.
* bistable1d     dx/dt = -x + tanh(2x); two stable roots, unstable origin.
* spd_lyapunov   dP/dt = A P + P A^T, A = [[-1, 0.2], [0, -1]], on SPD(2)
                 with the transported PSD cone field.  Positive but not
                 strongly so: congruence by e^{At} preserves rank, so
                 boundary (rank-deficient) rays stay on the boundary.
                 Trajectories sink toward the semidefinite boundary, so
                 long horizons leave the chart and count as escapes.
"""

from __future__ import annotations

import numpy as np

from . import geometry
from .conefield import ConeField, ConstantField, HomogeneousPSDField
from .cones import Orthant
from .errors import UnsupportedInputError
from .flow import FlowSystem
from .geometry import pack_sym, sym_dim, unpack_sym


def _linear_system(A: np.ndarray, name: str) -> FlowSystem:
    A = np.asarray(A, dtype=float)
    n = A.shape[0]

    def f(x):
        return np.asarray(x) @ A.T

    def jac(x):
        x = np.asarray(x)
        return np.broadcast_to(A, x.shape[:-1] + (n, n))

    return FlowSystem(geometry.euclidean(n), f, jac, name)


def make_coop2d() -> FlowSystem:
    A = np.array([[2.0, 0.5], [0.5, 2.0]])

    def f(x):
        x = np.asarray(x)
        return -x + np.tanh(x @ A.T)

    def jac(x):
        x = np.asarray(x)
        sech2 = 1.0 / np.cosh(x @ A.T) ** 2
        return -np.eye(2) + sech2[..., :, None] * A

    return FlowSystem(geometry.euclidean(2), f, jac, "coop2d")


def make_metzler_linear() -> FlowSystem:
    return _linear_system([[-1.0, 2.0], [0.0, -1.0]], "metzler_linear")


def make_rotation2d() -> FlowSystem:
    return _linear_system([[0.0, 1.0], [-1.0, 0.0]], "rotation2d")


def make_bistable1d() -> FlowSystem:
    def f(x):
        x = np.asarray(x)
        return -x + np.tanh(2.0 * x)

    def jac(x):
        x = np.asarray(x)
        sech2 = 1.0 / np.cosh(2.0 * x) ** 2
        return (-1.0 + 2.0 * sech2)[..., :, None] * np.eye(1)

    return FlowSystem(geometry.euclidean(1), f, jac, "bistable1d")


def make_spd_lyapunov() -> FlowSystem:
    A = np.array([[-1.0, 0.2], [0.0, -1.0]])
    n = 2
    m = sym_dim(n)
    # packed matrix of the linear map S -> A S + S A^T
    cols = []
    for k in range(m):
        e = np.zeros(m)
        e[k] = 1.0
        S = unpack_sym(e, n)
        cols.append(pack_sym(A @ S + S @ A.T))
    L = np.stack(cols, axis=1)

    def f(v):
        return np.asarray(v) @ L.T

    def jac(v):
        v = np.asarray(v)
        return np.broadcast_to(L, v.shape[:-1] + (m, m))

    return FlowSystem(geometry.spd(n), f, jac, "spd_lyapunov")


SYSTEMS = {
    "coop2d": make_coop2d,
    "metzler_linear": make_metzler_linear,
    "rotation2d": make_rotation2d,
    "bistable1d": make_bistable1d,
    "spd_lyapunov": make_spd_lyapunov,
}

DESCRIPTIONS = {
    "coop2d": "cooperative 2-neuron net, strongly orthant-positive",
    "metzler_linear": "Metzler linear flow, orthant-positive (not strongly)",
    "rotation2d": "rigid rotation, violates orthant positivity",
    "bistable1d": "scalar bistable dynamics, three equilibria",
    "spd_lyapunov": "Lyapunov matrix flow on SPD(2), PSD-positive only",
}

DEFAULT_X0 = {
    "coop2d": np.array([1.0, 0.5]),
    "metzler_linear": np.array([1.0, 1.0]),
    "rotation2d": np.array([1.0, 0.0]),
    "bistable1d": np.array([0.5]),
    "spd_lyapunov": pack_sym(np.array([[2.0, 0.3], [0.3, 1.0]])),
}


def get_system(name: str) -> FlowSystem:
    if name not in SYSTEMS:
        raise UnsupportedInputError(
            f"unknown system {name!r}; known: {', '.join(sorted(SYSTEMS))}")
    return SYSTEMS[name]()


def default_field(system: FlowSystem) -> ConeField:
    """The cone field each example system is meant to be tested against."""
    if system.manifold.kind == "spd":
        return HomogeneousPSDField(system.manifold.n)
    return ConstantField(Orthant(system.dim))
