"""Perron-Frobenius directions of cone-positive tangent flows.

Along an orbit of a positive system, any two interior cone rays pushed by
the tangent flow approach each other in the Hilbert projective metric of
the cone at the moving point; the common limit direction is the
Perron-Frobenius direction of the orbit.  ``pf_direction`` propagates two
rays with per-step renormalization and records the contraction log.

At an equilibrium the tangent map over a fixed horizon tau is a single
cone-positive matrix, so its Perron-Frobenius eigenpair is computed by
power iteration started from the cone-field section (guaranteed interior).
The dominant multiplier rho scales like rho(2 tau) = rho(tau)^2, which is
tested instead of fixing a canonical tau.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import flow as flowmod
from .conefield import ConeField
from .errors import ConeExitError, NotEquilibriumError, PowerIterationError
from .flow import _plan_steps, _rk4_step_tangent
from .geometry import Tangent, metric_norm

PF_CONVERGED_TOL = 1e-6
POWER_DIR_TOL = 1e-12
POWER_MAX_ITER = 10_000
EIGEN_RESIDUAL_TOL = 1e-8
EXIT_TOL = 1e-7  # cone-exit guard threshold is -10 * EXIT_TOL


@dataclass
class PfResult:
    direction: Tangent  # unit (metric) direction at the final point
    rho: float | None  # dominant multiplier; None away from equilibria
    contraction_log: np.ndarray  # rows (t, hilbert distance between test rays)
    converged: bool


def _metric_norms(field: ConeField, x: np.ndarray, W: np.ndarray) -> np.ndarray:
    """Metric norms of the columns of W at x."""
    m = field.manifold
    if m.kind == "euclidean":
        return np.linalg.norm(W, axis=0)
    return np.array([metric_norm(m, x, Tangent(x, W[:, j]))
                     for j in range(W.shape[1])])


def propagate_ray_pairs(s: flowmod.FlowSystem, field: ConeField,
                        x0: np.ndarray, rays_a: np.ndarray, rays_b: np.ndarray,
                        T: float, dt: float = flowmod.DT_DEFAULT,
                        store_stride: int = flowmod.STORE_STRIDE,
                        exit_tol: float = EXIT_TOL):
    """Push k ray pairs along one orbit, renormalizing every step.

    Returns (times, dists, x_final, W_final) where dists[m, j] is the
    Hilbert distance of pair j at stored time m and W_final holds the
    propagated metric-unit rays as columns (a-rays then b-rays).

    Raises ConeExitError when a propagated ray's containment margin drops
    below -10 * exit_tol (a positivity violation along the orbit).
    """
    x0 = s.manifold.check_point(x0)
    A = np.atleast_2d(np.asarray(rays_a, dtype=float))
    B = np.atleast_2d(np.asarray(rays_b, dtype=float))
    if A.shape != B.shape or A.shape[1] != s.dim:
        raise ValueError("ray arrays must both be (k, dim)")
    k = A.shape[0]
    W = np.concatenate([A, B], axis=0).T.copy()  # (n, 2k), columns are rays
    X = x0[None, :].copy()
    W = W / _metric_norms(field, x0, W)[None, :]

    n_full, rem = _plan_steps(T, dt)
    steps = [dt] * n_full + ([rem] if rem > 0.0 else [])

    def record(t_now, x_now, W_now, times, dists):
        cone = field.cone_at(x_now)
        margins = np.array([cone.margin(W_now[:, j]) for j in range(2 * k)])
        if np.min(margins) < -10.0 * exit_tol:
            raise ConeExitError(
                f"ray left the cone at t={t_now:.6g} "
                f"(margin {np.min(margins):.3e})")
        row = [cone.hilbert_distance(W_now[:, j], W_now[:, k + j])
               for j in range(k)]
        times.append(t_now)
        dists.append(row)

    times: list[float] = []
    dists: list[list[float]] = []
    record(0.0, x0, W, times, dists)
    with np.errstate(over="ignore", invalid="ignore", under="ignore"):
        for i, h in enumerate(steps, start=1):
            X, Wn = _rk4_step_tangent(s, X, W[None, :, :], h)
            W = Wn[0]
            x_now = X[0]
            if not np.all(np.isfinite(x_now)):
                raise flowmod.FlowBlowupError(i * dt)
            W = W / _metric_norms(field, x_now, W)[None, :]
            if i % store_stride == 0 or i == len(steps):
                t_now = min(i * dt, T) if i <= n_full else T
                record(t_now, x_now, W, times, dists)
    return np.asarray(times), np.asarray(dists), X[0], W


def pf_direction(s: flowmod.FlowSystem, field: ConeField, x0: np.ndarray,
                 T: float, dt: float = flowmod.DT_DEFAULT,
                 u0: np.ndarray | None = None, u1: np.ndarray | None = None,
                 store_stride: int = flowmod.STORE_STRIDE) -> PfResult:
    """Estimate the Perron-Frobenius direction along the orbit of x0.

    Two distinct interior rays (defaults: the cone-field section and a
    section/boundary mix) ride the tangent flow with per-step metric
    renormalization; their Hilbert distance in the cone at the moving
    point is the contraction log.  converged is True when the final
    distance drops below 1e-6; the direction is the first ray at time T.
    """
    x0 = s.manifold.check_point(x0)
    if u0 is None:
        u0 = field.section(x0)
    if u1 is None:
        rng = np.random.default_rng(0)
        b = field.cone_at(x0).boundary_rays(rng, 1)[0]
        u1 = u0 + 0.5 * b
    times, dists, x_final, W = propagate_ray_pairs(
        s, field, x0, u0[None, :], u1[None, :], T, dt, store_stride)
    log = np.column_stack([times, dists[:, 0]])
    final = float(dists[-1, 0])
    return PfResult(direction=Tangent(x_final, W[:, 0].copy()),
                    rho=None,
                    contraction_log=log,
                    converged=bool(final < PF_CONVERGED_TOL))


def pf_at_equilibrium(s: flowmod.FlowSystem, field: ConeField, e: np.ndarray,
                      tau: float = 1.0, dt: float = flowmod.DT_DEFAULT,
                      eq_tol: float = flowmod.EQ_TOL):
    """Dominant eigenpair of the tangent map over horizon tau at equilibrium e.

    Power iteration starts from the cone-field section (interior, so
    Perron-Frobenius convergence applies whenever the map is strongly
    cone-positive) and must converge: a complex dominant pair raises
    rather than returning a silently wrong answer.

    Returns (v, rho) with v a metric-unit Tangent at e satisfying
    |Phi_tau v - rho v| < 1e-8.
    """
    e = s.manifold.check_point(e)
    if float(np.linalg.norm(s.f(e))) >= eq_tol:
        raise NotEquilibriumError(
            f"|f(e)| = {float(np.linalg.norm(s.f(e))):.3e} >= {eq_tol:.0e}")
    if tau <= 0:
        raise ValueError("tau must be > 0")
    _, phis = flowmod.tangent_at(s, e[None, :], [tau], dt)
    Phi = phis[0, 0]

    v = field.section(e)
    v = v / np.linalg.norm(v)
    converged = False
    for _ in range(POWER_MAX_ITER):
        w = Phi @ v
        nw = float(np.linalg.norm(w))
        if nw == 0.0:
            raise PowerIterationError("tangent map annihilated the iterate")
        v_new = w / nw
        if float(np.linalg.norm(v_new - v)) < POWER_DIR_TOL:
            v = v_new
            converged = True
            break
        v = v_new
    if not converged:
        raise PowerIterationError(
            "power iteration did not converge (complex or defective "
            "dominant pair?)")
    rho = float(np.linalg.norm(Phi @ v))
    if float(np.linalg.norm(Phi @ v - rho * v)) >= EIGEN_RESIDUAL_TOL:
        raise PowerIterationError(
            "dominant pair failed the eigen-residual check")

    # report v at metric length 1
    nv = metric_norm(s.manifold, e, Tangent(e, v))
    return Tangent(e, v / nv), rho
