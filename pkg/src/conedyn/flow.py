"""Numerical flows, tangent (variational) flows, equilibria, omega-limits.

Integration is classical fixed-step RK4 (default dt = 1e-3, final partial
step allowed) for determinism and reproducibility; adaptive stepping would
make downstream tolerances scheduler-dependent.  The tangent flow solves
the variational equation Phi' = J(x(t)) Phi jointly with the state, sharing
RK4 stages.

Vector fields are vectorized: ``f`` maps arrays of shape (..., n) to
(..., n) and ``jac`` maps (..., n) to (..., n, n).  All public single-orbit
operations run through a batched stepper, so ensembles of initial
conditions integrate at numpy speed.

Omega-limit classification is an explicitly heuristic desk-scale estimate:
the last quarter of the stored trajectory either clusters to a polished
equilibrium (singleton), revisits its own start (non-singleton/recurrent),
or stays honest as "undetermined".  Undetermined is never coerced.

SPD-manifold trajectories integrate in chart coordinates with a
positive-definiteness guard every step; leaving the chart raises (single
orbit) or marks the sample as escaped (ensembles).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    FlowBlowupError,
    ManifoldExitError,
    NumericsError,
)
from .geometry import EIG_TOL, ManifoldSpec, unpack_sym

DT_DEFAULT = 1e-3
STORE_STRIDE = 10
TAIL_FRACTION = 0.25
CLUSTER_RADIUS = 1e-4
EQ_TOL = 1e-10

SINGLETON = "singleton_equilibrium"
NON_SINGLETON = "non_singleton"
UNDETERMINED = "undetermined"


@dataclass(frozen=True)
class FlowSystem:
    """A named smooth vector field with its exact Jacobian."""

    manifold: ManifoldSpec
    f: callable
    jac: callable
    name: str = "system"

    @property
    def dim(self) -> int:
        return self.manifold.dim


@dataclass
class Trajectory:
    times: np.ndarray  # (k,), strictly increasing, starts at 0
    states: np.ndarray  # (k, n)

    def state_at(self, t: float) -> np.ndarray:
        """Stored state nearest to time t."""
        return self.states[int(np.argmin(np.abs(self.times - t)))]


@dataclass
class TangentFlow:
    times: np.ndarray
    states: np.ndarray  # (k, n)
    phis: np.ndarray  # (k, n, n), phis[0] = I

    def phi_at(self, t: float) -> np.ndarray:
        return self.phis[int(np.argmin(np.abs(self.times - t)))]


@dataclass
class OmegaEstimate:
    kind: str  # SINGLETON | NON_SINGLETON | UNDETERMINED
    point: np.ndarray | None = None  # singleton limit
    witnesses: np.ndarray | None = None  # samples of a non-singleton tail
    residual: float = float("nan")


# ---------------------------------------------------------------- stepping


def _plan_steps(T: float, dt: float):
    """Full-step count and the trailing partial step (0 if aligned)."""
    if T <= 0:
        raise ValueError("T must be > 0")
    if not 0 < dt <= T:
        raise ValueError("need 0 < dt <= T")
    n_full = int(np.floor(T / dt + 1e-9))
    rem = T - n_full * dt
    if rem < 1e-12 * max(1.0, T):
        rem = 0.0
    return n_full, rem


def _rk4_step(s: FlowSystem, X: np.ndarray, h: float) -> np.ndarray:
    k1 = s.f(X)
    k2 = s.f(X + 0.5 * h * k1)
    k3 = s.f(X + 0.5 * h * k2)
    k4 = s.f(X + h * k3)
    return X + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def _rk4_step_tangent(s: FlowSystem, X: np.ndarray, P: np.ndarray, h: float):
    k1x = s.f(X)
    k1p = s.jac(X) @ P
    x2 = X + 0.5 * h * k1x
    k2x = s.f(x2)
    k2p = s.jac(x2) @ (P + 0.5 * h * k1p)
    x3 = X + 0.5 * h * k2x
    k3x = s.f(x3)
    k3p = s.jac(x3) @ (P + 0.5 * h * k2p)
    x4 = X + h * k3x
    k4x = s.f(x4)
    k4p = s.jac(x4) @ (P + h * k3p)
    Xn = X + (h / 6.0) * (k1x + 2.0 * k2x + 2.0 * k3x + k4x)
    Pn = P + (h / 6.0) * (k1p + 2.0 * k2p + 2.0 * k3p + k4p)
    return Xn, Pn


def _bad_rows(s: FlowSystem, X: np.ndarray) -> np.ndarray:
    """Boolean mask of rows that are non-finite or left the SPD chart."""
    bad = ~np.all(np.isfinite(X), axis=-1)
    if s.manifold.kind == "spd":
        finite = ~bad
        if np.any(finite):
            w = np.linalg.eigvalsh(unpack_sym(X[finite], s.manifold.n))
            exited = np.min(w, axis=-1) <= EIG_TOL
            idx = np.flatnonzero(finite)
            bad[idx[exited]] = True
    return bad


class _Stepper:
    """Fixed-step RK4 over a batch, with failure masking or raising."""

    def __init__(self, s: FlowSystem, X0: np.ndarray, dt: float,
                 tangent: bool = False, on_failure: str = "raise"):
        self.s = s
        self.X = np.array(X0, dtype=float, copy=True)
        if self.X.ndim != 2:
            raise ValueError("batch states must have shape (N, n)")
        self.dt = dt
        self.t = 0.0
        self.tangent = tangent
        self.P = np.broadcast_to(np.eye(self.X.shape[1]),
                                 (self.X.shape[0],) * 1 + (self.X.shape[1],) * 2
                                 ).copy() if tangent else None
        self.on_failure = on_failure
        self.dead = _bad_rows(s, self.X)
        if self.on_failure == "raise" and np.any(self.dead):
            raise ManifoldExitError(0.0, "initial state is off the manifold")

    def advance(self, h: float) -> None:
        if self.tangent:
            Xn, Pn = _rk4_step_tangent(self.s, self.X, self.P, h)
        else:
            Xn = _rk4_step(self.s, self.X, h)
            Pn = None
        bad = _bad_rows(self.s, Xn) & ~self.dead
        if np.any(bad):
            if self.on_failure == "raise":
                t_fail = self.t + h
                if np.any(~np.isfinite(Xn[bad])):
                    raise FlowBlowupError(t_fail)
                raise ManifoldExitError(t_fail)
            Xn[bad] = np.nan
            if Pn is not None:
                Pn[bad] = np.nan
            self.dead |= bad
        # frozen dead rows keep their nan state
        Xn[self.dead] = np.nan
        self.X = Xn
        if self.tangent:
            Pn[self.dead] = np.nan
            self.P = Pn
        self.t += h

    def run_to(self, t_target: float) -> None:
        """March with full dt steps plus one trailing partial step."""
        span = t_target - self.t
        if span <= 1e-15 * max(1.0, t_target):
            return
        n_full, rem = _plan_steps(span, min(self.dt, span))
        with np.errstate(over="ignore", invalid="ignore", under="ignore"):
            for _ in range(n_full):
                self.advance(self.dt if self.dt <= span else span)
            if rem > 0.0:
                self.advance(rem)
        self.t = t_target  # avoid float drift across segments


# ------------------------------------------------------------- public ops


def integrate(s: FlowSystem, x0: np.ndarray, T: float, dt: float = DT_DEFAULT,
              store_stride: int = STORE_STRIDE) -> Trajectory:
    """Integrate one orbit, storing every store_stride-th step and the end."""
    x0 = s.manifold.check_point(x0)
    n_full, rem = _plan_steps(T, dt)
    stepper = _Stepper(s, x0[None, :], dt)
    times = [0.0]
    states = [stepper.X[0].copy()]
    with np.errstate(over="ignore", invalid="ignore", under="ignore"):
        for i in range(1, n_full + 1):
            stepper.advance(dt)
            if i % store_stride == 0 or (i == n_full and rem == 0.0):
                times.append(i * dt)
                states.append(stepper.X[0].copy())
        if rem > 0.0:
            stepper.advance(rem)
            times.append(T)
            states.append(stepper.X[0].copy())
    return Trajectory(np.asarray(times), np.asarray(states))


def tangent_flow(s: FlowSystem, x0: np.ndarray, T: float, dt: float = DT_DEFAULT,
                 store_stride: int = STORE_STRIDE) -> TangentFlow:
    """Jointly integrate x' = f(x) and Phi' = jac(x) Phi, Phi(0) = I."""
    x0 = s.manifold.check_point(x0)
    n_full, rem = _plan_steps(T, dt)
    stepper = _Stepper(s, x0[None, :], dt, tangent=True)
    times = [0.0]
    states = [stepper.X[0].copy()]
    phis = [stepper.P[0].copy()]
    with np.errstate(over="ignore", invalid="ignore", under="ignore"):
        for i in range(1, n_full + 1):
            stepper.advance(dt)
            if i % store_stride == 0 or (i == n_full and rem == 0.0):
                times.append(i * dt)
                states.append(stepper.X[0].copy())
                phis.append(stepper.P[0].copy())
        if rem > 0.0:
            stepper.advance(rem)
            times.append(T)
            states.append(stepper.X[0].copy())
            phis.append(stepper.P[0].copy())
    tf = TangentFlow(np.asarray(times), np.asarray(states), np.asarray(phis))
    dets = np.linalg.det(tf.phis)
    if np.any(dets <= 0.0):
        raise NumericsError("tangent flow lost orientation (det Phi <= 0)")
    return tf


def states_at(s: FlowSystem, X0: np.ndarray, times, dt: float = DT_DEFAULT,
              on_failure: str = "raise") -> np.ndarray:
    """Batched states captured exactly at the requested times.

    Returns (len(times), N, n); with on_failure="mask", escaped rows are nan.
    """
    times = sorted(float(t) for t in times)
    if times and times[0] < 0:
        raise ValueError("capture times must be >= 0")
    stepper = _Stepper(s, np.atleast_2d(np.asarray(X0, float)), dt,
                       on_failure=on_failure)
    out = []
    for t in times:
        stepper.run_to(t)
        out.append(stepper.X.copy())
    return np.asarray(out)


def tangent_at(s: FlowSystem, X0: np.ndarray, times, dt: float = DT_DEFAULT,
               on_failure: str = "raise"):
    """Batched (states, tangent maps) captured exactly at the given times."""
    times = sorted(float(t) for t in times)
    stepper = _Stepper(s, np.atleast_2d(np.asarray(X0, float)), dt,
                       tangent=True, on_failure=on_failure)
    xs, ps = [], []
    for t in times:
        stepper.run_to(t)
        xs.append(stepper.X.copy())
        ps.append(stepper.P.copy())
    return np.asarray(xs), np.asarray(ps)


# ------------------------------------------------------------ equilibria


def _newton_polish(s: FlowSystem, x0: np.ndarray, eq_tol: float = EQ_TOL,
                   max_iter: int = 100):
    """Damped Newton on f; returns (point, residual) or (None, residual)."""
    x = np.asarray(x0, dtype=float).copy()
    res = float(np.linalg.norm(s.f(x)))
    for _ in range(max_iter):
        if res < eq_tol:
            return x, res
        try:
            step = np.linalg.solve(s.jac(x), s.f(x))
        except np.linalg.LinAlgError:
            return None, res
        alpha = 1.0
        for _ in range(25):
            x_new = x - alpha * step
            res_new = float(np.linalg.norm(s.f(x_new)))
            if res_new <= res or alpha < 1e-8:
                break
            alpha *= 0.5  # damping on residual increase
        x, res = x_new, res_new
        if not np.all(np.isfinite(x)):
            return None, float("inf")
    return (x, res) if res < eq_tol else (None, res)


def find_equilibria(s: FlowSystem, seeds, eq_tol: float = EQ_TOL,
                    cluster_radius: float = CLUSTER_RADIUS) -> list:
    """Newton from every seed; keep |f| < eq_tol, dedupe within cluster_radius."""
    seeds = [np.asarray(x, dtype=float) for x in seeds]
    if not seeds:
        raise ValueError("seeds must be nonempty")
    found: list[np.ndarray] = []
    for x0 in seeds:
        p, res = _newton_polish(s, x0, eq_tol)
        if p is None or res >= eq_tol:
            continue
        if not any(np.linalg.norm(p - q) < cluster_radius for q in found):
            found.append(p)
    found.sort(key=lambda p: tuple(np.round(p, 8)))
    return found


# ----------------------------------------------------------- omega limits


def _segment_min_dist(p: np.ndarray, pts: np.ndarray) -> float:
    """Min distance from p to the polyline through pts."""
    a, b = pts[:-1], pts[1:]
    ab = b - a
    denom = np.sum(ab * ab, axis=1)
    denom[denom == 0.0] = 1.0
    t = np.clip(np.sum((p - a) * ab, axis=1) / denom, 0.0, 1.0)
    proj = a + t[:, None] * ab
    return float(np.min(np.linalg.norm(p - proj, axis=1)))


def classify_tail(s: FlowSystem, tail: np.ndarray,
                  cluster_radius: float = CLUSTER_RADIUS,
                  eq_tol: float = EQ_TOL) -> OmegaEstimate:
    """Classify the tail window of an orbit; shared by single and ensemble paths."""
    if not np.all(np.isfinite(tail)):
        return OmegaEstimate(UNDETERMINED)
    diam = float(np.linalg.norm(tail.max(axis=0) - tail.min(axis=0)))
    if diam < cluster_radius:
        mean = tail.mean(axis=0)
        p, res = _newton_polish(s, mean, eq_tol)
        if (p is not None and res < 10.0 * eq_tol
                and float(np.max(np.linalg.norm(tail - p, axis=1))) < cluster_radius):
            return OmegaEstimate(SINGLETON, point=p, residual=res)
        return OmegaEstimate(UNDETERMINED, residual=res)
    anchor = tail[0]
    dists = np.linalg.norm(tail - anchor, axis=1)
    away = np.flatnonzero(dists > 10.0 * cluster_radius)
    if len(away) > 0 and away[0] + 1 < len(tail):
        back = _segment_min_dist(anchor, tail[away[0]:])
        if back < cluster_radius:
            step = max(1, len(tail) // 64)
            return OmegaEstimate(NON_SINGLETON, witnesses=tail[::step].copy())
    return OmegaEstimate(UNDETERMINED)


def omega_limit(s: FlowSystem, x0: np.ndarray, T: float, dt: float = DT_DEFAULT,
                tail_fraction: float = TAIL_FRACTION,
                cluster_radius: float = CLUSTER_RADIUS,
                eq_tol: float = EQ_TOL,
                store_stride: int = STORE_STRIDE) -> OmegaEstimate:
    """Integrate to T and classify the last tail_fraction of stored states."""
    traj = integrate(s, x0, T, dt, store_stride)
    tail = traj.states[traj.times >= (1.0 - tail_fraction) * T]
    return classify_tail(s, tail, cluster_radius, eq_tol)


def ensemble_tails(s: FlowSystem, X0: np.ndarray, T: float,
                   dt: float = DT_DEFAULT,
                   tail_fraction: float = TAIL_FRACTION,
                   store_stride: int = STORE_STRIDE):
    """Batched integration that stores only the tail window.

    Returns (tail_times, tails) with tails of shape (k, N, n); escaped rows
    carry nan and classify as escapes downstream.
    """
    X0 = np.atleast_2d(np.asarray(X0, dtype=float))
    n_full, rem = _plan_steps(T, dt)
    total = n_full + (1 if rem > 0.0 else 0)
    tail_start = int(np.ceil((1.0 - tail_fraction) * total))
    stepper = _Stepper(s, X0, dt, on_failure="mask")
    times, frames = [], []
    with np.errstate(over="ignore", invalid="ignore", under="ignore"):
        for i in range(1, total + 1):
            h = dt if i <= n_full else rem
            stepper.advance(h)
            if i >= tail_start and ((i - tail_start) % store_stride == 0 or i == total):
                times.append(min(i * dt, T) if i <= n_full else T)
                frames.append(stepper.X.copy())
    return np.asarray(times), np.asarray(frames)


def ensemble_omega(s: FlowSystem, X0: np.ndarray, T: float,
                   dt: float = DT_DEFAULT,
                   tail_fraction: float = TAIL_FRACTION,
                   cluster_radius: float = CLUSTER_RADIUS,
                   eq_tol: float = EQ_TOL,
                   store_stride: int = STORE_STRIDE):
    """Omega-limit estimates for a batch; escaped samples come back as None."""
    _, frames = ensemble_tails(s, X0, T, dt, tail_fraction, store_stride)
    out = []
    for j in range(frames.shape[1]):
        tail = frames[:, j, :]
        if not np.all(np.isfinite(tail)):
            out.append(None)  # escaped
        else:
            out.append(classify_tail(s, tail, cluster_radius, eq_tol))
    return out


# ------------------------------------------------------------- validation


def validate_jacobian(s: FlowSystem, samples: int = 100, seed: int = 0,
                      scale: float = 1.0) -> float:
    """Max component error of jac vs central differences of f."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(samples):
        x = s.manifold.random_point(rng, scale)
        J = s.jac(x)
        h = 1e-6 * (1.0 + np.linalg.norm(x))
        for i in range(s.dim):
            e = np.zeros(s.dim)
            e[i] = h
            col = (s.f(x + e) - s.f(x - e)) / (2.0 * h)
            worst = max(worst, float(np.max(np.abs(J[:, i] - col))))
    return worst
