"""Monte-Carlo checks of the convergence theory on concrete systems.

Every experiment is seeded and deterministic: sample i draws from a
generator keyed by (seed, i), and aggregation uses commutative counters,
so chunked/threaded and serial runs produce identical reports.

"Almost every orbit converges" is operationalized honestly: a converged
fraction with a 95% binomial interval, plus a basin-boundary bisection
scan showing the non-convergent set is thin along random transects.
Undetermined omega-estimates reduce the effective sample and are always
reported, never coerced into a theorem-friendly bucket.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field as dc_field

import numpy as np

from . import flow as flowmod
from . import positivity
from .conefield import ConeField, ConstantField
from .errors import ProbeConstructionError, UnsupportedInputError
from .flow import NON_SINGLETON, SINGLETON, UNDETERMINED
from .order import INCOMPARABLE, LEQ_STRICT, leq_flat

MATCH_TOL = 1e-3  # singleton limits closer than this are the same equilibrium
_Z95 = 1.959963984540054


def wilson_interval(k: int, n: int, z: float = _Z95):
    """95% score interval for a binomial fraction k/n."""
    if n == 0:
        return (0.0, 1.0)
    ph = k / n
    den = 1.0 + z * z / n
    center = (ph + z * z / (2 * n)) / den
    half = z * math.sqrt(ph * (1 - ph) / n + z * z / (4 * n * n)) / den
    return (max(0.0, center - half), min(1.0, center + half))


def _box_array(box, dim: int) -> np.ndarray:
    box = np.asarray(box, dtype=float)
    if box.ndim == 0:
        box = np.array([[-float(box), float(box)]] * dim)
    elif box.ndim == 1:
        if box.shape[0] != 2:
            raise ValueError("1-d box must be (lo, hi)")
        box = np.tile(box, (dim, 1))
    if box.shape != (dim, 2) or np.any(box[:, 1] <= box[:, 0]):
        raise ValueError("box must give lo < hi per dimension")
    return box


def sample_box(box, dim: int, N: int, seed: int) -> np.ndarray:
    """N uniform samples; sample i is drawn from generator (seed, i)."""
    box = _box_array(box, dim)
    out = np.empty((N, dim))
    for i in range(N):
        r = np.random.default_rng([seed, i])
        out[i] = r.uniform(box[:, 0], box[:, 1])
    return out


def sample_states(s: flowmod.FlowSystem, box, N: int, seed: int) -> np.ndarray:
    """Manifold-aware sampling: uniform box on flat space, random SPD points
    (log-uniform eigenvalues) on SPD, where a coordinate box would leave
    the chart."""
    if s.manifold.kind == "euclidean":
        return sample_box(box, s.dim, N, seed)
    out = np.empty((N, s.dim))
    for i in range(N):
        r = np.random.default_rng([seed, i])
        out[i] = s.manifold.random_point(r)
    return out


def _omega_batch(s, X0, T, dt, threads=None, tail_stride=flowmod.STORE_STRIDE, chunk=1024):
    chunks = [X0[i:i + chunk] for i in range(0, len(X0), chunk)]

    def worker(block):
        return flowmod.ensemble_omega(s, block, T, dt, store_stride=tail_stride)

    if threads is not None and threads > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            parts = list(ex.map(worker, chunks))
    else:
        parts = [worker(block) for block in chunks]
    return [est for part in parts for est in part]


def _match_cluster(points: list, p: np.ndarray, tol: float):
    for k, q in enumerate(points):
        if np.linalg.norm(p - q) < tol:
            return k
    return None


def _require_flat(field: ConeField):
    if not isinstance(field, ConstantField):
        raise UnsupportedInputError(
            "this check needs the flat order oracle (a constant cone field)")
    return field.cone


def _cone_elements(c, pairs: int, rng: np.random.Generator) -> np.ndarray:
    gens = c.generators()
    base = (gens / np.linalg.norm(gens, axis=1, keepdims=True)
            if gens is not None else c.boundary_rays(rng, 4))
    dirs = np.empty((pairs, c.dim))
    for i in range(pairs):
        if i % 3 == 0:
            dirs[i] = base[(i // 3) % len(base)]
        else:
            w = rng.uniform(0.1, 1.0, len(base))
            v = w @ base
            dirs[i] = v / np.linalg.norm(v)
    return dirs


# ------------------------------------------------------- generic convergence


@dataclass
class ConvergenceReport:
    total: int
    converged: int
    nonsingleton: int
    undetermined: int
    escapes: int
    per_equilibrium: list  # [{"point": [...], "count": int}, ...]
    T: float
    seed: int
    interval: tuple
    dp_status: str | None
    samples: list = dc_field(default_factory=list)  # per-sample CSV rows
    findings: list = dc_field(default_factory=list)

    @property
    def converged_fraction(self) -> float:
        return self.converged / self.total if self.total else 0.0


def generic_convergence(s: flowmod.FlowSystem, field: ConeField, box, N: int,
                        T: float, seed: int = 0, dt: float = flowmod.DT_DEFAULT,
                        threads: int | None = None,
                        dp_check: bool = True) -> ConvergenceReport:
    """Classify the omega-limits of N uniform samples.

    The strong-positivity precondition is probed by check_dp and recorded
    in the report (a missing SDP verdict flags the run rather than
    aborting it, so control cases stay runnable).  Escaping samples are
    counted, not fatal.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    dp_status = None
    if dp_check:
        dp_times = [min(0.1, T / 2.0), min(1.0, T)]
        dp = positivity.check_dp(s, field, 25, 6, dp_times, seed, dt=dt)
        dp_status = dp.status

    X0 = sample_states(s, box, N, seed)
    estimates = _omega_batch(s, X0, T, dt, threads)

    eq_points: list[np.ndarray] = []
    eq_counts: list[int] = []
    converged = nonsingleton = undet = escapes = 0
    samples, findings = [], []
    cone = field.cone if isinstance(field, ConstantField) else None
    for i, est in enumerate(estimates):
        limit, residual = None, None
        if est is None:
            escapes += 1
            outcome = "escape"
        elif est.kind == SINGLETON:
            converged += 1
            outcome = "converged"
            limit = est.point
            residual = est.residual
            k = _match_cluster(eq_points, est.point, MATCH_TOL)
            if k is None:
                eq_points.append(est.point.copy())
                eq_counts.append(1)
            else:
                eq_counts[k] += 1
        elif est.kind == NON_SINGLETON:
            nonsingleton += 1
            outcome = "non_singleton"
            if cone is not None and dp_status == positivity.SDP:
                # omega-limit sets of strongly positive flows are unordered;
                # an ordered witness pair is a finding, not a crash
                W = est.witnesses
                for a in range(len(W)):
                    for b in range(len(W)):
                        if a != b and leq_flat(cone, W[a], W[b]).relation != INCOMPARABLE:
                            findings.append({
                                "kind": "ordered_omega_witnesses",
                                "sample": i,
                                "points": [W[a].tolist(), W[b].tolist()]})
                            break
        else:
            undet += 1
            outcome = "undetermined"
        samples.append({
            "index": i,
            "x0": X0[i].tolist(),
            "outcome": outcome,
            "limit": None if limit is None else np.asarray(limit).tolist(),
            "residual": residual if residual is not None else None,
        })

    per_eq = [{"point": p.tolist(), "count": c}
              for p, c in sorted(zip(eq_points, eq_counts),
                                 key=lambda pc: (-pc[1], tuple(pc[0])))]
    return ConvergenceReport(
        total=N, converged=converged, nonsingleton=nonsingleton,
        undetermined=undet, escapes=escapes, per_equilibrium=per_eq,
        T=T, seed=seed, interval=wilson_interval(converged, N),
        dp_status=dp_status, samples=samples, findings=findings)


def basin_boundary_scan(s: flowmod.FlowSystem, equilibria, transect_pairs,
                        classify_T: float = 50.0, dt: float = flowmod.DT_DEFAULT,
                        width_tol: float = 1e-3, snap_radius: float = 0.05,
                        max_rounds: int = 40) -> dict:
    """Bisect straddling segments to localize basin boundaries.

    Each transect (a, b) must have its endpoints classify to different
    attractors (nearest equilibrium of the time-classify_T state, within
    snap_radius).  Bisection keeps the a-side label on the lower end;
    midpoints that classify elsewhere (other attractor, or nowhere) move
    the upper end, so the bracket always contains the basin boundary.
    """
    equilibria = [np.asarray(e, dtype=float) for e in equilibria]
    if not equilibria:
        raise ValueError("need the attractor list to classify transects")

    def classify(P):
        final = flowmod.states_at(s, P, [classify_T], dt,
                                  on_failure="mask")[0]
        labels = []
        for row in final:
            lab = None
            if np.all(np.isfinite(row)):
                d = [np.linalg.norm(row - e) for e in equilibria]
                k = int(np.argmin(d))
                if d[k] < snap_radius:
                    lab = k
            labels.append(lab)
        return labels

    lo = np.array([np.asarray(a, float) for a, _ in transect_pairs])
    hi = np.array([np.asarray(b, float) for _, b in transect_pairs])
    la = classify(lo)
    lb = classify(hi)
    for i, (ca, cb) in enumerate(zip(la, lb)):
        if ca is None or cb is None or ca == cb:
            raise ValueError(f"transect {i} does not straddle two basins")

    rounds = 0
    widths = np.linalg.norm(hi - lo, axis=1)
    while np.max(widths) > width_tol and rounds < max_rounds:
        mid = 0.5 * (lo + hi)
        lm = classify(mid)
        for i in range(len(transect_pairs)):
            if widths[i] <= width_tol:
                continue
            if lm[i] == la[i]:
                lo[i] = mid[i]
            else:
                hi[i] = mid[i]
        widths = np.linalg.norm(hi - lo, axis=1)
        rounds += 1

    transects = [{"lo": lo[i].tolist(), "hi": hi[i].tolist(),
                  "width": float(widths[i]),
                  "labels": (int(la[i]), int(lb[i]))}
                 for i in range(len(transect_pairs))]
    return {"transects": transects, "max_width": float(np.max(widths)),
            "rounds": rounds, "width_tol": width_tol,
            "classify_T": classify_T}


# ------------------------------------------------------------ pair theorems


def _sample_ordered_pairs(s, c, pairs: int, box, seed: int):
    X = sample_box(box, s.dim, pairs, seed)
    rng = np.random.default_rng([seed, 977])
    dirs = _cone_elements(c, pairs, rng)
    scale = rng.uniform(0.5, 2.0, (pairs, 1))
    Y = X + scale * dirs
    degenerate = np.arange(pairs) % 17 == 16
    Y[degenerate] = X[degenerate]
    return X, Y


def dichotomy_check(s: flowmod.FlowSystem, field: ConeField, pairs: int,
                    T: float, seed: int = 0, box=3.0,
                    dt: float = flowmod.DT_DEFAULT,
                    threads: int | None = None) -> dict:
    """Limit-set dichotomy on sampled ordered pairs x <= y.

    A violation is a pair of distinct singleton limits that is not
    strictly ordered, or intersecting non-singleton estimates whose
    near-intersection points fail the equilibrium residual.  Undetermined
    estimates are excluded and counted separately.
    """
    c = _require_flat(field)
    X, Y = _sample_ordered_pairs(s, c, pairs, box, seed)
    ests = _omega_batch(s, np.vstack([X, Y]), T, dt, threads)
    ex, ey = ests[:pairs], ests[pairs:]

    violations = strict_order = equal_singleton = 0
    excluded = escapes = mixed = 0
    findings = []
    for i in range(pairs):
        a, b = ex[i], ey[i]
        if a is None or b is None:
            escapes += 1
            continue
        if a.kind == UNDETERMINED or b.kind == UNDETERMINED:
            excluded += 1
            continue
        if a.kind == SINGLETON and b.kind == SINGLETON:
            if np.linalg.norm(a.point - b.point) < MATCH_TOL:
                equal_singleton += 1
            elif leq_flat(c, a.point, b.point).relation == LEQ_STRICT:
                strict_order += 1
            else:
                violations += 1
                findings.append({"kind": "unordered_distinct_limits",
                                 "pair": i,
                                 "px": a.point.tolist(),
                                 "py": b.point.tolist()})
        elif a.kind == NON_SINGLETON and b.kind == NON_SINGLETON:
            mixed += 1
            wa, wb = a.witnesses, b.witnesses
            d = np.linalg.norm(wa[:, None, :] - wb[None, :, :], axis=-1)
            near = np.argwhere(d < flowmod.CLUSTER_RADIUS)
            for ia, ib in near:
                res = float(np.linalg.norm(s.f(wa[ia])))
                if res >= 10.0 * flowmod.EQ_TOL:
                    violations += 1
                    findings.append({"kind": "nonequilibrium_intersection",
                                     "pair": i, "point": wa[ia].tolist(),
                                     "residual": res})
                    break
        else:
            mixed += 1
            single, multi = (a, b) if a.kind == SINGLETON else (b, a)
            lo_first = a.kind == SINGLETON
            ok = all(
                (leq_flat(c, single.point, w).relation == LEQ_STRICT
                 if lo_first else
                 leq_flat(c, w, single.point).relation == LEQ_STRICT)
                for w in multi.witnesses)
            if ok:
                strict_order += 1
            else:
                violations += 1
                findings.append({"kind": "unordered_mixed_limits", "pair": i})

    return {"violations": violations,
            "cases": {"strict_order": strict_order,
                      "equal_singleton": equal_singleton},
            "undetermined_excluded": excluded, "escapes": escapes,
            "nonsingleton_or_mixed": mixed, "pairs": pairs, "T": T,
            "seed": seed, "findings": findings, "system": s.name}


def colimit_check(s: flowmod.FlowSystem, field: ConeField, pairs: int,
                  T: float, seed: int = 0, box=3.0,
                  dt: float = flowmod.DT_DEFAULT,
                  threads: int | None = None) -> dict:
    """Ordered pairs sharing one singleton limit must sit at an equilibrium."""
    c = _require_flat(field)
    X, Y = _sample_ordered_pairs(s, c, pairs, box, seed)
    ests = _omega_batch(s, np.vstack([X, Y]), T, dt, threads)
    violations = checked = 0
    findings = []
    for i in range(pairs):
        a, b = ests[i], ests[pairs + i]
        if (a is None or b is None or a.kind != SINGLETON
                or b.kind != SINGLETON):
            continue
        if np.linalg.norm(a.point - b.point) >= MATCH_TOL:
            continue  # distinct limits: outside the assertion set
        checked += 1
        res = max(float(np.linalg.norm(s.f(a.point))),
                  float(np.linalg.norm(s.f(b.point))))
        if res >= 10.0 * flowmod.EQ_TOL:
            violations += 1
            findings.append({"kind": "colimit_not_equilibrium", "pair": i,
                             "point": a.point.tolist(), "residual": res})
    return {"violations": violations, "checked_pairs": checked,
            "pairs": pairs, "T": T, "seed": seed, "findings": findings,
            "system": s.name}


def convergence_criterion_check(s: flowmod.FlowSystem, field: ConeField,
                                x_samples: int, T_scan, seed: int = 0,
                                box=3.0, dt: float = flowmod.DT_DEFAULT,
                                omega_T: float = 100.0,
                                threads: int | None = None) -> dict:
    """Orbits comparable with their own time-T image must converge.

    A sample triggers when x <= phi_T(x) or phi_T(x) <= x for some T in
    T_scan; every triggered sample's omega-estimate must then be a
    singleton equilibrium.  confirmed == triggered on a passing run.
    """
    c = _require_flat(field)
    T_scan = sorted(float(t) for t in T_scan)
    if not T_scan or T_scan[0] <= 0:
        raise ValueError("T_scan times must be > 0")
    X = sample_box(box, s.dim, x_samples, seed)
    caught = flowmod.states_at(s, X, T_scan, dt, on_failure="mask")

    triggered_idx, trigger_rows = [], []
    for i in range(x_samples):
        hit = None
        for ti, t in enumerate(T_scan):
            xt = caught[ti, i]
            if not np.all(np.isfinite(xt)):
                continue
            fwd = leq_flat(c, X[i], xt).relation
            rev = leq_flat(c, xt, X[i]).relation
            if fwd != INCOMPARABLE or rev != INCOMPARABLE:
                hit = {"T": t,
                       "direction": "forward" if fwd != INCOMPARABLE else "reversed"}
                break
        if hit is not None:
            triggered_idx.append(i)
            trigger_rows.append(hit)

    confirmed = 0
    findings = []
    if triggered_idx:
        ests = _omega_batch(s, X[triggered_idx], omega_T, dt, threads)
        for j, est in enumerate(ests):
            if est is not None and est.kind == SINGLETON:
                confirmed += 1
            else:
                findings.append({"kind": "triggered_not_confirmed",
                                 "sample": triggered_idx[j],
                                 "x0": X[triggered_idx[j]].tolist(),
                                 "estimate": None if est is None else est.kind,
                                 "trigger": trigger_rows[j]})
    return {"triggered": len(triggered_idx), "confirmed": confirmed,
            "samples": x_samples, "T_scan": T_scan, "omega_T": omega_T,
            "seed": seed, "findings": findings, "system": s.name}


def trichotomy_check(s: flowmod.FlowSystem, field: ConeField, x0,
                     n_seq: int, T: float,
                     dt: float = flowmod.DT_DEFAULT,
                     match_tol: float = MATCH_TOL) -> dict:
    """Classify the limits of a monotone approximating sequence.

    Builds x_n = x0 - w/n (w the interior section), verifies the chain
    x_1 <= ... <= x_n <= x0 strictly, and matches the omega-limits against
    the three alternatives: (1) strictly increasing limits below omega(x0),
    (2) all limits equal omega(x0), (3) all limits equal a common p
    strictly below omega(x0).  consistent is True iff exactly one branch
    matches.
    """
    c = _require_flat(field)
    x0 = np.asarray(x0, dtype=float)
    if n_seq < 2:
        raise ValueError("n_seq must be >= 2")
    w = field.section(x0)
    xs = [x0 - w / n for n in range(1, n_seq + 1)]
    for i in range(len(xs) - 1):
        if leq_flat(c, xs[i], xs[i + 1]).relation != LEQ_STRICT:
            raise ProbeConstructionError("sequence is not strictly increasing")
    if leq_flat(c, xs[-1], x0).relation != LEQ_STRICT:
        raise ProbeConstructionError("sequence does not approach x0 from below")

    ests = _omega_batch(s, np.vstack(xs + [x0]), T, dt)
    if any(e is None or e.kind != SINGLETON for e in ests):
        return {"branch": None, "consistent": False,
                "reason": "non-singleton or undetermined omega estimate",
                "n_seq": n_seq, "T": T, "system": s.name}
    ps = [e.point for e in ests[:-1]]
    p0 = ests[-1].point

    def eq(a, b):
        return np.linalg.norm(a - b) < match_tol

    def ll(a, b):
        return (not eq(a, b)) and leq_flat(c, a, b).relation == LEQ_STRICT

    b1 = (all(ll(ps[i], ps[i + 1]) for i in range(len(ps) - 1))
          and all(ll(p, p0) for p in ps))
    b2 = all(eq(p, p0) for p in ps)
    b3 = (all(eq(p, ps[0]) for p in ps) and ll(ps[0], p0))
    matches = [b1, b2, b3]
    branch = matches.index(True) + 1 if sum(matches) == 1 else None
    return {"branch": branch, "consistent": sum(matches) == 1,
            "branch_flags": {"1": b1, "2": b2, "3": b3},
            "limits": [p.tolist() for p in ps], "limit_x0": p0.tolist(),
            "n_seq": n_seq, "T": T, "system": s.name}
