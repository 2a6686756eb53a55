"""Command-line front end: scenario parsing, dispatch, report emission.

Subcommands: check-dp | pf | converge | dichotomy | trichotomy | criterion
| order | causal | list.  Reports go to --out as JSON (stdout by default)
and optionally to --csv as flat per-sample rows.  Exit codes: 0 clean run,
1 positivity violation / property violations, 2 usage or scenario error,
3 numeric failure.

The env var CONEDYN_THREADS caps the worker threads used by the
Monte-Carlo experiments; per-sample sub-seeding keeps threaded and serial
runs byte-identical.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import asdict, dataclass

import numpy as np

from . import experiments, flow, order, pf, positivity, registry, reports
from .conefield import ConeField, ConstantField, HomogeneousPSDField, field_from_spec
from .cones import Lorentz, Orthant
from .errors import (
    ConedynError,
    DimensionMismatchError,
    ScenarioError,
    UnsupportedInputError,
)

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_USAGE = 2
EXIT_NUMERIC = 3

COMMANDS = ("check-dp", "pf", "converge", "dichotomy", "trichotomy",
            "criterion", "order", "causal", "list")

_SCENARIO_KEYS = {"system", "experiment", "field", "T", "dt", "N", "seed",
                  "x0", "out", "csv"}
_NO_SYSTEM = ("order", "causal", "list")


@dataclass
class Scenario:
    system: str | None = None
    experiment: str = "converge"
    field: object = None  # token string or field-spec dict; None -> default
    T: float = 100.0
    dt: float = 1e-3
    N: int = 1000
    seed: int = 0
    x0: list | None = None
    out: str | None = None
    csv: str | None = None


def validate_scenario(data: dict) -> Scenario:
    """Build a Scenario from raw dict data, collecting every violation."""
    problems = []
    if not isinstance(data, dict):
        raise ScenarioError(["scenario must be a JSON object"])
    for key in data:
        if key not in _SCENARIO_KEYS:
            problems.append(f"{key}: unknown key")

    experiment = data.get("experiment", "converge")
    if experiment not in COMMANDS or experiment == "list":
        problems.append(f"experiment: unknown experiment {experiment!r}")

    system = data.get("system")
    if experiment not in _NO_SYSTEM:
        if system is None:
            problems.append("system: required for this experiment")
        elif system not in registry.SYSTEMS:
            problems.append(f"system: unknown system {system!r}")
    elif system is not None and system not in registry.SYSTEMS:
        problems.append(f"system: unknown system {system!r}")

    def _pos(key, default, kind=float, minimum=None):
        val = data.get(key, default)
        try:
            val = kind(val)
        except (TypeError, ValueError):
            problems.append(f"{key}: expected {kind.__name__}")
            return default
        if val <= 0:
            problems.append(f"{key}: must be positive")
        if minimum is not None and val < minimum:
            problems.append(f"{key}: must be >= {minimum}")
        return val

    T = _pos("T", 100.0)
    dt = _pos("dt", 1e-3)
    if isinstance(T, float) and isinstance(dt, float) and 0 < T < dt:
        problems.append("dt: must be <= T")
    N = _pos("N", 1000, int, 1)
    seed = data.get("seed", 0)
    if not isinstance(seed, int) or isinstance(seed, bool) or seed < 0:
        problems.append("seed: must be a nonnegative integer")

    x0 = data.get("x0")
    if x0 is not None:
        if (not isinstance(x0, list) or not x0
                or not all(isinstance(v, (int, float)) for v in x0)):
            problems.append("x0: must be a nonempty list of numbers")
    fld = data.get("field")
    if fld is not None and not isinstance(fld, (str, dict)):
        problems.append("field: must be a token string or a field spec object")
    for key in ("out", "csv"):
        if data.get(key) is not None and not isinstance(data[key], str):
            problems.append(f"{key}: must be a string path")

    if problems:
        raise ScenarioError(problems)
    return Scenario(system=system, experiment=experiment, field=fld,
                    T=T, dt=dt, N=N, seed=seed, x0=x0,
                    out=data.get("out"), csv=data.get("csv"))


def load_scenario(path: str) -> Scenario:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except json.JSONDecodeError as e:
        raise ScenarioError(
            [f"{path}: JSON parse error at line {e.lineno} col {e.colno}: {e.msg}"])
    except OSError as e:
        raise ScenarioError([f"{path}: {e}"])
    return validate_scenario(data)


def save_scenario(s: Scenario, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump({k: v for k, v in asdict(s).items() if v is not None},
                  fh, indent=2, sort_keys=True)
        fh.write("\n")


def resolve_field(s: Scenario, system: flow.FlowSystem) -> ConeField:
    spec = s.field
    if spec is None:
        return registry.default_field(system)
    if isinstance(spec, dict):
        return field_from_spec(spec)
    token = spec.strip()
    if token.startswith("{"):
        return field_from_spec(json.loads(token))
    if token == "orthant":
        return ConstantField(Orthant(system.dim))
    if token == "lorentz":
        return ConstantField(Lorentz(system.dim))
    if token in ("psd", "homogeneous_spd"):
        if system.manifold.kind != "spd":
            raise UnsupportedInputError(
                "the psd field needs an SPD-manifold system")
        return HomogeneousPSDField(system.manifold.n)
    raise UnsupportedInputError(
        f"unknown field token {token!r}; use orthant|lorentz|psd or JSON")


def _threads() -> int | None:
    raw = os.environ.get("CONEDYN_THREADS")
    if not raw:
        return None
    try:
        return max(1, int(raw))
    except ValueError:
        return None


# ------------------------------------------------------------------ handlers


def _cmd_list(scen: Scenario):
    lines = ["system          dim  description"]
    for name in sorted(registry.SYSTEMS):
        s = registry.get_system(name)
        lines.append(f"{name:<15} {s.dim:>4}  {registry.DESCRIPTIONS[name]}")
    text = "\n".join(lines) + "\n"
    if scen.out:
        with open(scen.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return None, None, EXIT_OK


def _cmd_check_dp(scen: Scenario):
    system = registry.get_system(scen.system)
    field = resolve_field(scen, system)
    times = sorted({min(t, scen.T) for t in (0.1, 1.0, 5.0)})
    verdict = positivity.check_dp(system, field, x_samples=scen.N,
                                  ray_samples=8, times=times,
                                  seed=scen.seed, dt=scen.dt)
    report = reports.make_report(
        "check_dp", verdict.params, scen.seed,
        counts={"x_samples": scen.N, "ray_samples": 8, "times": len(times)},
        status=verdict.status, worst_margin=verdict.worst_margin,
        boundary_margin=verdict.boundary_margin, witness=verdict.witness)
    code = EXIT_VIOLATION if verdict.status == positivity.VIOLATED else EXIT_OK
    return report, None, code


def _cmd_pf(scen: Scenario):
    system = registry.get_system(scen.system)
    field = resolve_field(scen, system)
    x0 = (np.asarray(scen.x0, dtype=float) if scen.x0
          else registry.DEFAULT_X0[scen.system])
    res = pf.pf_direction(system, field, x0, T=scen.T, dt=scen.dt)
    log = res.contraction_log
    report = reports.make_report(
        "pf", {"system": scen.system, "T": scen.T, "dt": scen.dt,
               "x0": x0.tolist()},
        scen.seed, counts={"stored_steps": len(log)},
        status="converged" if res.converged else "not_converged",
        converged=res.converged,
        final_distance=float(log[-1, 1]),
        direction=res.direction.vec.tolist(),
        base_point=res.direction.base.tolist(),
        contraction_log_tail=log[-5:].tolist())
    return report, None, EXIT_OK


def _cmd_converge(scen: Scenario):
    system = registry.get_system(scen.system)
    field = resolve_field(scen, system)
    rep = experiments.generic_convergence(
        system, field, box=3.0, N=scen.N, T=scen.T, seed=scen.seed,
        dt=scen.dt, threads=_threads())
    counts = {"total": rep.total, "converged": rep.converged,
              "nonsingleton": rep.nonsingleton,
              "undetermined": rep.undetermined, "escapes": rep.escapes}
    report = reports.make_report(
        "converge",
        {"system": scen.system, "N": scen.N, "T": scen.T, "dt": scen.dt,
         "box": 3.0},
        scen.seed, counts, interval=rep.interval, findings=rep.findings,
        status=rep.dp_status, per_equilibrium=rep.per_equilibrium,
        converged_fraction=rep.converged_fraction)
    ok = rep.dp_status == positivity.SDP and rep.escapes == 0
    return report, rep.samples, EXIT_OK if ok else EXIT_VIOLATION


def _cmd_dichotomy(scen: Scenario):
    system = registry.get_system(scen.system)
    field = resolve_field(scen, system)
    rep = experiments.dichotomy_check(system, field, pairs=scen.N, T=scen.T,
                                      seed=scen.seed, dt=scen.dt,
                                      threads=_threads())
    report = reports.make_report(
        "dichotomy",
        {"system": scen.system, "pairs": scen.N, "T": scen.T, "dt": scen.dt},
        scen.seed,
        counts={"violations": rep["violations"], **rep["cases"],
                "undetermined_excluded": rep["undetermined_excluded"],
                "escapes": rep["escapes"]},
        findings=rep["findings"],
        status="ok" if rep["violations"] == 0 else "violations")
    code = EXIT_VIOLATION if rep["violations"] > 0 else EXIT_OK
    return report, None, code


def _cmd_criterion(scen: Scenario):
    system = registry.get_system(scen.system)
    field = resolve_field(scen, system)
    t_scan = [t for t in (0.5, 1.0, 2.0, 5.0) if t <= scen.T] or [scen.T]
    rep = experiments.convergence_criterion_check(
        system, field, x_samples=scen.N, T_scan=t_scan, seed=scen.seed,
        dt=scen.dt, omega_T=scen.T, threads=_threads())
    report = reports.make_report(
        "criterion",
        {"system": scen.system, "x_samples": scen.N, "T_scan": t_scan,
         "omega_T": scen.T, "dt": scen.dt},
        scen.seed,
        counts={"triggered": rep["triggered"], "confirmed": rep["confirmed"],
                "samples": rep["samples"]},
        findings=rep["findings"],
        status="ok" if rep["triggered"] == rep["confirmed"] else "violations")
    code = (EXIT_OK if rep["triggered"] == rep["confirmed"]
            else EXIT_VIOLATION)
    return report, None, code


def _cmd_trichotomy(scen: Scenario):
    system = registry.get_system(scen.system)
    field = resolve_field(scen, system)
    x0 = (np.asarray(scen.x0, dtype=float) if scen.x0
          else registry.DEFAULT_X0[scen.system])
    rep = experiments.trichotomy_check(system, field, x0, n_seq=8,
                                       T=scen.T, dt=scen.dt)
    report = reports.make_report(
        "trichotomy",
        {"system": scen.system, "x0": x0.tolist(), "n_seq": 8, "T": scen.T,
         "dt": scen.dt},
        scen.seed,
        counts={"branch": rep["branch"] or 0,
                "consistent": int(rep["consistent"])},
        status="ok" if rep["consistent"] else "violations",
        branch=rep["branch"], detail=rep)
    code = EXIT_OK if rep["consistent"] else EXIT_VIOLATION
    return report, None, code


def _cmd_order(scen: Scenario):
    dim = 2
    cone = Orthant(dim)
    if isinstance(scen.field, str) and scen.field == "lorentz":
        cone = Lorentz(dim)
    oracle = order.FlatOrderOracle(cone)
    sequences = min(scen.N, 500)
    qc = order.quasi_closed_probe(oracle, sequences, scen.seed)
    props = order.flat_order_properties(cone, min(scen.N, 1000), scen.seed)
    violations = (qc["violations"] + props["antisymmetry_violations"]
                  + props["transitivity_violations"])
    report = reports.make_report(
        "order", {"cone": cone.name, "sequences": sequences},
        scen.seed,
        counts={"violations": violations,
                "quasi_closed_violations": qc["violations"],
                "antisymmetry_violations": props["antisymmetry_violations"],
                "transitivity_violations": props["transitivity_violations"]},
        status="ok" if violations == 0 else "violations")
    return report, None, EXIT_OK if violations == 0 else EXIT_VIOLATION


def _cmd_causal(scen: Scenario):
    p = np.array([0.0, 0.0])
    region = ((0.0, 2.0), (-2.0, 2.0))
    resolution = 101
    analytic = order.minkowski_future(p, order.CAUSAL, region, resolution)
    reached = order.reachable_grid("minkowski", p, region, resolution, 16)
    agreement = reached.agreement(analytic)
    qc = order.quasi_closed_probe(order.MinkowskiOracle(),
                                  min(scen.N, 500), scen.seed)
    pu = order.push_up_probe(1000, scen.seed)
    ci = order.continuity_probe("inner", p, [np.array([-2.0, 0.0])], [0.5])
    co = order.continuity_probe("outer", p, [np.array([0.0, 3.0])], [0.5])
    violations = qc["violations"] + pu["violations"]
    if agreement < 0.99:
        violations += 1
    if ci["max_delta_passing"] is None or co["max_delta_passing"] is None:
        violations += 1
    report = reports.make_report(
        "causal",
        {"region": [list(region[0]), list(region[1])],
         "resolution": resolution, "directions": 16},
        scen.seed,
        counts={"violations": violations,
                "quasi_closed_violations": qc["violations"],
                "push_up_violations": pu["violations"]},
        status="ok" if violations == 0 else "violations",
        agreement=agreement,
        continuity={"inner": ci, "outer": co})
    return report, None, EXIT_OK if violations == 0 else EXIT_VIOLATION


_HANDLERS = {
    "list": _cmd_list,
    "check-dp": _cmd_check_dp,
    "pf": _cmd_pf,
    "converge": _cmd_converge,
    "dichotomy": _cmd_dichotomy,
    "criterion": _cmd_criterion,
    "trichotomy": _cmd_trichotomy,
    "order": _cmd_order,
    "causal": _cmd_causal,
}


# ------------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="conedyn",
        description="cone fields, positive flows, and conal-order checks")
    sub = parser.add_subparsers(dest="command")
    for name in COMMANDS:
        p = sub.add_parser(name, help=f"run the {name} task")
        p.add_argument("--scenario", help="JSON scenario file")
        p.add_argument("--system", help="registry system key")
        p.add_argument("--field",
                       help="cone field: orthant|lorentz|psd or JSON spec")
        p.add_argument("--seed", type=int, help="base seed (default 0)")
        p.add_argument("--n", type=int, dest="N",
                       help="sample/pair count (default 1000)")
        p.add_argument("--T", type=float, help="horizon (default 100)")
        p.add_argument("--dt", type=float, help="RK4 step (default 1e-3)")
        p.add_argument("--x0", help="comma-separated start point")
        p.add_argument("--out", help="JSON report path (default stdout)")
        p.add_argument("--csv", help="per-sample CSV path")
    return parser


def _scenario_from_args(args) -> Scenario:
    data = {}
    if args.scenario:
        data = asdict(load_scenario(args.scenario))
        data = {k: v for k, v in data.items() if v is not None}
    data["experiment"] = args.command
    for key, attr in (("system", "system"), ("field", "field"),
                      ("seed", "seed"), ("N", "N"), ("T", "T"),
                      ("dt", "dt"), ("out", "out"), ("csv", "csv")):
        val = getattr(args, attr, None)
        if val is not None:
            data[key] = val
    if getattr(args, "x0", None):
        try:
            data["x0"] = [float(v) for v in args.x0.split(",")]
        except ValueError:
            raise ScenarioError(["x0: expected comma-separated floats"])
    if args.command == "list":
        return Scenario(experiment="converge", system=None,
                        out=data.get("out"))
    return validate_scenario(data)


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code in (0, None) else EXIT_USAGE
    if args.command is None:
        parser.print_help(sys.stderr)
        return EXIT_USAGE
    try:
        scen = _scenario_from_args(args)
    except ScenarioError as e:
        print("scenario error:", file=sys.stderr)
        for problem in e.problems:
            print(f"  {problem}", file=sys.stderr)
        return EXIT_USAGE

    try:
        report, rows, code = _HANDLERS[args.command](scen)
    except (ScenarioError, UnsupportedInputError, DimensionMismatchError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (ConedynError, np.linalg.LinAlgError, FloatingPointError) as e:
        print(f"numeric failure: {e}", file=sys.stderr)
        return EXIT_NUMERIC

    if report is not None:
        report["exit_code"] = code
        reports.validate_report(report)
        reports.write_json(report, scen.out)
    if rows is not None and scen.csv:
        reports.sample_rows_to_csv(rows, scen.csv)
    return code


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
