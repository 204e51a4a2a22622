"""Command-line entry point: `opsys norm | cone | dual | tower | suite`.

Every invocation emits a run report (JSON with --json, a readable table
otherwise) listing named checks with pass/fail/undecided status and the
module operation that produced each one.  Exit codes: 0 all checks pass,
2 any failed, 3 only undecided, 64 usage error, 65 malformed input file.

Reports are deterministic for a fixed seed and configuration, with the
single exception of the elapsed_ms field (wall time); determinism tests
compare reports with that field normalized.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time

import numpy as np

from . import linalg as la
from .dual import Functional, MatrixFunctional, cp_choi_problem, is_cp
from .errors import OpsysError, ParseError
from .norms import norm_report, min_order_norm, order_norm_h
from .suites import SUITES, Check, run_suite
from .systems import cone_member, named_system, system_from_json
from .towers import make_tower, verify_dual_cones, verify_gamma
from .dual import verify_dual_unit_equivalences, faithful_state

SCHEMA = "opsys-report/1"

EXIT_OK = 0
EXIT_FAIL = 2
EXIT_UNDECIDED = 3
EXIT_USAGE = 64
EXIT_DATA = 65


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse defaults to exit code 2
        raise _UsageError(message)


def exit_code_for(statuses) -> int:
    statuses = list(statuses)
    if any(s == "fail" for s in statuses):
        return EXIT_FAIL
    if any(s == "undecided" for s in statuses):
        return EXIT_UNDECIDED
    return EXIT_OK


def _default_tol(args) -> float:
    if args.tol is not None:
        return args.tol
    env = os.environ.get("OPSYS_TOL")
    if env is not None:
        try:
            return float(env)
        except ValueError:
            raise ParseError(f"OPSYS_TOL={env!r} is not a number") from None
    return 1e-8


def _load_json_file(path: str):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path} is not valid JSON: {exc}") from exc


def _load_system(spec: str):
    if os.path.exists(spec):
        return system_from_json(_load_json_file(spec))
    return named_system(spec)


def _load_matrix(path: str) -> np.ndarray:
    return la.decode_matrix(_load_json_file(path))


def _load_matrix_functional(system, path: str) -> MatrixFunctional:
    obj = _load_json_file(path)
    if isinstance(obj, dict) and "grid" in obj:
        grid = [
            [Functional(system, la.decode_matrix(cell)) for cell in row]
            for row in obj["grid"]
        ]
        return MatrixFunctional(grid)
    if isinstance(obj, dict) and "riesz" in obj:
        return MatrixFunctional([[Functional(system, la.decode_matrix(obj["riesz"]))]])
    raise ParseError(f'{path}: expected an object with "grid" or "riesz"')


def _report(command: str, seed: int, config: dict, checks: list[Check], t0: float) -> dict:
    ordered = sorted(checks, key=lambda c: c.name)
    return {
        "schema": SCHEMA,
        "command": command,
        "seed": seed,
        "config": config,
        "checks": [c.to_json() for c in ordered],
        "elapsed_ms": int((time.monotonic() - t0) * 1000),
    }


def _emit(report: dict, as_json: bool) -> None:
    if as_json:
        print(json.dumps(report, indent=2, sort_keys=True))
        return
    print(f"# {report['command']} (seed {report['seed']})")
    width = max((len(c["name"]) for c in report["checks"]), default=10)
    for c in report["checks"]:
        print(f"{c['name']:<{width}}  {c['status']:<9}  {c['detail']}")
    counts = {}
    for c in report["checks"]:
        counts[c["status"]] = counts.get(c["status"], 0) + 1
    summary = ", ".join(f"{v} {k}" for k, v in sorted(counts.items()))
    print(f"-- {summary} in {report['elapsed_ms']} ms")


def _build_parser() -> _Parser:
    parser = _Parser(prog="opsys", description=__doc__)
    sub = parser.add_subparsers(dest="cmd", required=True)

    def common(p):
        p.add_argument("--json", action="store_true", help="emit the JSON report")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--tol", type=float, default=None,
                       help="tolerance override (env OPSYS_TOL also honored)")

    p_norm = sub.add_parser("norm", help="order norms of one element")
    common(p_norm)
    p_norm.add_argument("--system", required=True, help="file or built-in name")
    p_norm.add_argument("--element", required=True, help="matrix JSON file")
    p_norm.add_argument("--kind", choices=["h", "min", "max"], default=None,
                        help="print a single value instead of the full report")

    p_cone = sub.add_parser("cone", help="cone membership of a level element")
    common(p_cone)
    p_cone.add_argument("--system", required=True)
    p_cone.add_argument("--element", required=True)

    p_dual = sub.add_parser("dual", help="dual-space verifications")
    dual_sub = p_dual.add_subparsers(dest="dual_cmd", required=True)
    p_cp = dual_sub.add_parser("check-cp", help="complete positivity of a grid")
    common(p_cp)
    p_cp.add_argument("--system", required=True)
    p_cp.add_argument("--functional", required=True,
                      help='JSON file with "grid" (or "riesz" for level 1)')
    p_cp.add_argument("--dump-problem", default=None, metavar="PATH",
                      help="write the Choi feasibility problem as JSON")
    p_ce = dual_sub.add_parser("choi-effros", help="dual order-unit equivalences")
    common(p_ce)
    p_ce.add_argument("--system", required=True)
    p_ce.add_argument("--levels", type=int, default=3)
    p_ce.add_argument("--samples", type=int, default=10)

    p_tower = sub.add_parser("tower", help="tower construction and duality")
    tower_sub = p_tower.add_subparsers(dest="tower_cmd", required=True)
    p_build = tower_sub.add_parser("build", help="build and validate a tower")
    common(p_build)
    p_build.add_argument("--spec", required=True, help="name or JSON file")
    p_verify = tower_sub.add_parser("verify-duality", help="pairing/cone/Gamma checks")
    common(p_verify)
    p_verify.add_argument("--spec", default=None, help="name or JSON file")
    p_verify.add_argument("--depth", type=int, default=4)
    p_verify.add_argument("--levels", type=int, default=2)
    p_verify.add_argument("--samples", type=int, default=50)

    p_suite = sub.add_parser("suite", help="named verification suites")
    common(p_suite)
    p_suite.add_argument("name", choices=sorted(SUITES))
    p_suite.add_argument("--depth", type=int, default=None)
    p_suite.add_argument("--levels", type=int, default=None)
    p_suite.add_argument("--samples", type=int, default=None)
    return parser


def _cmd_norm(args) -> tuple[list[Check], dict]:
    system = _load_system(args.system)
    element = _load_matrix(args.element)
    tol = _default_tol(args)
    if args.kind == "h":
        value = order_norm_h(system, element, tol=tol)
        rep = {"h": value}
    elif args.kind == "min":
        value = min_order_norm(system, element, tol=tol)
        rep = {"min": value}
    else:
        full = norm_report(system, element, tol=tol)
        rep = full.to_json()
        value = rep["max_upper"] if args.kind == "max" else None
        if args.kind == "max":
            rep = {"max_lower": full.max_lower, "max_upper": full.max_upper}
    check = Check(
        name=f"norm/{args.kind or 'report'}",
        op="norms.norm_report",
        status="pass",
        detail=json.dumps(rep, sort_keys=True),
        evidence=rep,
    )
    return [check], {"system": args.system, "element": args.element,
                     "kind": args.kind, "tol": tol}


def _cmd_cone(args) -> tuple[list[Check], dict]:
    system = _load_system(args.system)
    element = _load_matrix(args.element)
    tol = _default_tol(args)
    member = cone_member(system, element, tol)
    check = Check(
        name="cone/membership",
        op="systems.cone_member",
        status="pass" if member else "fail",
        detail=f"element is{'' if member else ' not'} in the matrix cone",
        evidence={"tol": tol},
    )
    return [check], {"system": args.system, "element": args.element, "tol": tol}


def _cmd_dual(args) -> tuple[list[Check], dict]:
    system = _load_system(args.system)
    if args.dual_cmd == "check-cp":
        mf = _load_matrix_functional(system, args.functional)
        tol = args.tol if args.tol is not None else 1e-7
        if args.dump_problem:
            problem = cp_choi_problem(mf, tol)
            payload = problem.to_json() if problem else {"bypass": "full algebra"}
            with open(args.dump_problem, "w", encoding="utf-8") as fh:
                json.dump(payload, fh, indent=2, sort_keys=True)
        verdict = is_cp(mf, tol)
        status = "undecided" if verdict is None else ("pass" if verdict else "fail")
        checks = [Check(
            name="dual/check-cp",
            op="dual.is_cp",
            status=status,
            detail=f"level {mf.n} grid over d={system.d}, dim={system.dim}",
            evidence={"tol": tol},
        )]
        return checks, {"system": args.system, "functional": args.functional,
                        "tol": tol}
    # choi-effros
    rng = np.random.default_rng(args.seed)
    delta = faithful_state(system)
    report = verify_dual_unit_equivalences(
        system, delta, max_level=args.levels, samples=args.samples, rng=rng
    )
    checks = [
        Check(
            name="dual/choi-effros/faithful",
            op="dual.positivity_minimum",
            status="pass" if report["faithful"]["ok"] else "fail",
            detail="trace state is faithful on the section",
            evidence={"min_on_section": report["faithful"]["min_on_section"]},
        ),
        Check(
            name="dual/choi-effros/order-unit",
            op="dual.dual_order_unit_radius",
            status="pass" if report["order_unit"]["ok"] else "fail",
            detail="sampled Hermitian functionals dominated at all levels",
            evidence={"radii": [r for r in report["order_unit"].get("radii", [])]},
        ),
    ]
    if "archimedean" in report:
        checks.append(Check(
            name="dual/choi-effros/archimedean",
            op="dual.is_positive_functional",
            status="pass" if report["archimedean"]["ok"] else "fail",
            detail=f"radius schedule, {report['archimedean']['checked']} samples",
            evidence={},
        ))
    return checks, {"system": args.system, "levels": args.levels,
                    "samples": args.samples}


def _cmd_tower(args) -> tuple[list[Check], dict]:
    if args.tower_cmd == "build":
        spec = args.spec
        tower_spec = _load_json_file(spec) if os.path.exists(spec) else spec
        tower = make_tower(tower_spec)
        checks = [Check(
            name="tower/build",
            op="towers.make_tower",
            status="pass",
            detail=f"depth {tower.depth}, stages "
                   + " -> ".join(f"M_{s.d}(dim {s.dim})" for s in tower.systems),
            evidence={"depth": tower.depth},
        )]
        return checks, {"spec": args.spec}
    spec = args.spec or f"matrix-doubling:{args.depth}"
    tower_spec = _load_json_file(spec) if os.path.exists(spec) else spec
    tower = make_tower(tower_spec)
    rng = np.random.default_rng(args.seed)
    cones = verify_dual_cones(tower, samples=args.samples, rng=rng)
    gamma = verify_gamma(tower, samples=min(args.samples, 30),
                         max_level=args.levels, rng=rng)
    checks = [
        Check(
            name="tower/dual-cones",
            op="towers.verify_dual_cones",
            status="pass" if cones["passed"] else "fail",
            detail="pairings of positives nonnegative, witnesses constructed",
            evidence={"violations": cones["positive_pairs"]["violations"]},
        ),
        Check(
            name="tower/gamma",
            op="towers.verify_gamma",
            status="pass" if gamma["passed"] else "fail",
            detail="injectivity and complete order correspondence at truncation",
            evidence={"failures": gamma["failures"]},
        ),
    ]
    return checks, {"spec": spec, "depth": tower.depth, "levels": args.levels,
                    "samples": args.samples}


_SUITE_SAMPLES_PARAM = {
    "norm-sandwich": "samples",
    "mou-unit": "samples_per_level",
    "choi-effros": "functionals",
    "duality-tower": "samples",
    "feasibility-oracle": "instances",
    "dual-equivalences": "samples",
}


def _cmd_suite(args) -> tuple[list[Check], dict]:
    params = {}
    if args.samples is not None:
        params[_SUITE_SAMPLES_PARAM[args.name]] = args.samples
    if args.name == "duality-tower":
        if args.depth is not None:
            params["depth"] = args.depth
        if args.levels is not None:
            params["levels"] = args.levels
    elif args.name == "choi-effros" and args.levels is not None:
        params["max_level"] = args.levels
    checks = run_suite(args.name, args.seed, **params)
    return checks, {"suite": args.name, **params}


def run(argv) -> int:
    """Parse arguments, run the command, emit the report, return exit code."""
    parser = _build_parser()
    t0 = time.monotonic()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    try:
        if args.cmd == "norm":
            checks, config = _cmd_norm(args)
        elif args.cmd == "cone":
            checks, config = _cmd_cone(args)
        elif args.cmd == "dual":
            checks, config = _cmd_dual(args)
        elif args.cmd == "tower":
            checks, config = _cmd_tower(args)
        else:
            checks, config = _cmd_suite(args)
    except ParseError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except OpsysError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    command = " ".join(["opsys"] + list(argv))
    report = _report(command, getattr(args, "seed", 0), config, checks, t0)
    _emit(report, args.json)
    return exit_code_for(c.status for c in checks)


def main() -> None:  # console entry point
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
