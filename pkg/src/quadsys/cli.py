"""Command-line front end: derive, build, verify, probe and order.

Exit status: 0 when every requested check passes, 1 for I/O and unexpected
errors, 2 for schema violations, 3 for inadmissible coefficients or an
infeasible build, 4 for a failed verification or probe.
"""

from __future__ import annotations

import argparse
import sys
import time
from dataclasses import dataclass

from . import __version__
from .builder import (
    CIRCULAR_COEFFS,
    SolutionPair,
    WaveSolution,
    build_circular_pair,
    build_difference_family,
    build_pdde_family,
    safe_radius,
)
from .coefficients import (
    SignBranch,
    check_admissibility,
    compute_corollary_constants,
    compute_R_constants,
    derive_constants,
)
from .errors import (
    InadmissibleCoefficients,
    InfeasibleBranch,
    IoFailure,
    QuadsysError,
    RequiresT1EqualsT2,
    RequiresT2Zero,
    SchemaViolation,
    ZeroShiftCoordinate,
)
from .nevanlinna import estimate_pair_order
from .problem import ProblemSpec, dumps_canonical, parse_problem_file, write_report, write_text
from .verifier import SystemSpec, probe_pde_nonexistence, verify_system

COMMANDS = ("derive", "build", "verify", "probe", "order")
EXIT_OK, EXIT_ERROR, EXIT_SCHEMA, EXIT_INFEASIBLE, EXIT_VERIFY = 0, 1, 2, 3, 4

_BUILD_ERRORS = (InadmissibleCoefficients, InfeasibleBranch, RequiresT1EqualsT2, RequiresT2Zero,
                 ZeroShiftCoordinate, ArithmeticError)


class CommandError(Exception):
    def __init__(self, exit_code: int, error: BaseException):
        super().__init__(str(error))
        self.exit_code = exit_code
        self.error = error


@dataclass
class Outcome:
    report: dict
    exit_code: int
    plot_rows: list | None = None


def _toolkit() -> dict:
    return {"name": "quadsys", "version": __version__}


def constants_table(spec: ProblemSpec) -> dict:
    coeffs = spec.coeffs
    out = {"admissibility": check_admissibility(coeffs).to_dict()}
    if not out["admissibility"]["admissible"]:
        return out
    d = derive_constants(coeffs, spec.branch)
    out["derived"] = d.table()
    out["R"] = compute_R_constants(d).table()
    try:
        out["corollary"] = compute_corollary_constants(coeffs, spec.branch).table()
    except QuadsysError:
        pass
    return out


def _wave_json(w) -> dict:
    if not isinstance(w, WaveSolution):
        return {"expr": w.to_json()}
    return {"cos_amp": w.cos_amp, "sin_amp": w.sin_amp, "offset": w.offset, "phase": w.phase,
            "linear": list(w.linear), "psi": w.psi.to_json(), "carrier_shift": w.carrier_shift,
            "expr": w.to_expr().to_json()}


def pair_json(pair: SolutionPair) -> dict:
    return {"family": pair.family, "f1": _wave_json(pair.f1), "f2": _wave_json(pair.f2),
            "meta": pair.meta}


def build_pair(spec: ProblemSpec):
    """Return (pair, constraint report or None) for the spec."""
    if spec.system == "single_circular":
        if spec.pair is not None:
            return spec.pair, None
        c = spec.circular
        return build_circular_pair(c.h, c.kind, c.beta), None
    if spec.pair is not None:
        return spec.pair, None
    try:
        if spec.system == "difference":
            pair, report = build_difference_family(
                spec.coeffs, spec.branch, spec.shift, spec.family, psi=spec.psi,
                tail=spec.linear_tail, b2=spec.b2, branch_indices=spec.branch_indices,
                pivot=spec.pivot, corollary=spec.corollary)
        elif spec.system == "pdde":
            if spec.psi is not None and not spec.psi.is_zero():
                raise InfeasibleBranch("the differential-difference families need a linear carrier", 0.0)
            pair, report = build_pdde_family(
                spec.coeffs, spec.branch, spec.shift, spec.family, tail=spec.linear_tail, b2=spec.b2,
                a1_sign=spec.a1_sign, branch_index=spec.branch_indices[0],
                phase_index=spec.branch_indices[1], corollary=spec.corollary)
        else:
            raise InfeasibleBranch("the partial differential system has no wave family to build", 0.0)
    except _BUILD_ERRORS as err:
        raise CommandError(EXIT_INFEASIBLE, err) from err
    except ValueError as err:
        raise CommandError(EXIT_INFEASIBLE, err) from err
    return pair, report


def _system(spec: ProblemSpec) -> SystemSpec:
    coeffs = CIRCULAR_COEFFS if spec.system == "single_circular" and spec.coeffs is None else spec.coeffs
    return SystemSpec(spec.system, coeffs, spec.shift, spec.dimension)


def _exprs(pair):
    return (pair.expr1, pair.expr2) if isinstance(pair, SolutionPair) else pair


def run_derive(spec: ProblemSpec, report: dict) -> int:
    if spec.coeffs is None:
        raise CommandError(EXIT_SCHEMA, SchemaViolation(["coefficients: required for derive"]))
    report["constants"] = constants_table(spec)
    return EXIT_OK if report["constants"]["admissibility"]["admissible"] else EXIT_INFEASIBLE


def run_build(spec: ProblemSpec, report: dict) -> tuple[int, object]:
    if spec.coeffs is not None:
        report["constants"] = constants_table(spec)
    pair, constraints = build_pair(spec)
    if isinstance(pair, SolutionPair):
        report["pair"] = pair_json(pair)
        if pair.is_wave:
            report["safe_radius"] = safe_radius(pair)
    if constraints is not None:
        report["constraints"] = constraints.to_dict()
        return (EXIT_OK if constraints.passed else EXIT_INFEASIBLE), pair
    return EXIT_OK, pair


def run_verify(spec: ProblemSpec, report: dict) -> int:
    code, pair = run_build(spec, report)
    v = spec.verification
    res = verify_system(_system(spec), pair if isinstance(pair, SolutionPair) else _exprs(pair),
                        samples=v.samples, radius=v.radius, seed=v.seed, tol=v.tolerance,
                        fd_check=v.fd_check, workers=v.workers)
    report["residual"] = res.to_dict()
    if not res.passed:
        return EXIT_VERIFY
    return code


def run_probe(spec: ProblemSpec, report: dict) -> int:
    if spec.system != "pde":
        raise CommandError(EXIT_SCHEMA, SchemaViolation(["system: probe requires the pde system"]))
    try:
        probes = [probe_pde_nonexistence(spec.coeffs, b, spec.verification.tolerance) for b in SignBranch]
    except InadmissibleCoefficients as err:
        raise CommandError(EXIT_INFEASIBLE, err) from err
    report["constants"] = constants_table(spec)
    report["probe"] = {p.branch.value: p.to_dict() for p in probes}
    report["probe"]["verdict"] = "infeasible" if all(p.infeasible for p in probes) else "undecided"
    return EXIT_OK if all(p.infeasible for p in probes) else EXIT_VERIFY


def run_order(spec: ProblemSpec, report: dict) -> tuple[int, list]:
    pair, _ = build_pair(spec)
    e1, e2 = _exprs(pair)
    est = estimate_pair_order(e1, e2, spec.order.radii, spec.order.samples, spec.verification.seed)
    report["order"] = est.to_dict()
    rows = [("f1", est.f1.plot_rows()), ("f2", est.f2.plot_rows())]
    return EXIT_OK, rows


def execute(command: str, spec: ProblemSpec, timing: bool = False) -> Outcome:
    """Run one command; module errors are recorded in the report, never raised."""
    if command not in COMMANDS:
        raise ValueError(f"unknown command {command!r}")
    report: dict = {"toolkit": _toolkit(), "command": command, "spec": spec.to_json()}
    start = time.perf_counter()
    plot = None
    try:
        if command == "derive":
            code = run_derive(spec, report)
        elif command == "build":
            code = run_build(spec, report)[0]
        elif command == "verify":
            code = run_verify(spec, report)
        elif command == "probe":
            code = run_probe(spec, report)
        else:
            code, plot = run_order(spec, report)
    except CommandError as err:
        code = err.exit_code
        report["error"] = {"type": type(err.error).__name__, "message": str(err.error)}
    except QuadsysError as err:
        code = EXIT_INFEASIBLE if isinstance(err, _BUILD_ERRORS) else EXIT_ERROR
        report["error"] = {"type": type(err).__name__, "message": str(err)}
    except (ValueError, ArithmeticError) as err:
        code = EXIT_ERROR
        report["error"] = {"type": type(err).__name__, "message": str(err)}
    report["exit_code"] = code
    report["status"] = "pass" if code == EXIT_OK else "fail"
    if timing:
        report["wall_clock_seconds"] = time.perf_counter() - start
    return Outcome(report, code, plot)


def format_plot_rows(rows) -> str:
    lines = []
    for label, pts in rows:
        lines.append(f"# {label}: ln r, ln T")
        lines.extend(f"{x:.17g} {y:.17g}" for x, y in pts)
    return "\n".join(lines) + "\n"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="quadsys", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--spec", required=True, help="problem-spec JSON file")
        p.add_argument("--out", help="report path (stdout when omitted)")
        p.add_argument("--seed", type=int, help="override verification/order seed")
        p.add_argument("--timing", action="store_true", help="record wall-clock time in the report")
        if name == "order":
            p.add_argument("--plot-data", help="write (ln r, ln T) columns to this file")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        spec = parse_problem_file(args.spec)
    except SchemaViolation as err:
        for v in err.violations:
            print(f"schema: {v}", file=sys.stderr)
        return EXIT_SCHEMA
    except IoFailure as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_ERROR
    if args.seed is not None:
        if args.seed < 0:
            print("error: seed must be non-negative", file=sys.stderr)
            return EXIT_SCHEMA
        spec = spec.with_seed(args.seed)

    outcome = execute(args.command, spec, timing=args.timing)
    try:
        if args.out:
            write_report(outcome.report, args.out)
        else:
            sys.stdout.write(dumps_canonical(outcome.report))
        if getattr(args, "plot_data", None) and outcome.plot_rows is not None:
            write_text(format_plot_rows(outcome.plot_rows), args.plot_data)
    except IoFailure as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_ERROR
    if "error" in outcome.report:
        print(f"error: {outcome.report['error']['type']}: {outcome.report['error']['message']}",
              file=sys.stderr)
    return outcome.exit_code


if __name__ == "__main__":
    sys.exit(main())
