"""Command-line front end.

Subcommands: verify, audit, improve, oel, surplus.  Exit codes are a
stable contract: 0 = success / all requested checks pass, 1 = a property
check failed (or a transform rejected a deficit input), 2 = malformed
input (unparsable spec file, bad parameters).

Agents are numbered from 1 on the command line and in reports; the
library is 0-based.  Reports are printed as text and, with --json-out,
mirrored to a machine-readable JSON file.  GROVES_THREADS caps the worker
count used by the exhaustive profile scans (default 1); results do not
depend on it.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from fractions import Fraction

from . import dominance, specfile, transforms
from .domains import MultiUnit, TypeGrid
from .errors import ContractViolation, DeficitInputError, GrovesError, SpecFileError
from .mechanisms import (
    GrovesMechanism,
    is_non_deficit,
    is_pay_only,
    is_strategy_proof,
)
from .numerics import format_rational, parse_rational
from .oel import OELSpec, oel_coefficients, oel_mechanism
from .transforms import PriorityOrder, bcgc, bcgc_j, iterate_until, priority_improve

CHECK_NAMES = ("non-deficit", "pay-only", "strategy-proof", "undominated")


def _workers() -> int:
    raw = os.environ.get("GROVES_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise ContractViolation(f"GROVES_THREADS must be an integer, got {raw!r}")


def _fmt(value) -> str:
    return format_rational(value)


def _fmt_profile(profile) -> str:
    return "(" + ", ".join(_fmt(v) for v in profile) + ")"


def _agent_out(i: int) -> int:
    return i + 1


def _json_profile(profile):
    return None if profile is None else [_fmt(v) for v in profile]


def _write_json(args, report: dict) -> None:
    if getattr(args, "json_out", None):
        with open(args.json_out, "w", encoding="utf-8") as handle:
            json.dump(report, handle, indent=2, sort_keys=True)
            handle.write("\n")


def _run_check(mech: GrovesMechanism, name: str, workers: int):
    """Returns (ok, text suffix, json witness dict)."""
    if name == "non-deficit":
        verdict = is_non_deficit(mech, workers)
        if verdict.ok:
            return True, "", None
        total = mech.total_payment(verdict.profile)
        return (
            False,
            f"profile={_fmt_profile(verdict.profile)} total={_fmt(total)}",
            {"profile": _json_profile(verdict.profile), "total": _fmt(total)},
        )
    if name == "pay-only":
        verdict = is_pay_only(mech, workers)
        if verdict.ok:
            return True, "", None
        paid = mech.payment(verdict.profile, verdict.agent)
        return (
            False,
            f"profile={_fmt_profile(verdict.profile)} "
            f"agent={_agent_out(verdict.agent)} payment={_fmt(paid)}",
            {
                "profile": _json_profile(verdict.profile),
                "agent": _agent_out(verdict.agent),
                "payment": _fmt(paid),
            },
        )
    if name == "strategy-proof":
        verdict = is_strategy_proof(mech)
        if verdict.ok:
            return True, "", None
        return (
            False,
            f"profile={_fmt_profile(verdict.profile)} "
            f"agent={_agent_out(verdict.agent)} deviation={_fmt(verdict.deviation)}",
            {
                "profile": _json_profile(verdict.profile),
                "agent": _agent_out(verdict.agent),
                "deviation": _fmt(verdict.deviation),
            },
        )
    if name == "undominated":
        verdict = dominance.is_individually_undominated(mech)
        if verdict.ok:
            return True, "", None
        return (
            False,
            f"agent={_agent_out(verdict.agent)} others={_fmt_profile(verdict.others)} "
            f"slack={_fmt(verdict.slack)}",
            {
                "agent": _agent_out(verdict.agent),
                "others": _json_profile(verdict.others),
                "slack": _fmt(verdict.slack),
            },
        )
    raise ContractViolation(f"unknown check {name!r}")


def cmd_verify(args) -> int:
    mech = specfile.load_path(args.spec)
    names = [c.strip() for c in args.checks.split(",") if c.strip()]
    for name in names:
        if name not in CHECK_NAMES:
            raise ContractViolation(
                f"unknown check {name!r}; choose from {', '.join(CHECK_NAMES)}"
            )
    workers = _workers()
    print(f"spec: {args.spec}")
    report = {"command": "verify", "spec": str(args.spec), "checks": {}}
    failed = False
    for name in names:
        ok, suffix, witness = _run_check(mech, name, workers)
        failed = failed or not ok
        line = f"{name}: {'PASS' if ok else 'FAIL'}"
        if suffix:
            line += "  " + suffix
        print(line)
        entry = {"ok": ok}
        if witness:
            entry["witness"] = witness
        report["checks"][name] = entry

    if args.search:
        search = dominance.search_collective_dominator(
            mech, attempts=args.search, seed=args.seed
        )
        verdict = "FAIL (dominator found)" if search.found else "PASS"
        print(
            f"collective-dominator-search: {verdict}  "
            f"attempts={search.attempts} feasible-candidates={search.feasible} "
            f"seed={search.seed}"
        )
        failed = failed or search.found
        report["search"] = {
            "found": search.found,
            "attempts": search.attempts,
            "feasible": search.feasible,
            "seed": search.seed,
        }

    code = 1 if failed else 0
    report["exit_code"] = code
    _write_json(args, report)
    return code


def _witness_json(witness):
    if witness is None:
        return None
    out = {"a_value": _fmt(witness.a_value), "b_value": _fmt(witness.b_value)}
    if witness.agent is not None:
        out["agent"] = _agent_out(witness.agent)
    if witness.others is not None:
        out["others"] = _json_profile(witness.others)
    if witness.profile is not None:
        out["profile"] = _json_profile(witness.profile)
    return out


def _witness_text(witness) -> str:
    if witness is None:
        return ""
    place = (
        f"agent={_agent_out(witness.agent)} others={_fmt_profile(witness.others)}"
        if witness.agent is not None
        else f"profile={_fmt_profile(witness.profile)}"
    )
    direction = ">" if witness.a_value > witness.b_value else "<"
    return f"A {direction} B at {place}: {_fmt(witness.a_value)} vs {_fmt(witness.b_value)}"


def cmd_audit(args) -> int:
    a = specfile.load_path(args.spec_a)
    b = specfile.load_path(args.spec_b)
    relations = ("individual", "collective") if args.relation == "both" else (args.relation,)
    phrasing = {
        "dominates": "A dominates B",
        "dominated_by": "B dominates A",
        "equal": "equal",
        "incomparable": "incomparable",
    }
    report = {
        "command": "audit",
        "spec_a": str(args.spec_a),
        "spec_b": str(args.spec_b),
        "relations": {},
    }
    for relation in relations:
        compare = (
            dominance.compare_individual
            if relation == "individual"
            else dominance.compare_collective
        )
        verdict = compare(a, b)
        print(f"{relation}: {phrasing[verdict.result]}")
        if verdict.strict_witness is not None:
            print(f"  {_witness_text(verdict.strict_witness)}")
        if verdict.violation_witness is not None:
            print(f"  {_witness_text(verdict.violation_witness)}")
        report["relations"][relation] = {
            "result": verdict.result,
            "strict_witness": _witness_json(verdict.strict_witness),
            "violation_witness": _witness_json(verdict.violation_witness),
        }
    report["exit_code"] = 0
    _write_json(args, report)
    return 0


def _parse_order(text: str, n: int) -> PriorityOrder:
    try:
        labels = [int(part) for part in text.split(",")]
    except ValueError:
        raise ContractViolation(f"--order must be comma-separated agent numbers, got {text!r}")
    if sorted(labels) != list(range(1, n + 1)):
        raise ContractViolation(
            f"--order must list every agent 1..{n} exactly once, got {text!r}"
        )
    return PriorityOrder(tuple(label - 1 for label in labels))


def _write_trace(path, rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["step", "residual", "contraction_bound"])
        writer.writerows(rows)


def cmd_improve(args) -> int:
    mech = specfile.load_path(args.spec)
    technique = args.technique
    trace_rows = []
    report = {
        "command": "improve",
        "spec": str(args.spec),
        "technique": technique,
        "out": str(args.out),
    }
    try:
        if technique == "bcgc":
            improved = bcgc(mech)
        elif technique == "bcgc-j":
            if args.agent is None:
                raise ContractViolation("--agent is required for bcgc-j")
            if not 1 <= args.agent <= mech.n:
                raise ContractViolation(f"--agent must be in 1..{mech.n}")
            improved = bcgc_j(mech, args.agent - 1)
            report["agent"] = args.agent
        elif technique == "priority":
            if not args.order:
                raise ContractViolation("--order is required for the priority technique")
            order = _parse_order(args.order, mech.n)
            improved = priority_improve(mech, order)
            report["order"] = args.order
        else:  # iterate
            bound = parse_rational(args.residual_bound)
            improved, trace = iterate_until(mech, args.max_steps, bound)
            contraction = Fraction(mech.n - 1, mech.n)
            previous = None
            for step in trace.steps:
                bound_cell = "" if previous is None else _fmt(previous * contraction)
                trace_rows.append([step.index, _fmt(step.residual), bound_cell])
                previous = step.residual
            print(
                f"iterate: {len(trace.steps) - 1} step(s), "
                f"final residual {_fmt(trace.final_residual)}, "
                f"{'converged' if trace.converged else 'step cap reached'}"
            )
            report["steps"] = len(trace.steps) - 1
            report["final_residual"] = _fmt(trace.final_residual)
            report["converged"] = trace.converged
    except DeficitInputError as exc:
        print(f"improve: input runs a deficit at {_fmt_profile(exc.witness)}", file=sys.stderr)
        report["deficit_witness"] = _json_profile(exc.witness)
        report["exit_code"] = 1
        _write_json(args, report)
        return 1

    if technique != "iterate" and args.trace_csv:
        trace_rows = [
            [0, _fmt(dominance.max_feasibility_slack(mech)), ""],
            [1, _fmt(dominance.max_feasibility_slack(improved)), ""],
        ]
    if args.trace_csv:
        _write_trace(args.trace_csv, trace_rows)
        report["trace_csv"] = str(args.trace_csv)

    specfile.dump_path(improved, args.out)
    print(f"wrote improved mechanism to {args.out}")
    report["exit_code"] = 0
    _write_json(args, report)
    return 0


def cmd_oel(args) -> int:
    spec = OELSpec(args.agents, args.units, args.index,
                   parse_rational(args.lower), parse_rational(args.upper))
    red = oel_coefficients(spec)
    print(f"c0 = {_fmt(red.c0)}")
    for j, c in enumerate(red.coeffs, start=1):
        print(f"c{j} = {_fmt(c)}")
    report = {
        "command": "oel",
        "n": spec.n,
        "m": spec.m,
        "k": spec.k,
        "L": _fmt(spec.L),
        "U": _fmt(spec.U),
        "c0": _fmt(red.c0),
        "coeffs": [_fmt(c) for c in red.coeffs],
    }
    if args.out:
        if not args.grid:
            raise ContractViolation("--grid is required with --out")
        values = tuple(parse_rational(part) for part in args.grid.split(","))
        grid = TypeGrid(spec.n, values)
        mech = oel_mechanism(spec, grid)
        specfile.dump_path(mech, args.out)
        print(f"wrote mechanism spec to {args.out}")
        report["out"] = str(args.out)
    report["exit_code"] = 0
    _write_json(args, report)
    return 0


def cmd_surplus(args) -> int:
    mech = specfile.load_path(args.spec)
    n = mech.n
    header = ["agent"] + [f"other_{j}" for j in range(1, n)] + ["surplus"]
    rows = []
    for i in range(n):
        for key in mech.grid.others_keys():
            value = transforms.surplus_guarantee(mech, i, key)
            rows.append([_agent_out(i)] + [_fmt(v) for v in key] + [_fmt(value)])
    if args.out:
        with open(args.out, "w", newline="", encoding="utf-8") as handle:
            writer = csv.writer(handle)
            writer.writerow(header)
            writer.writerows(rows)
        print(f"wrote {len(rows)} surplus rows to {args.out}")
    else:
        writer = csv.writer(sys.stdout)
        writer.writerow(header)
        writer.writerows(rows)
    _write_json(args, {"command": "surplus", "spec": str(args.spec), "rows": len(rows), "exit_code": 0})
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="groves",
        description="Audit, compare, and improve non-deficit Groves mechanisms "
        "over exact rational type grids.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", help="run property checks on a mechanism spec file")
    p.add_argument("spec")
    p.add_argument("--checks", default=",".join(CHECK_NAMES),
                   help=f"comma-separated subset of: {', '.join(CHECK_NAMES)}")
    p.add_argument("--search", type=int, default=0, metavar="N",
                   help="also run N seeded perturbation attempts looking for a "
                        "collectively dominating mechanism")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--json-out")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("audit", help="compare two mechanism spec files")
    p.add_argument("spec_a")
    p.add_argument("spec_b")
    p.add_argument("--relation", choices=("individual", "collective", "both"),
                   default="both")
    p.add_argument("--json-out")
    p.set_defaults(func=cmd_audit)

    p = sub.add_parser("improve", help="transform a mechanism into an undominated one")
    p.add_argument("spec")
    p.add_argument("--technique", choices=("bcgc", "bcgc-j", "priority", "iterate"),
                   required=True)
    p.add_argument("--agent", type=int, help="1-based agent for bcgc-j")
    p.add_argument("--order", help="priority order, e.g. 2,1,3 (1-based, highest first)")
    p.add_argument("--max-steps", type=int, default=50)
    p.add_argument("--residual-bound", default="0",
                   help="stop iterating once the residual is at most this rational")
    p.add_argument("--out", required=True)
    p.add_argument("--trace-csv")
    p.add_argument("--json-out")
    p.set_defaults(func=cmd_improve)

    p = sub.add_parser("oel", help="emit linear rebate coefficients for a family member")
    p.add_argument("--agents", type=int, required=True)
    p.add_argument("--units", type=int, required=True)
    p.add_argument("--index", type=int, required=True)
    p.add_argument("--lower", required=True)
    p.add_argument("--upper", required=True)
    p.add_argument("--grid", help="comma-separated grid values (needed with --out)")
    p.add_argument("--out", help="write the materialized mechanism spec file here")
    p.add_argument("--json-out")
    p.set_defaults(func=cmd_oel)

    p = sub.add_parser("surplus", help="dump the surplus-guarantee table as CSV")
    p.add_argument("spec")
    p.add_argument("--out", help="CSV path (default: stdout)")
    p.add_argument("--json-out")
    p.set_defaults(func=cmd_surplus)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except SpecFileError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ContractViolation as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except DeficitInputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except GrovesError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
