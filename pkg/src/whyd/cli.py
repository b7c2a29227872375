"""The ``whyd`` command line tool.

One binary, subcommand style; outputs are deterministic JSON reports on
stdout (human-readable summaries behind ``--pretty``), diagnostics on
stderr.  Exit codes: 0 success, 2 usage or input-format errors, 3
semantic errors (reported as a machine-readable error object).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction
from pathlib import Path
from typing import Any, Sequence

from . import abduction, causality, constraints, phca, vc, viewupdate
from .errors import ParseError, WhydError
from .evaluator import answers as evaluate_answers
from .model import GroundAtom, Instance, Program
from .parsing import (
    parse_constraints,
    parse_ground_atom,
    parse_instance_document,
    parse_program,
    serialize_program,
)
from .reports import (
    Report,
    emit_report,
    fraction_text,
    provenance_for,
    sorted_atoms,
    sorted_families,
)

_DELPROP_MODES = {
    "minimal-source": "minimal_source",
    "minimum-source": "minimum_source",
    "view-safe": "view_safe",
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="whyd",
        description="Causal explanations for Datalog query answers: causes, "
        "responsibility, abduction, delete propagation, and constraints.",
    )
    parser.add_argument("--jobs", type=int, default=None, help="upper bound on parallel candidate tests (WHYD_JOBS)")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, *, program=True, data=True, target=False, tuple_=False, ics=False, help=""):
        p = sub.add_parser(name, help=help)
        if program:
            p.add_argument("-p", "--program", required=True, help="program file")
        if data:
            p.add_argument("-d", "--data", required=True, help="instance file")
        if target:
            p.add_argument("-t", "--target", required=True, help="ground answer atom, e.g. 'ans(john, xml)'")
        if tuple_:
            p.add_argument("--tuple", required=True, help="ground database tuple under scrutiny")
        if ics:
            p.add_argument("-c", "--constraints", help="constraint file")
        p.add_argument("--pretty", action="store_true", help="human-readable summary instead of JSON")
        return p

    add("eval", help="answers of the query on the instance")
    p = add("causes", target=True, ics=True, help="actual causes with contingency sets and responsibilities")
    p.add_argument("--max-contingency-sets", type=int, default=None, help="cap reported families (sets a truncation flag)")
    p = add("responsibility", target=True, tuple_=True, ics=True, help="exact responsibility of one tuple")
    p = add("mrc", target=True, help="most responsible causes")
    p = add("vc-causes", target=True, help="view-conditioned causes")
    p.add_argument("--max-contingency-sets", type=int, default=None, help="cap reported families (sets a truncation flag)")
    p = add("abduce", help="abductive diagnoses for the #observe section of the instance file")
    p.add_argument("--obs-bound", type=int, default=None, help="reject observations with more atoms than this")
    p = add("delprop", target=True, help="delete-propagation solutions")
    p.add_argument("--mode", choices=sorted(_DELPROP_MODES), required=True)
    p.add_argument("--endogenous-only", action="store_true", help="only delete endogenous tuples")
    p = add("check-ics", program=False, ics=True, help="check the instance against the constraints")
    p = sub.add_parser("encode-phca", help="encode a propositional Horn abduction problem and solve it")
    p.add_argument("-i", "--input", required=True, help="PHCA file ('a <- b c' lines, #hyp / #obs sections)")
    p.add_argument("--pretty", action="store_true")
    return parser


def _read(path: str) -> bytes:
    try:
        return Path(path).read_bytes()
    except OSError as exc:
        raise _UsageError(f"cannot read {path}: {exc.strerror}") from exc


class _UsageError(Exception):
    pass


def _family_payload(
    families: Sequence[frozenset[GroundAtom]], cap: int | None
) -> tuple[list[list[str]], bool]:
    rendered = sorted_families(families)
    if cap is not None and len(rendered) > cap:
        return rendered[:cap], True
    return rendered, False


def _cause_payload(reports, cap: int | None, responsibility_key: str) -> list[dict[str, Any]]:
    out = []
    for report in reports:
        family, truncated = _family_payload(report.minimal_contingency_sets, cap)
        rho = getattr(report, responsibility_key)
        out.append(
            {
                "tuple": str(report.cause),
                responsibility_key: fraction_text(rho),
                "contingency_sets": family,
                "truncated": truncated,
            }
        )
    return out


def _load_common(args) -> tuple[Program, Instance, dict[str, bytes]]:
    sources = {"program": _read(args.program), "data": _read(args.data)}
    program = parse_program(sources["program"].decode("utf-8"), args.program)
    document = parse_instance_document(sources["data"].decode("utf-8"), args.data)
    return program, document.instance, sources


def _run(args) -> Report:
    if args.command == "eval":
        program, instance, sources = _load_common(args)
        view = evaluate_answers(program, instance)
        return Report("eval", {"answers": sorted_atoms(view)}, provenance_for(sources))

    if args.command == "causes":
        program, instance, sources = _load_common(args)
        target = parse_ground_atom(args.target)
        cap = args.max_contingency_sets
        if getattr(args, "constraints", None):
            sources["constraints"] = _read(args.constraints)
            sigma = parse_constraints(sources["constraints"].decode("utf-8"), args.constraints)
            reports = constraints.causes_under_ics(instance, program, target, sigma)
            payload = {
                "target": str(target),
                "causes": _cause_payload(reports, cap, "responsibility_under_ics"),
            }
        else:
            reports = causality.cause_reports(instance, program, target)
            payload = {"target": str(target), "causes": _cause_payload(reports, cap, "responsibility")}
        return Report("causes", payload, provenance_for(sources))

    if args.command == "responsibility":
        program, instance, sources = _load_common(args)
        target = parse_ground_atom(args.target)
        tau = parse_ground_atom(args.tuple)
        if getattr(args, "constraints", None):
            sources["constraints"] = _read(args.constraints)
            sigma = parse_constraints(sources["constraints"].decode("utf-8"), args.constraints)
            rho = constraints.responsibility_under_ics(instance, program, target, tau, sigma)
        else:
            rho = causality.responsibility(instance, program, target, tau)
        payload = {"target": str(target), "tuple": str(tau), "responsibility": fraction_text(rho)}
        return Report("responsibility", payload, provenance_for(sources))

    if args.command == "mrc":
        program, instance, sources = _load_common(args)
        target = parse_ground_atom(args.target)
        winners = causality.most_responsible_causes(instance, program, target)
        rho = (
            causality.responsibility(instance, program, target, next(iter(winners)))
            if winners
            else Fraction(0)
        )
        payload = {
            "target": str(target),
            "causes": sorted_atoms(winners),
            "responsibility": fraction_text(rho),
        }
        return Report("mrc", payload, provenance_for(sources))

    if args.command == "vc-causes":
        program, instance, sources = _load_common(args)
        target = parse_ground_atom(args.target)
        reports = vc.vc_causes(instance, program, target)
        payload = {
            "target": str(target),
            "causes": [
                entry | {"vcc": frozenset() in report.minimal_contingency_sets}
                for report, entry in zip(
                    reports, _cause_payload(reports, args.max_contingency_sets, "vc_responsibility")
                )
            ],
        }
        return Report("vc-causes", payload, provenance_for(sources))

    if args.command == "abduce":
        sources = {"program": _read(args.program), "data": _read(args.data)}
        program = parse_program(sources["program"].decode("utf-8"), args.program)
        document = parse_instance_document(sources["data"].decode("utf-8"), args.data)
        if not document.observations:
            raise _UsageError("the instance file has no #observe section")
        if args.obs_bound is not None and len(document.observations) > args.obs_bound:
            raise _UsageError(
                f"observation has {len(document.observations)} atoms, bound is {args.obs_bound}"
            )
        problem = abduction.AbductionProblem(
            program,
            document.instance.exogenous,
            document.instance.endogenous,
            document.observations,
        )
        solutions = abduction.solve_diagnoses(problem)
        degrees = {
            str(h): fraction_text(abduction.necessity_degree(problem, h))
            for h in sorted(problem.hypotheses, key=GroundAtom.sort_key)
        }
        payload = {
            "observation": sorted_atoms(document.observations),
            "diagnoses": sorted_families(solutions),
            "relevant": sorted_atoms(abduction.relevant_hypotheses(problem)),
            "necessary": sorted_atoms(abduction.necessary_hypotheses(problem)),
            "necessary_sets": sorted_families(abduction.necessary_hypothesis_sets(problem)),
            "necessity_degrees": degrees,
        }
        return Report("abduce", payload, provenance_for(sources))

    if args.command == "delprop":
        program, instance, sources = _load_common(args)
        target = parse_ground_atom(args.target)
        kind = _DELPROP_MODES[args.mode]
        if kind == "minimal_source":
            solutions = viewupdate.minimal_source_solutions(
                instance, program, target, endogenous_only=args.endogenous_only
            )
        elif kind == "minimum_source":
            solutions = viewupdate.minimum_source_solutions(
                instance, program, target, endogenous_only=args.endogenous_only
            )
        else:
            solutions = viewupdate.vsef_solutions(
                instance, program, target, endogenous_only=args.endogenous_only
            )
        payload = {
            "target": str(target),
            "mode": args.mode,
            "exists": bool(solutions),
            "solutions": [
                {
                    "removed": sorted_atoms(s.removed),
                    "residual_view": sorted_atoms(s.residual_view),
                }
                for s in solutions
            ],
        }
        return Report("delprop", payload, provenance_for(sources))

    if args.command == "check-ics":
        if not args.constraints:
            raise _UsageError("check-ics needs -c/--constraints")
        sources = {"data": _read(args.data), "constraints": _read(args.constraints)}
        document = parse_instance_document(sources["data"].decode("utf-8"), args.data)
        sigma = parse_constraints(sources["constraints"].decode("utf-8"), args.constraints)
        result = constraints.satisfies(document.instance, sigma)
        payload = {
            "satisfied": result.ok,
            "violations": [
                {"constraint": str(v.constraint), "witness": sorted_atoms(v.witness)}
                for v in result.violations
            ],
        }
        return Report("check-ics", payload, provenance_for(sources))

    if args.command == "encode-phca":
        sources = {"input": _read(args.input)}
        problem = phca.parse_phca(sources["input"].decode("utf-8"), args.input)
        encoded = phca.encode_phca(problem)
        solutions = abduction.solve_diagnoses(encoded)
        payload = {
            "program": serialize_program(encoded.program).splitlines(),
            "extensional": sorted_atoms(encoded.extensional),
            "hypotheses": sorted_atoms(encoded.hypotheses),
            "observation": sorted_atoms(encoded.observation),
            "diagnoses": sorted_families(solutions),
            "relevant": sorted_atoms(abduction.relevant_hypotheses(encoded)),
        }
        return Report("encode-phca", payload, provenance_for(sources))

    raise _UsageError(f"unknown command {args.command!r}")


def _summary(report: Report) -> str:
    lines = [f"task: {report.task}"]
    payload = report.payload

    def bullet_list(name: str, values) -> None:
        lines.append(f"{name}:")
        for value in values:
            lines.append(f"  - {value}")

    if report.task == "eval":
        bullet_list("answers", payload["answers"])
    elif report.task in ("causes", "vc-causes"):
        key = "responsibility" if report.task == "causes" else "vc_responsibility"
        alt = "responsibility_under_ics"
        for entry in payload["causes"]:
            rho = entry.get(key, entry.get(alt))
            sets = "; ".join("{" + ", ".join(g) + "}" for g in entry["contingency_sets"]) or "{}"
            lines.append(f"  {entry['tuple']}  rho={rho}  contingency sets: {sets}")
        if not payload["causes"]:
            lines.append("  (no causes)")
    elif report.task == "delprop":
        lines.append(f"exists: {payload['exists']}")
        for entry in payload["solutions"]:
            lines.append("  remove {" + ", ".join(entry["removed"]) + "}")
    elif report.task == "abduce":
        bullet_list("diagnoses", ["{" + ", ".join(d) + "}" for d in payload["diagnoses"]])
        lines.append(f"relevant: {', '.join(payload['relevant']) or '(none)'}")
        lines.append(f"necessary: {', '.join(payload['necessary']) or '(none)'}")
    elif report.task == "check-ics":
        lines.append(f"satisfied: {payload['satisfied']}")
        for violation in payload["violations"]:
            lines.append(f"  violated: {violation['constraint']} by {{{', '.join(violation['witness'])}}}")
    else:
        for key in sorted(payload):
            lines.append(f"{key}: {payload[key]}")
    return "\n".join(lines) + "\n"


def main(argv: Sequence[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    jobs = args.jobs if args.jobs is not None else os.environ.get("WHYD_JOBS")
    if jobs is not None and int(jobs) < 1:
        parser.error("--jobs must be at least 1")
    # The engine is sequential; --jobs is an upper bound and the output is
    # identical for every value of it.
    try:
        report = _run(args)
    except _UsageError as exc:
        print(f"whyd: {exc}", file=sys.stderr)
        return 2
    except ParseError as exc:
        print(f"whyd: {exc}", file=sys.stderr)
        return 2
    except WhydError as exc:
        print(f"whyd: {exc}", file=sys.stderr)
        sys.stdout.write(emit_error(exc))
        return 3
    if getattr(args, "pretty", False):
        sys.stdout.write(_summary(report))
    else:
        sys.stdout.write(emit_report(report))
    return 0


def emit_error(exc: WhydError) -> str:
    document = {
        "schema": "whyd/1",
        "error": {"code": exc.code, "message": str(exc)},
    }
    return json.dumps(document, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


if __name__ == "__main__":
    sys.exit(main())
