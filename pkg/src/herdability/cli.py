"""Command-line interface.

Exit codes: 0 herdable / success, 2 input error, 3 not herdable (check,
synthesize), 4 internal consistency failure or a certificate that does
not verify.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
import time
from pathlib import Path

from . import __version__
from .criteria import PreconditionError, check_tree_depth1_criterion, check_tree_depth2_criterion, \
    check_tree_layer_sign_criterion, run_all_criteria
from .design import minimal_herdable_leader_sets
from .generators import (
    cluster_leader_instance,
    random_depth2_tree,
    random_layer_sign_tree,
    random_leader_pair,
    split_leader_instance,
)
from .graph import NotATreeError, SignedDigraph, clustering_balance, layer_decomposition, structural_balance
from .matrix import InvalidInputError, SystemPair, rational_str, to_rational
from .reductions import pair_verdict
from .report import (
    certificate_entry,
    dump_report,
    load_report,
    new_report,
    parse_model,
    to_jsonable,
    vector_strings,
    verdict_to_dict,
    verify_report,
)
from .synthesis import NotHerdableError, herding_input

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_NOT_HERDABLE = 3
EXIT_INCONSISTENT = 4


def _load_model(path: str) -> SystemPair:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InvalidInputError(f"cannot read model {path}: {exc.strerror}") from None
    return parse_model(text)


def _criteria_block(reports) -> list:
    return [
        {
            "criterion": r.criterion,
            "hypotheses_hold": r.hypotheses_hold,
            "implied_verdict": r.implied_verdict,
            "strength": r.strength,
            "evidence": to_jsonable(r.evidence),
        }
        for r in reports
    ]


def _trace_block(trace) -> list:
    if trace is None:
        return []
    return [
        {
            "name": s.name,
            "input_shape": list(s.input_shape),
            "output_shape": list(s.output_shape),
            "data": to_jsonable(s.data),
        }
        for s in trace.steps
    ]


def cmd_check(args, pair):
    report = new_report("check", pair)
    verdict = pair_verdict(pair)
    report["verdict"] = verdict_to_dict(verdict)
    report["certificates"].append(certificate_entry(verdict))
    lines = [f"verdict: {'herdable' if verdict.herdable else 'not herdable'} ({verdict.method})"]
    cert = verdict.primal_certificate if verdict.herdable else verdict.dual_certificate
    lines.append(f"{'u' if verdict.herdable else 'y'} = [{', '.join(vector_strings(cert))}]")
    return report, lines, EXIT_OK if verdict.herdable else EXIT_NOT_HERDABLE


def cmd_criteria(args, pair):
    report = new_report("criteria", pair)
    run = run_all_criteria(pair)
    report["verdict"] = verdict_to_dict(run.verdict)
    report["certificates"].append(certificate_entry(run.verdict))
    report["criteria"] = _criteria_block(run.reports)
    report["reduction_trace"] = _trace_block(run.trace)
    report["consistent"] = run.consistent
    report["disagreements"] = to_jsonable(run.disagreements)
    lines = [f"verdict: {'herdable' if run.verdict.herdable else 'not herdable'} ({run.verdict.method})"]
    for r in run.reports:
        implied = r.implied_verdict or "hypotheses fail"
        lines.append(f"  {r.criterion:<16} [{r.strength}] {implied}")
    if not run.reports:
        lines.append("  no structural criterion applies")
    if not run.consistent:
        lines.append(f"INCONSISTENT: {run.disagreements}")
        return report, lines, EXIT_INCONSISTENT
    return report, lines, EXIT_OK


def _clusters(partition):
    return None if partition is None else [sorted(c) for c in partition.clusters]


def cmd_balance(args, pair):
    report = new_report("balance", pair)
    g = SignedDigraph(pair.A)
    finest = clustering_balance(g)
    structural = structural_balance(g)
    block = {
        "clustering": to_jsonable({"clusters": _clusters(finest)}),
        "structural": to_jsonable({"clusters": _clusters(structural)}),
    }
    if finest is not None:
        block["clustering"]["k"] = finest.k
        block["clustering"]["single_cluster"] = finest.k == 1
    if structural is not None:
        block["structural"]["k"] = structural.k
    report["balance"] = block
    lines = []
    for name in ("clustering", "structural"):
        clusters = block[name]["clusters"]
        if clusters is None:
            lines.append(f"{name} balance: none")
        else:
            text = " | ".join("{" + ",".join(map(str, c)) + "}" for c in clusters)
            note = "  (single cluster)" if len(clusters) == 1 else ""
            lines.append(f"{name} balance: k={len(clusters)} {text}{note}")
    return report, lines, EXIT_OK


def cmd_tree(args, pair):
    leader = args.leader - 1
    if not 0 <= leader < pair.n:
        raise InvalidInputError(f"--leader must be in [1, {pair.n}]")
    tree_pair = SystemPair.with_leaders(pair.A, [leader], pair.meta)
    g = SignedDigraph(pair.A)
    layers = layer_decomposition(g, leader)
    reports = []
    for check in (check_tree_layer_sign_criterion, check_tree_depth1_criterion, check_tree_depth2_criterion):
        try:
            reports.append(check(tree_pair, g))
        except PreconditionError:
            pass
    verdict = pair_verdict(tree_pair)
    report = new_report("tree", pair)
    report["tree"] = to_jsonable({"leader": leader, "layers": [list(l) for l in layers.layers],
                                  "parent": layers.parent, "depth": layers.depth})
    report["criteria"] = _criteria_block(reports)
    report["verdict"] = verdict_to_dict(verdict)
    report["certificates"].append(certificate_entry(verdict, [leader]))
    lines = [f"leader {args.leader}, depth {layers.depth}"]
    for d, layer in enumerate(layers.layers, start=1):
        lines.append(f"  F{d}: {', '.join(str(v + 1) for v in layer)}")
    for r in reports:
        lines.append(f"  {r.criterion:<16} [{r.strength}] {r.implied_verdict or 'hypotheses fail'}")
    lines.append(f"verdict: {'herdable' if verdict.herdable else 'not herdable'} ({verdict.method})")
    inconsistent = any(
        r.implied_verdict is not None and (r.implied_verdict == "herdable") != verdict.herdable
        and (r.strength == "iff" or r.implied_verdict == "herdable")
        for r in reports
    )
    return report, lines, EXIT_INCONSISTENT if inconsistent else EXIT_OK


def cmd_synthesize(args, pair):
    if args.x0:
        try:
            raw = json.loads(Path(args.x0).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise InvalidInputError(f"cannot read x0 from {args.x0}: {exc}") from None
        if not isinstance(raw, list) or any(isinstance(x, float) for x in raw):
            raise InvalidInputError("x0 must be a JSON list of integers or 'p/q' strings")
        x0 = [to_rational(x) for x in raw]
    else:
        x0 = [to_rational(0)] * pair.n
    report = new_report("synthesize", pair)
    try:
        plan = herding_input(pair, x0, args.h)
    except NotHerdableError as exc:
        report["verdict"] = verdict_to_dict(exc.verdict)
        report["certificates"].append(certificate_entry(exc.verdict))
        return report, ["not herdable: no input can herd this pair",
                        f"y = [{', '.join(vector_strings(exc.verdict.dual_certificate))}]"], EXIT_NOT_HERDABLE
    report["verdict"] = {"herdable": True, "method": "direct-feasibility",
                         "primal_certificate": None, "dual_certificate": None}
    report["plan"] = {
        "horizon": plan.horizon,
        "threshold": rational_str(plan.threshold),
        "scale": rational_str(plan.scale),
        "x0": vector_strings(x0),
        "inputs": [vector_strings(u) for u in plan.inputs],
        "predicted_final_state": vector_strings(plan.predicted_final_state),
    }
    lines = [f"horizon {plan.horizon}, threshold {rational_str(plan.threshold)}"]
    for t, u in enumerate(plan.inputs):
        lines.append(f"  u({t}) = [{', '.join(vector_strings(u))}]")
    lines.append(f"x({plan.horizon}) = [{', '.join(vector_strings(plan.predicted_final_state))}]")
    return report, lines, EXIT_OK


def cmd_design(args, pair):
    max_size = args.max_size if args.max_size is not None else min(3, pair.n)
    result = minimal_herdable_leader_sets(pair.A, max_size)
    report = new_report("design", pair)
    report["design"] = {
        "budget": result.budget,
        "explored": result.explored,
        "minimal_sets": [[l + 1 for l in s] for s in result.sets],
    }
    for leaders, verdict in result.minimal_sets:
        report["certificates"].append(certificate_entry(verdict, leaders))
    lines = [f"budget {result.budget}, explored {result.explored} candidate sets"]
    for s in result.sets:
        lines.append("  {" + ", ".join(str(l + 1) for l in s) + "}")
    if not result.sets:
        lines.append("  no herdable leader set within budget")
    return report, lines, EXIT_OK


def cmd_verify_report(args, pair):
    try:
        report_in = load_report(Path(args.report_file).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise InvalidInputError(f"cannot read report {args.report_file}: {exc}") from None
    failures = verify_report(report_in, pair)
    checked = len(report_in.get("certificates", [])) + (1 if report_in.get("plan") else 0)
    out = {"schema_version": report_in["schema_version"], "command": "verify-report",
           "checked": checked, "failures": failures}
    lines = [f"checked {checked} item(s): {'all verified' if not failures else 'FAILED'}"] + failures
    return out, lines, EXIT_INCONSISTENT if failures else EXIT_OK


def cmd_fuzz(args):
    """Random instances through every criterion; any disagreement is a bug."""
    rng = random.Random(args.seed)
    makers = [
        lambda: random_leader_pair(rng, rng.randint(2, 6), rng.randint(1, 2)),
        lambda: random_depth2_tree(rng),
        lambda: random_layer_sign_tree(rng),
        lambda: cluster_leader_instance(rng, [2, rng.randint(1, 3), rng.randint(1, 3)]),
        lambda: split_leader_instance(rng, (rng.randint(1, 4), rng.randint(1, 4)), (1, 1)),
    ]
    failures = []
    herdable = 0
    for k in range(args.count):
        pair = makers[k % len(makers)]()
        run = run_all_criteria(pair)
        herdable += run.verdict.herdable
        if not run.consistent:
            failures.append({"instance": k, "disagreements": to_jsonable(run.disagreements)})
    out = {"schema_version": 1, "command": "fuzz", "seed": args.seed, "count": args.count,
           "herdable": herdable, "failures": failures}
    lines = [f"seed {args.seed}: {args.count} instances, {herdable} herdable, {len(failures)} inconsistent"]
    return out, lines, EXIT_INCONSISTENT if failures else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--report", metavar="PATH", help="write the JSON report to PATH")
    common.add_argument("--format", choices=("json", "text"), default="text", help="stdout format")

    parser = argparse.ArgumentParser(prog="herdability", description="Exact herdability analysis of (A, B) pairs.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def model_cmd(name, help_text):
        p = sub.add_parser(name, parents=[common], help=help_text)
        p.add_argument("model", help="model JSON file")
        return p

    model_cmd("check", "direct verdict with certificate")
    model_cmd("criteria", "structural criteria, reductions and direct verdict")
    model_cmd("balance", "clustering and structural balance partitions")
    p = model_cmd("tree", "tree layers and tree criteria for a single leader")
    p.add_argument("--leader", type=int, required=True, metavar="K", help="1-based leader node")
    p = model_cmd("synthesize", "discrete-time herding input")
    p.add_argument("--x0", metavar="FILE", help="JSON list with the initial state (default: zero)")
    p.add_argument("--h", default="1", metavar="P/Q", help="positive threshold (default 1)")
    p = model_cmd("design", "minimal herdable leader sets")
    p.add_argument("--max-size", type=int, metavar="K", help="largest leader set to try (default 3)")
    p = sub.add_parser("verify-report", parents=[common], help="re-check a report's certificates")
    p.add_argument("report_file", metavar="REPORT")
    p.add_argument("model")
    p = sub.add_parser("fuzz", parents=[common], help="consistency check on random instances")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--count", type=int, default=100)
    return parser


COMMANDS = {
    "check": cmd_check,
    "criteria": cmd_criteria,
    "balance": cmd_balance,
    "tree": cmd_tree,
    "synthesize": cmd_synthesize,
    "design": cmd_design,
    "verify-report": cmd_verify_report,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    started = time.perf_counter()
    try:
        if args.command == "fuzz":
            report, lines, code = cmd_fuzz(args)
        else:
            pair = _load_model(args.model)
            report, lines, code = COMMANDS[args.command](args, pair)
    except (InvalidInputError, NotATreeError) as exc:
        print(f"herdability: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    report["timing"] = {"seconds": round(time.perf_counter() - started, 6)}

    if args.report:
        Path(args.report).write_text(dump_report(report))
    if args.format == "json":
        sys.stdout.write(dump_report(report))
    else:
        print("\n".join(lines))
    return code


if __name__ == "__main__":
    sys.exit(main())
