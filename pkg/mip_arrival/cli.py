"""
Command-line front end of mip_arrival.

Every verb reads its documents from files ("-" is stdin) and writes results to stdout or to --out. Decisions are
reported on stdout; a NO, INVALID, INFEASIBLE or NOT_FOUND answer is a successful run (exit 0). Operational errors
exit with the codes of constants.ExitCodes.
"""

import argparse
import json
import logging
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from typing import List, Optional, Tuple

from mip_arrival import __version__
from mip_arrival.certificates import check_minimality, complement, verify_switching_flow
from mip_arrival.constants import Defaults, ExitCodes, Families, Oracles, SearchModes
from mip_arrival.data_bridge import (analysis_document, instance_to_pan_dat, parse_flow, parse_instance, parse_point,
                                     serialize_flow, serialize_instance, serialize_point, verdict_to_document,
                                     witness_bundle)
from mip_arrival.generators import GeneratorSpec, gen_random, generate
from mip_arrival.main import solve
from mip_arrival.opt_model import solve_switching_flow
from mip_arrival.relaxation import RationalPoint, build_constraints, check_point, decide_relaxation, gap_search
from mip_arrival.run_engine import decide, oracle_decide_staterep, simulate
from mip_arrival.schemas import input_schema, output_schema
from mip_arrival.switch_graph import analyze, export_dot
from mip_arrival.utils import (BudgetExhaustedError, DocumentError, EliminationTooLargeError, NonEdgeError,
                               StateSpaceTooLargeError, set_multiple_input_parameters)

logger = logging.getLogger(__name__)


# region I/O helpers
def _read(path: str) -> str:
    if path == '-':
        return sys.stdin.read()
    with open(path, encoding='utf-8') as f:
        return f.read()


def _write(path: Optional[str], text: str) -> None:
    if path is None or path == '-':
        sys.stdout.write(text)
        return
    with open(path, 'w', encoding='utf-8') as f:
        f.write(text)


def _load_instance(args):
    return parse_instance(_read(args.instance))


def _decision_line(decision) -> str:
    if decision.terminates:
        return f"YES steps={decision.steps}"
    return f"NO dead_end={decision.dead_end} steps={decision.steps}"


def _format_number(value) -> str:
    return str(int(value)) if float(value).is_integer() else f"{value:g}"
# endregion


# region verbs
def cmd_decide(args) -> int:
    instance = _load_instance(args)
    if args.oracle == Oracles.STATEREP:
        decision = oracle_decide_staterep(instance, max_steps=args.max_steps)
    else:
        decision = decide(instance, max_steps=args.max_steps)
    print(_decision_line(decision))
    return ExitCodes.OK


def cmd_simulate(args) -> int:
    instance = _load_instance(args)
    decision = simulate(instance, args.max_steps)
    print(_decision_line(decision))
    return ExitCodes.OK


def cmd_profile(args) -> int:
    """Writes the run profile, or the traversal counts up to the dead end when the run cycles."""
    instance = _load_instance(args)
    decision = decide(instance, max_steps=args.max_steps)
    counts = decision.profile if decision.terminates else decision.prefix
    _write(args.out, serialize_flow(instance, counts))
    if not decision.terminates:
        logger.warning(f"Run cycles (dead end {decision.dead_end!r}): wrote the traversal counts up to the dead end")
    if args.tables:
        dat = set_multiple_input_parameters(input_schema, instance_to_pan_dat(instance),
                                            {'Max Steps': args.max_steps or 0})
        sln = solve(dat)
        os.makedirs(args.tables, exist_ok=True)
        output_schema.csv.write_directory(sln, args.tables)
        logger.info(f"Report tables written to {args.tables}")
    return ExitCodes.OK


def cmd_analyze(args) -> int:
    instance = _load_instance(args)
    _write(args.out, analysis_document(instance, analyze(instance)))
    return ExitCodes.OK


def cmd_verify_flow(args) -> int:
    instance = _load_instance(args)
    flow = parse_flow(_read(args.flow), instance)
    verdict = verify_switching_flow(instance, flow)
    print('VALID' if verdict.valid else 'INVALID')
    for violation in verdict.violations:
        print(f"{violation.kind} at {violation.vertex}: {violation.detail}")
    for warning in verdict.warnings:
        print(f"WARNING {warning}")
    if args.out:
        _write(args.out, json.dumps(verdict_to_document(verdict), indent=2) + '\n')
    return ExitCodes.OK


def cmd_complement(args) -> int:
    _write(args.out, serialize_instance(complement(_load_instance(args))))
    return ExitCodes.OK


def cmd_relax(args) -> int:
    instance = _load_instance(args)
    system = build_constraints(instance)
    if args.point:
        check = check_point(system, parse_point(_read(args.point), instance))
        print('FEASIBLE' if check.feasible else 'INFEASIBLE')
        for violation in check.violations:
            print(violation)
        return ExitCodes.OK
    result = decide_relaxation(instance)
    if not result.feasible:
        print('INFEASIBLE')
        return ExitCodes.OK
    print('FEASIBLE')
    if args.out:
        _write(args.out, serialize_point(instance, result.witness))
    return ExitCodes.OK


def cmd_gap_search(args) -> int:
    result = gap_search(args.n, mode=args.mode, budget=args.budget, seed=args.seed)
    if not result.found:
        print(f"NOT_FOUND examined={result.examined}")
        return ExitCodes.OK
    _write(args.out, witness_bundle(result.instance, result.point))
    return ExitCodes.OK


def cmd_gen(args) -> int:
    spec = GeneratorSpec(family=args.family, n=args.n, seed=args.seed)
    _write(args.out, serialize_instance(generate(spec)))
    return ExitCodes.OK


def cmd_export_dot(args) -> int:
    _write(args.out, export_dot(_load_instance(args)))
    return ExitCodes.OK


def cmd_ip(args) -> int:
    instance = _load_instance(args)
    model = solve_switching_flow(instance, relax=args.relax)
    if not model.is_optimal:
        print(model.status.upper())
        return ExitCodes.OK
    print(f"OPTIMAL total={_format_number(model.sol['obj_val'])}")
    if args.relax:
        for e, value in model.solution_values().items():
            print(f"{e.key()} {_format_number(value)}")
    elif args.out:
        _write(args.out, serialize_flow(instance, model.solution_flow()))
    return ExitCodes.OK


def cmd_minimality(args) -> int:
    instance = _load_instance(args)
    report = check_minimality(instance, args.cap, budget=args.budget)
    if report.confirmed:
        print(f"CONFIRMED flows={report.flows_checked}")
        return ExitCodes.OK
    print(f"REFUTED flows={report.flows_checked}: {report.reason}")
    if report.counterexample is not None and args.out:
        _write(args.out, serialize_flow(instance, report.counterexample))
    return ExitCodes.OK


def fuzz_one(n: int, seed: int) -> Tuple[bool, List[str]]:
    """
    Differential checks on gen_random(n, seed); returns whether the run terminates and the failed properties.
    """
    instance = gen_random(n, seed)
    decision = decide(instance)
    failures = []
    if oracle_decide_staterep(instance).outcome != decision.outcome:
        failures.append('oracle agreement')
    if decide(complement(instance)).terminates == decision.terminates:
        failures.append('complement')
    report = analyze(instance)
    counts = decision.profile if decision.terminates else decision.prefix
    if any(counts[e] > report.traversal_bound(e) for e in report.desperation):
        failures.append('desperation bound')
    if decision.terminates:
        if not verify_switching_flow(instance, decision.profile).valid:
            failures.append('profile is a switching flow')
        point = {e: Fraction(value) for e, value in decision.profile.values.items()}
        if not check_point(build_constraints(instance), RationalPoint(point)).feasible:
            failures.append('profile satisfies the relaxation')
    return decision.terminates, failures


def _fuzz_task(task):
    n, seed = task
    terminates, failures = fuzz_one(n, seed)
    return seed, n, terminates, failures


def cmd_fuzz(args) -> int:
    if args.n < 2:
        raise ValueError("fuzz needs --n >= 2")
    tasks = [(2 + (seed - args.seed) % (args.n - 1), seed) for seed in range(args.seed, args.seed + args.count)]
    if args.workers > 1:
        with ProcessPoolExecutor(max_workers=args.workers) as executor:
            results = list(executor.map(_fuzz_task, tasks, chunksize=64))
    else:
        results = [_fuzz_task(task) for task in tasks]
    yes = sum(1 for _, _, terminates, _ in results if terminates)
    failed = [(seed, n, failures) for seed, n, _, failures in results if failures]
    for seed, n, failures in failed:
        print(f"FAIL seed={seed} n={n}: {', '.join(failures)}")
    print(f"instances={len(results)} yes={yes} no={len(results) - yes} failures={len(failed)}")
    return ExitCodes.OK
# endregion


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog='mip-arrival',
                                     description="Decide, certify and analyze train runs on switch graphs.")
    parser.add_argument('--version', action='version', version=f"%(prog)s {__version__}")
    parser.add_argument('-v', '--verbose', action='count', default=0, help="-v for INFO, -vv for DEBUG logging")
    verbs = parser.add_subparsers(dest='verb', required=True, metavar='VERB')

    def verb(name, handler, help_text, instance=True):
        sub = verbs.add_parser(name, help=help_text)
        if instance:
            sub.add_argument('instance', help="instance document, '-' for stdin")
        sub.set_defaults(handler=handler)
        return sub

    sub = verb('decide', cmd_decide, "print YES/NO and the number of steps")
    sub.add_argument('--max-steps', type=int, default=None)
    sub.add_argument('--oracle', choices=list(Oracles), default=Oracles.DEAD_END)

    sub = verb('simulate', cmd_simulate, "raw run without dead-end analysis")
    sub.add_argument('--max-steps', type=int, required=True)

    sub = verb('profile', cmd_profile, "write the run profile as a flow document")
    sub.add_argument('--max-steps', type=int, default=None)
    sub.add_argument('--out')
    sub.add_argument('--tables', help="directory receiving the kpis/profile/dead_ends report tables (csv)")

    sub = verb('analyze', cmd_analyze, "dead ends and desperations")
    sub.add_argument('--out')

    sub = verb('verify-flow', cmd_verify_flow, "check a switching-flow certificate")
    sub.add_argument('flow', help="flow document")
    sub.add_argument('--out', help="write the verdict document here")

    sub = verb('complement', cmd_complement, "write the complement instance")
    sub.add_argument('--out')

    sub = verb('relax', cmd_relax, "feasibility of the real-valued relaxation")
    sub.add_argument('--point', help="check this rational point instead of deciding feasibility")
    sub.add_argument('--out', help="write the witness point here")

    sub = verb('gap-search', cmd_gap_search, "search an integrality gap witness", instance=False)
    sub.add_argument('--n', type=int, default=5, help="largest number of vertices")
    sub.add_argument('--mode', choices=list(SearchModes), default=SearchModes.EXHAUSTIVE)
    sub.add_argument('--budget', type=int, default=Defaults.GAP_SEARCH_BUDGET)
    sub.add_argument('--seed', type=int, default=0)
    sub.add_argument('--out')

    sub = verb('gen', cmd_gen, "generate an instance document", instance=False)
    sub.add_argument('family', choices=list(Families))
    sub.add_argument('--n', type=int, default=0)
    sub.add_argument('--seed', type=int, default=0)
    sub.add_argument('--out')

    sub = verb('export-dot', cmd_export_dot, "Graphviz rendering of the instance")
    sub.add_argument('--out')

    sub = verb('ip', cmd_ip, "solve the switching-flow integer program with CBC")
    sub.add_argument('--relax', action='store_true', help="solve the LP relaxation instead")
    sub.add_argument('--out', help="write the optimal flow here")

    sub = verb('minimality', cmd_minimality, "confirm the profile is the least switching flow")
    sub.add_argument('--cap', type=int, required=True)
    sub.add_argument('--budget', type=int, default=Defaults.ENUMERATION_BUDGET)
    sub.add_argument('--out', help="write the counterexample flow here")

    sub = verb('fuzz', cmd_fuzz, "differential checks over random instances", instance=False)
    sub.add_argument('--count', type=int, default=1000)
    sub.add_argument('--n', type=int, default=8, help="largest number of vertices")
    sub.add_argument('--seed', type=int, default=0)
    sub.add_argument('--workers', type=int, default=1)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    level = {0: logging.WARNING, 1: logging.INFO}.get(args.verbose, logging.DEBUG)
    # a fresh handler per call, bound to the current sys.stderr
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter('%(levelname)s %(name)s: %(message)s'))
    logging.basicConfig(level=level, handlers=[handler], force=True)
    try:
        return args.handler(args)
    except (DocumentError, NonEdgeError) as e:
        print(f"error: {e}", file=sys.stderr)
        return ExitCodes.BAD_DOCUMENT
    except BudgetExhaustedError as e:
        print(f"error: {e}", file=sys.stderr)
        return ExitCodes.BUDGET_EXHAUSTED
    except (StateSpaceTooLargeError, EliminationTooLargeError) as e:
        print(f"error: {e}", file=sys.stderr)
        return ExitCodes.TOO_LARGE
    except (ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return ExitCodes.USAGE
