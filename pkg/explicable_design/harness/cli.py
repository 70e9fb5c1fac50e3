"""
Command line interface, one subcommand per stage of the pipeline:

    explicable-design plan DOMAIN PROBLEM
    explicable-design score ROBOT_DOMAIN HUMAN_DOMAIN PROBLEM PLAN
    explicable-design explicate ROBOT_DOMAIN HUMAN_DOMAIN PROBLEM
    explicable-design design ROBOT_DOMAIN HUMAN_DOMAIN PROBLEM DESIGNS
    explicable-design experiment --preset alpha-horizon --output results/
    explicable-design fixtures OUTPUT_DIR --domain driverlog --count 5

Exit code 0 on success, 2 on input errors, 3 when a time limit stopped a search (the best result found is printed).
"""

from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence
import argparse
import logging
import sys

from explicable_design._version import __version__
from explicable_design.configs import (EXIT_INPUT_ERROR, EXIT_SUCCESS, EXIT_TIMEOUT_WITH_INCUMBENT, report_formats)
from explicable_design.design.objective import LongitudinalParams, ObjectiveWeights
from explicable_design.design.search import DesignProblem, search
from explicable_design.explicability import ExplicableProblem, most_explicable_plan, score_plan
from explicable_design.harness.experiments import ExperimentPlan, preset_plan, presets, run
from explicable_design.harness.fixtures import (build_ipc_fixtures, build_ipc_suite, demo_fixture_files,
                                                demo_settings, fixture_sizes, ipc_domains)
from explicable_design.pddlio.designspec import parse_design_spec
from explicable_design.pddlio.pddl import parse_model_pair, parse_plan, parse_planning_problem
from explicable_design.pddlio.report import ReportEntry, format_number, write_report
from explicable_design.planning.planner import solve_optimal
from explicable_design.utils import PlanningError, ValidationError

logger = logging.getLogger(__name__)


def _read(path: str) -> str:
    return Path(path).read_text()


def _load_pair(args: argparse.Namespace):
    return parse_model_pair(_read(args.robot_domain), _read(args.human_domain), _read(args.problem))


def _task_index(tasks, name: Optional[str]) -> int:
    if name is None:
        return 0
    for index, task in enumerate(tasks.tasks):
        if task.name == name:
            return index
    raise ValidationError(f"Unknown task '{name}', expected one of {', '.join(t.name for t in tasks.tasks)}")


# ----------------------------- COMMANDS ------------------------------#
def cmd_plan(args: argparse.Namespace) -> int:
    problem, tasks = parse_planning_problem(_read(args.domain), _read(args.problem))
    task = tasks.tasks[_task_index(tasks, args.task)]
    result = solve_optimal(problem.with_task(task.init, task.goal), time_limit=args.planner_time_limit)

    if result.timed_out:
        print(f"; timed out, cost lower bound {format_number(result.bound)}")
        return EXIT_TIMEOUT_WITH_INCUMBENT
    if not result.solved:
        print("; no plan")
        return EXIT_SUCCESS
    print(result.plan)
    print(f"; cost = {result.cost}")
    return EXIT_SUCCESS


def cmd_score(args: argparse.Namespace) -> int:
    pair, tasks = _load_pair(args)
    exp = ExplicableProblem(pair, tasks.tasks[_task_index(tasks, args.task)])
    score = score_plan(exp, parse_plan(_read(args.plan)), time_limit=args.planner_time_limit)
    print(f"inexplicability = {format_number(score.value)} (log {format_number(score.log_value)})")
    return EXIT_SUCCESS


def cmd_explicate(args: argparse.Namespace) -> int:
    pair, tasks = _load_pair(args)
    indices = [_task_index(tasks, args.task)] if args.task is not None else range(len(tasks))
    for index in indices:
        task = tasks.tasks[index]
        result = most_explicable_plan(ExplicableProblem(pair, task), time_limit=args.planner_time_limit)
        print(f"; task {task.name} (p = {tasks.probabilities[index]})")
        if result.plan is not None:
            print(result.plan)
        else:
            print("; no plan is valid in both models")
        print(f"; inexplicability = {format_number(result.ie_min.value)}, robot cost = {result.robot_cost}, "
              f"human optimal cost = {result.human_optimal_cost}")
    return EXIT_SUCCESS


def _override(value, default):
    return value if value is not None else default


def cmd_design(args: argparse.Namespace) -> int:
    pair, tasks = _load_pair(args)
    spec = parse_design_spec(_read(args.designs), pair)

    weights = ObjectiveWeights(_override(args.alpha, spec.weights.alpha), _override(args.beta, spec.weights.beta),
                               _override(args.kappa, spec.weights.kappa))
    params = LongitudinalParams(_override(args.gamma, spec.gamma), _override(args.horizon, spec.horizon))
    dp = DesignProblem(pair, tasks, spec.modifications, weights, params,
                       time_limit=_override(args.time_limit_secs, spec.time_limit),
                       max_design_size=_override(args.max_design_size, spec.max_design_size),
                       prune=not args.no_prune, workers=args.workers,
                       planner_time_limit=_override(args.planner_time_limit, spec.planner_time_limit))
    outcome = search(dp)

    print(f"; design: {' '.join(outcome.ids) if outcome.ids else '(none)'}")
    print(write_report([ReportEntry(pair.name, outcome.baseline, outcome.evaluation, outcome.time)], args.format),
          end='')
    if outcome.anytime:
        logger.warning("Time limit reached, the design is the best one found")
        return EXIT_TIMEOUT_WITH_INCUMBENT
    return EXIT_SUCCESS


def cmd_experiment(args: argparse.Namespace) -> int:
    overrides = dict(fmt=args.format, workers=args.workers, time_limit=args.time_limit_secs,
                     planner_time_limit=args.planner_time_limit, max_design_size=args.max_design_size,
                     prune=not args.no_prune, output=Path(args.output) if args.output else None)
    for name in ('alpha', 'beta', 'kappa', 'gamma', 'horizon'):
        values = getattr(args, name)
        if values is not None:
            overrides[f"{name}s"] = tuple(values)

    if args.preset is not None:
        plan = preset_plan(args.preset, seed=args.seed, **overrides)
    elif args.fixture:
        plan = ExperimentPlan(fixtures=tuple(_fixture(name, args.size, args.seed) for name in args.fixture),
                              seed=args.seed, **overrides)
    else:
        raise ValidationError("Either --preset or --fixture is required")

    result = run(plan)
    if plan.output is None:
        print(result.report, end='')
        print(result.sweep, end='')
    return EXIT_TIMEOUT_WITH_INCUMBENT if result.anytime else EXIT_SUCCESS


def _fixture(name: str, size: str, seed: int):
    if name.startswith('restaurant-'):
        return demo_fixture_files(name[len('restaurant-'):])
    return build_ipc_fixtures(name, size, seed)


def cmd_fixtures(args: argparse.Namespace) -> int:
    if args.domain == 'restaurant':
        fixtures = [demo_fixture_files(setting) for setting in demo_settings]
    else:
        fixtures = build_ipc_suite(args.domain, args.count, args.size, args.seed)
    for fixture in fixtures:
        for path in fixture.write(args.output).values():
            print(path)
    return EXIT_SUCCESS


# ----------------------------- PARSER ------------------------------#
def _objective_flags(parser: argparse.ArgumentParser, many: bool) -> None:
    nargs = '+' if many else None
    parser.add_argument('--alpha', type=Fraction, nargs=nargs, help="weight of the longitudinal inexplicability")
    parser.add_argument('--beta', type=Fraction, nargs=nargs, help="weight of the design cost")
    parser.add_argument('--kappa', type=Fraction, nargs=nargs, help="weight of the robot plan cost")
    parser.add_argument('--gamma', type=Fraction, nargs=nargs, help="discount factor in [0, 1]")
    parser.add_argument('--horizon', type=int, nargs=nargs, help="number of times the tasks are performed")


def _search_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument('--time-limit-secs', type=float, help="time limit of the whole design search")
    parser.add_argument('--max-design-size', type=int, help="largest number of modifications in a design")
    parser.add_argument('--no-prune', action='store_true', help="disable relevance pruning")
    parser.add_argument('--workers', type=int, default=1, help="configurations evaluated concurrently")
    parser.add_argument('--format', choices=report_formats, default='csv', help="report format")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog='explicable-design',
                                     description="Explicable planning and environment design for explicability")
    parser.add_argument('--version', action='version', version=f"%(prog)s {__version__}")
    commands = parser.add_subparsers(dest='command', required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('-v', '--verbose', action='count', default=0, help="-v for progress, -vv for debugging")
    common.add_argument('--planner-time-limit', type=float, help="time limit of every single planner call")

    plan = commands.add_parser('plan', parents=[common], help="optimal plan of a single model")
    plan.add_argument('domain')
    plan.add_argument('problem')
    plan.add_argument('--task', help="task name, the first task by default")
    plan.set_defaults(handler=cmd_plan)

    for name, handler, help_text in (('score', cmd_score, "inexplicability of a robot plan"),
                                     ('explicate', cmd_explicate, "most explicable plan of every task"),
                                     ('design', cmd_design, "search for the best environment design")):
        command = commands.add_parser(name, parents=[common], help=help_text)
        command.add_argument('robot_domain')
        command.add_argument('human_domain')
        command.add_argument('problem')
        if name == 'score':
            command.add_argument('plan')
        if name == 'design':
            command.add_argument('designs')
            _objective_flags(command, many=False)
            _search_flags(command)
        else:
            command.add_argument('--task', help="task name")
        command.set_defaults(handler=handler)

    experiment = commands.add_parser('experiment', parents=[common],
                                     help="sweep the design search over fixtures and objectives")
    experiment.add_argument('--preset', choices=presets)
    experiment.add_argument('--fixture', nargs='+',
                            help=f"restaurant-a/b/c or one of {', '.join(ipc_domains)}")
    experiment.add_argument('--size', choices=fixture_sizes, default='small')
    experiment.add_argument('--seed', type=int, default=0)
    experiment.add_argument('--output', help="directory of report and sweep files, stdout when missing")
    _objective_flags(experiment, many=True)
    _search_flags(experiment)
    experiment.set_defaults(handler=cmd_experiment)

    fixtures = commands.add_parser('fixtures', parents=[common], help="write generated fixture files")
    fixtures.add_argument('output')
    fixtures.add_argument('--domain', choices=['restaurant'] + ipc_domains, default='restaurant')
    fixtures.add_argument('--size', choices=fixture_sizes, default='small')
    fixtures.add_argument('--count', type=int, default=5)
    fixtures.add_argument('--seed', type=int, default=0)
    fixtures.set_defaults(handler=cmd_fixtures)

    return parser


def _configure_logging(verbosity: int) -> None:
    level = {0: logging.WARNING, 1: logging.INFO}.get(verbosity, logging.DEBUG)
    logging.basicConfig(level=level, format='%(asctime)s %(levelname)s %(name)s: %(message)s')


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    _configure_logging(args.verbose)

    try:
        return args.handler(args)
    except ValidationError as error:
        print(f"error: {error.message}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    except OSError as error:
        print(f"error: {error}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    except PlanningError as error:
        print(f"error: {error.message}", file=sys.stderr)
        return EXIT_TIMEOUT_WITH_INCUMBENT


if __name__ == '__main__':
    sys.exit(main())
