"""
Experiment sweeps: run the design search on fixtures over grids of objective weights, discount factors and horizons,
then write the with/without design report and the sweep file.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple
import itertools
import logging
import time

from explicable_design.configs import report_formats, sweep_columns
from explicable_design.design.objective import LongitudinalParams, ObjectiveWeights
from explicable_design.design.search import DesignProblem, SearchOutcome, search
from explicable_design.harness.fixtures import (FixtureFiles, build_ipc_fixtures, build_ipc_suite, demo_fixture_files,
                                                demo_settings, ipc_domains)
from explicable_design.pddlio.designspec import DesignSpec
from explicable_design.pddlio.models import ModelPair, TaskSpec
from explicable_design.pddlio.report import ReportEntry, format_number, write_report, write_table
from explicable_design.utils import PlanningError, ValidationError, require_in_list, require_not_empty

logger = logging.getLogger(__name__)

Grid = Optional[Tuple[Fraction, ...]]

presets = ['demo', 'table', 'alpha-horizon', 'gamma-horizon', 'kappa-horizon']

SWEEP_ALPHAS = (Fraction(1, 2), Fraction('0.66'), Fraction(3, 4), Fraction(1))
SWEEP_HORIZONS = (1, 10, 20, 30, 40, 50)
SHORT_HORIZONS = (1, 3, 5, 10)
SWEEP_GAMMAS = tuple(Fraction(step, 10) for step in range(10))
SWEEP_KAPPAS = (Fraction(0), Fraction(1, 10), Fraction(1, 2), Fraction(1), Fraction(2), Fraction(3), Fraction(4),
                Fraction(5))


def _grid(values, name: str) -> Grid:
    if values is None:
        return None
    values = tuple(values)
    require_not_empty(values, failure_message=f"The {name} grid must not be empty")
    return values


@dataclass(frozen=True)
class ExperimentPlan:
    """
    Fixtures and the objective grids to sweep. A grid left to None takes the value of each fixture's design file.
    """

    fixtures: Tuple[FixtureFiles, ...]
    alphas: Grid = None
    betas: Grid = None
    kappas: Grid = None
    gammas: Grid = None
    horizons: Optional[Tuple[int, ...]] = None
    output: Optional[Path] = None
    fmt: str = 'csv'
    seed: int = 0
    workers: int = 1
    time_limit: Optional[float] = None
    planner_time_limit: Optional[float] = None
    max_design_size: Optional[int] = None
    prune: bool = True

    def __post_init__(self):
        object.__setattr__(self, 'fixtures', tuple(self.fixtures))
        require_not_empty(self.fixtures, failure_message="An experiment needs at least one fixture")
        for name in ('alphas', 'betas', 'kappas', 'gammas', 'horizons'):
            object.__setattr__(self, name, _grid(getattr(self, name), name))
        require_in_list(self.fmt, report_formats)
        if self.workers < 1:
            raise ValidationError("At least one worker is required")

    def cells(self) -> List[Tuple[FixtureFiles, Tuple]]:
        grids = [self.alphas, self.betas, self.kappas, self.gammas, self.horizons]
        values = itertools.product(*[grid if grid is not None else (None,) for grid in grids])
        return [(fixture, setting) for fixture, setting in itertools.product(self.fixtures, list(values))]


@dataclass(frozen=True)
class CellResult:

    fixture: str
    weights: Optional[ObjectiveWeights]
    params: Optional[LongitudinalParams]
    outcome: Optional[SearchOutcome] = None
    failure: Optional[str] = None
    time_secs: float = 0.0

    @property
    def status(self) -> str:
        if self.failure is not None:
            return f"failed: {self.failure}"
        return 'anytime' if self.outcome.anytime else 'ok'


@dataclass
class ExperimentResult:

    cells: List[CellResult] = field(default_factory=list)
    report: str = ''
    sweep: str = ''
    paths: Dict[str, Path] = field(default_factory=dict)

    @property
    def anytime(self) -> bool:
        return any(cell.outcome is not None and cell.outcome.anytime for cell in self.cells)


# ----------------------------- PRESETS ------------------------------#
def preset_plan(name: str, seed: int = 0, **overrides) -> ExperimentPlan:
    """
    Named experiments: the restaurant demo settings, the fixture suites of the three IPC style domains and the
    three weight/horizon sweeps on the driverlog fixture.
    """

    require_in_list(name, presets)
    if name == 'demo':
        settings = dict(fixtures=tuple(demo_fixture_files(setting) for setting in demo_settings))
    elif name == 'table':
        settings = dict(fixtures=tuple(itertools.chain.from_iterable(
            build_ipc_suite(domain, seed=seed) for domain in ipc_domains)))
    else:
        driverlog = (build_ipc_fixtures('driverlog', seed=seed),)
        quarter = (Fraction(1, 4),)
        if name == 'alpha-horizon':
            settings = dict(fixtures=driverlog, alphas=SWEEP_ALPHAS, betas=quarter, kappas=quarter,
                            gammas=(Fraction(9, 10),), horizons=SWEEP_HORIZONS)
        elif name == 'gamma-horizon':
            settings = dict(fixtures=driverlog, alphas=(Fraction(1),), betas=quarter, kappas=quarter,
                            gammas=SWEEP_GAMMAS, horizons=SHORT_HORIZONS)
        else:
            settings = dict(fixtures=driverlog, alphas=(Fraction(1),), betas=quarter, kappas=SWEEP_KAPPAS,
                            gammas=(Fraction(9, 10),), horizons=SHORT_HORIZONS)

    settings.update(overrides)
    return ExperimentPlan(seed=seed, **settings)


# ----------------------------- RUN ------------------------------#
def _objective(spec: DesignSpec, setting: Tuple) -> Tuple[ObjectiveWeights, LongitudinalParams]:
    alpha, beta, kappa, gamma, horizon = setting
    weights = spec.weights
    params = spec.params
    return (ObjectiveWeights(alpha if alpha is not None else weights.alpha,
                             beta if beta is not None else weights.beta,
                             kappa if kappa is not None else weights.kappa),
            LongitudinalParams(gamma if gamma is not None else params.gamma,
                               horizon if horizon is not None else params.horizon))


def _run_cell(plan: ExperimentPlan, loaded: Tuple[ModelPair, TaskSpec, DesignSpec], fixture: FixtureFiles,
              setting: Tuple) -> CellResult:
    start = time.perf_counter()
    weights = params = None
    try:
        pair, tasks, spec = loaded
        weights, params = _objective(spec, setting)
        dp = DesignProblem(pair, tasks, spec.modifications, weights, params,
                           time_limit=plan.time_limit if plan.time_limit is not None else spec.time_limit,
                           max_design_size=plan.max_design_size if plan.max_design_size is not None
                           else spec.max_design_size,
                           prune=plan.prune,
                           planner_time_limit=plan.planner_time_limit if plan.planner_time_limit is not None
                           else spec.planner_time_limit)
        outcome = search(dp)
    except (ValidationError, PlanningError) as error:
        logger.warning(f"Cell {fixture.name} {setting} failed: {error}")
        return CellResult(fixture.name, weights, params, failure=str(error), time_secs=time.perf_counter() - start)

    logger.info(f"Cell {fixture.name} {setting}: design {list(outcome.ids)}")
    return CellResult(fixture.name, weights, params, outcome, time_secs=time.perf_counter() - start)


def _cell_name(cell: CellResult, varied: Sequence[str]) -> str:
    if not varied or cell.weights is None:
        return cell.fixture
    values = {'alpha': cell.weights.alpha, 'beta': cell.weights.beta, 'kappa': cell.weights.kappa,
              'gamma': cell.params.gamma, 'horizon': cell.params.horizon}
    return f"{cell.fixture}[{','.join(f'{key}={values[key]}' for key in varied)}]"


def sweep_rows(cells: Sequence[CellResult]) -> List[Dict[str, str]]:
    rows = []
    for cell in cells:
        weights, params = cell.weights, cell.params
        rows.append({
            'fixture': cell.fixture,
            'alpha': format_number(weights.alpha) if weights else '',
            'beta': format_number(weights.beta) if weights else '',
            'kappa': format_number(weights.kappa) if weights else '',
            'gamma': format_number(params.gamma) if params else '',
            'horizon': str(params.horizon) if params else '',
            'design_size': str(cell.outcome.evaluation.design_size) if cell.outcome else '',
            'total_cost': format_number(cell.outcome.evaluation.objective) if cell.outcome else '',
            'status': cell.status,
        })
    return rows


def run(plan: ExperimentPlan) -> ExperimentResult:
    """
    Run every cell of the plan, up to `plan.workers` at a time. A failing cell is recorded and the run goes on.
    Returns:
        result (ExperimentResult): the cells, the report and sweep texts and the paths they were written to
    """

    loaded = {}
    for fixture in plan.fixtures:
        try:
            loaded[fixture.name] = fixture.load()
        except ValidationError as error:
            logger.warning(f"Fixture {fixture.name} could not be read: {error}")
            loaded[fixture.name] = error

    def run_cell(cell: Tuple[FixtureFiles, Tuple]) -> CellResult:
        fixture, setting = cell
        content = loaded[fixture.name]
        if isinstance(content, ValidationError):
            return CellResult(fixture.name, None, None, failure=str(content))
        return _run_cell(plan, content, fixture, setting)

    cells = plan.cells()
    logger.info(f"Running {len(cells)} experiment cells with {plan.workers} workers")
    with ThreadPoolExecutor(max_workers=plan.workers) as executor:
        results = list(executor.map(run_cell, cells))

    grids = {'alpha': plan.alphas, 'beta': plan.betas, 'kappa': plan.kappas, 'gamma': plan.gammas,
             'horizon': plan.horizons}
    varied = [key for key, grid in grids.items() if grid is not None and len(grid) > 1]
    entries = [ReportEntry(_cell_name(cell, varied), cell.outcome.baseline, cell.outcome.evaluation, cell.time_secs)
               for cell in results if cell.outcome is not None]

    result = ExperimentResult(results, write_report(entries, plan.fmt),
                              write_table(sweep_rows(results), sweep_columns, 'csv'))
    if plan.output is not None:
        output = Path(plan.output)
        output.mkdir(parents=True, exist_ok=True)
        extension = 'csv' if plan.fmt == 'csv' else 'md'
        result.paths = {'report': output / f"report.{extension}", 'sweep': output / 'sweep.csv'}
        result.paths['report'].write_text(result.report)
        result.paths['sweep'].write_text(result.sweep)
        logger.info(f"Wrote {result.paths['report']} and {result.paths['sweep']}")

    return result
