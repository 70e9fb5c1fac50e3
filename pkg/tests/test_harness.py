from dataclasses import replace
from fractions import Fraction
import math

import pytest

from explicable_design.configs import (EXIT_INPUT_ERROR, EXIT_SUCCESS, EXIT_TIMEOUT_WITH_INCUMBENT, report_columns,
                                       sweep_columns)
from explicable_design.explicability import ExplicableProblem, most_explicable_plan
from explicable_design.harness.cli import main
from explicable_design.harness.experiments import (SWEEP_ALPHAS, SWEEP_HORIZONS, ExperimentPlan, preset_plan, run,
                                                   sweep_rows)
from explicable_design.harness.fixtures import (build_demo_fixture, build_ipc_fixtures, build_ipc_suite,
                                                demo_fixture_files, fixture_sizes, ipc_domains)
from explicable_design.utils import ValidationError


@pytest.fixture(scope='module')
def suite_result():
    return run(preset_plan('table'))


@pytest.fixture(scope='module')
def alpha_horizon_result():
    return run(preset_plan('alpha-horizon'))


@pytest.fixture
def demo_files(tmp_path):
    def write(setting):
        return {key: str(path) for key, path in demo_fixture_files(setting).write(tmp_path).items()}
    return write


def design_args(paths):
    return ['design', paths['robot_domain'], paths['human_domain'], paths['problem'], paths['designs']]


# ----------------------------- FIXTURES ------------------------------#
@pytest.mark.parametrize('domain', ipc_domains)
def test_fixtures_are_deterministic(domain, tmp_path):
    first = build_ipc_fixtures(domain, seed=7).write(tmp_path / 'first')
    second = build_ipc_fixtures(domain, seed=7).write(tmp_path / 'second')

    for key in first:
        assert first[key].read_bytes() == second[key].read_bytes()


@pytest.mark.parametrize('domain', ipc_domains)
@pytest.mark.parametrize('size', fixture_sizes)
def test_fixtures_load(domain, size):
    for fixture in build_ipc_suite(domain, count=3, size=size):
        pair, tasks, spec = fixture.load()

        assert pair.human_only or any(pair.human.action(name).pre != pair.robot.action(name).pre
                                      for name in pair.robot.action_names)
        assert math.isclose(float(sum(tasks.probabilities)), 1.0)
        assert spec.modifications


def test_suite_names():
    assert [fixture.name for fixture in build_ipc_suite('grid', count=2, seed=4)] == ['grid-small-4', 'grid-small-5']


def test_unknown_fixture_domain():
    with pytest.raises(ValidationError):
        build_ipc_fixtures('logistics')
    with pytest.raises(ValidationError):
        demo_fixture_files('d')


def test_build_demo_fixture():
    pair, tasks, spec = build_demo_fixture('c')

    assert [task.name for task in tasks.tasks] == ['g1', 'g2']
    assert tasks.probabilities == (Fraction(1, 2), Fraction(1, 2))
    assert spec.weights.beta == 30
    assert spec.horizon == 10
    assert len(spec.modifications) == 6
    assert len(pair.human_only) == 12


def test_demo_files_round_trip(tmp_path):
    fixture = demo_fixture_files('b')
    paths = fixture.write(tmp_path)

    assert sorted(path.name for path in paths.values()) == ['restaurant-b-designs.txt', 'restaurant-b-human.pddl',
                                                          'restaurant-b-problem.pddl', 'restaurant-b-robot.pddl']
    assert paths['problem'].read_text() == fixture.problem


# ----------------------------- EXPERIMENTS ------------------------------#
def test_suite_designs_never_hurt(suite_result):
    assert len(suite_result.cells) == 15
    for cell in suite_result.cells:
        assert cell.status == 'ok'
        chosen, baseline = cell.outcome.evaluation, cell.outcome.baseline
        assert chosen.objective <= baseline.objective
        assert chosen.expected_ie <= baseline.expected_ie


def test_suite_grid_keeps_plan_cost(suite_result):
    for cell in suite_result.cells:
        if cell.fixture.startswith('grid'):
            assert cell.outcome.evaluation.expected_robot_cost == cell.outcome.baseline.expected_robot_cost


@pytest.mark.parametrize('domain', ['blocksworld', 'driverlog'])
def test_suite_gating_trades_plan_cost_for_explicability(suite_result, domain):
    for cell in suite_result.cells:
        if cell.fixture.startswith(domain):
            chosen, baseline = cell.outcome.evaluation, cell.outcome.baseline
            assert chosen.design_size >= 1
            assert chosen.expected_robot_cost > baseline.expected_robot_cost
            assert chosen.expected_ie < baseline.expected_ie


def test_suite_report(suite_result):
    lines = suite_result.report.splitlines()

    assert lines[0].split(',') == report_columns
    assert len(lines) == 1 + 2 * 15


def test_alpha_horizon_sweep(alpha_horizon_result):
    sizes = {(cell.weights.alpha, cell.params.horizon): cell.outcome.evaluation.design_size
             for cell in alpha_horizon_result.cells}

    assert len(sizes) == len(SWEEP_ALPHAS) * len(SWEEP_HORIZONS)
    assert all(sizes[alpha, 1] > 0 for alpha in SWEEP_ALPHAS)
    assert all(sizes[alpha, 50] == 0 for alpha in SWEEP_ALPHAS)
    for horizon in SWEEP_HORIZONS:
        by_alpha = [sizes[alpha, horizon] for alpha in SWEEP_ALPHAS]
        assert by_alpha == sorted(by_alpha)
    for alpha in SWEEP_ALPHAS:
        by_horizon = [sizes[alpha, horizon] for horizon in SWEEP_HORIZONS]
        assert by_horizon == sorted(by_horizon, reverse=True)


def test_alpha_horizon_sweep_file(alpha_horizon_result):
    lines = alpha_horizon_result.sweep.splitlines()

    assert lines[0].split(',') == sweep_columns
    assert len(lines) == 1 + 24
    assert lines[1].startswith('driverlog-small-0,0.5000,0.2500,0.2500,0.9000,1,1,')


def test_experiment_plan_validation():
    fixtures = (demo_fixture_files('a'),)
    with pytest.raises(ValidationError):
        ExperimentPlan(fixtures, alphas=())
    with pytest.raises(ValidationError):
        ExperimentPlan(())
    with pytest.raises(ValidationError):
        ExperimentPlan(fixtures, fmt='html')
    with pytest.raises(ValidationError):
        preset_plan('ablation')


def test_experiment_cells():
    plan = ExperimentPlan((demo_fixture_files('a'), demo_fixture_files('b')), alphas=(Fraction(1), Fraction(2)),
                          horizons=(1, 5, 10))
    assert len(plan.cells()) == 2 * 2 * 3


def test_run_writes_files(tmp_path):
    result = run(ExperimentPlan((demo_fixture_files('a'),), output=tmp_path, fmt='markdown'))

    assert result.paths['report'] == tmp_path / 'report.md'
    assert result.paths['report'].read_text() == result.report
    assert result.paths['sweep'].read_text() == result.sweep
    assert result.report.startswith('| config |')
    assert result.cells[0].outcome.ids == ()
    assert not result.anytime


def test_run_records_failed_cells():
    broken = replace(demo_fixture_files('a'), name='broken', designs='weights { alpha = 0, beta = 0, kappa = 0 }')
    result = run(ExperimentPlan((broken, demo_fixture_files('a'))))

    assert result.cells[0].status.startswith('failed: ')
    assert result.cells[1].status == 'ok'
    assert sweep_rows(result.cells)[0]['design_size'] == ''
    assert len(result.report.splitlines()) == 1 + 2


# ----------------------------- CLI ------------------------------#
def test_cli_design(demo_files, capsys):
    assert main(design_args(demo_files('a'))) == EXIT_SUCCESS
    assert capsys.readouterr().out.startswith('; design: (none)\n')


def test_cli_design_setting_c(demo_files, capsys):
    assert main(design_args(demo_files('c')) + ['--no-prune', '--workers', '2']) == EXIT_SUCCESS
    assert capsys.readouterr().out.startswith('; design: barrier-c00-c01 barrier-c10-c11\n')


def test_cli_design_overrides_horizon(demo_files, capsys):
    assert main(design_args(demo_files('c')) + ['--horizon', '1']) == EXIT_SUCCESS
    assert capsys.readouterr().out.startswith('; design: (none)\n')


def test_cli_design_time_limit(demo_files):
    assert main(design_args(demo_files('c')) + ['--time-limit-secs', '0']) == EXIT_TIMEOUT_WITH_INCUMBENT


def test_cli_input_errors(demo_files, tmp_path, capsys):
    paths = demo_files('a')

    assert main(design_args(paths) + ['--gamma', '3/2']) == EXIT_INPUT_ERROR
    assert main(design_args({**paths, 'designs': str(tmp_path / 'missing.txt')})) == EXIT_INPUT_ERROR
    assert main(['experiment']) == EXIT_INPUT_ERROR
    assert 'error:' in capsys.readouterr().err


def test_cli_plan(demo_files, capsys):
    paths = demo_files('a')

    assert main(['plan', paths['robot_domain'], paths['problem']]) == EXIT_SUCCESS
    assert capsys.readouterr().out.endswith('; cost = 12\n')


def test_cli_explicate_and_score(demo_files, tmp_path, capsys):
    paths = demo_files('a')
    pair, tasks, _ = demo_fixture_files('a').load()
    plan = most_explicable_plan(ExplicableProblem(pair, tasks.tasks[0])).plan
    plan_path = tmp_path / 'plan.txt'
    plan_path.write_text(str(plan))

    assert main(['explicate', paths['robot_domain'], paths['human_domain'], paths['problem']]) == EXIT_SUCCESS
    assert '; task g1' in capsys.readouterr().out

    assert main(['score', paths['robot_domain'], paths['human_domain'], paths['problem'], str(plan_path)]) == 0
    assert capsys.readouterr().out == 'inexplicability = 54.5982 (log 4.0000)\n'


def test_cli_fixtures(tmp_path, capsys):
    assert main(['fixtures', str(tmp_path / 'demo')]) == EXIT_SUCCESS
    assert len(list((tmp_path / 'demo').iterdir())) == 12

    assert main(['fixtures', str(tmp_path / 'grid'), '--domain', 'grid', '--count', '2']) == EXIT_SUCCESS
    assert len(capsys.readouterr().out.splitlines()) == 12 + 8


def test_cli_experiment(tmp_path):
    assert main(['experiment', '--fixture', 'restaurant-a', '--output', str(tmp_path)]) == EXIT_SUCCESS
    assert (tmp_path / 'report.csv').exists()
    assert (tmp_path / 'sweep.csv').exists()


def test_cli_version():
    with pytest.raises(SystemExit) as error:
        main(['--version'])
    assert error.value.code == 0
