from fractions import Fraction
import math

import pytest

from explicable_design.design import objective
from explicable_design.design.modifications import (DesignModification, ModificationKind, apply_designs, design_cost,
                                                    design_ids)
from explicable_design.design.objective import (ConfigEvaluator, LongitudinalParams, ObjectiveWeights, combine,
                                                evaluate_config, expectation, log_expectation, longitudinal_factor)
from explicable_design.design.search import (DesignProblem, NodeRecord, brute_force_search, pareto_front,
                                             relevance_prune, search, witness_actions)
from explicable_design.explicability import ExplicableProblem, MostExplicableResult, cost_distance
from explicable_design.harness.fixtures import (build_ipc_fixtures, build_ipc_suite, demo_fixture_files, demo_settings,
                                                ipc_domains)
from explicable_design.pddlio.models import TaskSpec
from explicable_design.planning.model import ActionDef, PlanningProblem
from explicable_design.utils import DesignSpecError, EvaluationFailedError, ValidationError


def prune_jump(identifier='prune-jump', cost=1):
    return DesignModification(identifier, ModificationKind.PRUNE_HUMAN_ACTION, ('move_0_3',), cost=cost)


@pytest.fixture
def shortcut_base(shortcut_pair, shortcut_task):
    return (ExplicableProblem(shortcut_pair, shortcut_task),)


def design_problem(loaded, **overrides):
    pair, tasks, spec = loaded
    settings = dict(weights=spec.weights, params=spec.params, max_design_size=spec.max_design_size)
    settings.update(overrides)
    return DesignProblem(pair, tasks, spec.modifications, **settings)


# ----------------------------- MODIFICATIONS ------------------------------#
def test_modification_checks_payload():
    with pytest.raises(DesignSpecError):
        DesignModification('x', ModificationKind.ADD_PRECONDITION_HUMAN, ('a',))
    with pytest.raises(DesignSpecError):
        DesignModification('x', ModificationKind.PRUNE_HUMAN_ACTION, ('a',), payload={'p'})
    with pytest.raises(ValidationError):
        DesignModification('x', ModificationKind.PRUNE_HUMAN_ACTION, ())


def test_prune_human_action(shortcut_pair):
    pair = prune_jump().apply(shortcut_pair)

    assert not pair.human.has_action('move_0_3')
    assert pair.robot is shortcut_pair.robot


def test_prune_both_action(shortcut_pair):
    pair = DesignModification('x', ModificationKind.PRUNE_BOTH_ACTION, ('move_1_0',)).apply(shortcut_pair)

    assert not pair.human.has_action('move_1_0')
    assert not pair.robot.has_action('move_1_0')


def test_add_precondition(shortcut_pair):
    human_only = DesignModification('x', ModificationKind.ADD_PRECONDITION_HUMAN, ('move_0_1',), payload={'at2'})
    both = DesignModification('y', ModificationKind.ADD_PRECONDITION_BOTH, ('move_0_1',), payload={'at2'})

    pair = human_only.apply(shortcut_pair)
    assert pair.human.action('move_0_1').pre == {'at0', 'at2'}
    assert pair.robot.action('move_0_1').pre == {'at0'}

    pair = both.apply(shortcut_pair)
    assert pair.human.action('move_0_1').pre == {'at0', 'at2'}
    assert pair.robot.action('move_0_1').pre == {'at0', 'at2'}


def test_modification_validation(shortcut_pair):
    with pytest.raises(DesignSpecError):
        DesignModification('x', ModificationKind.PRUNE_HUMAN_ACTION, ('fly',)).validate(shortcut_pair)
    with pytest.raises(DesignSpecError):
        DesignModification('x', ModificationKind.ADD_PRECONDITION_HUMAN, ('move_0_1',),
                           payload={'at9'}).validate(shortcut_pair)
    prune_jump().validate(shortcut_pair)


def test_payload_placeholders():
    pair, _, spec = build_ipc_fixtures('driverlog', seed=0).load()
    gate = spec.modifications[0]
    target = pair.human.action(gate.target[0])

    assert gate.payload == {'just-disembarked_?4'}
    assert gate.payload_for(target) == {'just-disembarked_d0'}
    assert 'just-disembarked_d0' in gate.apply(pair).robot.action(gate.target[0]).pre


def test_payload_placeholder_out_of_range(shortcut_pair):
    modification = DesignModification('x', ModificationKind.ADD_PRECONDITION_HUMAN, ('move_0_1',), payload={'p_?3'})
    with pytest.raises(DesignSpecError):
        modification.validate(shortcut_pair)


def test_block_transition(demo_a):
    pair, _, spec = demo_a
    barrier = next(m for m in spec.modifications if m.id == 'barrier-c00-c01')

    assert barrier.affected_actions(pair) == {'move_cell_0_0_cell_0_1', 'move_cell_0_1_cell_0_0'}
    modified = barrier.apply(pair)
    assert not modified.human.has_action('move_cell_0_0_cell_0_1')
    assert modified.robot is pair.robot


def test_block_transition_needs_a_match(demo_a):
    pair, _, _ = demo_a
    with pytest.raises(DesignSpecError):
        DesignModification('x', ModificationKind.BLOCK_TRANSITION, ('cell_0_0', 'cell_2_2')).validate(pair)


def test_block_transition_spares_actions_that_stay_put(demo_a):
    pair, _, spec = demo_a
    barrier = next(m for m in spec.modifications if m.id == 'barrier-c00-c01')
    look = ActionDef('look_cell_0_0_cell_0_1', pre={'at_cell_0_0'}, add={'seen_cell_0_1'}, schema='look',
                     args=('cell_0_0', 'cell_0_1'))
    human = pair.human
    widened = pair.replace(human=PlanningProblem(human.fluents | {'seen_cell_0_1'}, human.actions + (look,),
                                                 human.init, human.goal, human.name))

    assert barrier.affected_actions(widened) == {'move_cell_0_0_cell_0_1', 'move_cell_0_1_cell_0_0'}
    assert barrier.apply(widened).human.has_action('look_cell_0_0_cell_0_1')


def test_apply_designs_is_order_independent(shortcut_base):
    first = DesignModification('a', ModificationKind.ADD_PRECONDITION_HUMAN, ('move_0_1',), payload={'at2'})
    second = prune_jump('b')

    one = apply_designs(shortcut_base, [first, second])
    other = apply_designs(shortcut_base, [second, first])

    assert one == other
    assert hash(one) == hash(other)
    assert one.pair.canonical_hash == other.pair.canonical_hash
    assert one.ids == ('a', 'b')
    assert one.design_cost == 2


def test_modifications_are_idempotent(shortcut_pair):
    once = prune_jump().apply(shortcut_pair)
    twice = prune_jump().apply(once)

    assert once.canonical_hash == twice.canonical_hash


def test_empty_design_keeps_the_pair(shortcut_base):
    configuration = apply_designs(shortcut_base, [])

    assert configuration.pair is shortcut_base[0].pair
    assert configuration.ids == ()
    assert configuration.design_cost == 0


def test_design_helpers():
    designs = [prune_jump('b', cost=Fraction(1, 2)), prune_jump('a', cost=2)]

    assert design_ids(designs) == ('a', 'b')
    assert design_cost(designs) == Fraction(5, 2)


# ----------------------------- OBJECTIVE ------------------------------#
def test_longitudinal_factor():
    direct = sum(0.9 ** t for t in range(10))

    assert longitudinal_factor(LongitudinalParams(Fraction(9, 10), 10)) == pytest.approx(6.5132156, abs=1e-6)
    assert longitudinal_factor(LongitudinalParams(Fraction(9, 10), 10)) == pytest.approx(direct, abs=1e-9)
    assert longitudinal_factor(LongitudinalParams(Fraction(1, 2), 1)) == 1
    assert longitudinal_factor(LongitudinalParams(Fraction(0), 5)) == 1


@pytest.mark.parametrize('horizon', range(1, 101))
def test_longitudinal_factor_without_discount(horizon):
    assert longitudinal_factor(LongitudinalParams(Fraction(1), horizon)) == horizon


def test_longitudinal_params_validation():
    with pytest.raises(ValidationError):
        LongitudinalParams(Fraction(3, 2), 1)
    with pytest.raises(ValidationError):
        LongitudinalParams(Fraction(1, 2), 0)
    with pytest.raises(ValidationError):
        ObjectiveWeights(0, 0, 0)
    with pytest.raises(ValidationError):
        ObjectiveWeights(-1, 1, 1)


def test_expectation():
    assert expectation([Fraction(1, 2), Fraction(1, 2)], [2, 4]) == 3
    assert expectation([Fraction(1), Fraction(0)], [2, math.inf]) == 2
    assert expectation([Fraction(1, 2), Fraction(1, 2)], [2, math.inf]) == math.inf


def _result(log_ie, cost):
    return MostExplicableResult(None, cost_distance(log_ie, 0, True), cost)


def test_combine():
    evaluation = combine(('a',), [_result(0, 4), _result(2, 6)], [Fraction(1, 2), Fraction(1, 2)], Fraction(3),
                         ObjectiveWeights(1, 2, Fraction(1, 4)), LongitudinalParams(Fraction(1), 2))
    expected_ie = (1 + math.e ** 2) / 2

    assert evaluation.expected_ie == pytest.approx(expected_ie)
    assert evaluation.longitudinal_ie == pytest.approx(2 * expected_ie)
    assert evaluation.expected_robot_cost == 5
    assert evaluation.objective == pytest.approx(2 * expected_ie + 6 + 2.5)
    assert evaluation.design_size == 1


def test_combine_zero_weight_switches_term_off():
    infinite = MostExplicableResult(None, cost_distance(0, math.inf, True), 4)
    evaluation = combine((), [infinite], [Fraction(1)], Fraction(0), ObjectiveWeights(0, 1, 1), LongitudinalParams())

    assert evaluation.expected_ie == math.inf
    assert evaluation.objective == 4


def test_combine_orders_overflowing_objectives():
    probabilities, weights, params = [Fraction(1, 2), Fraction(1, 2)], ObjectiveWeights(), LongitudinalParams()
    milder = combine(('b',), [_result(800, 4), _result(0, 4)], probabilities, Fraction(1), weights, params)
    harsher = combine(('a',), [_result(900, 4), _result(0, 4)], probabilities, Fraction(1), weights, params)

    assert milder.objective == harsher.objective == math.inf
    assert milder.expected_ie_log == pytest.approx(800 + math.log(0.5))
    assert milder.sort_key() < harsher.sort_key()


def test_log_expectation():
    assert log_expectation([Fraction(1, 2), Fraction(1, 2)], [0.0, 0.0]) == pytest.approx(0.0)
    assert log_expectation([Fraction(1), Fraction(0)], [3.0, math.inf]) == pytest.approx(3.0)
    assert log_expectation([Fraction(1, 2), Fraction(1, 2)], [3.0, math.inf]) == math.inf


def test_combine_skips_unsupported_tasks():
    evaluation = combine((), [_result(0, 2), None], [Fraction(1), Fraction(0)], Fraction(0), ObjectiveWeights(),
                         LongitudinalParams())
    assert evaluation.expected_ie == 1


def test_evaluate_config(shortcut_base):
    baseline = evaluate_config(apply_designs(shortcut_base, []), [1])
    pruned = evaluate_config(apply_designs(shortcut_base, [prune_jump()]), [1])

    assert baseline.expected_ie == pytest.approx(math.e ** 2)
    assert baseline.expected_robot_cost == 3
    assert pruned.expected_ie == 1
    assert pruned.expected_robot_cost == 3
    assert pruned.objective == pytest.approx(1 + 0.25 + 0.75)


def test_evaluator_memoizes_per_pair(shortcut_base):
    evaluator = ConfigEvaluator((Fraction(1),))
    configuration = apply_designs(shortcut_base, [prune_jump()])

    first = evaluator.task_result(configuration, 0)
    assert evaluator.task_result(apply_designs(shortcut_base, [prune_jump('again')]), 0) is first


def test_evaluator_records_failures(shortcut_base, monkeypatch):
    def timed_out(exp, cache=None, time_limit=None):
        raise EvaluationFailedError(f"Planner timed out on '{exp.task.name}'")

    monkeypatch.setattr(objective, 'most_explicable_plan', timed_out)
    evaluation = ConfigEvaluator((Fraction(1),)).evaluate(apply_designs(shortcut_base, []))

    assert evaluation.failed
    assert evaluation.objective == math.inf
    assert evaluation.failure == "evaluation-failed: Planner timed out on 'reach-3'"


def test_search_skips_failed_designs(shortcut_pair, shortcut_task, monkeypatch):
    evaluate = objective.ConfigEvaluator.evaluate

    def failing(self, configuration):
        if configuration.ids:
            return objective.ConfigEvaluation(configuration.ids, (), math.inf, math.inf, configuration.design_cost,
                                              math.inf, failure='evaluation-failed: boom')
        return evaluate(self, configuration)

    monkeypatch.setattr(objective.ConfigEvaluator, 'evaluate', failing)
    outcome = search(DesignProblem(shortcut_pair, TaskSpec((shortcut_task,), (1,)), (prune_jump(),)))

    assert outcome.ids == ()
    assert outcome.log[1].failure == 'evaluation-failed: boom'
    assert outcome.pareto_front == (outcome.log[0],)


def test_evaluator_checks_probabilities():
    with pytest.raises(ValidationError):
        ConfigEvaluator((Fraction(1, 2),))


# ----------------------------- SEARCH ------------------------------#
def test_design_problem_validation(shortcut_pair, shortcut_task):
    tasks = TaskSpec((shortcut_task,), (1,))
    with pytest.raises(DesignSpecError):
        DesignProblem(shortcut_pair, tasks, (prune_jump(), prune_jump()))
    with pytest.raises(DesignSpecError):
        DesignProblem(shortcut_pair, tasks, (prune_jump(),), max_design_size=-1)
    with pytest.raises(DesignSpecError):
        DesignProblem(shortcut_pair, tasks, (DesignModification('x', ModificationKind.PRUNE_HUMAN_ACTION, ('fly',)),))


def test_search_on_shortcut(shortcut_pair, shortcut_task):
    tasks = TaskSpec((shortcut_task,), (1,))
    dp = DesignProblem(shortcut_pair, tasks, (prune_jump(),))
    outcome = search(dp)

    assert outcome.ids == ('prune-jump',)
    assert outcome.evaluation.expected_ie == 1
    assert outcome.baseline.ids == ()
    assert not outcome.anytime
    assert [record.ids for record in outcome.log] == [(), ('prune-jump',)]


def test_search_keeps_empty_design_when_too_expensive(shortcut_pair, shortcut_task):
    tasks = TaskSpec((shortcut_task,), (1,))
    outcome = search(DesignProblem(shortcut_pair, tasks, (prune_jump(cost=100),)))

    assert outcome.ids == ()
    assert outcome.evaluation == outcome.baseline


def test_search_respects_max_design_size(shortcut_pair, shortcut_task):
    tasks = TaskSpec((shortcut_task,), (1,))
    outcome = search(DesignProblem(shortcut_pair, tasks, (prune_jump(),), max_design_size=0))

    assert outcome.ids == ()
    assert len(outcome.log) == 1


def test_search_time_limit_returns_incumbent(demo_c):
    outcome = search(design_problem(demo_c, time_limit=0.0))

    assert outcome.anytime
    assert outcome.ids == ()
    assert len(outcome.log) == 1


def test_relevance_prune_keeps_witness_designs(shortcut_base):
    configuration = apply_designs(shortcut_base, [])
    unrelated = DesignModification('far', ModificationKind.PRUNE_HUMAN_ACTION, ('move_3_2',))

    assert 'move_0_3' in witness_actions(configuration)
    assert relevance_prune([prune_jump(), unrelated], configuration) == (prune_jump(),)


def test_pareto_front():
    records = [NodeRecord((), 10.0, 5.0, 5.0, 0.0, 3.0),
               NodeRecord(('a',), 8.0, 1.0, 1.0, 1.0, 3.0),
               NodeRecord(('b',), 9.0, 1.0, 1.0, 2.0, 3.0),
               NodeRecord(('c',), math.inf, math.inf, math.inf, 1.0, math.inf, failure='evaluation-failed: x')]

    assert [record.ids for record in pareto_front(records)] == [(), ('a',)]


def test_demo_setting_a_chooses_no_design(demo_a):
    outcome = search(design_problem(demo_a))

    assert outcome.ids == ()
    assert outcome.evaluation.expected_ie == pytest.approx(math.e ** 4)
    assert outcome.evaluation.objective == pytest.approx(math.e ** 4 + 0.25 * 12)


def test_demo_setting_b_chooses_no_design(demo_b):
    outcome = search(design_problem(demo_b))

    assert outcome.ids == ()
    assert outcome.evaluation.expected_robot_cost == 11


def test_demo_setting_c_chooses_two_barriers(demo_c):
    exhaustive = brute_force_search(design_problem(demo_c))
    pruned = search(design_problem(demo_c))
    unpruned = search(design_problem(demo_c, prune=False, workers=4))

    assert exhaustive.ids == ('barrier-c00-c01', 'barrier-c10-c11')
    assert unpruned.ids == exhaustive.ids
    assert pruned.evaluation.objective == pytest.approx(exhaustive.evaluation.objective)
    assert pruned.evaluation.design_size == 2
    assert all(result.ie_min.value == 1 for result in pruned.evaluation.per_task)
    assert pruned.evaluation.objective < pruned.baseline.objective


BRUTE_FORCE_FIXTURES = ([fixture for domain in ipc_domains for fixture in build_ipc_suite(domain)]
                        + [demo_fixture_files(setting) for setting in demo_settings]
                        + [build_ipc_fixtures('grid', 'medium', 1), build_ipc_fixtures('driverlog', 'medium', 0)])


@pytest.mark.parametrize('fixture', BRUTE_FORCE_FIXTURES, ids=lambda fixture: fixture.name)
def test_search_matches_brute_force(fixture):
    loaded = fixture.load()
    exhaustive = brute_force_search(design_problem(loaded))
    outcome = search(design_problem(loaded))

    assert outcome.evaluation.objective == pytest.approx(exhaustive.evaluation.objective)
    assert search(design_problem(loaded, prune=False)).ids == exhaustive.ids
