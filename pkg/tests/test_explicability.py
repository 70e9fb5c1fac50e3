import math

import pytest
from hypothesis import given, settings

from explicable_design.configs import HUMAN_TAG, ROBOT_TAG
from explicable_design.explicability import (INFINITE_SCORE, ExplicableProblem, InexplicabilityScore, compile,
                                             cost_distance, most_explicable_plan, score_plan)
from explicable_design.pddlio.models import ModelPair
from explicable_design.planning.model import Plan, execute_plan
from explicable_design.planning.planner import SolutionCache, enumerate_plans, solve_uniform_cost
from explicable_design.utils import NonUnitCostError, PlanValidationError
from tests.conftest import corridor, move
from tests.strategies import model_pairs

ORACLE_BOUND = 5


def test_cost_distance():
    assert cost_distance(5, 3, True).log_value == 2
    assert cost_distance(3, 5, True).log_value == 2
    assert cost_distance(3, 3, True).value == 1
    assert cost_distance(3, 3, False) == INFINITE_SCORE
    assert cost_distance(3, math.inf, True) == INFINITE_SCORE


def test_score_overflow_keeps_order():
    large, larger = InexplicabilityScore(1000.0), InexplicabilityScore(1001.0)

    assert large.value == math.inf
    assert large.is_finite
    assert large < larger < INFINITE_SCORE
    assert not INFINITE_SCORE.is_finite


def test_compile_tags_both_models(shortcut_pair, shortcut_task):
    compiled = compile(ExplicableProblem(shortcut_pair, shortcut_task))
    problem = compiled.problem

    assert problem.init.true_fluents == {f"at0{ROBOT_TAG}", f"at0{HUMAN_TAG}"}
    assert problem.goal == {f"at3{ROBOT_TAG}", f"at3{HUMAN_TAG}"}
    assert not problem.has_action('move_0_3')
    assert compiled.excluded_actions == {'move_0_3'}
    assert problem.action('move_0_1').pre == {f"at0{ROBOT_TAG}", f"at0{HUMAN_TAG}"}


def test_compile_rejects_non_unit_costs(shortcut_task):
    robot = corridor(3, extra=[move(3, 0, cost=2)])
    pair = ModelPair(robot, corridor(3, extra=[move(3, 0)]))

    with pytest.raises(NonUnitCostError):
        compile(ExplicableProblem(pair, shortcut_task))


def test_most_explicable_plan(shortcut_pair, shortcut_task):
    result = most_explicable_plan(ExplicableProblem(shortcut_pair, shortcut_task))

    assert result.plan == Plan(('move_0_1', 'move_1_2', 'move_2_3'))
    assert result.ie_min.log_value == 2
    assert result.robot_cost == 3
    assert result.human_optimal_cost == 1
    assert result.human_plan == Plan(('move_0_3',))


def test_most_explicable_plan_agreeing_models(shortcut_task):
    pair = ModelPair(corridor(3), corridor(3))
    result = most_explicable_plan(ExplicableProblem(pair, shortcut_task))

    assert result.ie_min.value == 1
    assert result.robot_cost == 3


def test_most_explicable_plan_prefers_human_valid_plan(shortcut_task):
    # the human believes the jump needs the robot in two cells at once
    robot = corridor(3, extra=[move(0, 3)])
    human = corridor(3, extra=[move(0, 3)]).with_extra_preconditions({'move_0_3': ['at1']})
    pair = ModelPair(robot, human)
    result = most_explicable_plan(ExplicableProblem(pair, shortcut_task))

    assert result.plan == Plan(('move_0_1', 'move_1_2', 'move_2_3'))
    assert result.ie_min.value == 1
    assert result.robot_cost == 3


def test_most_explicable_plan_no_common_plan(shortcut_task):
    robot = corridor(3, extra=[move(0, 3)]).without_actions(['move_2_3'])
    human = corridor(3).without_actions(['move_0_1'])
    result = most_explicable_plan(ExplicableProblem(ModelPair(robot, human), shortcut_task))

    assert result.plan is None
    assert result.ie_min == INFINITE_SCORE
    assert result.robot_cost == 1


def test_most_explicable_plan_uses_cache(shortcut_pair, shortcut_task):
    cache = SolutionCache()
    exp = ExplicableProblem(shortcut_pair, shortcut_task)

    first = most_explicable_plan(exp, cache=cache)
    size = len(cache)
    second = most_explicable_plan(exp, cache=cache)

    assert first == second
    assert len(cache) == size == 2


def test_score_plan(shortcut_pair, shortcut_task):
    exp = ExplicableProblem(shortcut_pair, shortcut_task)

    assert score_plan(exp, Plan(('move_0_1', 'move_1_2', 'move_2_3'))).log_value == 2
    detour = Plan(('move_0_1', 'move_1_0', 'move_0_1', 'move_1_2', 'move_2_3'))
    assert score_plan(exp, detour).log_value == 4


def test_score_plan_invalid_for_human(shortcut_task):
    robot = corridor(3)
    human = corridor(3).without_actions(['move_1_2'])
    exp = ExplicableProblem(ModelPair(robot, human), shortcut_task)

    assert score_plan(exp, Plan(('move_0_1', 'move_1_2', 'move_2_3'))) == INFINITE_SCORE


def test_score_plan_invalid_for_robot(shortcut_pair, shortcut_task):
    with pytest.raises(PlanValidationError):
        score_plan(ExplicableProblem(shortcut_pair, shortcut_task), Plan(('move_0_3',)))


def _oracle(exp: ExplicableProblem):
    """
    Plans of bounded length valid in both models, and the optimal human cost
    """
    robot, human = exp.robot_problem, exp.human_problem
    plans = enumerate_plans(robot, ORACLE_BOUND, avoid_repeated_states=False)
    common = {plan for plan in plans if execute_plan(human, plan)[1]}
    return common, solve_uniform_cost(human).cost


@settings(max_examples=60)
@given(model_pairs())
def test_compilation_matches_oracle(pair_and_task):
    pair, task = pair_and_task
    exp = ExplicableProblem(pair, task)
    result = most_explicable_plan(exp)
    common, human_optimum = _oracle(exp)

    if result.plan is not None:
        # sound: the plan runs in both models and is scored against the human optimum
        assert execute_plan(exp.robot_problem, result.plan)[1]
        assert execute_plan(exp.human_problem, result.plan)[1]
        assert result.ie_min == cost_distance(len(result.plan), human_optimum, True)
        assert result.robot_cost == len(result.plan)

    if common:
        # complete and optimal against every bounded plan valid in both models
        best = min(cost_distance(len(plan), human_optimum, True) for plan in common)
        assert result.plan in common
        assert result.ie_min == best
    elif result.plan is not None:
        assert len(result.plan) > ORACLE_BOUND
    else:
        assert result.ie_min == INFINITE_SCORE


@settings(max_examples=60)
@given(model_pairs())
def test_minimal_inexplicability_plans_share_cost(pair_and_task):
    pair, task = pair_and_task
    common, human_optimum = _oracle(ExplicableProblem(pair, task))
    if not common:
        return

    scores = {plan: cost_distance(len(plan), human_optimum, True) for plan in common}
    best = min(scores.values())
    assert len({len(plan) for plan, score in scores.items() if score == best}) == 1


@settings(max_examples=60)
@given(model_pairs())
def test_compiled_plans_are_the_common_plans(pair_and_task):
    pair, task = pair_and_task
    exp = ExplicableProblem(pair, task)
    common, _ = _oracle(exp)

    assert enumerate_plans(compile(exp).problem, ORACLE_BOUND, avoid_repeated_states=False) == common


@settings(max_examples=60)
@given(model_pairs())
def test_score_grows_with_distance_to_human_optimum(pair_and_task):
    pair, task = pair_and_task
    exp = ExplicableProblem(pair, task)
    common, human_optimum = _oracle(exp)
    cache = SolutionCache()

    def distance(plan):
        return abs(len(plan) - human_optimum)

    ordered = sorted(common, key=distance)
    scores = [score_plan(exp, plan, cache=cache) for plan in ordered]
    for (plan, score), (other, other_score) in zip(zip(ordered, scores), zip(ordered[1:], scores[1:])):
        if distance(plan) == distance(other):
            assert score == other_score
        else:
            assert score < other_score
