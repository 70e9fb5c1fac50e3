"""
Inexplicability of robot plans with respect to the human's mental model, and the compilation whose optimal plans are
the most explicable plans of the robot.

The distance of a robot plan to the human's expectation is cost based: exp(|c_H(plan) - c*_H|) when the plan is
executable in the human model, infinite otherwise. The expected plans are the optimal plans of the human model, which
all share the cost c*_H, so only that cost is ever computed.
"""

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, total_ordering
from typing import FrozenSet, Iterable, Optional, Union
import logging
import math

from explicable_design.configs import ROBOT_TAG, HUMAN_TAG, SCORE_LOG_OVERFLOW
from explicable_design.pddlio.models import ModelPair, Task
from explicable_design.planning.model import ActionDef, Plan, PlanningProblem, State, execute_plan, plan_cost
from explicable_design.planning.planner import SearchResult, SolutionCache, solve_optimal
from explicable_design.utils import EvaluationFailedError, NonUnitCostError, PlanValidationError

logger = logging.getLogger(__name__)

Cost = Union[Fraction, float]


# ----------------------------- PROBLEMS ------------------------------#
@dataclass(frozen=True)
class ExplicableProblem:
    """
    One task instantiated on both models of a pair
    """

    pair: ModelPair
    task: Task

    @cached_property
    def robot_problem(self) -> PlanningProblem:
        return self.pair.robot.with_task(self.task.init, self.task.goal)

    @cached_property
    def human_problem(self) -> PlanningProblem:
        return self.pair.human.with_task(self.task.init, self.task.goal)


# ----------------------------- SCORES ------------------------------#
@total_ordering
@dataclass(frozen=True, eq=False)
class InexplicabilityScore:
    """
    Score kept as its exponent, since exp(|c - c*|) overflows quickly. Comparisons always use `log_value`.
    """

    log_value: float

    @property
    def value(self) -> float:
        if self.log_value == math.inf:
            return math.inf
        if self.log_value > SCORE_LOG_OVERFLOW:
            logger.debug(f"Inexplicability exp({self.log_value}) does not fit in a float")
        try:
            return math.exp(self.log_value)
        except OverflowError:
            return math.inf

    @property
    def is_finite(self) -> bool:
        return self.log_value != math.inf

    def __eq__(self, other) -> bool:
        if not isinstance(other, InexplicabilityScore):
            return NotImplemented
        return self.log_value == other.log_value

    def __lt__(self, other) -> bool:
        if not isinstance(other, InexplicabilityScore):
            return NotImplemented
        return self.log_value < other.log_value

    def __hash__(self) -> int:
        return hash(self.log_value)

    def __repr__(self) -> str:
        return f"InexplicabilityScore(value={self.value}, log_value={self.log_value})"


INFINITE_SCORE = InexplicabilityScore(math.inf)


def cost_distance(c_pi: Cost, c_star: Cost, valid_in_human: bool) -> InexplicabilityScore:
    """
    Cost based distance between a plan and the human's expected plans.
    Args:
        c_pi (Fraction): cost of the plan in the human model
        c_star (Fraction): optimal cost of the human model
        valid_in_human (bool): whether the plan reaches the goal in the human model
    """

    if not valid_in_human or c_star == math.inf:
        return INFINITE_SCORE

    return InexplicabilityScore(float(abs(Fraction(c_pi) - Fraction(c_star))))


# ----------------------------- COMPILATION ------------------------------#
def _tag(fluents: Iterable[str], suffix: str) -> FrozenSet[str]:
    return frozenset(f"{fluent}{suffix}" for fluent in fluents)


@dataclass(frozen=True)
class CompiledProblem:
    """
    Problem over two tagged copies of every fluent, one for the robot and one for the human's belief. Its plans are
    exactly the plans valid in both models.
    """

    problem: PlanningProblem
    excluded_actions: FrozenSet[str] = frozenset()


def compile(exp: ExplicableProblem) -> CompiledProblem:
    """
    Build the compiled problem of an explicable problem. Every robot action is merged with its human counterpart:
    the robot copy of the fluents follows the robot's definition and the human copy follows the human's. Robot
    actions without a human counterpart (removed by a design) and human-only actions are left out, no plan using
    them can be valid in both models.
    """

    robot, human = exp.robot_problem, exp.human_problem
    for model in (robot, human):
        if not model.is_unit_cost():
            raise NonUnitCostError(f"Model '{model.name}' has non unit action costs, "
                                   "the explicability compilation requires unit costs")

    actions = []
    for robot_action in robot.actions:
        human_action = human.action(robot_action.name)
        if human_action is None:
            continue
        actions.append(ActionDef(
            name=robot_action.name,
            pre=_tag(robot_action.pre, ROBOT_TAG) | _tag(human_action.pre, HUMAN_TAG),
            add=_tag(robot_action.add, ROBOT_TAG) | _tag(human_action.add, HUMAN_TAG),
            delete=_tag(robot_action.delete, ROBOT_TAG) | _tag(human_action.delete, HUMAN_TAG),
            cost=Fraction(1),
            schema=robot_action.schema,
            args=robot_action.args,
        ))

    excluded = (robot.action_names ^ human.action_names)
    problem = PlanningProblem(
        fluents=_tag(robot.fluents, ROBOT_TAG) | _tag(human.fluents, HUMAN_TAG),
        actions=tuple(actions),
        init=State(_tag(robot.init.true_fluents, ROBOT_TAG) | _tag(human.init.true_fluents, HUMAN_TAG)),
        goal=_tag(robot.goal, ROBOT_TAG) | _tag(human.goal, HUMAN_TAG),
        name=f"{robot.name}-compiled",
    )

    return CompiledProblem(problem, excluded)


# ----------------------------- MOST EXPLICABLE PLAN ------------------------------#
@dataclass(frozen=True)
class MostExplicableResult:
    """
    Cheapest plan among the ones with minimal inexplicability. When no plan is valid in both models, `plan` is None,
    the score is infinite and `robot_cost` is the optimal cost of the robot model.
    `human_plan` is an optimal plan of the human model, kept as a witness of the human's expectation.
    """

    plan: Optional[Plan]
    ie_min: InexplicabilityScore
    robot_cost: Cost
    human_optimal_cost: Cost = math.inf
    human_plan: Optional[Plan] = None


def _solve(problem: PlanningProblem, cache: Optional[SolutionCache], time_limit: Optional[float]) -> SearchResult:
    if cache is not None:
        result = cache.solve(problem, time_limit=time_limit)
    else:
        result = solve_optimal(problem, time_limit=time_limit)

    if result.timed_out:
        raise EvaluationFailedError(f"Planner timed out on '{problem.name}' (lower bound {result.bound})")
    return result


def most_explicable_plan(exp: ExplicableProblem, cache: Optional[SolutionCache] = None,
                         time_limit: Optional[float] = None) -> MostExplicableResult:
    """
    Solve the compiled problem optimally; its optimal plan is the most explicable plan of the robot.
    Args:
        exp (ExplicableProblem): the task on both models
        cache (SolutionCache): optional cache of optimal searches shared between calls
        time_limit (float): planner time limit, per search
    Returns:
        result (MostExplicableResult): the plan, its score and its cost for the robot
    Raises:
        EvaluationFailedError: if one of the searches timed out
    """

    human_result = _solve(exp.human_problem, cache, time_limit)
    if human_result.solved:
        compiled_result = _solve(compile(exp).problem, cache, time_limit)
    else:
        compiled_result = human_result

    if not compiled_result.solved:
        robot_result = _solve(exp.robot_problem, cache, time_limit)
        logger.debug(f"No plan of '{exp.task.name}' is valid in both models")
        return MostExplicableResult(None, INFINITE_SCORE, robot_result.cost, human_result.cost, human_result.plan)

    plan = compiled_result.plan
    return MostExplicableResult(
        plan=plan,
        ie_min=cost_distance(compiled_result.cost, human_result.cost, True),
        robot_cost=plan_cost(exp.robot_problem, plan),
        human_optimal_cost=human_result.cost,
        human_plan=human_result.plan,
    )


def score_plan(exp: ExplicableProblem, plan: Plan, cache: Optional[SolutionCache] = None,
               time_limit: Optional[float] = None) -> InexplicabilityScore:
    """
    Inexplicability of a robot plan.
    Raises:
        PlanValidationError: if the plan does not solve the task in the robot model
    """

    _, robot_valid = execute_plan(exp.robot_problem, plan)
    if not robot_valid:
        raise PlanValidationError(f"The plan does not solve '{exp.task.name}' in the robot model")

    human = exp.human_problem
    _, human_valid = execute_plan(human, plan)
    if not human_valid:
        return INFINITE_SCORE

    human_result = _solve(human, cache, time_limit)
    return cost_distance(plan_cost(human, plan), human_result.cost, True)
