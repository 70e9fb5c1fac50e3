"""
Longitudinal objective of a configuration: weighted sum of the discounted expected inexplicability over the horizon,
the design cost and the expected robot plan cost over the horizon.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Optional, Sequence, Tuple, Union
import logging
import math
import threading

from explicable_design.configs import (DEFAULT_ALPHA, DEFAULT_BETA, DEFAULT_GAMMA, DEFAULT_HORIZON, DEFAULT_KAPPA,
                                       PROBABILITY_TOLERANCE)
from explicable_design.design.modifications import Configuration
from explicable_design.explicability import MostExplicableResult, most_explicable_plan
from explicable_design.planning.planner import SolutionCache
from explicable_design.utils import EvaluationFailedError, ValidationError, require_in_range, require_non_negative

logger = logging.getLogger(__name__)

Real = Union[Fraction, float, int]


@dataclass(frozen=True)
class LongitudinalParams:
    """
    gamma is the probability the human keeps registering an inexplicable behavior at the next step, horizon the
    number of times the task is executed
    """

    gamma: Fraction = DEFAULT_GAMMA
    horizon: int = DEFAULT_HORIZON

    def __post_init__(self):
        object.__setattr__(self, 'gamma', Fraction(self.gamma))
        require_in_range(self.gamma, 0, 1, name="gamma")
        if int(self.horizon) != self.horizon or self.horizon < 1:
            raise ValidationError(f"horizon must be a positive integer, got {self.horizon}")
        object.__setattr__(self, 'horizon', int(self.horizon))


@dataclass(frozen=True)
class ObjectiveWeights:

    alpha: Fraction = DEFAULT_ALPHA
    beta: Fraction = DEFAULT_BETA
    kappa: Fraction = DEFAULT_KAPPA

    def __post_init__(self):
        for name in ('alpha', 'beta', 'kappa'):
            object.__setattr__(self, name, Fraction(getattr(self, name)))
            require_non_negative(getattr(self, name), name=name)
        if self.alpha == self.beta == self.kappa == 0:
            raise ValidationError("At least one of alpha, beta and kappa must be positive")


def longitudinal_factor(params: LongitudinalParams) -> float:
    """
    Expected number of times the human registers the inexplicability over the horizon: (1 - gamma^T) / (1 - gamma),
    T when gamma is 1 and 1 when T is 1.
    """

    if params.horizon == 1:
        return 1.0
    if params.gamma == 1:
        return float(params.horizon)
    return float((1 - params.gamma ** params.horizon) / (1 - params.gamma))


def _weighted(weight: Real, value: Real) -> float:
    # a zero weight switches the term off, even when the term is infinite
    if weight == 0:
        return 0.0
    return float(weight) * float(value)


def expectation(probabilities: Sequence[Real], values: Sequence[Real]) -> float:
    """
    Expectation over the support of the distribution, infinite as soon as one supported value is
    """

    total = 0.0
    for probability, value in zip(probabilities, values):
        if probability == 0:
            continue
        if value == math.inf:
            return math.inf
        total += float(probability) * float(value)
    return total


def log_expectation(probabilities: Sequence[Real], log_values: Sequence[float]) -> float:
    """
    Logarithm of the expectation of exp(log_values), finite even when the expectation itself overflows a float
    """

    terms = [math.log(probability) + log_value for probability, log_value in zip(probabilities, log_values)
             if probability > 0]
    if not terms:
        return -math.inf
    peak = max(terms)
    if peak == math.inf:
        return math.inf
    return peak + math.log(sum(math.exp(term - peak) for term in terms))


# ----------------------------- EVALUATIONS ------------------------------#
@dataclass(frozen=True)
class ConfigEvaluation:
    """
    Objective of one configuration. `failure` is set when a task could not be evaluated, the objective is then
    infinite. `expected_ie_log` is the logarithm of `expected_ie` and orders configurations whose objective
    overflowed to infinity.
    """

    ids: Tuple[str, ...]
    per_task: Tuple[Optional[MostExplicableResult], ...]
    expected_ie: float
    expected_robot_cost: float
    design_cost: Fraction
    objective: float
    longitudinal_ie: float = math.inf
    expected_ie_log: float = math.inf
    failure: Optional[str] = None

    @property
    def design_size(self) -> int:
        return len(self.ids)

    @property
    def failed(self) -> bool:
        return self.failure is not None

    def sort_key(self) -> Tuple:
        """
        Smaller objective first, then cheaper design, then design ids in lexicographic order. Two infinite
        objectives are told apart by the expected inexplicability in log space.
        """
        overflow = self.expected_ie_log if self.objective == math.inf else 0.0
        return self.objective, overflow, self.design_cost, self.ids


def combine(ids: Tuple[str, ...], per_task: Sequence[Optional[MostExplicableResult]], probabilities: Sequence[Real],
            cost: Fraction, weights: ObjectiveWeights, params: LongitudinalParams) -> ConfigEvaluation:
    """
    Aggregate per task results. Tasks with probability zero may have no result.
    """

    supported = [(p, result) for p, result in zip(probabilities, per_task) if p > 0]
    expected_ie = expectation([p for p, _ in supported], [result.ie_min.value for _, result in supported])
    expected_cost = expectation([p for p, _ in supported], [result.robot_cost for _, result in supported])
    expected_ie_log = log_expectation([p for p, _ in supported], [result.ie_min.log_value for _, result in supported])

    longitudinal_ie = _weighted(longitudinal_factor(params), expected_ie)
    objective = (_weighted(weights.alpha, longitudinal_ie) + _weighted(weights.beta, cost)
                 + _weighted(weights.kappa, _weighted(params.horizon, expected_cost)))

    return ConfigEvaluation(ids=ids, per_task=tuple(per_task), expected_ie=expected_ie,
                            expected_robot_cost=expected_cost, design_cost=cost, objective=objective,
                            longitudinal_ie=longitudinal_ie, expected_ie_log=expected_ie_log)


@dataclass
class ConfigEvaluator:
    """
    Evaluates configurations for one task distribution and one objective. Most explicable plans are memoized per
    (modified model pair, task), so configurations that leave the pair unchanged reuse each other's results. Safe
    to share between worker threads.
    """

    probabilities: Tuple[Fraction, ...]
    weights: ObjectiveWeights = field(default_factory=ObjectiveWeights)
    params: LongitudinalParams = field(default_factory=LongitudinalParams)
    planner_time_limit: Optional[float] = None
    cache: SolutionCache = field(default_factory=SolutionCache)

    def __post_init__(self):
        self.probabilities = tuple(Fraction(p) for p in self.probabilities)
        if abs(float(sum(self.probabilities)) - 1.0) > PROBABILITY_TOLERANCE:
            raise ValidationError(f"Task probabilities sum to {float(sum(self.probabilities))}, not 1")
        self._memo: Dict[Tuple[str, int], MostExplicableResult] = {}
        self._lock = threading.Lock()

    def task_result(self, configuration: Configuration, index: int) -> MostExplicableResult:
        key = (configuration.pair.canonical_hash, index)
        cached = self._memo.get(key)
        if cached is not None:
            return cached

        try:
            result = most_explicable_plan(configuration.problems[index], cache=self.cache,
                                          time_limit=self.planner_time_limit)
        except EvaluationFailedError as error:
            raise EvaluationFailedError(error.message, task_index=index)

        with self._lock:
            return self._memo.setdefault(key, result)

    def evaluate(self, configuration: Configuration) -> ConfigEvaluation:
        if len(configuration.problems) != len(self.probabilities):
            raise ValidationError(f"{len(configuration.problems)} tasks but {len(self.probabilities)} probabilities")

        ids = configuration.ids
        try:
            per_task = [self.task_result(configuration, index) if probability > 0 else None
                        for index, probability in enumerate(self.probabilities)]
        except EvaluationFailedError as error:
            logger.warning(f"Evaluation of design {list(ids)} failed on task {error.task_index}: {error.message}")
            return ConfigEvaluation(ids=ids, per_task=(), expected_ie=math.inf, expected_robot_cost=math.inf,
                                    design_cost=configuration.design_cost, objective=math.inf,
                                    failure=f"evaluation-failed: {error.message}")

        evaluation = combine(ids, per_task, self.probabilities, configuration.design_cost, self.weights, self.params)
        logger.debug(f"Design {list(ids)}: objective {evaluation.objective:.4f}, "
                     f"E[ie] {evaluation.expected_ie:.4f}, E[cost] {evaluation.expected_robot_cost:.4f}")
        return evaluation


def evaluate_config(configuration: Configuration, probabilities: Sequence[Real],
                    weights: ObjectiveWeights = None, params: LongitudinalParams = None,
                    planner_time_limit: Optional[float] = None) -> ConfigEvaluation:
    """
    Evaluate a single configuration.
    Args:
        configuration (Configuration): the problems after a design set was applied
        probabilities (list): probability of each task
        weights (ObjectiveWeights): alpha, beta and kappa
        params (LongitudinalParams): discount and horizon
    Returns:
        evaluation (ConfigEvaluation): per task results and the aggregated objective
    """

    evaluator = ConfigEvaluator(tuple(probabilities), weights or ObjectiveWeights(), params or LongitudinalParams(),
                                planner_time_limit)
    return evaluator.evaluate(configuration)
