"""
Breadth first search over design sets. Layer n holds the sets of n modifications, the empty set is evaluated first
and stays the incumbent until a configuration with a strictly better (objective, design cost, ids) key shows up.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Optional, Sequence, Set, Tuple
import itertools
import logging
import time

from explicable_design.configs import DEFAULT_TIME_LIMIT_SECS
from explicable_design.design.modifications import Configuration, DesignModification, apply_designs, design_ids
from explicable_design.design.objective import (ConfigEvaluation, ConfigEvaluator, LongitudinalParams,
                                                ObjectiveWeights)
from explicable_design.explicability import ExplicableProblem
from explicable_design.pddlio.models import ModelPair, TaskSpec
from explicable_design.planning.planner import SolutionCache
from explicable_design.utils import DesignSpecError, EvaluationFailedError, require_not_none

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class DesignProblem:
    """
    Everything the search needs: the model pair, the task distribution, the candidate modifications, the objective
    and the search limits. `time_limit` bounds the whole search, `planner_time_limit` every single planner call.
    """

    pair: ModelPair
    tasks: TaskSpec
    modifications: Tuple[DesignModification, ...] = ()
    weights: ObjectiveWeights = field(default_factory=ObjectiveWeights)
    params: LongitudinalParams = field(default_factory=LongitudinalParams)
    time_limit: Optional[float] = DEFAULT_TIME_LIMIT_SECS
    max_design_size: Optional[int] = None
    prune: bool = True
    workers: int = 1
    planner_time_limit: Optional[float] = None

    def __post_init__(self):
        require_not_none(self.pair, failure_message="A model pair is required")
        object.__setattr__(self, 'modifications', tuple(sorted(self.modifications, key=lambda m: m.id)))

        ids = [modification.id for modification in self.modifications]
        duplicates = sorted({name for name in ids if ids.count(name) > 1})
        if duplicates:
            raise DesignSpecError(f"Duplicate modification ids: {', '.join(duplicates)}")
        for modification in self.modifications:
            modification.validate(self.pair)
        if self.max_design_size is not None and self.max_design_size < 0:
            raise DesignSpecError("max_design_size must not be negative")
        if self.workers < 1:
            raise DesignSpecError("At least one worker is required")

    @property
    def base(self) -> Tuple[ExplicableProblem, ...]:
        return tuple(ExplicableProblem(self.pair, task) for task in self.tasks.tasks)

    @property
    def size_limit(self) -> int:
        if self.max_design_size is None:
            return len(self.modifications)
        return min(self.max_design_size, len(self.modifications))


@dataclass(frozen=True)
class NodeRecord:
    """
    One explored node of the search, in exploration order
    """

    ids: Tuple[str, ...]
    objective: float
    expected_ie: float
    longitudinal_ie: float
    design_cost: float
    expected_robot_cost: float
    relevant: Tuple[str, ...] = ()
    failure: Optional[str] = None

    @classmethod
    def of(cls, evaluation: ConfigEvaluation, relevant: Sequence[str] = ()) -> 'NodeRecord':
        return cls(evaluation.ids, evaluation.objective, evaluation.expected_ie, evaluation.longitudinal_ie,
                   float(evaluation.design_cost), evaluation.expected_robot_cost, tuple(relevant), evaluation.failure)


@dataclass(frozen=True)
class SearchOutcome:
    """
    Result of a design search. `anytime` is set when the time limit stopped the search before it was exhaustive,
    `designs` is then the best design among the explored nodes.
    """

    designs: Tuple[DesignModification, ...]
    evaluation: ConfigEvaluation
    baseline: ConfigEvaluation
    log: Tuple[NodeRecord, ...]
    pareto_front: Tuple[NodeRecord, ...] = ()
    anytime: bool = False
    time: float = 0.0

    @property
    def ids(self) -> Tuple[str, ...]:
        return design_ids(self.designs)


# ----------------------------- RELEVANCE ------------------------------#
def witness_actions(configuration: Configuration, probabilities: Sequence = None,
                    cache: Optional[SolutionCache] = None, time_limit: Optional[float] = None) -> FrozenSet[str]:
    """
    Actions of one optimal robot plan and one optimal human plan per task of the configuration.
    Raises:
        EvaluationFailedError: if a witness search timed out
    """

    cache = cache if cache is not None else SolutionCache()
    actions: Set[str] = set()
    for index, exp in enumerate(configuration.problems):
        if probabilities is not None and probabilities[index] == 0:
            continue
        for problem in (exp.robot_problem, exp.human_problem):
            result = cache.solve(problem, time_limit=time_limit)
            if result.timed_out:
                raise EvaluationFailedError(f"Witness search timed out on '{problem.name}'", task_index=index)
            if result.plan is not None:
                actions.update(result.plan)
    return frozenset(actions)


def relevance_prune(modifications: Sequence[DesignModification], configuration: Configuration,
                    probabilities: Sequence = None, cache: Optional[SolutionCache] = None,
                    time_limit: Optional[float] = None) -> Tuple[DesignModification, ...]:
    """
    Keep the modifications touching an action of a witness optimal plan of the configuration, for the robot model
    or the human model. When a witness cannot be computed nothing is pruned.
    """

    try:
        witnesses = witness_actions(configuration, probabilities, cache, time_limit)
    except EvaluationFailedError as error:
        logger.warning(f"Relevance pruning skipped for {list(configuration.ids)}: {error.message}")
        return tuple(modifications)

    base_pair = configuration.base_pair
    kept = tuple(modification for modification in modifications
                 if modification.affected_actions(base_pair) & witnesses)
    logger.debug(f"Relevant at {list(configuration.ids)}: {[m.id for m in kept]}")
    return kept


# ----------------------------- SEARCH ------------------------------#
class _Deadline:

    def __init__(self, seconds: Optional[float]):
        self.start = time.perf_counter()
        self.seconds = seconds

    def elapsed(self) -> float:
        return time.perf_counter() - self.start

    def expired(self) -> bool:
        return self.seconds is not None and self.elapsed() > self.seconds


def pareto_front(records: Sequence[NodeRecord]) -> Tuple[NodeRecord, ...]:
    """
    Nodes not dominated on (longitudinal inexplicability, design cost, expected robot cost)
    """

    def point(record: NodeRecord) -> Tuple[float, float, float]:
        return record.longitudinal_ie, record.design_cost, record.expected_robot_cost

    front = []
    for record in records:
        if record.failure is not None:
            continue
        mine = point(record)
        dominated = any(all(a <= b for a, b in zip(point(other), mine)) and point(other) != mine
                        for other in records if other.failure is None)
        if not dominated:
            front.append(record)
    return tuple(front)


def search(dp: DesignProblem) -> SearchOutcome:
    """
    Breadth first search over the subsets of the modifications, by increasing cardinality.
    Args:
        dp (DesignProblem): the design problem
    Returns:
        outcome (SearchOutcome): the best design found, its evaluation, the empty design's evaluation and the log
            of explored nodes
    """

    deadline = _Deadline(dp.time_limit)
    evaluator = ConfigEvaluator(dp.tasks.probabilities, dp.weights, dp.params, dp.planner_time_limit)
    base = dp.base
    by_id: Dict[str, DesignModification] = {modification.id: modification for modification in dp.modifications}

    def evaluate(node: Tuple[str, ...]) -> Optional[Tuple[Configuration, ConfigEvaluation]]:
        if node and deadline.expired():
            return None
        configuration = apply_designs(base, (by_id[name] for name in node))
        return configuration, evaluator.evaluate(configuration)

    log: List[NodeRecord] = []
    best: Optional[ConfigEvaluation] = None
    baseline: Optional[ConfigEvaluation] = None
    anytime = False

    layer: List[Tuple[str, ...]] = [()]
    visited: Set[Tuple[str, ...]] = {()}
    depth = 0
    with ThreadPoolExecutor(max_workers=dp.workers) as executor:
        while layer:
            logger.info(f"Layer {depth}: {len(layer)} design sets")
            results = list(executor.map(evaluate, layer))

            children: Set[Tuple[str, ...]] = set()
            for node, result in zip(layer, results):
                if result is None:
                    anytime = True
                    continue
                configuration, evaluation = result
                if baseline is None:
                    baseline = evaluation
                if best is None or evaluation.sort_key() < best.sort_key():
                    if best is not None:
                        logger.info(f"New incumbent {list(node)}: objective {evaluation.objective:.4f}")
                    best = evaluation

                candidates: Sequence[DesignModification] = ()
                if depth < dp.size_limit and not deadline.expired():
                    candidates = tuple(m for m in dp.modifications if m.id not in node)
                    if dp.prune:
                        candidates = relevance_prune(candidates, configuration, dp.tasks.probabilities,
                                                     evaluator.cache, dp.planner_time_limit)
                elif depth < dp.size_limit:
                    anytime = True
                log.append(NodeRecord.of(evaluation, [m.id for m in candidates]))

                for modification in candidates:
                    child = tuple(sorted(node + (modification.id,)))
                    if child not in visited:
                        visited.add(child)
                        children.add(child)

            if anytime:
                logger.warning(f"Time limit of {dp.time_limit}s reached at layer {depth}, returning the incumbent")
                break
            layer = sorted(children)
            depth += 1

    front = pareto_front(log)
    logger.info(f"Explored {len(log)} design sets in {deadline.elapsed():.2f}s, best {list(best.ids)} "
                f"objective {best.objective:.4f}; Pareto front {[list(record.ids) for record in front]}")

    return SearchOutcome(designs=tuple(by_id[name] for name in best.ids), evaluation=best, baseline=baseline,
                         log=tuple(log), pareto_front=front, anytime=anytime, time=deadline.elapsed())


def brute_force_search(dp: DesignProblem) -> SearchOutcome:
    """
    Evaluate every subset of the modifications up to the size limit, without pruning or time limit
    """

    start = time.perf_counter()
    evaluator = ConfigEvaluator(dp.tasks.probabilities, dp.weights, dp.params, dp.planner_time_limit)
    base = dp.base

    log = []
    best = baseline = None
    for size in range(dp.size_limit + 1):
        for designs in itertools.combinations(dp.modifications, size):
            evaluation = evaluator.evaluate(apply_designs(base, designs))
            log.append(NodeRecord.of(evaluation))
            if baseline is None:
                baseline = evaluation
            if best is None or evaluation.sort_key() < best.sort_key():
                best = evaluation

    by_id = {modification.id: modification for modification in dp.modifications}
    return SearchOutcome(designs=tuple(by_id[name] for name in best.ids), evaluation=best, baseline=baseline,
                         log=tuple(log), pareto_front=pareto_front(log), time=time.perf_counter() - start)
