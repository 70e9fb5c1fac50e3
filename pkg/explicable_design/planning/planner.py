"""
Optimal forward search for grounded STRIPS problems: A* guided by h_max, a uniform cost search used as a reference
and an exhaustive plan enumerator used as a test oracle on small problems.
"""

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Callable, Dict, FrozenSet, List, Optional, Set, Tuple, Union
import heapq
import logging
import math
import threading
import time

from explicable_design.configs import ENUMERATION_NODE_CAP
from explicable_design.planning.heuristics import HMax
from explicable_design.planning.model import Plan, PlanningProblem, State
from explicable_design.utils import EnumerationLimitError, require_not_none

logger = logging.getLogger(__name__)

Cost = Union[Fraction, float]

# Time is checked once every this many expansions
_CLOCK_PERIOD = 128


class SearchStatus(Enum):
    SOLVED = 'solved'
    UNSOLVABLE = 'unsolvable'
    TIMEOUT = 'timeout'


@dataclass(frozen=True)
class SearchResult:
    """
    Outcome of an optimal search. `plan` is set iff `cost` is finite. On timeout `bound` holds the smallest f value
    left on the open list, a lower bound on the optimal cost.
    """

    status: SearchStatus
    plan: Optional[Plan] = None
    cost: Cost = math.inf
    expanded: int = 0
    generated: int = 0
    time: float = 0.0
    bound: Cost = 0

    @property
    def solved(self) -> bool:
        return self.status is SearchStatus.SOLVED

    @property
    def timed_out(self) -> bool:
        return self.status is SearchStatus.TIMEOUT


# ----------------------------- BEST FIRST SEARCH ------------------------------#
def _extract_plan(parents: Dict[FrozenSet[str], Tuple], state: FrozenSet[str]) -> Plan:
    steps = []
    parent, step = parents[state]
    while parent is not None:
        steps.append(step)
        state = parent
        parent, step = parents[state]
    steps.reverse()
    return Plan(tuple(steps))


def _best_first_search(problem: PlanningProblem, heuristic: Callable[[State], Cost],
                       time_limit: Optional[float] = None, node_limit: Optional[int] = None) -> SearchResult:
    """
    Best first search on f = g + h. The open list is ordered by (f, h, insertion number) and successors are generated
    in action name order, so the returned plan is fully determined by the problem. States reached again with a
    cheaper g are reopened, which keeps the search optimal for admissible but inconsistent heuristics.
    """

    start_time = time.perf_counter()
    goal = problem.goal
    actions = problem.actions

    init = problem.init.true_fluents
    h_init = heuristic(problem.init)
    if h_init == math.inf:
        return SearchResult(SearchStatus.UNSOLVABLE, time=time.perf_counter() - start_time, bound=math.inf)

    best_g: Dict[FrozenSet[str], Cost] = {init: Fraction(0)}
    parents: Dict[FrozenSet[str], Tuple] = {init: (None, None)}
    h_values: Dict[FrozenSet[str], Cost] = {init: h_init}

    sequence = 0
    open_list = [(h_init, h_init, sequence, Fraction(0), init)]
    expanded = generated = 0

    while open_list:
        if expanded % _CLOCK_PERIOD == 0 and time_limit is not None \
                and time.perf_counter() - start_time > time_limit \
                or node_limit is not None and expanded >= node_limit:
            logger.info(f"Search on '{problem.name}' stopped after {expanded} expansions")
            return SearchResult(SearchStatus.TIMEOUT, expanded=expanded, generated=generated,
                                time=time.perf_counter() - start_time, bound=open_list[0][0])

        f_value, h_value, _, g_value, state = heapq.heappop(open_list)
        if g_value > best_g[state]:
            continue

        if goal <= state:
            plan = _extract_plan(parents, state)
            return SearchResult(SearchStatus.SOLVED, plan=plan, cost=g_value, expanded=expanded,
                                generated=generated, time=time.perf_counter() - start_time, bound=g_value)

        expanded += 1
        for action in actions:
            if not action.pre <= state:
                continue
            successor = (state | action.add) - action.delete
            successor_g = g_value + action.cost
            if successor_g >= best_g.get(successor, math.inf):
                continue

            successor_h = h_values.get(successor)
            if successor_h is None:
                successor_h = heuristic(State(successor))
                h_values[successor] = successor_h
            if successor_h == math.inf:
                continue

            best_g[successor] = successor_g
            parents[successor] = (state, action.name)
            sequence += 1
            generated += 1
            heapq.heappush(open_list, (successor_g + successor_h, successor_h, sequence, successor_g, successor))

    return SearchResult(SearchStatus.UNSOLVABLE, expanded=expanded, generated=generated,
                        time=time.perf_counter() - start_time, bound=math.inf)


def solve_optimal(problem: PlanningProblem, time_limit: Optional[float] = None,
                  node_limit: Optional[int] = None) -> SearchResult:
    """
    A* with the h_max heuristic.
    Args:
        problem (PlanningProblem): the problem to solve
        time_limit (float): seconds after which the search gives up with a TIMEOUT result
        node_limit (int): expansions after which the search gives up with a TIMEOUT result
    Returns:
        result (SearchResult): a cost optimal plan, or the reason there is none
    """

    require_not_none(problem, failure_message="A planning problem is required")
    result = _best_first_search(problem, HMax(problem), time_limit=time_limit, node_limit=node_limit)
    logger.debug(f"A* on '{problem.name}': {result.status.value}, cost {result.cost}, "
                 f"{result.expanded} expanded, {result.generated} generated")
    return result


def solve_uniform_cost(problem: PlanningProblem, time_limit: Optional[float] = None) -> SearchResult:
    """
    Uniform cost search, i.e. the same search with a zero heuristic
    """

    def zero(state: State) -> Cost:
        return Fraction(0)

    return _best_first_search(problem, zero, time_limit=time_limit)


class SolutionCache:
    """
    Optimal search results keyed by the canonical hash of the problem. Inserts keep the first stored result, so
    concurrent searches on the same problem end up sharing one answer.
    """

    def __init__(self):
        self._results: Dict[str, SearchResult] = {}
        self._lock = threading.Lock()

    def __len__(self) -> int:
        return len(self._results)

    def get(self, problem: PlanningProblem) -> Optional[SearchResult]:
        return self._results.get(problem.canonical_hash)

    def put_if_absent(self, problem: PlanningProblem, result: SearchResult) -> SearchResult:
        with self._lock:
            return self._results.setdefault(problem.canonical_hash, result)

    def solve(self, problem: PlanningProblem, time_limit: Optional[float] = None) -> SearchResult:
        cached = self.get(problem)
        if cached is not None:
            return cached

        result = solve_optimal(problem, time_limit=time_limit)
        if result.timed_out:
            return result
        return self.put_if_absent(problem, result)


# ----------------------------- ENUMERATION ------------------------------#
def enumerate_plans(problem: PlanningProblem, cost_bound: Cost, node_cap: int = ENUMERATION_NODE_CAP,
                    avoid_repeated_states: bool = True) -> Set[Plan]:
    """
    Enumerate every valid plan whose cost does not exceed the bound. Meant for small problems only.
    Args:
        problem (PlanningProblem): the problem
        cost_bound (Fraction): inclusive cost bound, must be finite
        node_cap (int): the enumeration fails with EnumerationLimitError after visiting this many nodes
        avoid_repeated_states (bool): do not extend a branch into a state it already visited
    Returns:
        plans (set): all plans found
    """

    require_not_none(cost_bound, failure_message="A cost bound is required")
    if cost_bound == math.inf:
        raise ValueError("The cost bound of an exhaustive enumeration must be finite")

    goal = problem.goal
    actions = problem.actions
    plans: Set[Plan] = set()
    steps: List[str] = []
    on_branch: Set[FrozenSet[str]] = set()
    visited = 0

    def extend(state: FrozenSet[str], cost: Cost) -> None:
        nonlocal visited
        visited += 1
        if visited > node_cap:
            raise EnumerationLimitError(f"Plan enumeration on '{problem.name}' exceeded {node_cap} nodes")

        if goal <= state:
            plans.add(Plan(tuple(steps)))

        on_branch.add(state)
        for action in actions:
            if not action.pre <= state or cost + action.cost > cost_bound:
                continue
            successor = (state | action.add) - action.delete
            if avoid_repeated_states and successor in on_branch:
                continue
            steps.append(action.name)
            extend(successor, cost + action.cost)
            steps.pop()
        if avoid_repeated_states:
            on_branch.discard(state)

    extend(problem.init.true_fluents, Fraction(0))
    return plans
