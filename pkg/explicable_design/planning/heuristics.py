"""
Delete relaxation heuristics
"""

from collections import defaultdict
from fractions import Fraction
from typing import Dict, List, Union
import heapq
import math

from explicable_design.planning.model import PlanningProblem, State

Cost = Union[Fraction, float]


class HMax:
    """
    h_max evaluator bound to one problem. The precondition index is built once and reused for every state the
    search asks about.
    """

    def __init__(self, problem: PlanningProblem):
        self.problem = problem
        self.goal = problem.goal

        # Actions keyed by each of their preconditions, plus the actions without preconditions
        self.pre_index: Dict[str, List[int]] = defaultdict(list)
        self.free_actions: List[int] = []
        for action_idx, action in enumerate(problem.actions):
            if action.pre:
                for fluent in action.pre:
                    self.pre_index[fluent].append(action_idx)
            else:
                self.free_actions.append(action_idx)

    def __call__(self, state: State) -> Cost:
        return self.evaluate(state)

    def evaluate(self, state: State) -> Cost:
        """
        Value of h_max in a state: the cost of the most expensive goal fluent, where reaching a fluent costs the
        cheapest action adding it plus the most expensive of that action's preconditions.
        Returns math.inf when some goal fluent is unreachable even with deletes ignored.
        """

        if self.goal <= state.true_fluents:
            return Fraction(0)

        actions = self.problem.actions
        costs: Dict[str, Cost] = {fluent: Fraction(0) for fluent in state.true_fluents}
        queue = [(Fraction(0), fluent) for fluent in sorted(state.true_fluents)]
        unsatisfied = [len(action.pre) for action in actions]

        for action_idx in self.free_actions:
            action = actions[action_idx]
            for fluent in action.add:
                if action.cost < costs.get(fluent, math.inf):
                    costs[fluent] = action.cost
                    heapq.heappush(queue, (action.cost, fluent))
        heapq.heapify(queue)

        reached = set()
        remaining_goals = set(self.goal)
        while queue and remaining_goals:
            cost, fluent = heapq.heappop(queue)
            if fluent in reached:
                continue
            reached.add(fluent)
            remaining_goals.discard(fluent)

            # Fluents leave the queue by nondecreasing cost, so the last precondition reached is the max
            for action_idx in self.pre_index.get(fluent, ()):
                unsatisfied[action_idx] -= 1
                if unsatisfied[action_idx] == 0:
                    action = actions[action_idx]
                    new_cost = cost + action.cost
                    for added in action.add:
                        if new_cost < costs.get(added, math.inf):
                            costs[added] = new_cost
                            heapq.heappush(queue, (new_cost, added))

        if remaining_goals:
            return math.inf

        return max(costs[fluent] for fluent in self.goal)


def h_max(problem: PlanningProblem, state: State) -> Cost:
    return HMax(problem).evaluate(state)
