"""
Grounded STRIPS model: fluents, actions, states, problems and plans, together with the execution semantics
(action application, plan execution and plan cost) every other module builds on.
All the types are immutable once built, so they can be shared between searches running concurrently.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Dict, FrozenSet, Iterable, Iterator, Mapping, Optional, Tuple
import hashlib

from explicable_design.utils import (ValidationError, PlanValidationError, require_subset, require_non_negative)


def _frozen(items: Iterable[str]) -> FrozenSet[str]:
    return items if isinstance(items, frozenset) else frozenset(items)


@dataclass(frozen=True)
class ActionDef:
    """
    A grounded action. `schema` and `args` keep the lifted action name and the objects it was grounded with,
    they are informative only and do not take part in the semantics.
    """

    name: str
    pre: FrozenSet[str] = frozenset()
    add: FrozenSet[str] = frozenset()
    delete: FrozenSet[str] = frozenset()
    cost: Fraction = Fraction(1)
    schema: str = ''
    args: Tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, 'pre', _frozen(self.pre))
        object.__setattr__(self, 'add', _frozen(self.add))
        object.__setattr__(self, 'delete', _frozen(self.delete))
        object.__setattr__(self, 'cost', Fraction(self.cost))
        object.__setattr__(self, 'args', tuple(self.args))
        if not self.schema:
            object.__setattr__(self, 'schema', self.name)

        if self.add & self.delete:
            raise ValidationError(f"Action '{self.name}' adds and deletes the same fluents: "
                                  f"{', '.join(sorted(self.add & self.delete))}")
        require_non_negative(self.cost, name=f"cost of action '{self.name}'")

    def fluents(self) -> FrozenSet[str]:
        return self.pre | self.add | self.delete

    def with_preconditions(self, fluents: Iterable[str]) -> 'ActionDef':
        return ActionDef(self.name, self.pre | frozenset(fluents), self.add, self.delete, self.cost,
                         self.schema, self.args)


@dataclass(frozen=True)
class State:

    true_fluents: FrozenSet[str] = frozenset()

    def __post_init__(self):
        object.__setattr__(self, 'true_fluents', _frozen(self.true_fluents))

    def __contains__(self, fluent: str) -> bool:
        return fluent in self.true_fluents

    def satisfies(self, fluents: FrozenSet[str]) -> bool:
        return fluents <= self.true_fluents


@dataclass(frozen=True)
class Plan:

    steps: Tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, 'steps', tuple(self.steps))

    def __len__(self) -> int:
        return len(self.steps)

    def __iter__(self) -> Iterator[str]:
        return iter(self.steps)

    def __add__(self, other: 'Plan') -> 'Plan':
        return Plan(self.steps + other.steps)

    def __str__(self) -> str:
        return '\n'.join(f"({step})" for step in self.steps)


@dataclass(frozen=True, eq=False)
class PlanningProblem:
    """
    STRIPS problem over a fixed fluent universe. Actions are kept sorted by name, which is the successor order
    used by every search in the package.
    """

    fluents: FrozenSet[str]
    actions: Tuple[ActionDef, ...]
    init: State
    goal: FrozenSet[str]
    name: str = 'problem'
    _action_map: Dict[str, ActionDef] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, 'fluents', _frozen(self.fluents))
        object.__setattr__(self, 'goal', _frozen(self.goal))
        object.__setattr__(self, 'actions', tuple(sorted(self.actions, key=lambda a: a.name)))
        if not isinstance(self.init, State):
            object.__setattr__(self, 'init', State(self.init))

        action_map = {}
        for action in self.actions:
            if action.name in action_map:
                raise ValidationError(f"Duplicate action name '{action.name}' in problem '{self.name}'")
            require_subset(action.fluents(), self.fluents,
                           failure_message=f"Action '{action.name}' uses fluents outside the problem")
            action_map[action.name] = action
        object.__setattr__(self, '_action_map', action_map)

        require_subset(self.goal, self.fluents, failure_message=f"Goal of '{self.name}' uses unknown fluents")
        require_subset(self.init.true_fluents, self.fluents,
                       failure_message=f"Initial state of '{self.name}' uses unknown fluents")

    # ----------------------------- ACTIONS ------------------------------#
    def action(self, name: str) -> Optional[ActionDef]:
        return self._action_map.get(name)

    def has_action(self, name: str) -> bool:
        return name in self._action_map

    @property
    def action_names(self) -> FrozenSet[str]:
        return frozenset(self._action_map)

    def is_unit_cost(self) -> bool:
        return all(action.cost == 1 for action in self.actions)

    # ----------------------------- DERIVED PROBLEMS ------------------------------#
    def with_task(self, init: Iterable[str], goal: Iterable[str]) -> 'PlanningProblem':
        """
        Return the same model instantiated on another initial state and goal
        """
        return PlanningProblem(self.fluents, self.actions, State(frozenset(init)), frozenset(goal), self.name)

    def without_actions(self, names: Iterable[str]) -> 'PlanningProblem':
        names = frozenset(names)
        actions = tuple(action for action in self.actions if action.name not in names)
        return PlanningProblem(self.fluents, actions, self.init, self.goal, self.name)

    def with_extra_preconditions(self, preconditions: Mapping[str, Iterable[str]]) -> 'PlanningProblem':
        """
        Extend the preconditions of actions, given as action name -> fluents. Names missing from the problem are
        skipped, they may have been removed by an earlier modification.
        """
        actions = tuple(action.with_preconditions(preconditions[action.name]) if action.name in preconditions
                        else action for action in self.actions)
        return PlanningProblem(self.fluents, actions, self.init, self.goal, self.name)

    # ----------------------------- IDENTITY ------------------------------#
    @cached_property
    def canonical_hash(self) -> str:
        """
        Hash that does not depend on the order in which fluents or actions were declared
        """
        digest = hashlib.sha256()
        digest.update(' '.join(sorted(self.fluents)).encode())
        for action in self.actions:
            digest.update(f"|{action.name}:{sorted(action.pre)}:{sorted(action.add)}:"
                          f"{sorted(action.delete)}:{action.cost}".encode())
        digest.update(f"|init:{sorted(self.init.true_fluents)}|goal:{sorted(self.goal)}".encode())
        return digest.hexdigest()


# ----------------------------- SEMANTICS ------------------------------#
def apply_action(state: State, action: ActionDef) -> Optional[State]:
    """
    Apply an action to a state.
    Returns:
        state (State): (s | add) - del, or None when the preconditions do not hold in s
    """

    if not action.pre <= state.true_fluents:
        return None

    return State((state.true_fluents | action.add) - action.delete)


def execute_plan(problem: PlanningProblem, plan: Plan) -> Tuple[State, bool]:
    """
    Execute a plan from the initial state of the problem.
    Returns:
        final (State): the last state reached (the state before the failing step, if a step fails)
        valid (bool): True iff every step was applicable and the goal holds in the final state
    """

    state = problem.init
    for step in plan:
        action = problem.action(step)
        next_state = apply_action(state, action) if action is not None else None
        if next_state is None:
            return state, False
        state = next_state

    return state, state.satisfies(problem.goal)


def plan_cost(problem: PlanningProblem, plan: Plan) -> Fraction:
    """
    Sum of the costs of the plan steps
    """

    cost = Fraction(0)
    for step in plan:
        action = problem.action(step)
        if action is None:
            raise PlanValidationError(f"Plan step '{step}' is not an action of problem '{problem.name}'")
        cost += action.cost

    return cost
