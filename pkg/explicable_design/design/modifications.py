"""
Environment design modifications and the transition that applies a set of them to the explicable problems.

Every modification only removes actions or strengthens preconditions, so applying one twice is the same as applying it
once and a design is a set, not a sequence.
"""

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import cached_property
from typing import Dict, FrozenSet, Iterable, Sequence, Tuple
import hashlib
import re

from explicable_design.explicability import ExplicableProblem
from explicable_design.pddlio.models import ModelPair
from explicable_design.planning.model import ActionDef, PlanningProblem
from explicable_design.utils import DesignSpecError, require_non_negative, require_not_empty

# `?N` in a payload fluent stands for the N-th argument of the ground action
_PLACEHOLDER = re.compile(r"\?(\d+)")


class ModificationKind(Enum):
    PRUNE_HUMAN_ACTION = 'prune-human-action'
    PRUNE_BOTH_ACTION = 'prune-both-action'
    ADD_PRECONDITION_HUMAN = 'add-precondition-human'
    ADD_PRECONDITION_BOTH = 'add-precondition-both'
    BLOCK_TRANSITION = 'block-transition'

    @property
    def changes_robot(self) -> bool:
        return self in (ModificationKind.PRUNE_BOTH_ACTION, ModificationKind.ADD_PRECONDITION_BOTH)

    @property
    def adds_precondition(self) -> bool:
        return self in (ModificationKind.ADD_PRECONDITION_HUMAN, ModificationKind.ADD_PRECONDITION_BOTH)

    @classmethod
    def parse(cls, value: str) -> 'ModificationKind':
        try:
            return cls(value)
        except ValueError:
            raise DesignSpecError(f"Unknown modification kind '{value}', expected one of "
                                  f"{', '.join(kind.value for kind in cls)}")


def _relocates(action: ActionDef, source: str, target: str) -> bool:
    return (any(fluent.endswith(f"_{source}") for fluent in action.delete)
            and any(fluent.endswith(f"_{target}") for fluent in action.add))


def _argument(modification: 'DesignModification', action: ActionDef, position: int) -> str:
    if not 1 <= position <= len(action.args):
        raise DesignSpecError(f"Modification '{modification.id}' refers to argument {position} of "
                              f"'{action.name}', which has {len(action.args)}")
    return action.args[position - 1]


@dataclass(frozen=True)
class DesignModification:
    """
    One atomic edit of the environment.
    Attributes:
        id (str): unique name of the modification
        kind (ModificationKind): what the edit does
        target (tuple): ground action names, or the two endpoint objects of a block-transition
        payload (frozenset): fluents added as preconditions by the add-precondition kinds
        cost (Fraction): design cost, additive over a design set
    """

    id: str
    kind: ModificationKind
    target: Tuple[str, ...]
    payload: FrozenSet[str] = frozenset()
    cost: Fraction = Fraction(1)

    def __post_init__(self):
        object.__setattr__(self, 'target', tuple(self.target))
        object.__setattr__(self, 'payload', frozenset(self.payload))
        object.__setattr__(self, 'cost', Fraction(self.cost))

        require_not_empty(self.id, failure_message="A modification needs an id")
        require_not_empty(self.target, failure_message=f"Modification '{self.id}' has no target")
        require_non_negative(self.cost, name=f"cost of modification '{self.id}'")
        if self.kind.adds_precondition and not self.payload:
            raise DesignSpecError(f"Modification '{self.id}' adds preconditions but names no fluent")
        if not self.kind.adds_precondition and self.payload:
            raise DesignSpecError(f"Modification '{self.id}' of kind {self.kind.value} cannot carry preconditions")
        if self.kind is ModificationKind.BLOCK_TRANSITION and len(self.target) != 2:
            raise DesignSpecError(f"Block transition '{self.id}' needs exactly two endpoints")

    def payload_for(self, action: ActionDef) -> FrozenSet[str]:
        """
        Payload of one ground action, with `?N` replaced by the N-th argument of the action
        """

        def substitute(fluent: str) -> str:
            return _PLACEHOLDER.sub(lambda match: _argument(self, action, int(match.group(1))), fluent)

        return frozenset(substitute(fluent) for fluent in self.payload)

    def affected_actions(self, pair: ModelPair) -> FrozenSet[str]:
        """
        Ground actions of the pair the modification touches. A block-transition touches the human actions that
        take both endpoints and move something from one to the other.
        """

        if self.kind is ModificationKind.BLOCK_TRANSITION:
            first, second = self.target
            return frozenset(action.name for action in pair.human.actions
                             if first in action.args and second in action.args
                             and (_relocates(action, first, second) or _relocates(action, second, first)))
        return frozenset(self.target)

    def validate(self, pair: ModelPair) -> None:
        """
        Raises:
            DesignSpecError: if the target or the payload does not resolve in the pair
        """

        if self.kind is ModificationKind.BLOCK_TRANSITION:
            if not self.affected_actions(pair):
                raise DesignSpecError(f"Block transition '{self.id}' matches no human action between "
                                      f"{self.target[0]} and {self.target[1]}")
            return

        known = pair.human.action_names
        if self.kind.changes_robot:
            known = known | pair.robot.action_names
        missing = [name for name in self.target if name not in known]
        if missing:
            raise DesignSpecError(f"Modification '{self.id}' targets undeclared actions: {', '.join(missing)}")

        for name in self.target:
            action = pair.human.action(name) or pair.robot.action(name)
            unknown = sorted(self.payload_for(action) - pair.fluents)
            if unknown:
                raise DesignSpecError(f"Modification '{self.id}' uses unknown fluents: {', '.join(unknown)}")

    def _preconditions(self, problem: PlanningProblem, targets: FrozenSet[str]) -> Dict[str, FrozenSet[str]]:
        return {action.name: self.payload_for(action) for action in problem.actions if action.name in targets}

    def apply(self, pair: ModelPair) -> ModelPair:
        targets = self.affected_actions(pair)
        robot, human = pair.robot, pair.human

        if self.kind is ModificationKind.PRUNE_HUMAN_ACTION or self.kind is ModificationKind.BLOCK_TRANSITION:
            human = human.without_actions(targets)
        elif self.kind is ModificationKind.PRUNE_BOTH_ACTION:
            robot, human = robot.without_actions(targets), human.without_actions(targets)
        else:
            human = human.with_extra_preconditions(self._preconditions(human, targets))
            if self.kind.changes_robot:
                robot = robot.with_extra_preconditions(self._preconditions(robot, targets))

        return pair.replace(robot=robot, human=human)


DesignSet = FrozenSet[DesignModification]


def design_ids(designs: Iterable[DesignModification]) -> Tuple[str, ...]:
    return tuple(sorted(design.id for design in designs))


def design_cost(designs: Iterable[DesignModification]) -> Fraction:
    return sum((design.cost for design in designs), Fraction(0))


# ----------------------------- CONFIGURATIONS ------------------------------#
@dataclass(frozen=True, eq=False)
class Configuration:
    """
    The explicable problems of every task after a design set was applied. Two configurations built from the same
    base and the same set share their identity whatever the order the modifications were given in.
    """

    base: Tuple[ExplicableProblem, ...]
    applied: DesignSet
    pair: ModelPair

    @property
    def base_pair(self) -> ModelPair:
        return self.base[0].pair

    @property
    def ids(self) -> Tuple[str, ...]:
        return design_ids(self.applied)

    @property
    def design_cost(self) -> Fraction:
        return design_cost(self.applied)

    @cached_property
    def identity(self) -> str:
        key = f"{self.base_pair.canonical_hash}:{','.join(self.ids)}"
        return hashlib.sha256(key.encode()).hexdigest()

    @cached_property
    def problems(self) -> Tuple[ExplicableProblem, ...]:
        return tuple(ExplicableProblem(self.pair, exp.task) for exp in self.base)

    def __eq__(self, other) -> bool:
        return isinstance(other, Configuration) and self.identity == other.identity

    def __hash__(self) -> int:
        return hash(self.identity)


def apply_designs(base: Sequence[ExplicableProblem], designs: Iterable[DesignModification]) -> Configuration:
    """
    Apply a design set to the explicable problems of the tasks.
    Args:
        base (list): one explicable problem per task, all over the same model pair
        designs (iterable): the modifications to apply
    Returns:
        configuration (Configuration): the modified problems
    Raises:
        DesignSpecError: if a modification does not resolve in the pair
    """

    base = tuple(base)
    require_not_empty(base, failure_message="A configuration needs at least one task")
    pair = base[0].pair
    if any(exp.pair is not pair for exp in base):
        raise DesignSpecError("All tasks of a configuration must share one model pair")

    designs = frozenset(designs)
    modified = pair
    for design in sorted(designs, key=lambda d: d.id):
        design.validate(pair)
        modified = design.apply(modified)

    return Configuration(base, designs, modified)
