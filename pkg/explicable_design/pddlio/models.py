"""
Containers produced by the readers: the robot/human model pair and the distribution of tasks
"""

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import FrozenSet, Iterable, Tuple
import hashlib

from explicable_design.configs import PROBABILITY_TOLERANCE
from explicable_design.planning.model import PlanningProblem
from explicable_design.utils import ValidationError, PddlSemanticError, require_not_empty, require_non_negative


@dataclass(frozen=True)
class Task:
    """
    Initial state and goal shared by the robot model and the human model
    """

    init: FrozenSet[str]
    goal: FrozenSet[str]
    name: str = 'task'

    def __post_init__(self):
        object.__setattr__(self, 'init', frozenset(self.init))
        object.__setattr__(self, 'goal', frozenset(self.goal))


@dataclass(frozen=True)
class TaskSpec:

    tasks: Tuple[Task, ...]
    probabilities: Tuple[Fraction, ...]

    def __post_init__(self):
        object.__setattr__(self, 'tasks', tuple(self.tasks))
        object.__setattr__(self, 'probabilities', tuple(Fraction(p) for p in self.probabilities))

        require_not_empty(self.tasks, failure_message="At least one task is required")
        if len(self.tasks) != len(self.probabilities):
            raise ValidationError(f"{len(self.tasks)} tasks but {len(self.probabilities)} probabilities")
        for probability in self.probabilities:
            require_non_negative(probability, name="task probability")
        if abs(float(sum(self.probabilities)) - 1.0) > PROBABILITY_TOLERANCE:
            raise PddlSemanticError(f"Task probabilities sum to {float(sum(self.probabilities))}, not 1")

    def __len__(self) -> int:
        return len(self.tasks)

    @classmethod
    def uniform(cls, tasks: Iterable[Task]) -> 'TaskSpec':
        tasks = tuple(tasks)
        return cls(tasks, tuple(Fraction(1, len(tasks)) for _ in tasks))


@dataclass(frozen=True, eq=False)
class ModelPair:
    """
    The robot's model and the human's mental model of it, over one fluent universe. Both problems carry the first
    task of the problem file as their initial state and goal.
    """

    robot: PlanningProblem
    human: PlanningProblem
    name: str = 'pair'

    @property
    def fluents(self) -> FrozenSet[str]:
        return self.robot.fluents | self.human.fluents

    @property
    def human_only(self) -> FrozenSet[str]:
        """
        Actions the human believes the robot has although the robot does not
        """
        return self.human.action_names - self.robot.action_names

    def check_action_mapping(self) -> None:
        missing = sorted(self.robot.action_names - self.human.action_names)
        if missing:
            raise PddlSemanticError(f"Robot actions without a human counterpart: {', '.join(missing[:10])}"
                                    f"{' ...' if len(missing) > 10 else ''}")

    def replace(self, robot: PlanningProblem = None, human: PlanningProblem = None) -> 'ModelPair':
        return ModelPair(robot if robot is not None else self.robot,
                         human if human is not None else self.human, self.name)

    @cached_property
    def canonical_hash(self) -> str:
        return hashlib.sha256(f"{self.robot.canonical_hash}:{self.human.canonical_hash}".encode()).hexdigest()
