from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings

from explicable_design.harness.fixtures import demo_fixture_files
from explicable_design.pddlio.models import ModelPair, Task
from explicable_design.planning.model import ActionDef, PlanningProblem, State

settings.register_profile('explicable', deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile('explicable')


def move(source: int, target: int, cost=1) -> ActionDef:
    return ActionDef(f"move_{source}_{target}", pre={f"at{source}"}, add={f"at{target}"}, delete={f"at{source}"},
                     cost=Fraction(cost))


def corridor(length: int, extra=(), name='corridor') -> PlanningProblem:
    """
    Cells 0..length joined by moves in both directions, from cell 0 to the last cell
    """
    fluents = {f"at{i}" for i in range(length + 1)}
    actions = [move(i, i + 1) for i in range(length)] + [move(i + 1, i) for i in range(length)] + list(extra)
    return PlanningProblem(fluents, actions, State({'at0'}), {f"at{length}"}, name)


@pytest.fixture
def chain():
    return corridor(3)


@pytest.fixture
def shortcut_pair():
    """
    The human believes the robot can jump from cell 0 to cell 3
    """
    robot = corridor(3, name='robot')
    human = corridor(3, extra=[move(0, 3)], name='human')
    return ModelPair(robot, human, 'shortcut')


@pytest.fixture
def shortcut_task():
    return Task({'at0'}, {'at3'}, 'reach-3')


@pytest.fixture(scope='session')
def demo_a():
    return demo_fixture_files('a').load()


@pytest.fixture(scope='session')
def demo_b():
    return demo_fixture_files('b').load()


@pytest.fixture(scope='session')
def demo_c():
    return demo_fixture_files('c').load()
