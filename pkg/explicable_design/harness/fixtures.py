"""
Built in model pairs: the restaurant demo and small generated grid, blocksworld and driverlog pairs. Every fixture is
produced as text files, the same files the command line reads, and generation is a pure function of its arguments.
"""

from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Dict, List, Sequence, Tuple
import logging
import random

from explicable_design.design.modifications import DesignModification, ModificationKind
from explicable_design.design.objective import LongitudinalParams, ObjectiveWeights
from explicable_design.pddlio.designspec import DesignSpec, format_design_spec, parse_design_spec
from explicable_design.pddlio.models import ModelPair, TaskSpec
from explicable_design.pddlio.pddl import parse_model_pair
from explicable_design.utils import require_in_list

logger = logging.getLogger(__name__)

demo_settings = ['a', 'b', 'c']
ipc_domains = ['blocksworld', 'grid', 'driverlog']
fixture_sizes = ['small', 'medium']


@dataclass(frozen=True)
class FixtureFiles:
    """
    Text of the four input files of a design problem
    """

    name: str
    robot_domain: str
    human_domain: str
    problem: str
    designs: str

    def paths(self, directory) -> Dict[str, Path]:
        directory = Path(directory)
        return {
            'robot_domain': directory / f"{self.name}-robot.pddl",
            'human_domain': directory / f"{self.name}-human.pddl",
            'problem': directory / f"{self.name}-problem.pddl",
            'designs': directory / f"{self.name}-designs.txt",
        }

    def write(self, directory) -> Dict[str, Path]:
        paths = self.paths(directory)
        Path(directory).mkdir(parents=True, exist_ok=True)
        for key, path in paths.items():
            path.write_text(getattr(self, key))
        logger.info(f"Wrote fixture '{self.name}' to {directory}")
        return paths

    def load(self) -> Tuple[ModelPair, TaskSpec, DesignSpec]:
        pair, tasks = parse_model_pair(self.robot_domain, self.human_domain, self.problem)
        return pair, tasks, parse_design_spec(self.designs, pair)


def _facts(facts: Sequence[str], indent: str = '    ') -> str:
    return '\n'.join(f"{indent}({fact})" for fact in facts)


def _task(name: str, probability: Fraction, goal: Sequence[str], init: Sequence[str] = ()) -> str:
    init_block = f"\n    (:init\n{_facts(init, '      ')})" if init else ''
    return f"  (:task {name} (:prob {probability}){init_block}\n    (:goal (and\n{_facts(goal, '      ')})))"


def _problem(name: str, domain: str, objects: str, init: Sequence[str], tasks: Sequence[str]) -> str:
    return (f"(define (problem {name})\n"
            f"  (:domain {domain})\n"
            f"  (:objects {objects})\n"
            f"  (:init\n{_facts(init)})\n"
            + '\n'.join(tasks) + "\n)\n")


def _designs(modifications: Sequence[DesignModification], weights: ObjectiveWeights = None,
             params: LongitudinalParams = None) -> str:
    return format_design_spec(DesignSpec(modifications=tuple(modifications), weights=weights or ObjectiveWeights(),
                                         params=params or LongitudinalParams()))


# ----------------------------- RESTAURANT DEMO ------------------------------#
def _cell(row: int, col: int) -> str:
    return f"cell_{row}_{col}"


# Passages the robot cannot use; cells (0, 1) and (1, 1) are unreachable for it
DEMO_BLOCKED = [((0, 0), (0, 1)), ((0, 1), (0, 2)), ((0, 1), (1, 1)),
                ((1, 0), (1, 1)), ((1, 1), (1, 2)), ((1, 1), (2, 1))]
DEMO_KITCHEN = (1, 2)
DEMO_SERVICE = {'g1': (0, 0), 'g2': (1, 0)}


def _restaurant_domain(name: str, passage: str) -> str:
    return f"""(define (domain {name})
  (:requirements :strips :typing)
  (:types cell item)
  (:predicates
    (at ?c - cell)
    (connected ?from ?to - cell)
    (adjacent ?from ?to - cell)
    (item-at ?i - item ?c - cell)
    (holding ?i - item)
    (hand-empty))
  (:action move
    :parameters (?from ?to - cell)
    :precondition (and (at ?from) ({passage} ?from ?to))
    :effect (and (at ?to) (not (at ?from))))
  (:action pick-up
    :parameters (?i - item ?c - cell)
    :precondition (and (at ?c) (item-at ?i ?c) (hand-empty))
    :effect (and (holding ?i) (not (item-at ?i ?c)) (not (hand-empty))))
  (:action put-down
    :parameters (?i - item ?c - cell)
    :precondition (and (at ?c) (holding ?i))
    :effect (and (item-at ?i ?c) (hand-empty) (not (holding ?i))))
)
"""


def _grid_edges(size: int) -> List[Tuple[Tuple[int, int], Tuple[int, int]]]:
    edges = []
    for row in range(size):
        for col in range(size):
            for d_row, d_col in ((0, 1), (1, 0), (0, -1), (-1, 0)):
                other = (row + d_row, col + d_col)
                if 0 <= other[0] < size and 0 <= other[1] < size:
                    edges.append(((row, col), other))
    return edges


def demo_fixture_files(setting: str = 'c') -> FixtureFiles:
    """
    Restaurant demo: a 3x3 floor where the robot cannot cross six passages the human believes open. The robot
    carries a dish from the kitchen to a booth and comes back.
    Args:
        setting (str): 'a' serves G1 once, 'b' serves G1 or G2 with equal probability once, 'c' does it 10 times
    """

    require_in_list(setting, demo_settings)
    blocked = {frozenset(passage) for passage in DEMO_BLOCKED}
    edges = _grid_edges(3)

    init = [f"at {_cell(*DEMO_KITCHEN)}", f"item-at dish {_cell(*DEMO_KITCHEN)}", 'hand-empty']
    init += [f"adjacent {_cell(*a)} {_cell(*b)}" for a, b in edges]
    init += [f"connected {_cell(*a)} {_cell(*b)}" for a, b in edges if frozenset((a, b)) not in blocked]

    booths = ['g1'] if setting == 'a' else ['g1', 'g2']
    probability = Fraction(1, len(booths))
    tasks = [_task(booth, probability, [f"item-at dish {_cell(*DEMO_SERVICE[booth])}", f"at {_cell(*DEMO_KITCHEN)}"])
             for booth in booths]
    objects = ' '.join(_cell(row, col) for row in range(3) for col in range(3)) + ' - cell dish - item'

    modifications = [DesignModification(id=f"barrier-c{a[0]}{a[1]}-c{b[0]}{b[1]}",
                                        kind=ModificationKind.BLOCK_TRANSITION,
                                        target=(_cell(*a), _cell(*b)), cost=Fraction(1))
                     for a, b in DEMO_BLOCKED]

    return FixtureFiles(
        name=f"restaurant-{setting}",
        robot_domain=_restaurant_domain('restaurant-robot', 'connected'),
        human_domain=_restaurant_domain('restaurant-human', 'adjacent'),
        problem=_problem(f"restaurant-{setting}", 'restaurant-robot', objects, init, tasks),
        designs=_designs(modifications, ObjectiveWeights(Fraction(1), Fraction(30), Fraction(1, 4)),
                         LongitudinalParams(Fraction(9, 10), 10 if setting == 'c' else 1)),
    )


def build_demo_fixture(setting: str = 'c') -> Tuple[ModelPair, TaskSpec, DesignSpec]:
    return demo_fixture_files(setting).load()


# ----------------------------- GRID ------------------------------#
DIAGONALS = {'ne': (-1, 1), 'nw': (-1, -1), 'se': (1, 1), 'sw': (1, -1)}


def _grid_domain(name: str, diagonal_moves: bool) -> str:
    move_diag = """
  (:action move-diag
    :parameters (?from ?to - cell)
    :precondition (and (at ?from) (diagonal ?from ?to))
    :effect (and (at ?to) (not (at ?from))))""" if diagonal_moves else ''
    return f"""(define (domain {name})
  (:requirements :strips :typing)
  (:types cell)
  (:predicates
    (at ?c - cell)
    (adjacent ?from ?to - cell)
    (diagonal ?from ?to - cell))
  (:action move
    :parameters (?from ?to - cell)
    :precondition (and (at ?from) (adjacent ?from ?to))
    :effect (and (at ?to) (not (at ?from)))){move_diag}
)
"""


def _grid_fixture(rng: random.Random, size: int, name: str) -> FixtureFiles:
    cells = [(row, col) for row in range(size) for col in range(size)]
    init = [f"adjacent {_cell(*a)} {_cell(*b)}" for a, b in _grid_edges(size)]

    diagonal_moves: Dict[str, List[str]] = {direction: [] for direction in DIAGONALS}
    for row, col in cells:
        for direction, (d_row, d_col) in sorted(DIAGONALS.items()):
            other = (row + d_row, col + d_col)
            if other in cells:
                init.append(f"diagonal {_cell(row, col)} {_cell(*other)}")
                diagonal_moves[direction].append(f"move-diag_{_cell(row, col)}_{_cell(*other)}")

    tasks = []
    count = rng.choice([1, 2])
    for index in range(count):
        start = rng.choice(cells)
        goal = rng.choice([cell for cell in cells if cell[0] != start[0] and cell[1] != start[1]])
        tasks.append(_task(f"route-{index}", Fraction(1, count), [f"at {_cell(*goal)}"], [f"at {_cell(*start)}"]))

    modifications = [DesignModification(id=f"prune-diag-{direction}", kind=ModificationKind.PRUNE_HUMAN_ACTION,
                                        target=tuple(moves), cost=Fraction(1))
                     for direction, moves in sorted(diagonal_moves.items())]
    objects = ' '.join(_cell(*cell) for cell in cells) + ' - cell'

    return FixtureFiles(name, _grid_domain('grid-robot', False), _grid_domain('grid-human', True),
                        _problem(name, 'grid-robot', objects, init, tasks), _designs(modifications))


# ----------------------------- BLOCKSWORLD ------------------------------#
def _blocksworld_domain(name: str, single_hand: bool) -> str:
    hand = ' (hand-empty)' if single_hand else ''
    return f"""(define (domain {name})
  (:requirements :strips)
  (:predicates
    (on ?x ?y)
    (ontable ?x)
    (clear ?x)
    (holding ?x)
    (hand-empty)
    (picked-from-table ?x))
  (:action pick-up
    :parameters (?x)
    :precondition (and (clear ?x) (ontable ?x){hand})
    :effect (and (holding ?x) (picked-from-table ?x) (not (ontable ?x)) (not (clear ?x)) (not (hand-empty))))
  (:action put-down
    :parameters (?x)
    :precondition (holding ?x)
    :effect (and (ontable ?x) (clear ?x) (hand-empty) (not (holding ?x)) (not (picked-from-table ?x))))
  (:action stack
    :parameters (?x ?y)
    :precondition (and (holding ?x) (clear ?y))
    :effect (and (on ?x ?y) (clear ?x) (hand-empty) (not (holding ?x)) (not (clear ?y))
                 (not (picked-from-table ?x))))
  (:action unstack
    :parameters (?x ?y)
    :precondition (and (on ?x ?y) (clear ?x){hand})
    :effect (and (holding ?x) (clear ?y) (not (on ?x ?y)) (not (clear ?x)) (not (hand-empty))))
)
"""


def _blocksworld_fixture(rng: random.Random, size: int, name: str) -> FixtureFiles:
    """
    One rotation group: every moving block sits on a base block and must end on the next base. The robot has to
    park one block on the table, the human expects the robot to carry several blocks at once.
    """

    group = 2 if size == 3 else 3
    labels = [f"b{index}" for index in range(2 * group + rng.choice([0, 1]))]
    rng.shuffle(labels)
    movers, bases, idle = labels[:group], labels[group:2 * group], labels[2 * group:]
    shift = rng.randrange(1, group)

    init = ['hand-empty']
    init += [f"on {mover} {base}" for mover, base in zip(movers, bases)]
    init += [f"clear {block}" for block in movers + idle]
    init += [f"ontable {block}" for block in bases + idle]
    goal = [f"on {mover} {bases[(index + shift) % group]}" for index, mover in enumerate(movers)]
    goal += [f"ontable {block}" for block in idle]

    blocks = sorted(labels)

    def gate(identifier: str, gated: Sequence[str], cost: int) -> DesignModification:
        targets = tuple(f"stack_{x}_{y}" for x in sorted(gated) for y in blocks if y != x)
        return DesignModification(id=identifier, kind=ModificationKind.ADD_PRECONDITION_BOTH, target=targets,
                                  payload=frozenset({'picked-from-table_?1'}), cost=Fraction(cost))

    modifications = [gate('gate-group-0', movers, 1), gate('gate-all', blocks, 2)]

    return FixtureFiles(name, _blocksworld_domain('blocksworld-robot', True),
                        _blocksworld_domain('blocksworld-human', False),
                        _problem(name, 'blocksworld-robot', ' '.join(blocks), init,
                                 [_task('rotate', Fraction(1), goal)]),
                        _designs(modifications))


# ----------------------------- DRIVERLOG ------------------------------#
def _driverlog_domain(name: str, driver_at_location: bool) -> str:
    driver = ' (at-d ?d ?l)' if driver_at_location else ''
    return f"""(define (domain {name})
  (:requirements :strips :typing)
  (:types location truck driver package)
  (:predicates
    (at-t ?t - truck ?l - location)
    (at-d ?d - driver ?l - location)
    (at-p ?p - package ?l - location)
    (in ?p - package ?t - truck)
    (driving ?d - driver ?t - truck)
    (empty ?t - truck)
    (link ?from ?to - location)
    (just-disembarked ?d - driver))
  (:action load-truck
    :parameters (?p - package ?t - truck ?l - location ?d - driver)
    :precondition (and (at-p ?p ?l) (at-t ?t ?l){driver})
    :effect (and (in ?p ?t) (not (at-p ?p ?l))))
  (:action unload-truck
    :parameters (?p - package ?t - truck ?l - location ?d - driver)
    :precondition (and (in ?p ?t) (at-t ?t ?l){driver})
    :effect (and (at-p ?p ?l) (not (in ?p ?t))))
  (:action board-truck
    :parameters (?d - driver ?t - truck ?l - location)
    :precondition (and (at-d ?d ?l) (at-t ?t ?l) (empty ?t))
    :effect (and (driving ?d ?t) (not (at-d ?d ?l)) (not (empty ?t)) (not (just-disembarked ?d))))
  (:action disembark-truck
    :parameters (?d - driver ?t - truck ?l - location)
    :precondition (and (driving ?d ?t) (at-t ?t ?l))
    :effect (and (at-d ?d ?l) (empty ?t) (just-disembarked ?d) (not (driving ?d ?t))))
  (:action drive-truck
    :parameters (?t - truck ?from ?to - location ?d - driver)
    :precondition (and (at-t ?t ?from) (driving ?d ?t) (link ?from ?to))
    :effect (and (at-t ?t ?to) (not (at-t ?t ?from))))
)
"""


def _driverlog_fixture(rng: random.Random, size: int, name: str) -> FixtureFiles:
    """
    A truck, its driver and packages waiting at the start of a road. The human believes packages can be loaded
    and unloaded without the driver standing next to the truck.
    """

    locations = [f"l{index}" for index in range(rng.choice([2, 3]) if size == 3 else 3)]
    packages = [f"p{index}" for index in range(1 if size == 3 else 2)]

    init = ['at-t t0 l0', 'at-d d0 l0', 'empty t0']
    for first, second in zip(locations, locations[1:]):
        init += [f"link {first} {second}", f"link {second} {first}"]
    init += [f"at-p {package} l0" for package in packages]
    goal = [f"at-p {package} {rng.choice(locations[1:])}" for package in packages]

    modifications = [DesignModification(
        id=f"gate-{package}", kind=ModificationKind.ADD_PRECONDITION_BOTH,
        target=tuple(f"{action}_{package}_t0_{location}_d0"
                     for action in ('load-truck', 'unload-truck') for location in locations),
        payload=frozenset({'just-disembarked_?4'}), cost=Fraction(1)) for package in packages]

    objects = f"{' '.join(locations)} - location t0 - truck d0 - driver {' '.join(packages)} - package"
    return FixtureFiles(name, _driverlog_domain('driverlog-robot', True), _driverlog_domain('driverlog-human', False),
                        _problem(name, 'driverlog-robot', objects, init, [_task('deliver', Fraction(1), goal)]),
                        _designs(modifications))


# ----------------------------- IPC STYLE FIXTURES ------------------------------#
_GENERATORS = {
    'blocksworld': _blocksworld_fixture,
    'grid': _grid_fixture,
    'driverlog': _driverlog_fixture,
}

_SIZES = {'small': 3, 'medium': 4}


def build_ipc_fixtures(domain: str, size: str = 'small', seed: int = 0) -> FixtureFiles:
    """
    Generate one model pair of an IPC style domain with the human's misconception built in.
    Args:
        domain (str): 'blocksworld' (multi block carrying), 'grid' (diagonal moves) or 'driverlog' (loading without
            the driver)
        size (str): 'small' or 'medium'
        seed (int): identical seeds give byte identical files
    """

    require_in_list(domain, ipc_domains)
    require_in_list(size, fixture_sizes)
    rng = random.Random(f"{domain}:{size}:{seed}")
    return _GENERATORS[domain](rng, _SIZES[size], f"{domain}-{size}-{seed}")


def build_ipc_suite(domain: str, count: int = 5, size: str = 'small', seed: int = 0) -> List[FixtureFiles]:
    return [build_ipc_fixtures(domain, size, seed + index) for index in range(count)]
