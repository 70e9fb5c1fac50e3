"""
Reader for the STRIPS subset of PDDL used by the model pairs. Typed action schemas are grounded against the problem
objects, so everything downstream only sees grounded problems.

A problem file may hold several `(:task NAME (:prob P) (:init ...) (:goal ...))` blocks. The initial facts of a task
extend the top level `:init`, its goal replaces the top level `:goal`.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple
import itertools
import logging

from explicable_design.pddlio.models import ModelPair, Task, TaskSpec
from explicable_design.pddlio.sexpr import SExpr, read_sexpression, read_sexpressions
from explicable_design.planning.model import ActionDef, Plan, PlanningProblem, State
from explicable_design.utils import PddlSemanticError

logger = logging.getLogger(__name__)

OBJECT_TYPE = 'object'

Atom = Tuple[str, Tuple[str, ...]]


def ground_name(symbol: str, args: Sequence[str]) -> str:
    """
    Name of a grounded predicate or action, e.g. at_cell_0_0
    """
    return '_'.join([symbol, *args])


# ----------------------------- LIFTED DEFINITIONS ------------------------------#
@dataclass(frozen=True)
class ActionSchema:

    name: str
    parameters: Tuple[Tuple[str, str], ...]
    pre: Tuple[Atom, ...]
    add: Tuple[Atom, ...]
    delete: Tuple[Atom, ...]
    cost: Fraction = Fraction(1)


@dataclass
class Domain:

    name: str
    types: Dict[str, str] = field(default_factory=dict)
    constants: Dict[str, str] = field(default_factory=dict)
    predicates: Dict[str, Tuple[str, ...]] = field(default_factory=dict)
    actions: List[ActionSchema] = field(default_factory=list)


@dataclass
class ProblemDef:

    name: str
    domain_name: str
    objects: Dict[str, str] = field(default_factory=dict)
    init: List[Atom] = field(default_factory=list)
    goal: List[Atom] = field(default_factory=list)
    tasks: List[Tuple[str, Optional[Fraction], List[Atom], Optional[List[Atom]]]] = field(default_factory=list)


def _typed_list(items: Sequence[str]) -> List[Tuple[str, str]]:
    """
    Parse `a b - t1 c - t2 d` into [(a, t1), (b, t1), (c, t2), (d, object)]
    """

    typed, pending = [], []
    items = list(items)
    idx = 0
    while idx < len(items):
        item = items[idx]
        if not isinstance(item, str):
            raise PddlSemanticError(f"Unexpected expression in typed list: {item}")
        if item == '-':
            if idx + 1 >= len(items) or not pending:
                raise PddlSemanticError("Dangling '-' in typed list")
            typed.extend((name, items[idx + 1]) for name in pending)
            pending = []
            idx += 2
            continue
        pending.append(item)
        idx += 1
    typed.extend((name, OBJECT_TYPE) for name in pending)

    return typed


def _atom(expr: SExpr) -> Atom:
    if not isinstance(expr, list) or not expr or not isinstance(expr[0], str) \
            or not all(isinstance(arg, str) for arg in expr[1:]):
        raise PddlSemanticError(f"Expected an atom, found {expr}")
    return expr[0], tuple(expr[1:])


def _conjunction(expr: SExpr) -> List[SExpr]:
    if isinstance(expr, list) and expr and expr[0] == 'and':
        return expr[1:]
    if isinstance(expr, list) and not expr:
        return []
    return [expr]


def _section(expr: SExpr) -> Tuple[str, List[SExpr]]:
    if not isinstance(expr, list) or not expr or not isinstance(expr[0], str):
        raise PddlSemanticError(f"Expected a section, found {expr}")
    return expr[0], expr[1:]


def _header(expr: SExpr, kind: str) -> str:
    if not isinstance(expr, list) or len(expr) < 2 or expr[0] != 'define' \
            or not isinstance(expr[1], list) or len(expr[1]) != 2 or expr[1][0] != kind:
        raise PddlSemanticError(f"Expected (define ({kind} NAME) ...)")
    return expr[1][1]


def parse_domain(text: str) -> Domain:
    expr = read_sexpression(text)
    domain = Domain(_header(expr, 'domain'))

    for section in expr[2:]:
        keyword, body = _section(section)
        if keyword in (':requirements', ':functions'):
            continue
        elif keyword == ':types':
            domain.types.update(dict(_typed_list(body)))
        elif keyword == ':constants':
            domain.constants.update(dict(_typed_list(body)))
        elif keyword == ':predicates':
            for predicate in body:
                name, args = _section(predicate)
                domain.predicates[name] = tuple(type_name for _, type_name in _typed_list(args))
        elif keyword == ':action':
            domain.actions.append(_parse_action(body))
        else:
            raise PddlSemanticError(f"Unsupported domain section '{keyword}'")

    names = [action.name for action in domain.actions]
    if len(names) != len(set(names)):
        raise PddlSemanticError(f"Duplicate action schemas in domain '{domain.name}'")

    return domain


def _parse_action(body: List[SExpr]) -> ActionSchema:
    if not body or not isinstance(body[0], str):
        raise PddlSemanticError("Action without a name")
    name = body[0]
    keys = body[1::2]
    if len(body) % 2 == 0 or not all(isinstance(key, str) for key in keys):
        raise PddlSemanticError(f"Action '{name}' must alternate keywords and values")
    fields = dict(zip(keys, body[2::2]))
    unknown = set(fields) - {':parameters', ':precondition', ':effect'}
    if unknown:
        raise PddlSemanticError(f"Action '{name}' has unsupported fields: {', '.join(sorted(unknown))}")

    parameters = tuple((var.lstrip('?'), type_name) for var, type_name in _typed_list(fields.get(':parameters', [])))

    pre = []
    for condition in _conjunction(fields.get(':precondition', [])):
        if isinstance(condition, list) and condition and condition[0] in ('not', 'or', 'forall', 'exists', 'when'):
            raise PddlSemanticError(f"Action '{name}': only positive conjunctive preconditions are supported")
        pre.append(_atom(condition))

    add, delete, cost = [], [], Fraction(1)
    for effect in _conjunction(fields.get(':effect', [])):
        if isinstance(effect, list) and effect and effect[0] == 'not':
            delete.append(_atom(effect[1]))
        elif isinstance(effect, list) and effect and effect[0] == 'increase':
            if len(effect) != 3 or effect[1] != ['total-cost']:
                raise PddlSemanticError(f"Action '{name}': only (increase (total-cost) N) is supported")
            try:
                cost = Fraction(effect[2])
            except (TypeError, ValueError):
                raise PddlSemanticError(f"Action '{name}' has an invalid cost {effect[2]}")
        else:
            add.append(_atom(effect))

    return ActionSchema(name, parameters, tuple(pre), tuple(add), tuple(delete), cost)


def parse_problem(text: str) -> ProblemDef:
    expr = read_sexpression(text)
    problem = ProblemDef(_header(expr, 'problem'), '')

    for section in expr[2:]:
        keyword, body = _section(section)
        if keyword == ':domain':
            problem.domain_name = body[0] if body and isinstance(body[0], str) else ''
        elif keyword in (':requirements', ':metric'):
            continue
        elif keyword == ':objects':
            problem.objects.update(dict(_typed_list(body)))
        elif keyword == ':init':
            problem.init.extend(_atom(fact) for fact in body)
        elif keyword == ':goal':
            problem.goal.extend(_atom(fact) for fact in _conjunction(body[0] if body else []))
        elif keyword == ':task':
            problem.tasks.append(_parse_task(body, len(problem.tasks)))
        else:
            raise PddlSemanticError(f"Unsupported problem section '{keyword}'")

    return problem


def _parse_task(body: List[SExpr], index: int):
    name = f"task-{index}"
    if body and isinstance(body[0], str):
        name, body = body[0], body[1:]

    probability, init, goal = None, [], None
    for section in body:
        keyword, content = _section(section)
        if keyword == ':prob':
            try:
                probability = Fraction(content[0])
            except (ValueError, IndexError, TypeError):
                raise PddlSemanticError(f"Task '{name}' has an invalid probability {content}")
        elif keyword == ':init':
            init.extend(_atom(fact) for fact in content)
        elif keyword == ':goal':
            goal = [_atom(fact) for fact in _conjunction(content[0] if content else [])]
        else:
            raise PddlSemanticError(f"Unsupported task section '{keyword}'")

    return name, probability, init, goal


# ----------------------------- GROUNDING ------------------------------#
class Grounder:
    """
    Grounds the domains of a pair against the objects of one problem. The fluent universe is shared by every
    domain given to the grounder.
    """

    def __init__(self, domains: Sequence[Domain], problem: ProblemDef):
        self.domains = list(domains)
        self.problem = problem

        self.types: Dict[str, str] = {}
        self.objects: Dict[str, str] = {}
        self.predicates: Dict[str, Tuple[str, ...]] = {}
        for domain in self.domains:
            self.types.update(domain.types)
            self.objects.update(domain.constants)
            for predicate, signature in domain.predicates.items():
                if self.predicates.setdefault(predicate, signature) != signature:
                    raise PddlSemanticError(f"Predicate '{predicate}' is declared with different arguments")
        self.objects.update(problem.objects)

        for name, type_name in self.objects.items():
            self._require_type(type_name)

        self._names: Dict[str, Atom] = {}
        self.fluents = self._ground_fluents()

    # ----------------------------- TYPES & OBJECTS ------------------------------#
    def _require_type(self, type_name: str) -> None:
        if type_name != OBJECT_TYPE and type_name not in self.types:
            raise PddlSemanticError(f"Unknown type '{type_name}'")

    def is_subtype(self, type_name: str, ancestor: str) -> bool:
        seen = set()
        while type_name not in seen:
            if type_name == ancestor or ancestor == OBJECT_TYPE:
                return True
            seen.add(type_name)
            type_name = self.types.get(type_name, OBJECT_TYPE)
        return False

    def objects_of(self, type_name: str) -> List[str]:
        self._require_type(type_name)
        return sorted(name for name, object_type in self.objects.items() if self.is_subtype(object_type, type_name))

    # ----------------------------- FLUENTS ------------------------------#
    def _register(self, name: str, atom: Atom) -> str:
        if self._names.setdefault(name, atom) != atom:
            raise PddlSemanticError(f"Grounded name '{name}' is ambiguous between {self._names[name]} and {atom}")
        return name

    def _ground_fluents(self) -> FrozenSet[str]:
        fluents = set()
        for predicate, signature in sorted(self.predicates.items()):
            for args in itertools.product(*(self.objects_of(type_name) for type_name in signature)):
                fluents.add(self._register(ground_name(predicate, args), (predicate, tuple(args))))
        return frozenset(fluents)

    def fluent(self, atom: Atom, binding: Dict[str, str] = None) -> str:
        predicate, args = atom
        if predicate not in self.predicates:
            raise PddlSemanticError(f"Unknown predicate '{predicate}'")
        if len(args) != len(self.predicates[predicate]):
            raise PddlSemanticError(f"Predicate '{predicate}' expects {len(self.predicates[predicate])} arguments")

        grounded = []
        for arg in args:
            if arg.startswith('?'):
                if binding is None or arg[1:] not in binding:
                    raise PddlSemanticError(f"Unbound variable '{arg}' in {predicate}")
                grounded.append(binding[arg[1:]])
            elif arg in self.objects:
                grounded.append(arg)
            else:
                raise PddlSemanticError(f"Unknown object '{arg}' in {predicate}")

        name = ground_name(predicate, grounded)
        if name not in self.fluents:
            raise PddlSemanticError(f"Fact ({predicate} {' '.join(grounded)}) does not match the predicate types")
        return name

    def facts(self, atoms: Iterable[Atom]) -> FrozenSet[str]:
        return frozenset(self.fluent(atom) for atom in atoms)

    # ----------------------------- ACTIONS ------------------------------#
    def ground_actions(self, domain: Domain) -> List[ActionDef]:
        actions = []
        for schema in domain.actions:
            variables = [var for var, _ in schema.parameters]
            domains = [self.objects_of(type_name) for _, type_name in schema.parameters]
            for args in itertools.product(*domains):
                binding = dict(zip(variables, args))
                name = self._register(ground_name(schema.name, args), (schema.name, tuple(args)))
                add = frozenset(self.fluent(atom, binding) for atom in schema.add)
                # delete then add
                delete = frozenset(self.fluent(atom, binding) for atom in schema.delete) - add
                actions.append(ActionDef(name=name,
                                         pre=frozenset(self.fluent(atom, binding) for atom in schema.pre),
                                         add=add, delete=delete, cost=schema.cost,
                                         schema=schema.name, args=tuple(args)))
        return actions


def prune_unreachable(robot_actions: Sequence[ActionDef], human_actions: Sequence[ActionDef],
                      initial_facts: FrozenSet[str]) -> Tuple[List[ActionDef], List[ActionDef]]:
    """
    Drop ground actions needing a fluent no task starts with and no remaining action adds, until nothing changes.
    The human counterpart of a kept robot action is always kept.
    """

    robot_actions, human_actions = list(robot_actions), list(human_actions)
    while True:
        reachable = set(initial_facts)
        for action in itertools.chain(robot_actions, human_actions):
            reachable |= action.add

        kept_robot = [action for action in robot_actions if action.pre <= reachable]
        robot_names = {action.name for action in kept_robot}
        kept_human = [action for action in human_actions if action.name in robot_names or action.pre <= reachable]

        if len(kept_robot) == len(robot_actions) and len(kept_human) == len(human_actions):
            return kept_robot, kept_human
        robot_actions, human_actions = kept_robot, kept_human


# ----------------------------- MODEL PAIRS ------------------------------#
def _task_list(grounder: Grounder, problem: ProblemDef) -> TaskSpec:
    base_init = grounder.facts(problem.init)
    base_goal = grounder.facts(problem.goal)

    if not problem.tasks:
        return TaskSpec((Task(base_init, base_goal, problem.name),), (Fraction(1),))

    tasks, probabilities = [], []
    for name, probability, init, goal in problem.tasks:
        tasks.append(Task(base_init | grounder.facts(init),
                          grounder.facts(goal) if goal is not None else base_goal, name))
        probabilities.append(probability)

    if all(probability is None for probability in probabilities):
        return TaskSpec.uniform(tasks)
    if any(probability is None for probability in probabilities):
        raise PddlSemanticError("Either every task or no task must carry a (:prob P) annotation")

    return TaskSpec(tuple(tasks), tuple(probabilities))


def _initial_facts(tasks: TaskSpec) -> FrozenSet[str]:
    return frozenset().union(*(task.init for task in tasks.tasks))


def _check_domain_names(problem: ProblemDef, domains: Sequence[Domain]) -> None:
    if problem.domain_name and problem.domain_name not in {domain.name for domain in domains}:
        logger.warning(f"Problem '{problem.name}' refers to domain '{problem.domain_name}', "
                       f"read with {', '.join(domain.name for domain in domains)}")


def parse_model_pair(domain_text_r: str, domain_text_h: str, problem_text: str) -> Tuple[ModelPair, TaskSpec]:
    """
    Parse the robot domain, the human domain and their shared problem file.
    Args:
        domain_text_r (str): robot domain
        domain_text_h (str): human mental model domain
        problem_text (str): objects, facts and the task distribution
    Returns:
        pair (ModelPair): grounded robot and human problems, instantiated on the first task
        tasks (TaskSpec): the tasks and their probabilities
    Raises:
        PddlSyntaxError: on malformed text
        PddlSemanticError: on unknown symbols, robot actions absent from the human domain or bad probabilities
    """

    robot_domain, human_domain = parse_domain(domain_text_r), parse_domain(domain_text_h)
    problem = parse_problem(problem_text)
    _check_domain_names(problem, (robot_domain, human_domain))

    human_schemas = {action.name for action in human_domain.actions}
    missing = [action.name for action in robot_domain.actions if action.name not in human_schemas]
    if missing:
        raise PddlSemanticError(f"Robot actions absent from the human domain: {', '.join(missing)}")

    grounder = Grounder((robot_domain, human_domain), problem)
    tasks = _task_list(grounder, problem)
    robot_actions, human_actions = prune_unreachable(grounder.ground_actions(robot_domain),
                                                     grounder.ground_actions(human_domain),
                                                     _initial_facts(tasks))

    first = tasks.tasks[0]
    robot = PlanningProblem(grounder.fluents, tuple(robot_actions), State(first.init), first.goal,
                            name=f"{problem.name}-robot")
    human = PlanningProblem(grounder.fluents, tuple(human_actions), State(first.init), first.goal,
                            name=f"{problem.name}-human")

    pair = ModelPair(robot, human, problem.name)
    pair.check_action_mapping()
    logger.info(f"Grounded '{problem.name}': {len(grounder.fluents)} fluents, {len(robot_actions)} robot actions, "
                f"{len(human_actions)} human actions ({len(pair.human_only)} human only), {len(tasks)} tasks")

    return pair, tasks


def parse_planning_problem(domain_text: str, problem_text: str) -> Tuple[PlanningProblem, TaskSpec]:
    """
    Parse a single domain and its problem file
    """

    domain = parse_domain(domain_text)
    problem = parse_problem(problem_text)
    _check_domain_names(problem, (domain,))

    grounder = Grounder((domain,), problem)
    tasks = _task_list(grounder, problem)
    actions, _ = prune_unreachable(grounder.ground_actions(domain), (), _initial_facts(tasks))

    first = tasks.tasks[0]
    return PlanningProblem(grounder.fluents, tuple(actions), State(first.init), first.goal, name=problem.name), tasks


def parse_plan(text: str) -> Plan:
    """
    Read a plan file, one `(action arg ...)` per line, as the ground action names of the model.
    Raises:
        PddlSyntaxError: on malformed text
        PddlSemanticError: on a nested or empty step
    """

    steps = []
    for expr in read_sexpressions(text):
        if not expr or any(not isinstance(item, str) for item in expr):
            raise PddlSemanticError(f"Plan step must be a flat non empty list, got {expr}")
        steps.append(ground_name(expr[0], expr[1:]))
    return Plan(tuple(steps))
