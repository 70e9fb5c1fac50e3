"""
Writes a grounded model pair back as PDDL text, with zero arity predicates and parameterless actions. Reading the
text back gives a pair with the same canonical hash.
"""

from fractions import Fraction
from typing import Iterable, Tuple

from explicable_design.pddlio.models import ModelPair, TaskSpec
from explicable_design.planning.model import ActionDef, PlanningProblem


def _facts(fluents: Iterable[str], indent: str) -> str:
    return '\n'.join(f"{indent}({fluent})" for fluent in sorted(fluents))


def _action(action: ActionDef) -> str:
    effects = [f"({fluent})" for fluent in sorted(action.add)]
    effects += [f"(not ({fluent}))" for fluent in sorted(action.delete)]
    if action.cost != 1:
        effects.append(f"(increase (total-cost) {Fraction(action.cost)})")

    return (f"  (:action {action.name}\n"
            f"    :parameters ()\n"
            f"    :precondition (and {' '.join(f'({fluent})' for fluent in sorted(action.pre))})\n"
            f"    :effect (and {' '.join(effects)}))")


def serialize_domain(problem: PlanningProblem, name: str, fluents: Iterable[str]) -> str:
    actions = '\n'.join(_action(action) for action in problem.actions)
    return (f"(define (domain {name})\n"
            f"  (:requirements :strips)\n"
            f"  (:predicates\n{_facts(fluents, '    ')})\n"
            f"{actions}\n"
            f")\n")


def serialize_model_pair(pair: ModelPair, tasks: TaskSpec) -> Tuple[str, str, str]:
    """
    Returns:
        texts (tuple): robot domain, human domain and problem file
    """

    robot_domain = serialize_domain(pair.robot, f"{pair.name}-robot", pair.fluents)
    human_domain = serialize_domain(pair.human, f"{pair.name}-human", pair.fluents)

    blocks = []
    for task, probability in zip(tasks.tasks, tasks.probabilities):
        blocks.append(f"  (:task {task.name} (:prob {probability})\n"
                      f"    (:init\n{_facts(task.init, '      ')})\n"
                      f"    (:goal (and\n{_facts(task.goal, '      ')})))")

    problem = (f"(define (problem {pair.name})\n"
               f"  (:domain {pair.name}-robot)\n"
               f"  (:init)\n"
               f"  (:goal (and))\n"
               + '\n'.join(blocks) + "\n)\n")

    return robot_domain, human_domain, problem
