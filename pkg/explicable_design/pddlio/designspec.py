"""
Reader for design space files: key = value records describing the candidate modifications and the objective.

    ; comments start with ';' or '#'
    weights { alpha = 1, beta = 30, kappa = 1/4 }
    gamma = 0.9
    horizon = 10
    time-limit-secs = 600
    max-design-size = 2
    modification {
        id = barrier-c00-c01
        kind = block-transition
        target-action = (cell_0_0 cell_0_1)
        cost = 1
    }

`target-action` lists ground action names, or the two endpoint objects of a block-transition. The add-precondition
kinds name their fluents in `added-precondition`, where `?N` stands for the N-th argument of each target action,
e.g. `picked-from-table_?1`. The prune kinds may restate the model they prune with `removed-for = human` or
`removed-for = both`.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Optional, Tuple

import pyparsing as pp

from explicable_design.configs import (DEFAULT_ALPHA, DEFAULT_BETA, DEFAULT_GAMMA, DEFAULT_HORIZON, DEFAULT_KAPPA,
                                       DEFAULT_PLANNER_TIME_LIMIT_SECS, DEFAULT_TIME_LIMIT_SECS)
from explicable_design.design.modifications import DesignModification, ModificationKind
from explicable_design.design.objective import LongitudinalParams, ObjectiveWeights
from explicable_design.pddlio.models import ModelPair
from explicable_design.utils import DesignSpecError, PddlSyntaxError, ValidationError


@dataclass(frozen=True)
class DesignSpec:

    modifications: Tuple[DesignModification, ...] = ()
    weights: ObjectiveWeights = field(default_factory=ObjectiveWeights)
    params: LongitudinalParams = field(default_factory=LongitudinalParams)
    time_limit: Optional[float] = DEFAULT_TIME_LIMIT_SECS
    planner_time_limit: Optional[float] = DEFAULT_PLANNER_TIME_LIMIT_SECS
    max_design_size: Optional[int] = None

    @property
    def gamma(self) -> Fraction:
        return self.params.gamma

    @property
    def horizon(self) -> int:
        return self.params.horizon

    def validate(self, pair: ModelPair) -> None:
        ids = [modification.id for modification in self.modifications]
        if len(ids) != len(set(ids)):
            raise DesignSpecError("Modification ids must be unique")
        for modification in self.modifications:
            modification.validate(pair)


# ----------------------------- GRAMMAR ------------------------------#
def _build_grammar() -> pp.ParserElement:
    symbol = pp.Word(pp.alphanums + '-_@./?')
    equals, comma = pp.Suppress('='), pp.Suppress(',')
    listed = pp.Group(pp.Suppress('(') + pp.ZeroOrMore(symbol + pp.Optional(comma)) + pp.Suppress(')'))

    assignment = pp.Group(symbol('key') + equals + (listed('items') | symbol('scalar')))
    record = pp.Group(symbol('record') + pp.Suppress('{')
                      + pp.Group(pp.ZeroOrMore(assignment + pp.Optional(comma)))('fields') + pp.Suppress('}'))

    document = pp.ZeroOrMore(record | assignment)
    document.ignore(pp.one_of('; #') + pp.rest_of_line)
    return document


_GRAMMAR = _build_grammar()

_TOP_LEVEL_KEYS = {'gamma', 'horizon', 'time-limit-secs', 'planner-time-limit-secs', 'max-design-size'}
_MODIFICATION_KEYS = {'id', 'kind', 'target-action', 'added-precondition', 'removed-for', 'cost'}
_REMOVED_FOR = {ModificationKind.PRUNE_HUMAN_ACTION: 'human', ModificationKind.PRUNE_BOTH_ACTION: 'both',
                ModificationKind.BLOCK_TRANSITION: 'human'}


def _value(assignment: pp.ParseResults) -> Any:
    if 'items' in assignment:
        return tuple(assignment['items'].as_list())
    return assignment['scalar']


def _number(key: str, value: Any) -> Fraction:
    if not isinstance(value, str):
        raise DesignSpecError(f"'{key}' must be a number, got {value}")
    try:
        return Fraction(value)
    except (ValueError, ZeroDivisionError):
        raise DesignSpecError(f"'{key}' must be a number, got '{value}'")


def _names(value: Any) -> Tuple[str, ...]:
    return value if isinstance(value, tuple) else (value,)


def _fields(record: pp.ParseResults, allowed: set, name: str) -> Dict[str, Any]:
    fields = {}
    for assignment in record['fields']:
        key = assignment['key']
        if key not in allowed:
            raise DesignSpecError(f"Unknown field '{key}' in {name} record")
        if key in fields:
            raise DesignSpecError(f"Field '{key}' given twice in {name} record")
        fields[key] = _value(assignment)
    return fields


def _modification(fields: Dict[str, Any]) -> DesignModification:
    for required in ('id', 'kind', 'target-action'):
        if required not in fields:
            raise DesignSpecError(f"Modification record without '{required}'")

    identifier = fields['id']
    if not isinstance(identifier, str):
        raise DesignSpecError(f"Modification id must be a symbol, got {identifier}")
    kind = ModificationKind.parse(fields['kind'] if isinstance(fields['kind'], str) else str(fields['kind']))

    removed_for = fields.get('removed-for')
    if removed_for is not None:
        if removed_for != _REMOVED_FOR.get(kind):
            raise DesignSpecError(f"Modification '{identifier}': removed-for '{removed_for}' does not match "
                                  f"kind {kind.value}")

    return DesignModification(
        id=identifier,
        kind=kind,
        target=_names(fields['target-action']),
        payload=frozenset(_names(fields.get('added-precondition', ()))),
        cost=_number('cost', fields.get('cost', '1')),
    )


def _seconds(key: str, value: Any) -> Optional[float]:
    if value in ('none', 'inf'):
        return None
    seconds = float(_number(key, value))
    if seconds <= 0:
        raise DesignSpecError(f"'{key}' must be positive")
    return seconds


def parse_design_spec(text: str, pair: Optional[ModelPair] = None) -> DesignSpec:
    """
    Parse a design space file.
    Args:
        text (str): the file content
        pair (ModelPair): when given, every modification must resolve in it
    Returns:
        spec (DesignSpec): modifications and objective, with defaults alpha=1, beta=0.25, kappa=0.25, gamma=0.9, T=1
    Raises:
        PddlSyntaxError: on malformed text
        DesignSpecError: on unknown kinds, fields or references, or out of range values
    """

    try:
        statements = _GRAMMAR.parse_string(text, parse_all=True)
    except pp.ParseException as error:
        raise PddlSyntaxError(f"Malformed design space: {error.msg}", error.lineno, error.col)

    try:
        return _build_spec(statements, pair)
    except DesignSpecError:
        raise
    except ValidationError as error:
        raise DesignSpecError(error.message)


def _build_spec(statements: pp.ParseResults, pair: Optional[ModelPair]) -> DesignSpec:
    weights = {'alpha': DEFAULT_ALPHA, 'beta': DEFAULT_BETA, 'kappa': DEFAULT_KAPPA}
    settings: Dict[str, Any] = {}
    modifications: List[DesignModification] = []
    for statement in statements:
        if 'record' in statement:
            name = statement['record']
            if name == 'weights':
                for key, value in _fields(statement, set(weights), name).items():
                    weights[key] = _number(key, value)
            elif name == 'modification':
                modifications.append(_modification(_fields(statement, _MODIFICATION_KEYS, name)))
            else:
                raise DesignSpecError(f"Unknown record '{name}'")
            continue

        key = statement['key']
        if key not in _TOP_LEVEL_KEYS:
            raise DesignSpecError(f"Unknown setting '{key}'")
        if key in settings:
            raise DesignSpecError(f"Setting '{key}' given twice")
        settings[key] = _value(statement)

    horizon = _number('horizon', settings.get('horizon', str(DEFAULT_HORIZON)))
    max_size = settings.get('max-design-size')
    spec = DesignSpec(
        modifications=tuple(modifications),
        weights=ObjectiveWeights(**weights),
        params=LongitudinalParams(_number('gamma', settings.get('gamma', str(DEFAULT_GAMMA))), horizon),
        time_limit=_seconds('time-limit-secs', settings['time-limit-secs'])
        if 'time-limit-secs' in settings else DEFAULT_TIME_LIMIT_SECS,
        planner_time_limit=_seconds('planner-time-limit-secs', settings['planner-time-limit-secs'])
        if 'planner-time-limit-secs' in settings else DEFAULT_PLANNER_TIME_LIMIT_SECS,
        max_design_size=int(_number('max-design-size', max_size)) if max_size is not None else None,
    )

    ids = [modification.id for modification in modifications]
    if len(ids) != len(set(ids)):
        raise DesignSpecError("Modification ids must be unique")
    if pair is not None:
        spec.validate(pair)

    return spec


def format_design_spec(spec: DesignSpec) -> str:
    """
    Text of a design space file that parses back to the same spec
    """

    def number(value) -> str:
        return str(Fraction(value))

    lines = [f"weights {{ alpha = {number(spec.weights.alpha)}, beta = {number(spec.weights.beta)}, "
             f"kappa = {number(spec.weights.kappa)} }}",
             f"gamma = {number(spec.params.gamma)}",
             f"horizon = {spec.params.horizon}"]
    if spec.time_limit is not None:
        lines.append(f"time-limit-secs = {spec.time_limit:g}")
    if spec.planner_time_limit is not None:
        lines.append(f"planner-time-limit-secs = {spec.planner_time_limit:g}")
    if spec.max_design_size is not None:
        lines.append(f"max-design-size = {spec.max_design_size}")

    for modification in spec.modifications:
        lines.append("modification {")
        lines.append(f"    id = {modification.id}")
        lines.append(f"    kind = {modification.kind.value}")
        lines.append(f"    target-action = ({' '.join(modification.target)})")
        if modification.payload:
            lines.append(f"    added-precondition = ({' '.join(sorted(modification.payload))})")
        if modification.kind in _REMOVED_FOR:
            lines.append(f"    removed-for = {_REMOVED_FOR[modification.kind]}")
        lines.append(f"    cost = {number(modification.cost)}")
        lines.append("}")

    return '\n'.join(lines) + '\n'
