"""
S-expression reader shared by the domain and problem parsers
"""

from typing import List, Union

import pyparsing as pp

from explicable_design.utils import PddlSyntaxError

SExpr = Union[str, List['SExpr']]


def _build_grammar() -> pp.ParserElement:
    token = pp.Word(pp.printables, exclude_chars='();')
    nested = pp.Forward()
    nested <<= pp.Group(pp.Suppress('(') + pp.ZeroOrMore(token | nested) + pp.Suppress(')'))

    document = pp.ZeroOrMore(nested)
    document.ignore(';' + pp.rest_of_line)
    return document


_GRAMMAR = _build_grammar()


def read_sexpressions(text: str) -> List[SExpr]:
    """
    Read every top level s-expression of a text. Symbols are lower cased, comments start with ';'.
    Raises:
        PddlSyntaxError: with the line and column where reading failed
    """

    try:
        result = _GRAMMAR.parse_string(text.lower(), parse_all=True)
    except pp.ParseException as error:
        raise PddlSyntaxError(f"Malformed expression: {error.msg}", error.lineno, error.col)

    return result.as_list()


def read_sexpression(text: str) -> List[SExpr]:
    """
    Read a text holding exactly one s-expression
    """

    expressions = read_sexpressions(text)
    if len(expressions) != 1:
        raise PddlSyntaxError(f"Expected one top level expression, found {len(expressions)}", 1, 1)
    return expressions[0]
