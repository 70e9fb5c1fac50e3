"""
Utilities functions used to perform input validation, etc.
"""

from typing import Iterable, List


class ValidationError(Exception):

    def __init__(self, message: str):
        self.message = message
        super(ValidationError, self).__init__(message)


class PddlSyntaxError(ValidationError):

    def __init__(self, message: str, line: int, column: int):
        self.line = line
        self.column = column
        super(PddlSyntaxError, self).__init__(f"{message} (line {line}, column {column})")


class PddlSemanticError(ValidationError):
    pass


class DesignSpecError(ValidationError):
    pass


class NonUnitCostError(ValidationError):
    pass


class PlanValidationError(ValidationError):
    pass


def require_not_none(to_be_validated, failure_message: str = "Must be specified but was None"):
    if to_be_validated is None:
        raise ValidationError(message=failure_message)


def require_not_empty(to_be_validated, failure_message: str = "Must not be empty"):
    if len(to_be_validated) == 0:
        raise ValidationError(message=failure_message)


def require_in_list(item, valid_items: List):
    if item not in valid_items:
        failure_message = f"Item '{item}' not in valid items list: {', '.join(str(i) for i in valid_items)}"
        raise ValidationError(message=failure_message)


def require_subset(items: Iterable, universe, failure_message: str = "Unknown items"):
    unknown = sorted(set(items) - set(universe))
    if unknown:
        raise ValidationError(message=f"{failure_message}: {', '.join(str(i) for i in unknown)}")


def require_in_range(value, low, high, name: str = "value"):
    if not low <= value <= high:
        raise ValidationError(message=f"{name} must lie in [{low}, {high}] but was {value}")


def require_non_negative(value, name: str = "value"):
    if value < 0:
        raise ValidationError(message=f"{name} must be non-negative but was {value}")


class PlanningError(Exception):

    def __init__(self, message: str):
        self.message = message
        super(PlanningError, self).__init__(message)


class EnumerationLimitError(PlanningError):
    pass


class EvaluationFailedError(PlanningError):

    def __init__(self, message: str, task_index: int = None):
        self.task_index = task_index
        super(EvaluationFailedError, self).__init__(message)
