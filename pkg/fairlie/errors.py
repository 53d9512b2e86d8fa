from typing import TYPE_CHECKING, List

if TYPE_CHECKING:
    from fairlie.models import Violation


class FairlieError(ValueError):
    """Base class for input and parameter errors reported with exit status 1."""


class DimensionError(FairlieError):
    pass


class ParameterError(FairlieError):
    pass


class SearchSpaceTooLarge(FairlieError):
    def __init__(self, n_agents: int, n_resources: int, budget: int):
        self.size = n_agents ** n_resources
        super().__init__(
            f"Exact search space {n_agents}^{n_resources} = {self.size} exceeds budget {budget}"
        )


class InstanceValidationError(FairlieError):
    def __init__(self, violations: List["Violation"]):
        self.violations = violations
        lines = "; ".join(v.message for v in violations[:5])
        more = f" (+{len(violations) - 5} more)" if len(violations) > 5 else ""
        super().__init__(f"{len(violations)} constraint violation(s): {lines}{more}")


class InstanceSyntaxError(FairlieError):
    def __init__(self, line: int, column: int, message: str):
        self.line = line
        self.column = column
        super().__init__(f"line {line}, column {column}: {message}")


class RenormalizationError(FairlieError):
    pass


class ScenarioMismatchError(FairlieError):
    pass
