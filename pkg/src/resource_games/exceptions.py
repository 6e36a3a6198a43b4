class ResourceGameError(Exception):
    """Base exception for resource game errors."""
    pass

class SemiringError(ResourceGameError):
    """Raised when semiring values are misused or malformed."""
    pass

class ParseError(ResourceGameError):
    """Raised when a model, run or strategy file cannot be read."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)

class ValidationError(ResourceGameError):
    """Raised when a parsed object violates a semantic rule."""
    pass

class UnsupportedModelError(ResourceGameError):
    """Raised when an operation does not support the given model."""
    pass

class StrategyError(ResourceGameError):
    """Raised when strategy inputs are inconsistent."""
    pass

class UndefinedStrategyError(StrategyError):
    """Raised when a strategy is asked to move outside its domain."""

    def __init__(self, state: str, memory, message: str | None = None):
        self.state = state
        self.memory = memory
        super().__init__(message or f"strategy undefined at ({state},{memory})")

class UnfoldLimitError(ResourceGameError):
    """Raised when unfolding a strategy exceeds its node budget.

    ``reached`` lists the configurations met before the budget ran out.
    """

    def __init__(self, message: str, reached: tuple = ()):
        super().__init__(message)
        self.reached = reached

class OracleError(ResourceGameError):
    """Raised when an oracle refuses a model."""
    pass
