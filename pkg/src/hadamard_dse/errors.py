class HadamardDseError(Exception):
    """Base class for errors raised by this package."""


class ResourceLimitError(HadamardDseError):
    pass


class ConfigurationError(HadamardDseError, ValueError):
    pass


class InfeasibleError(HadamardDseError):
    """No candidate satisfies the requirements.

    ``binding`` names the constraint that eliminated the last candidates
    (``"sndr"``, ``"rate"`` or ``"empty"``).
    """

    def __init__(self, message, binding):
        super().__init__(message)
        self.binding = binding


class SurveySchemaError(HadamardDseError, ValueError):
    pass


class SurveyRowError(HadamardDseError, ValueError):
    def __init__(self, message, line):
        super().__init__(f"line {line}: {message}")
        self.line = line
