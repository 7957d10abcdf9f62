"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class ConfigurationError(ValueError):
    """A run or grid configuration is invalid."""


class ProfileFormatError(ValueError):
    """A stored profile file cannot be parsed."""


class CurvatureDegenerateError(RuntimeError):
    """Principal curvatures left the positive cone (or F hit its floor).

    Carries the offending node index when known.
    """

    def __init__(self, message, node=None):
        super().__init__(message)
        self.node = node
