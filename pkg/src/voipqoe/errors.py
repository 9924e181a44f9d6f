"""Exception types shared across the package.

The command-line front end maps these onto its exit-code contract, so
raising the right class matters more than the message wording.
"""


class VoipQoeError(Exception):
    """Base class for all package-specific errors."""


class DomainError(VoipQoeError, ValueError):
    """An input lies outside the range a model or operation accepts."""


class FitError(VoipQoeError, ValueError):
    """A least-squares fit cannot be carried out on the given samples."""


class ConfigError(VoipQoeError, ValueError):
    """A codec profile or other configuration value is invalid."""


class DataValidationError(VoipQoeError, ValueError):
    """Input records failed validation.

    ``lines`` carries (line_number, message) pairs when the error came
    from a line-oriented source.
    """

    def __init__(self, message: str, lines: list[tuple[int, str]] | None = None):
        super().__init__(message)
        self.lines = lines or []
