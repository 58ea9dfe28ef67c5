"""Exception hierarchy shared across the package.

The CLI maps these onto exit codes (config -> 2, data/io -> 3,
overflow -> 4); the HTTP service maps them onto status codes.
"""


class LadkitError(Exception):
    """Base class for all package errors."""


class ConfigError(LadkitError):
    """Invalid or unsupported configuration (bad enum value, look_back < 2, ...)."""


class ContractError(LadkitError):
    """A caller broke an operation precondition (out-of-order timestamps,
    window length mismatch, labels out of range)."""


class ParseError(LadkitError):
    """Malformed input file. Carries enough context to locate the problem."""

    def __init__(self, message, path=None, line=None, key=None):
        parts = [message]
        if path is not None:
            parts.append(f"path={path}")
        if line is not None:
            parts.append(f"line={line}")
        if key is not None:
            parts.append(f"key={key}")
        super().__init__(": ".join(str(p) for p in parts))
        self.path = path
        self.line = line
        self.key = key


class NumericOverflowError(LadkitError):
    """A non-finite value appeared during model arithmetic."""

    def __init__(self, message, step=None):
        if step is not None:
            message = f"{message} (step {step})"
        super().__init__(message)
        self.step = step
