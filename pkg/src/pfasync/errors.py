"""Exception types shared across the package.

The CLI maps any PfasyncError to exit code 1; argparse usage problems keep
their conventional exit code 2.
"""


class PfasyncError(Exception):
    """Base class for all errors raised by this package."""


class InputError(PfasyncError):
    """A domain object or parameter is invalid (bad automaton, bad option combination)."""


class ParseError(PfasyncError):
    """A text payload (automaton file, DIMACS file, solver output) is malformed."""


class ResourceError(PfasyncError):
    """A hard resource cap was exceeded (e.g. exhaustive search beyond the state cap)."""


class IntegrityError(PfasyncError):
    """A result failed self-validation (model does not satisfy the formula, bad witness)."""


class ConfigError(PfasyncError):
    """The runtime environment is unusable (missing external solver executable)."""
