"""Exceptions shared across the package."""


class ConfigError(Exception):
    """Bad user input: flags, config files, missing or corrupt data."""


class NumericalFailure(Exception):
    """A numerical routine produced NaN/Inf or failed to make progress.

    The optional ``trace`` attribute carries whatever partial energy
    history was accumulated before the failure.
    """

    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = trace
