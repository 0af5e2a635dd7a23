"""Exception types raised across the package."""


class DomainError(ValueError):
    """Argument outside the domain where a function is defined."""


class ResourceError(ValueError):
    """Requested table or row exceeds a configured size cap."""


class ConfigError(ValueError):
    """Invalid experiment configuration.

    ``line`` is the 1-based line in the source document when known.
    """

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ZeroLinkSeed(ConfigError):
    pass


class ZeroFitnessSeed(ConfigError):
    pass


class InsufficientSample(ValueError):
    """Too few observations for a statistic to be meaningful."""


class InsufficientThetaDiversity(InsufficientSample):
    pass
