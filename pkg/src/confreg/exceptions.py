"""Exception hierarchy shared across the package."""


class ConfregError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(ConfregError, ValueError):
    """A numeric argument violates its contract (non-finite, probability out
    of range, non-positive scale, inverted interval, ...)."""


class BracketError(ConfregError, ValueError):
    """Root bracketing failed: the function does not change sign on [lo, hi]."""


class ParameterError(ConfregError, ValueError):
    """A parameter value lies outside the model's parameter space."""


class InfeasibleConstructionError(ConfregError):
    """The disjoint acceptance-set construction cannot place the required
    probability mass (the counterexample regime condition fails)."""


class DegenerateEvidenceError(ConfregError):
    """Every mixture component assigns zero likelihood to the observation."""


class ConfigError(ConfregError, ValueError):
    """Malformed experiment configuration or command-line usage."""
