"""Exception types shared across the package."""


class MnnsError(Exception):
    """Base class for all package-specific failures."""


class ExponentError(MnnsError, ValueError):
    """An exponent vector violates a hypothesis (range, identity, ordering)."""


class GridError(MnnsError, ValueError):
    """Grid construction or compatibility failure."""


class FieldError(MnnsError, ValueError):
    """Field construction failure (shape, finiteness) or degenerate data."""


class FormatError(MnnsError, ValueError):
    """Malformed MNF1 file or serialized record."""


class ConfigError(MnnsError, ValueError):
    """Experiment configuration failed validation (usage error, exit code 2)."""


class TailMassError(MnnsError):
    """Too much mass near the domain boundary for a faithful truncated-domain
    operation."""


class UnderResolvedError(MnnsError):
    """Requested evolution time is below the grid resolution limit (t < h^2)."""


class DomainEscapeError(MnnsError):
    """Evolved or rescaled support leaves the sampled domain."""


class CflError(MnnsError):
    """Time step too large for the grid and current velocity."""


class ConvergenceError(MnnsError):
    """An iteration or horizon search failed to converge."""


class GuardError(MnnsError):
    """Smallness guard rejected the data before iterating."""
