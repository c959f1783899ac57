"""Exception hierarchy.

Failed mathematical checks are reported as data (report objects with an
``ok`` flag). Exceptions are reserved for inputs the engine cannot act on.
"""


class JordanPlaneError(Exception):
    """Base class for every error raised by the engine."""


class ScalarError(JordanPlaneError):
    """Malformed scalar text, division by zero, conductor mismatch."""


class BraidingError(JordanPlaneError):
    """A braiding tensor that is malformed or not invertible."""


class YDError(JordanPlaneError):
    """Invalid groups, characters, derivations or YD-triples."""


class ElementError(JordanPlaneError):
    """Malformed or out-of-range elements of T(V) or T(V)#kG."""


class DegreeCapError(JordanPlaneError):
    """A requested degree exceeds the configured or memory-derived cap."""


class RewriteError(JordanPlaneError):
    """A relation that cannot be oriented, or a degree beyond the bound."""


class LiftingError(JordanPlaneError):
    """Lambda constraint violations and requests for the wrong case."""


class ConfigError(JordanPlaneError):
    """Unusable run configuration."""
