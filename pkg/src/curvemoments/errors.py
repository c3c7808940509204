"""Exception hierarchy shared by all engine modules."""


class EngineError(Exception):
    """Base class for engine-specific failures."""


class NonIncreasingExponents(EngineError):
    """Curve exponents must be strictly increasing."""


class NonPositiveExponent(EngineError):
    """Curve exponents must be positive integers."""


class DimensionMismatch(EngineError):
    """Torus point or grid dimension does not match the curve."""


class IntegerOverflow(EngineError):
    """A frequency or lattice key would exceed the configured integer width."""


class DepthTooLarge(EngineError):
    """Predicted convolution support exceeds the memory budget."""


class OracleTooLarge(EngineError):
    """Brute-force enumeration exceeds the oracle scale guard."""


class GridTooLarge(EngineError):
    """Grid does not fit the memory budget, or fails exactness certification."""


class InadmissibleShift(EngineError):
    """Shift vector is nonzero at a curve exponent."""


class EnumerationTooLarge(EngineError):
    """Admissible shift enumeration exceeds the configured cap."""


class OddExponentUnsupported(EngineError):
    """Analytic moment gradients require an even integer exponent."""


class InsufficientRows(EngineError):
    """Exponent fitting needs at least three comparable rows."""


class ConfigInvalid(EngineError):
    """Sweep or CLI configuration failed validation."""


class IoFailure(EngineError):
    """Report emission or parsing failed."""
