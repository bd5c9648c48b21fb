"""Exception hierarchy shared by the library and the CLI."""


class CantorError(Exception):
    """Base class for all library errors."""


class SpecValidationError(CantorError, ValueError):
    """A sequence document failed validation.

    ``field`` names the offending location, e.g. ``tail.pattern[1].q``.
    """

    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field


class NonRationalEntry(SpecValidationError):
    pass


class OutOfRange(SpecValidationError):
    pass


class EmptyTailPattern(SpecValidationError):
    pass


class DecayDenominatorNonpositive(SpecValidationError):
    pass


class DepthTooLarge(CantorError, ValueError):
    pass


class InvalidSampling(CantorError, ValueError):
    pass


class ToleranceUnreachable(CantorError):
    """Depth cap reached before the distance bracket met the tolerance."""

    def __init__(self, bracket):
        super().__init__(
            f"tolerance not reached at depth {bracket.depth}: "
            f"[{bracket.lo!r}, {bracket.hi!r}]"
        )
        self.bracket = bracket


class GeometryError(CantorError, ValueError):
    pass


class SameHalfPlaneViolation(GeometryError):
    pass


class CoincidentPoints(GeometryError):
    pass


class ParameterOutOfRange(GeometryError):
    pass


class PointOnSet(CantorError):
    """A sampled curve point lies on the Cantor set (within tolerance)."""

    def __init__(self, point, bracket):
        super().__init__(f"curve meets the set near {point!r} (dist <= {bracket.hi:.3g})")
        self.point = point
        self.bracket = bracket


class NotUniform(CantorError):
    pass


class PointNotInDomain(CantorError, ValueError):
    pass


class VerificationFailed(CantorError):
    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class SpecIsUniform(CantorError):
    pass


class NoSuchM(CantorError):
    pass


class CutoffTooShallow(CantorError):
    pass
