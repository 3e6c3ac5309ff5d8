"""Exception types raised by the library."""


class RkmodError(Exception):
    """Base class for all library errors."""


class SignatureMismatchError(RkmodError):
    """Two elements (or tables) over different algebra signatures were mixed."""


class SpaceMismatchError(RkmodError):
    """Vectors or operators from different module spaces were combined."""


class NotInvertibleError(RkmodError):
    """An algebra element failed the invertibility threshold.

    Carries the offending block index and its smallest singular value.
    """

    def __init__(self, block_index, smallest_sv, message=None):
        self.block_index = block_index
        self.smallest_sv = smallest_sv
        super().__init__(
            message
            or f"block {block_index} is not invertible "
            f"(smallest singular value {smallest_sv:.3e})"
        )


class NotInRangeError(RkmodError):
    """Interpolation targets are not in the range of the Gram matrix."""

    def __init__(self, residual):
        self.residual = residual
        super().__init__(f"targets not in the range of the Gram matrix (residual {residual:.3e})")


class NotAMultiplierError(RkmodError):
    """A symbol does not map the span into itself."""

    def __init__(self, point, residual):
        self.point = point
        self.residual = residual
        super().__init__(
            f"symbol is not a multiplier: worst point {point!r} (residual {residual:.3e})"
        )


class NotAFrameError(RkmodError):
    """A family's lower frame bound is not bounded away from zero."""

    def __init__(self, lower):
        self.lower = lower
        super().__init__(f"family is not a frame (lower bound {lower:.3e})")


class NoExtensionError(RkmodError):
    """Prescribed values on a set of uniqueness do not extend to a module element."""

    def __init__(self, residual):
        self.residual = residual
        super().__init__(f"values do not extend to the module (residual {residual:.3e})")


class NotCentralError(RkmodError):
    """An element required to be central is not."""


class InstanceError(RkmodError):
    """An instance file violates the input schema.

    ``location`` points at the offending field, e.g. "kernel.s1|s2.block 0".
    """

    def __init__(self, location, message):
        self.location = location
        super().__init__(f"{location}: {message}")
