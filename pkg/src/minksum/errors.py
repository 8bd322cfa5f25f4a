"""Exception types shared across the package."""


class DimensionMismatchError(ValueError):
    """Operands live in objective spaces of different dimension."""


class CoordinateOverflowError(OverflowError):
    """A coordinate or a sum of coordinates would leave the signed 64-bit range."""


class ResourceLimitError(RuntimeError):
    """A configured resource cap was exceeded.

    Attributes
    ----------
    cap_name : str
        Which cap was hit (e.g. ``"provenance_cap"``).
    cap_value : int
        The configured limit.
    """

    def __init__(self, cap_name, cap_value, detail=""):
        self.cap_name = cap_name
        self.cap_value = cap_value
        msg = f"resource cap exceeded: {cap_name}={cap_value}"
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)


class GenerationCapError(ResourceLimitError):
    """Instance generation could not reach the target cardinality within the sample cap."""


class NodeLimitError(ResourceLimitError):
    """Exact search exceeded its node budget."""


class InvariantViolationError(RuntimeError):
    """An internal consistency check failed; indicates a bug, not bad input."""
