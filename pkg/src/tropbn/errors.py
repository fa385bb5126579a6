import typing as ty


class TropBNError(Exception):
    pass


class ParameterError(TropBNError, ValueError):
    """Invalid numeric parameters (genus, separation factor, shapes, degrees)."""
    pass


class StructureError(TropBNError, ValueError):
    """A malformed object: point off its edge, discontinuous or
    non-integer-slope PL function, mismatched chains, not a break divisor."""
    pass


class ConstructionError(TropBNError):
    """An invariant of the independence construction failed.

    ``k`` is the loop index at which the failure was detected, if any.
    """
    def __init__(self, message: str, k: int | None = None):
        if k is not None:
            message = f"loop {k}: {message}"
        super().__init__(message)
        self.k = k


class VerificationError(TropBNError):
    def __init__(self, message: str, labels: ty.Sequence[str] = ()):
        super().__init__(message)
        self.labels = tuple(labels)


class PipelineError(TropBNError):
    """A pipeline stage disagrees with a recorded polynomial."""
    def __init__(self, message: str, terms: ty.Sequence[str] = ()):
        if terms:
            message = f"{message}: {', '.join(terms)}"
        super().__init__(message)
        self.terms = tuple(terms)
