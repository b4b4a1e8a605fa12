"""Exception hierarchy shared by all modules."""


class VecpenError(ValueError):
    """Base class for every error raised by vecpen."""


class InvalidInputError(VecpenError):
    pass


class DimensionMismatchError(InvalidInputError):
    pass


class EmptyInteriorError(VecpenError):
    """A strict relation or interior point was requested for a cone without interior."""


class UnsupportedRepresentationError(VecpenError):
    pass


class InvalidLiftError(VecpenError):
    """The lifting direction is not an interior point of the base cone."""


class EmptyFamilyError(VecpenError):
    pass


class InconclusiveError(VecpenError):
    """A sampled checker found nothing to test."""


class SchemaError(InvalidInputError):
    """Instance document does not conform to the file format.

    The message always starts with the location of the offending field.
    """

    def __init__(self, location, message):
        self.location = location
        super().__init__(f"{location}: {message}")
