"""Exception hierarchy shared by all modules."""


class BEEError(Exception):
    """Base class for every error raised by gnnbee."""


class ParseError(BEEError):
    """A line of an input file could not be parsed."""

    def __init__(self, message, line_number=None):
        self.line_number = line_number
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)


class AlignmentError(BEEError):
    """Spans, tokens or parses do not line up."""


class SchemaError(BEEError):
    """A JSON record is missing a required field or has the wrong shape."""


class DanglingReferenceError(BEEError):
    """An event argument or trigger id does not resolve to a mention."""


class DepRangeError(ParseError):
    """A dependency HEAD points outside the sentence."""


class ShapeError(BEEError, ValueError):
    """Matrix dimensions are incompatible."""


class DecodeError(BEEError):
    """A tag is outside the tag vocabulary."""


class ContractError(BEEError):
    """A caller violated a documented precondition."""


class EncoderLengthError(BEEError):
    """A sentence exceeds the encoder's maximum input length."""


class MissingParseError(BEEError):
    """Graph mode was requested but a sentence has no dependency parse."""


class IncompatibleCheckpointError(BEEError):
    """A checkpoint cannot initialise the requested model."""

    def __init__(self, groups):
        self.groups = list(groups)
        super().__init__("incompatible parameter groups: " + ", ".join(self.groups))
