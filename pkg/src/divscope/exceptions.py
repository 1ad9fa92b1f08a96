"""Exception hierarchy shared by every divscope module."""


class DivscopeError(Exception):
    """Base class for all errors raised by divscope."""


class EmptyInput(DivscopeError, ValueError):
    pass


class FastaFormatError(DivscopeError, ValueError):
    pass


class InvalidCharacter(DivscopeError, ValueError):
    def __init__(self, record_id, position, char=None):
        self.record_id = record_id
        self.position = position
        self.char = char
        msg = f"invalid character at position {position} of record {record_id!r}"
        if char is not None:
            msg += f": {char!r}"
        super().__init__(msg)


class DuplicateId(DivscopeError, ValueError):
    def __init__(self, record_id):
        self.record_id = record_id
        super().__init__(f"duplicate read id {record_id!r}")


class SampleTooLarge(DivscopeError, ValueError):
    pass


class EmptySequence(DivscopeError, ValueError):
    pass


class BadScoring(DivscopeError, ValueError):
    pass


class AlignmentError(DivscopeError):
    """An alignment failure inside a matrix fill, annotated with the cell."""

    def __init__(self, i, j, cause):
        self.i = i
        self.j = j
        self.cause = cause
        super().__init__(f"alignment ({i}, {j}) failed: {cause}")


class BadFormat(DivscopeError, ValueError):
    pass


class Truncated(DivscopeError, ValueError):
    pass


class NotSymmetric(DivscopeError, ValueError):
    pass


class RankTooLarge(DivscopeError, ValueError):
    pass


class ZeroMatrix(DivscopeError, ValueError):
    pass


class DimensionMismatch(DivscopeError, ValueError):
    pass


class BadGap(DivscopeError, ValueError):
    pass


class ShapeMismatch(DivscopeError, ValueError):
    pass


class MissingLabel(DivscopeError, KeyError):
    def __init__(self, record_id):
        self.record_id = record_id
        super().__init__(f"reference read {record_id!r} has no species label")

    def __str__(self):
        return self.args[0]


class JoinError(DivscopeError, ValueError):
    pass


class BadAxis(DivscopeError, ValueError):
    pass


class StageError(DivscopeError):
    """Pipeline failure tagged with the stage that raised it."""

    def __init__(self, stage, cause):
        self.stage = stage
        self.cause = cause
        super().__init__(f"[{stage}] {cause}")
