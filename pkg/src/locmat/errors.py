"""Exception hierarchy shared by the kernel modules."""


class LocmatError(Exception):
    """Base class for all errors raised by :mod:`locmat`."""


class FieldMismatch(LocmatError, ValueError):
    pass


class ShapeMismatch(LocmatError, ValueError):
    pass


class IndexOutOfRange(LocmatError, IndexError):
    """A matrix-unit label exceeds the size of its site."""


class NotInvertible(LocmatError, ArithmeticError):
    pass


class NotInCentralizer(LocmatError, ValueError):
    pass


class NotIdempotent(LocmatError, ValueError):
    pass


class CharacteristicDividesSize(LocmatError, ArithmeticError):
    pass


class ShiftOutOfRange(LocmatError, ValueError):
    pass


class ShapeMismatchAtShiftedSite(LocmatError, ValueError):
    pass


class SupportError(LocmatError, ValueError):
    """Support of an element is not contained in the required site set."""


class WrongSupport(SupportError):
    """A site-local input is supported outside its own site."""


class NotADerivation(LocmatError, ValueError):
    pass


class NotSparse(LocmatError, ValueError):
    pass


class InvalidEndomorphism(LocmatError, ValueError):
    pass


class InvalidRestriction(InvalidEndomorphism):
    pass


class SupportExceedsSource(LocmatError, ValueError):
    pass


class NoConjugatorFound(LocmatError, RuntimeError):
    pass


class NotFinitaryResult(LocmatError, ValueError):
    pass


class ParseError(LocmatError, ValueError):
    def __init__(self, message, line=1, column=1):
        super().__init__(f"{message} (line {line}, column {column})")
        self.line = line
        self.column = column
