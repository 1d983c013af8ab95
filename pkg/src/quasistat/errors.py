"""Exception hierarchy shared by every quasistat module."""


class QuasistatError(Exception):
    """Base class for all errors raised by quasistat."""


# qset kernel


class UniverseMismatch(QuasistatError):
    """Two objects from different universes were combined or compared."""


class IdentityUndefined(QuasistatError):
    """Identity was asked of an m-atom, or of a qset with m-atom content."""


class CardinalOutOfRange(QuasistatError):
    pass


class LimitExceeded(QuasistatError):
    """A configured size limit (exponent, enumeration, nesting) was hit."""


class PurityRequired(QuasistatError):
    pass


class NotIndistinguishable(QuasistatError):
    pass


class NotMember(QuasistatError):
    pass


# particle systems


class StructureError(QuasistatError):
    """The system is malformed, as opposed to failing one of Q1-Q10."""


class BinningIncomplete(QuasistatError):
    pass


class ParseError(QuasistatError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        where = f"line {line}: " if line is not None else ""
        super().__init__(where + message)


# maximum entropy solver


class DomainError(QuasistatError):
    """Occupations outside the open domain where the objective is defined."""


class PoleError(QuasistatError):
    """Bose-Einstein occupation evaluated at or past its pole.

    ``bin_index`` names the offending level when known.
    """

    def __init__(self, message: str, bin_index: int | None = None):
        self.bin_index = bin_index
        super().__init__(message)


class Infeasible(QuasistatError):
    pass


class NoConvergence(QuasistatError):
    def __init__(self, message: str, best=None):
        self.best = best
        super().__init__(message)
