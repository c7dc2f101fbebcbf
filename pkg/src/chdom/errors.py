"""Exception hierarchy shared by every chdom module."""


class ChdomError(Exception):
    """Base class for all errors raised by chdom."""


# linear algebra kernel
class DegeneratePair(ChdomError):
    pass


class ZeroMatrix(ChdomError):
    pass


class NonFinite(ChdomError):
    pass


class Singular(ChdomError):
    pass


# complex hyperbolic geometry
class ZeroVector(ChdomError):
    pass


class NotInterior(ChdomError):
    pass


class NotNull(ChdomError):
    pass


class DegenerateTriple(ChdomError):
    pass


class NotIsometry(ChdomError):
    pass


# triangles and Z-invariants
class ForbiddenInvariant(ChdomError):
    pass


class NotRealTriangle(ChdomError):
    pass


class Degenerate(ChdomError):
    pass


class NonPositiveModulus(ChdomError):
    pass


class DivisionByZero(ChdomError, ZeroDivisionError):
    """A denominator factor of the Z-invariant vanished."""


# triangulations and words
class ParseError(ChdomError):
    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f"line {line}"
            if column is not None:
                where += f", column {column}"
            where += ": "
        super().__init__(where + message)


class TopologyError(ChdomError):
    pass


class NotBipartite(ChdomError):
    def __init__(self, message, witness=()):
        self.witness = tuple(witness)
        super().__init__(f"{message} (odd dual cycle: {list(self.witness)})")


class NotClosed(ChdomError):
    pass


class NotAdjacent(ChdomError):
    pass


class UTurn(ChdomError):
    pass


class BadPunctureIndex(ChdomError):
    pass


# representations
class UnknownEdge(ChdomError):
    pass


class MismatchedTriangulation(ChdomError):
    pass


class PreconditionViolated(ChdomError):
    pass


class BadConfig(ChdomError):
    pass
