"""Exception types shared across the package."""


class UturanError(Exception):
    pass


class InvalidQuery(UturanError, ValueError):
    """Arguments violate an operation's precondition."""


class CapExceeded(UturanError):
    """An exhaustive search was requested above its configured size cap."""


class StructureError(UturanError):
    """Input hypergraph lacks the structure an operation requires."""


class GeneratorBug(UturanError):
    """A generated object failed a property it holds by construction."""
