"""Exception hierarchy shared by every module of the package."""


class IETError(Exception):
    """Base class for all errors raised by ietgroup."""


class ContextMismatch(IETError):
    pass


class AmbiguousSign(IETError):
    """Interval refinement hit the precision cap without separating from zero."""


class NotInSpan(IETError):
    pass


class AlreadyInSpan(IETError):
    pass


class NotRepresentable(IETError):
    """A product or quotient of two scalars has no coordinates in the context."""


class ZeroVector(IETError):
    pass


class ZeroScalar(IETError):
    pass


class NotAntisymmetric(IETError):
    pass


class NonPositiveLength(IETError):
    pass


class InvalidPermutation(IETError):
    pass


class OutOfDomain(IETError):
    pass


class DomainMismatch(IETError):
    pass


class NotInKX(IETError):
    pass


class NotInG1(IETError):
    pass


class CapExceeded(IETError):
    pass


class NotCellAligned(IETError):
    pass


class DocumentError(IETError):
    """Base class for problems with an input document."""


class DocumentSyntaxError(DocumentError):
    pass


class SchemaError(DocumentError):
    pass


class InvariantViolation(DocumentError):
    pass
