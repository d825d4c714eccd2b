"""Exception hierarchy shared by the library and the CLI."""


class PDecompError(Exception):
    """Base class for all library errors."""


class DimensionError(PDecompError, ValueError):
    """Operands live in spaces of incompatible dimension."""


class ContainmentError(PDecompError, ValueError):
    """A subspace was expected to contain another one and does not."""


class StructureError(PDecompError, ValueError):
    """A module, shape or path is malformed (wrong grid, wrong matrix shapes)."""


class OrderError(PDecompError, ValueError):
    """Points are not comparable in the required direction."""


class SupportError(PDecompError, ValueError):
    """A point lies outside the support of the shape it is queried with."""


class NotExactError(PDecompError):
    """The input module fails the commutativity or exactness check."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class InconsistencyError(PDecompError, RuntimeError):
    """An internal self-check failed; either the input slipped past validation or there is a bug."""


class CertificationError(PDecompError):
    """The block-decomposition certificate could not be verified."""


class SchemaError(PDecompError, ValueError):
    """A file does not follow the expected JSON schema."""
