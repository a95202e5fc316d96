"""
Exception hierarchy for the lab.

Everything raised on purpose derives from ``LabError`` so the CLI can map it
to exit code 1 with a single-line diagnostic.
"""


class LabError(Exception):
    """Base class for all expected failures."""


class StructuralError(LabError, ValueError):
    """Shapes, grounds or labels do not fit together."""


class ValidationError(LabError, ValueError):
    """A kernel or subspace fails its numerical invariants."""


class DomainError(LabError, ValueError):
    """A parameter is outside its admissible range."""


class ImpossibleEventError(DomainError):
    """Conditioning on an event of (numerically) zero probability."""


class SingularBaseError(DomainError):
    """A Kirchhoff system was posed on a dependent set."""


class CapacityError(LabError, ValueError):
    """An enumeration or solver size cap was exceeded."""


class FileFormatError(LabError, ValueError):
    """An input file is malformed."""


class CommandLineError(LabError):
    """Bad command-line syntax."""


class InternalConsistencyError(LabError, RuntimeError):
    """Two independent computation routes disagree beyond tolerance."""
