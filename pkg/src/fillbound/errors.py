"""Exception hierarchy shared across the package.

The three leaf classes map onto the CLI exit codes: structural and domain
problems exit with 2, capacity problems with 3.  I/O failures are reported
with the interpreter's own OSError family and exit with 4.
"""


class FillboundError(Exception):
    """Base class for all library errors."""


class StructuralError(FillboundError):
    """Malformed data: invalid indices, inconsistent dimensions, bad labels."""


class DomainError(FillboundError):
    """Well-formed data outside an operation's mathematical domain."""


class CapacityError(FillboundError):
    """An explicit enumeration or search budget was exceeded.

    When a search was interrupted, ``incumbent`` carries the best solution
    found so far (not certified optimal) and ``incumbent_cost`` its value.
    """

    def __init__(self, message, incumbent=None, incumbent_cost=None):
        super().__init__(message)
        self.incumbent = incumbent
        self.incumbent_cost = incumbent_cost
