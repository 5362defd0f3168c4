"""fillbound: certified homological fillings of integer 1-cycles.

Library layout:

- ``chains``   simplicial complexes, integer chains, boundaries, mass
- ``intlin``   exact integer linear algebra and small-solution certificates
- ``filling``  combinatorial fillings, minimum-mass fills, HF1 profiling
- ``geom``     metric complexes, covers, nerve/geodesic-graph pipeline
- ``cli``      command line entry points and file formats
"""

from .errors import CapacityError, DomainError, FillboundError, StructuralError

__version__ = "0.1.0"

__all__ = [
    "CapacityError",
    "DomainError",
    "FillboundError",
    "StructuralError",
    "__version__",
]
