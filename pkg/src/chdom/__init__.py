"""Complex hyperbolic surface-group representations bent along ideal triangulations.

Modules
-------
cx3      3x3 complex linear algebra for the signature (2,1) form
chgeom   points, boundary points and isometry classification
zgeom    real ideal triangles, Z-invariants and holonomy blocks
surface  triangulations, dual walks and their words
repdom   bent representations and domination checks
cli      the ``chdom`` command
"""

__version__ = "0.1.0"

from . import chgeom, cx3, repdom, surface, zgeom  # noqa: E402
from .kernels import BACKEND  # noqa: E402

__all__ = ["BACKEND", "__version__", "chgeom", "cx3", "repdom", "surface", "zgeom"]
