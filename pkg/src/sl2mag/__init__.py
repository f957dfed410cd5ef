"""Contact magnetic trajectories on SL(2,R) with its hyperbolic Sasakian metric."""

from . import geometry, homogeneous, hopf_tube, hyperbolic, lie_core, periodicity, trajectories
from .errors import Sl2MagError

__all__ = [
    "Sl2MagError",
    "geometry",
    "homogeneous",
    "hopf_tube",
    "hyperbolic",
    "lie_core",
    "periodicity",
    "trajectories",
]
__version__ = "0.1.0"
