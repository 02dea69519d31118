"""
stretchchaos: numerical verification of stretching-along-paths chaos for
planar maps and Poincaré maps of periodically switched ODEs.
"""
__version__ = "1.0.0"

from .errors import StretchChaosError

__all__ = ["__version__", "StretchChaosError"]
