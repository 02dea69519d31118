"""Periodic points realizing itineraries, and chaos certificates."""
from .certificate import ChaosCertificate, chaos_certificate, flag_duplicates, primitive_itineraries
from .covering import check_coverings, covering_periodic_point_1d, nested_interval
from .newton import NewtonSettings, feasible_seeds, follows, newton_periodic_point_2d
from .results import ORBIT_CSV_HEADER, PeriodicOrbitResult

__all__ = [
    "ORBIT_CSV_HEADER",
    "ChaosCertificate",
    "NewtonSettings",
    "PeriodicOrbitResult",
    "chaos_certificate",
    "check_coverings",
    "covering_periodic_point_1d",
    "feasible_seeds",
    "flag_duplicates",
    "follows",
    "newton_periodic_point_2d",
    "nested_interval",
    "primitive_itineraries",
]
