"""Switched Volterra and Duffing systems: integration, periods, annuli and Poincare maps."""
from .annuli import (
    AngleWindows,
    Annulus,
    LinkedAnnuli,
    angle_windows,
    duffing_linked_rects,
    line_roots,
    linked_annuli,
    volterra_windows,
)
from .integrate import PhaseMap, PoincareMap, Trajectory, flow_points, integrate, poincare, poincare_orbit
from .periods import minimal_twist_time, orbit_period, reference_point, rotation_number, switching_thresholds
from .scans import duffing_scan
from .setups import DuffingSetup, VolterraSetup, duffing_setup, energy_drift, volterra_setup
from .systems import (
    DuffingParams,
    DuffingPhase,
    Phase,
    SwitchingSystem,
    VolterraParams,
    VolterraPhase,
    duffing_system,
    first_integral,
    volterra_system,
)

__all__ = [
    "AngleWindows",
    "Annulus",
    "DuffingParams",
    "DuffingPhase",
    "DuffingSetup",
    "LinkedAnnuli",
    "Phase",
    "PhaseMap",
    "PoincareMap",
    "SwitchingSystem",
    "Trajectory",
    "VolterraParams",
    "VolterraPhase",
    "VolterraSetup",
    "angle_windows",
    "duffing_linked_rects",
    "duffing_scan",
    "duffing_setup",
    "duffing_system",
    "energy_drift",
    "first_integral",
    "flow_points",
    "integrate",
    "line_roots",
    "linked_annuli",
    "minimal_twist_time",
    "orbit_period",
    "poincare",
    "poincare_orbit",
    "reference_point",
    "rotation_number",
    "switching_thresholds",
    "volterra_setup",
    "volterra_system",
]
