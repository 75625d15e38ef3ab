"""Omni-sliding end-effector toolkit: kinematics, design envelope, simulator, UT scans."""

from ._core import (
    FileFormatError,
    MaterialPlate,
    ParameterSet,
    __version__,
    estimate_thickness,
    evaluate_constraints,
    feasible_force_interval,
    find_threshold,
    forward_kinematics,
    inverse_kinematics,
    lawnmower,
    rate_limit,
    run_mission,
    scan_mission,
    sweep,
    synthesize_ascan,
)

__all__ = [
    "FileFormatError",
    "MaterialPlate",
    "ParameterSet",
    "__version__",
    "estimate_thickness",
    "evaluate_constraints",
    "feasible_force_interval",
    "find_threshold",
    "forward_kinematics",
    "inverse_kinematics",
    "lawnmower",
    "rate_limit",
    "run_mission",
    "scan_mission",
    "sweep",
    "synthesize_ascan",
]
