"""Local-redesign optimizer for airspace sectorizations."""

from ._sectoropt import (
    ContractViolation,
    Error,
    Evaluator,
    GeometryError,
    InputError,
    Subdivision,
    Trajectory,
    default_config,
    generate_scenario,
    load_tracks,
    optimize,
    penalty,
    render_svg,
    run_cli,
    save_tracks,
    sector_traffic,
    sweep_seed,
)

__all__ = [
    "ContractViolation",
    "Error",
    "Evaluator",
    "GeometryError",
    "InputError",
    "Subdivision",
    "Trajectory",
    "default_config",
    "generate_scenario",
    "load_tracks",
    "optimize",
    "penalty",
    "render_svg",
    "run_cli",
    "save_tracks",
    "sector_traffic",
    "sweep_seed",
]
