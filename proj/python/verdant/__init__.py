"""Urban tree analytics and eco-routing engine."""

from ._core import (
    Engine,
    Snapshot,
    VerdantError,
    agb_to_co2e,
    camera_constant_from_calibration,
    camera_constant_from_exif,
    compute_agb,
    emissions_factor,
    hex_pack,
    ingest,
    load_snapshot,
    measure,
    optimal_speed,
    percentile,
    quantile_transform,
    save_snapshot,
    scale_factor,
)

__all__ = [
    "Engine",
    "Snapshot",
    "VerdantError",
    "agb_to_co2e",
    "camera_constant_from_calibration",
    "camera_constant_from_exif",
    "compute_agb",
    "emissions_factor",
    "hex_pack",
    "ingest",
    "load_snapshot",
    "measure",
    "optimal_speed",
    "percentile",
    "quantile_transform",
    "save_snapshot",
    "scale_factor",
]
