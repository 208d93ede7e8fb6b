"""Grasp dataset augmentation: geometry, grasp metrics and the latent model."""

from ._graspforge import (
    ConfigError,
    DataError,
    Model,
    ferrari_canny,
    graspness,
    interpolate,
    is_watertight,
    linear_percentile,
    load_mesh,
    marching_cubes,
    mesh_volume,
    rarity,
    save_mesh,
    select_high_scoring,
    sha256_file,
    smooth_mesh,
    toy_shape,
    voxelize,
)

__all__ = [
    "ConfigError",
    "DataError",
    "Model",
    "ferrari_canny",
    "graspness",
    "interpolate",
    "is_watertight",
    "linear_percentile",
    "load_mesh",
    "marching_cubes",
    "mesh_volume",
    "rarity",
    "save_mesh",
    "select_high_scoring",
    "sha256_file",
    "smooth_mesh",
    "toy_shape",
    "voxelize",
]
