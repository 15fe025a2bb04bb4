"""Python bindings for the strokebench performance-benchmarking pipeline."""

from strokebench._core import (
    EkfConfig,
    StrokebenchError,
    TableDims,
    affinity,
    ball_speed,
    bounce_x,
    bounce_y,
    distance_to_ideal,
    eigengaps,
    error_quat,
    estimate_orientation,
    height_ratio,
    intersect_lines,
    kmeans,
    net_clearance,
    normalized_laplacian,
    quat_multiply,
    quat_to_euler,
    rbf_score,
    relative_orientation,
    run_pipeline,
    select_benchmark,
    sigma_sweep,
    symmetric_eigenvalues,
    tsne_embed,
)

__all__ = [
    "EkfConfig",
    "StrokebenchError",
    "TableDims",
    "affinity",
    "ball_speed",
    "bounce_x",
    "bounce_y",
    "distance_to_ideal",
    "eigengaps",
    "error_quat",
    "estimate_orientation",
    "height_ratio",
    "intersect_lines",
    "kmeans",
    "net_clearance",
    "normalized_laplacian",
    "quat_multiply",
    "quat_to_euler",
    "rbf_score",
    "relative_orientation",
    "run_pipeline",
    "select_benchmark",
    "sigma_sweep",
    "symmetric_eigenvalues",
    "tsne_embed",
]
