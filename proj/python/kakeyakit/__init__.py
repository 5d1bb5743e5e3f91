"""Discrete Kakeya sets: rasterization, cut-and-move, difference sets and zoom-outs."""

from ._kakeyakit import (
    InvalidInput,
    ball_cells,
    box_dimensions,
    canonicalize_direction,
    difference_count,
    fan64_endpoints,
    figure_sides,
    hausdorff,
    lbd_experiment,
    packing_count,
    quantize_distance,
    rasterize_segments,
    run_cli,
    salem_probe,
    translated_union_count,
    trivial_bound,
    zoom_profile,
)

__all__ = [
    "InvalidInput",
    "ball_cells",
    "box_dimensions",
    "canonicalize_direction",
    "difference_count",
    "fan64_endpoints",
    "figure_sides",
    "hausdorff",
    "lbd_experiment",
    "packing_count",
    "quantize_distance",
    "rasterize_segments",
    "run_cli",
    "salem_probe",
    "translated_union_count",
    "trivial_bound",
    "zoom_profile",
]
