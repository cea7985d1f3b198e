"""Disk maps onto Jordan domains, disk geometry and distortion checks."""
from .checks import (ConformalConstantsReport, constants_grid, derivative_ratio_check, disk_boundary_map, eta_hat,
                     koebe_check, lemma_constants_report, random_pairs, thm47_verify, validation_grid)
from .geometry import (SectorGeometry, arc_to_center, delta_grid, geodesic_between, geodesic_nearest_delta,
                       harmonic_grid, harmonic_measure, hyperbolic_distance, sector)
from .zipper import DiskMap, default_center, deriv_abs, dist_to_boundary, eval_map, zipper_fit

__all__ = [
    "ConformalConstantsReport",
    "DiskMap",
    "SectorGeometry",
    "arc_to_center",
    "constants_grid",
    "default_center",
    "delta_grid",
    "deriv_abs",
    "derivative_ratio_check",
    "disk_boundary_map",
    "dist_to_boundary",
    "eta_hat",
    "eval_map",
    "geodesic_between",
    "geodesic_nearest_delta",
    "harmonic_grid",
    "harmonic_measure",
    "hyperbolic_distance",
    "koebe_check",
    "lemma_constants_report",
    "random_pairs",
    "sector",
    "thm47_verify",
    "validation_grid",
    "zipper_fit",
]
