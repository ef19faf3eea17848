"""Simulation toolkit for area-constrained last passage percolation."""

from .constrained import SolverOptions, solve_constrained
from .errors import AreatrapError, Infeasible, ValidationError
from .geometry import IncreasingPath, Polyline, trapped_area
from .limitshape import LimitShape
from .lpp import lpp_length, topmost_geodesic
from .roughness import analyze
from .sampler import PointCloud, SeedSpec, sample_poisson_square

__version__ = "0.1.0"

__all__ = [
    "AreatrapError",
    "IncreasingPath",
    "Infeasible",
    "LimitShape",
    "PointCloud",
    "Polyline",
    "SeedSpec",
    "SolverOptions",
    "ValidationError",
    "analyze",
    "lpp_length",
    "sample_poisson_square",
    "solve_constrained",
    "topmost_geodesic",
    "trapped_area",
]
