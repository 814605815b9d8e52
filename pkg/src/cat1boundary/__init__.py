"""Boundary cross ratios of hyperbolic spaces and trees, and the
reconstruction of the space from them."""

from .algebra import FormVector, Scalar, hermitian_form
from .boundary import (ChartElement, bourdon_metric, chart_point, chart_transfer,
                       cross_ratio, gromov_product_boundary, gromov_product_points,
                       horospherical_distance, log_cross_ratio, parse_space,
                       ptolemy_defect, special_point)
from .hyperbolic import HBoundaryPoint, HPoint, HyperbolicSpace
from .reconstruction import (OmegaElement, certify_isometry, chi_set, d_omega,
                             intersects, omega_equivalent, third_geodesic,
                             tree_four_case)
from .report import SuiteReport
from .suites import run_suite
from .tree import TreeEnd, TreePoint, TreeSpace

__all__ = [
    "ChartElement", "FormVector", "HBoundaryPoint", "HPoint", "HyperbolicSpace",
    "OmegaElement", "Scalar", "SuiteReport", "TreeEnd", "TreePoint", "TreeSpace",
    "bourdon_metric", "certify_isometry", "chart_point", "chart_transfer",
    "chi_set", "cross_ratio", "d_omega", "gromov_product_boundary",
    "gromov_product_points", "hermitian_form", "horospherical_distance",
    "intersects", "log_cross_ratio", "omega_equivalent", "parse_space",
    "ptolemy_defect", "run_suite", "special_point", "third_geodesic",
    "tree_four_case",
]
