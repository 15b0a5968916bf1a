"""Infinitesimal bendings of parametric surfaces.

Rotation and translation fields of a bending, its potential, and the first
variation of total mean curvature, all driven by a small symbolic expression
language in the chart parameters u and v.
"""
from .bending import (BendingField, RigidMotionSpec, bending_residuals, check_bending,
                      curve_length_variation, deform, trivial_bending)
from .curves import Curve, circle, random_loop, rectangle_boundary, segment
from .darboux import (classify, rotation_at, rotation_field, rotation_monge, translation_at,
                      translation_field, translation_monge)
from .errors import (BendkitError, DegenerateChartError, DomainError, ExprError,
                     ExprSyntaxError, PathIndependenceError, QuadratureError,
                     ResidualTooLargeError, ScenarioError, UnknownIdentifierError)
from .expr import Expr, derive, evaluate, parse, to_string
from .integrals import (line_integral, loop_closure_defect, loop_audit, potential_grid,
                        variation_estimates, variation_fd, variation_line, variation_monge_double)
from .analysis import critical_points, orthogonality_scan
from .program import BACKEND, Program
from .quadrature import QuadratureConfig
from .scenario import Scenario, load_scenario, parse_scenario
from .surface import Chart, Grid, MongeChart, chart_jet, total_mean_curvature

__version__ = "0.1.0"
