"""Numerical toolkit for torse-forming vector fields, the extrinsic geometry
of immersed submanifolds, rectifying-submanifold verification, and
warped-product structure checks."""

from .classify import (ANTI_TORQUED, CONCIRCULAR, NONE, PARALLEL, TORQUED,
                       TORSE_FORMING, ClassificationReport,
                       SceneClassification, classify, fit_torse_forming,
                       geodesic_unit_check)
from .config import DEFAULT, Tolerances
from .expr import eval_float, free_variables, parse, to_source
from .immersion import (FirstNormalSpace, FramePacket, Immersion,
                        decompose_field, first_normal_space, frames,
                        gauss_equation_residual, induced_metric,
                        mean_curvature, second_fundamental_form,
                        shape_operator)
from .jets import Jet, eval_jet, eval_jet_env, jet_variables
from .metric import (MetricAtPoint, MetricField, VectorAtPoint, VectorField,
                     christoffel, covariant_derivative, riemann,
                     riemann_components, sectional_curvature)
from .rectifying import (RectifyingSceneReport, check_Avperp_zero,
                         rectifying_point, rectifying_residual,
                         rectifying_scene, verify_normal_vanishes,
                         verify_tangential_vanishes, verify_torqued_props)
from .runner import SceneReport, exit_code, render_report, report_to_json, run
from .scenes import (BUILTIN_DOCUMENTS, Scene, builtin_names, builtin_scene,
                     export_builtins, load_scene, load_scene_file,
                     sample_ambient_points, sample_parameter_points)
from .warped import (IntegralCurve, WarpFit, build_warped_ambient,
                     cumulative_simpson, fit_tanh_integral,
                     lambda_log_derivative, trace_integral_curve,
                     verify_ambient_decomposition, warping_ode_residual)

__version__ = "0.1.0"
