"""Numerical laboratory for inverse curvature flows of convex graphs in S^{n+1}.

Strictly convex hypersurfaces given as radial graphs over a geodesic polar
chart are expanded by u_t = v / F^p for a normalized, monotone, concave
curvature function F; the package tracks mixed volumes, quermassintegrals
and the monotone quantities that drive the sharp geometric inequalities,
with an independent stereographic cross-check of all curvature formulas.
"""

from ._kernels import BACKEND as kernel_backend
from .errors import (
    ConfigurationError,
    CurvatureDegenerateError,
    DomainError,
    ProfileFormatError,
)
from .flow import (
    Diagnostics,
    FlowConfig,
    FlowState,
    FlowTrace,
    adaptive_dt,
    equator_time,
    flow_speed,
    make_state,
    round_flow_oracle,
    run,
    step,
)
from .functionals import (
    FunctionalRecord,
    af_slack,
    ball_mixed_volume,
    decay_norms,
    evolution_identity_residual,
    make_record,
    mixed_volume,
    mixed_volumes,
    odd_quermass_explicit,
    odd_quermass_lower_bound,
    phi1,
    phi2,
    phi3,
    quermassintegrals,
    telescoping_zero,
)
from .props import run_suite
from .sphere_geom import (
    GraphField,
    ShapeData,
    ball_profile,
    cosine_profile,
    enclosed_volume,
    read_profile,
    shape_data,
    sphere_area,
    write_profile,
)
from .stereo import (
    Certificate,
    certify,
    conformal_factor,
    curvature_transfer_residual,
    project_radius,
    unproject_radius,
)
from .symfunc import (
    CurvatureSpec,
    cone_membership,
    curvature_gradient,
    curvature_hessian,
    curvature_value,
    elementary_symmetric,
    elementary_symmetric_all,
    elementary_symmetric_gradient,
    elementary_symmetric_hessian,
    inverse_concavity_form,
    normalized_root,
)

__version__ = "0.1.0"
