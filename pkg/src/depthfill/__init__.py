"""Depth completion from surface normals and occlusion boundaries via
globally optimized sparse linear least squares."""

from .baselines import inpaint_joint_bilateral, inpaint_smooth
from .camera import (
    CameraIntrinsics,
    back_project,
    boundaries_from_depth,
    derivatives_from_depth,
    normals_from_depth,
    ray_direction,
)
from .complete import CompletionConfig, anchored_scale_align, complete_depth
from .errors import (
    ConvergenceFailure,
    DepthfillError,
    DimensionMismatch,
    EmptyEvaluation,
    MissingInput,
    NonPhysicalDepthWarning,
    SingularSystem,
    UnfilledPixels,
)
from .estimators import (
    CompletionFrame,
    DepthCompleter,
    JointBilateralInpainter,
    SmoothInpainter,
)
from .images import (
    BoundaryMap,
    DepthImage,
    DerivativeMap,
    NormalMap,
    SolverWeights,
    count_valid,
    validate,
)
from .fileio import (
    read_boundary,
    read_color,
    read_depth_png,
    read_derivatives,
    read_intrinsics,
    read_normals,
    write_boundary,
    write_color,
    write_depth_png,
    write_derivatives,
    write_intrinsics,
    write_normals,
    write_report_csv,
)
from .metrics import MetricsReport, NormalReport, depth_metrics, normal_metrics
from .solve import SolveOptions, solve_rows, solve_spd
from .synth import (
    Box,
    HoleSpec,
    Plane,
    Scene,
    Sphere,
    apply_holes,
    perturb_normals,
    render_color,
    render_scene,
    standard_suite,
)
from .system import (
    LinearRow,
    LinearSystem,
    add_data_rows,
    add_derivative_rows,
    add_normal_rows,
    add_smoothness_rows,
    assemble,
)

__version__ = "0.1.0"
