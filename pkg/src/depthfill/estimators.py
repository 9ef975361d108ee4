"""Scikit-learn style wrappers around the functional completion core.

The estimators are stateless image-to-image transformers: ``fit`` only
validates hyperparameters, so they compose with pipelines, ``clone`` and
``get_params``/``set_params`` while the real work happens per frame in
``transform``/``predict``.
"""

from dataclasses import dataclass

from sklearn.base import BaseEstimator, TransformerMixin

from .baselines import inpaint_joint_bilateral, inpaint_smooth
from .complete import REPRESENTATIONS, CompletionConfig, complete_depth
from .images import SolverWeights
from .solve import SolveOptions
from .validation import check_depth_image, check_intrinsics, check_same_shape


@dataclass
class CompletionFrame:
    """One input sample for DepthCompleter: raw depth plus the predicted
    maps and camera model it was captured with."""

    raw: object
    intrinsics: object
    normals: object = None
    boundary: object = None
    derivatives: object = None


class DepthCompleter(BaseEstimator):
    """Depth completion by sparse linear least squares over per-pixel depths.

    Combines a soft data term on observed pixels, linearized surface-normal
    consistency (optionally down-weighted at occlusion boundaries),
    optional depth-derivative constraints and a small smoothness term.
    """

    def __init__(self, representation="normals", lambda_d=1000.0,
                 lambda_n=1.0, lambda_s=1e-3, lambda_dd=1.0,
                 use_boundary_weight=True, anchor=None, method="cg",
                 cg_rel_residual=1e-10, cg_max_iters=None):
        self.representation = representation
        self.lambda_d = lambda_d
        self.lambda_n = lambda_n
        self.lambda_s = lambda_s
        self.lambda_dd = lambda_dd
        self.use_boundary_weight = use_boundary_weight
        self.anchor = anchor
        self.method = method
        self.cg_rel_residual = cg_rel_residual
        self.cg_max_iters = cg_max_iters

    def _config(self):
        if self.representation not in REPRESENTATIONS:
            raise ValueError(
                f"representation must be one of {REPRESENTATIONS}")
        return CompletionConfig(
            representation=self.representation,
            weights=SolverWeights(self.lambda_d, self.lambda_n,
                                  self.lambda_s, self.lambda_dd,
                                  self.use_boundary_weight),
            anchor=self.anchor,
            solve_options=SolveOptions(method=self.method,
                                       cg_rel_residual=self.cg_rel_residual,
                                       cg_max_iters=self.cg_max_iters),
        )

    def fit(self, X=None, y=None):
        self._config()  # parameter validation only; the model is stateless
        return self

    def predict(self, frame):
        cfg = self._config()
        raw = check_depth_image(frame.raw, "frame.raw")
        K = check_intrinsics(frame.intrinsics, raw.shape)
        normals, boundary, derivs = check_same_shape(
            raw.shape, normals=frame.normals, boundary=frame.boundary,
            derivatives=frame.derivatives)
        return complete_depth(raw, normals, boundary, derivs, K, cfg)

    def transform(self, frame):
        return self.predict(frame)


class SmoothInpainter(TransformerMixin, BaseEstimator):
    """Smoothness-only inpainting baseline (data + smoothness terms)."""

    def __init__(self, lambda_d=1000.0, lambda_s=1e-3, method="cg",
                 cg_rel_residual=1e-10):
        self.lambda_d = lambda_d
        self.lambda_s = lambda_s
        self.method = method
        self.cg_rel_residual = cg_rel_residual

    def fit(self, X=None, y=None):
        if self.lambda_d < 0 or self.lambda_s < 0:
            raise ValueError("weights must be nonnegative")
        return self

    def transform(self, X):
        raw = check_depth_image(X)
        weights = SolverWeights(lambda_d=self.lambda_d, lambda_n=0.0,
                                lambda_s=self.lambda_s)
        opts = SolveOptions(method=self.method,
                            cg_rel_residual=self.cg_rel_residual)
        return inpaint_smooth(raw, weights, opts)


class JointBilateralInpainter(TransformerMixin, BaseEstimator):
    """Joint bilateral hole-filling baseline guided by a color image.

    ``transform`` takes an (depth, color) pair with color shaped (h, w, 3)
    in [0, 1].
    """

    def __init__(self, sigma_spatial=8.0, sigma_color=0.1, radius=16,
                 max_passes=8):
        self.sigma_spatial = sigma_spatial
        self.sigma_color = sigma_color
        self.radius = radius
        self.max_passes = max_passes

    def fit(self, X=None, y=None):
        if self.sigma_spatial <= 0 or self.sigma_color <= 0:
            raise ValueError("sigmas must be positive")
        return self

    def transform(self, X):
        depth, color = X
        raw = check_depth_image(depth)
        return inpaint_joint_bilateral(raw, color, self.sigma_spatial,
                                       self.sigma_color, self.radius,
                                       self.max_passes)
