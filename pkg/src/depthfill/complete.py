"""End-to-end depth completion: pick a representation, build the weighted
rows, solve the normal equations and reshape into a complete depth image."""

import warnings
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import (
    DimensionMismatch,
    MissingInput,
    NonPhysicalDepthWarning,
    SingularSystem,
)
from .images import DepthImage, SolverWeights, count_valid
from .solve import SolveOptions, solve_rows
from .system import (
    LinearSystem,
    add_data_rows,
    add_derivative_rows,
    add_normal_rows,
    add_smoothness_rows,
)

NORMALS = "normals"
DERIVATIVES = "derivatives"
BOTH = "both"
REPRESENTATIONS = (NORMALS, DERIVATIVES, BOTH)


@dataclass
class CompletionConfig:
    representation: str = NORMALS
    weights: SolverWeights = field(default_factory=SolverWeights)
    # optional ((u, v), depth) fixing the scale when no raw depth exists
    anchor: tuple | None = None
    solve_options: SolveOptions = field(default_factory=SolveOptions)

    def __post_init__(self):
        if self.representation not in REPRESENTATIONS:
            raise ValueError(f"unknown representation {self.representation!r}")
        if self.anchor is not None and self.anchor[1] <= 0:
            raise ValueError("anchor depth must be positive")


def complete_depth(raw, normals=None, boundary=None, derivs=None, K=None,
                   cfg=None):
    """Complete a raw depth image by global linear least squares.

    The objective combines a data term on observed pixels, a smoothness term
    over 4-neighbor pairs, and (per the configured representation) normal
    and/or derivative consistency terms.  The output has every pixel valid;
    non-positive solved depths trigger a NonPhysicalDepthWarning rather than
    being clamped.
    """
    cfg = cfg or CompletionConfig()
    if cfg.representation in (NORMALS, BOTH):
        if normals is None:
            raise MissingInput("representation requires a normal map")
        if K is None:
            raise MissingInput("normal constraints require camera intrinsics")
    if cfg.representation in (DERIVATIVES, BOTH) and derivs is None:
        raise MissingInput("representation requires a derivative map")
    shape = raw.shape
    for m, what in ((normals, "normals"), (boundary, "boundary"),
                    (derivs, "derivatives")):
        if m is not None and m.shape != shape:
            raise DimensionMismatch(f"{what} map does not match raw depth")

    n_obs = count_valid(raw)
    if n_obs == 0 and cfg.anchor is None:
        raise SingularSystem(
            0, (0, 0),
            "no observed depth and no anchor: scale is indeterminate")

    w = cfg.weights
    sys = LinearSystem(shape[0] * shape[1], shape=shape)
    add_data_rows(sys, raw, w.lambda_d)
    if cfg.anchor is not None:
        (au, av), ad = cfg.anchor
        sys.add_row([(av * shape[1] + au, 1.0)], ad, w.lambda_d)
    if cfg.representation in (NORMALS, BOTH):
        b = boundary if w.use_boundary_weight else None
        add_normal_rows(sys, normals, b, K, w.lambda_n)
    if cfg.representation in (DERIVATIVES, BOTH):
        add_derivative_rows(sys, derivs, w.lambda_dd)
    add_smoothness_rows(sys, w.lambda_s)

    opts = cfg.solve_options
    if opts.initial_guess is None:
        guess = np.full(sys.n_unknowns, _fill_value(raw, cfg))
        if n_obs:
            flat_valid = raw.valid.ravel()
            guess[flat_valid] = raw.data.ravel()[flat_valid]
        opts = replace(opts, initial_guess=guess)
    x = solve_rows(sys, opts)

    out = x.reshape(shape)
    if np.any(out <= 0):
        ys, xs = np.nonzero(out <= 0)
        pix = [(int(px), int(py)) for py, px in zip(ys, xs)]
        warnings.warn(NonPhysicalDepthWarning(pix), stacklevel=2)
    return DepthImage(out, np.ones(shape, bool))


def _fill_value(raw, cfg):
    if count_valid(raw):
        return float(np.mean(raw.data[raw.valid]))
    return float(cfg.anchor[1])


def anchored_scale_align(pred, truth, pixel):
    """Uniformly rescale pred so it matches truth exactly at one pixel."""
    u, v = pixel
    if not (pred.valid[v, u] and truth.valid[v, u]):
        raise ValueError(f"pixel {pixel} must be valid in both images")
    p = pred.data[v, u]
    if p <= 0:
        raise ValueError(f"predicted depth at {pixel} is not positive")
    return DepthImage(pred.data * (truth.data[v, u] / p), pred.valid)
