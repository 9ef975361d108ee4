"""Core image-grid types: depth, normal, boundary and derivative maps.

All types are immutable after construction (arrays are frozen) so they can
be shared freely across threads.  Missing depth is an explicit boolean mask,
never a sentinel value; the file layer maps raw 0 <-> invalid.
"""

from dataclasses import dataclass, field, replace
from typing import NamedTuple

import numpy as np

# Compass order of the 8 derivative directions and their (dx, dy) pixel
# offsets.  The image y axis points down, so "N" (up) is dy = -1.
DERIVATIVE_DIRECTIONS = ("E", "NE", "N", "NW", "W", "SW", "S", "SE")
DERIVATIVE_OFFSETS = (
    (1, 0), (1, -1), (0, -1), (-1, -1), (-1, 0), (-1, 1), (0, 1), (1, 1),
)


def _freeze(arr, dtype, ndim, depth3=None):
    arr = np.asarray(arr, dtype=dtype)
    if arr.ndim != ndim:
        raise ValueError(f"expected a {ndim}-d array, got shape {arr.shape}")
    if depth3 is not None and arr.shape[2] != depth3:
        raise ValueError(f"expected {depth3} channels, got {arr.shape[2]}")
    arr = np.ascontiguousarray(arr)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class DepthImage:
    """Metric depth grid (meters) with an observed-pixel mask.

    ``data`` is (height, width) row-major; ``valid`` marks observed pixels.
    Values at invalid pixels are ignored by all consumers.
    """

    data: np.ndarray
    valid: np.ndarray

    def __post_init__(self):
        data = _freeze(self.data, np.float64, 2)
        valid = _freeze(self.valid, bool, 2)
        if data.shape != valid.shape:
            raise ValueError("data and valid masks have different shapes")
        object.__setattr__(self, "data", data)
        object.__setattr__(self, "valid", valid)

    @property
    def height(self):
        return self.data.shape[0]

    @property
    def width(self):
        return self.data.shape[1]

    @property
    def shape(self):
        return self.data.shape

    def with_mask(self, valid):
        return DepthImage(self.data, valid)


@dataclass(frozen=True)
class NormalMap:
    """Per-pixel unit surface normals in camera coordinates (x right,
    y down, z forward; visible surfaces face the camera).  The all-zero
    vector marks a pixel with no usable normal."""

    data: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "data", _freeze(self.data, np.float64, 3, 3))

    @property
    def height(self):
        return self.data.shape[0]

    @property
    def width(self):
        return self.data.shape[1]

    @property
    def shape(self):
        return self.data.shape[:2]

    def defined(self):
        """Boolean mask of pixels carrying a non-sentinel normal."""
        return np.linalg.norm(self.data, axis=2) > 0.5


@dataclass(frozen=True)
class BoundaryMap:
    """Per-pixel probability in [0, 1] of lying on an occlusion boundary."""

    data: np.ndarray

    def __post_init__(self):
        data = _freeze(self.data, np.float64, 2)
        if data.size and (data.min() < 0.0 or data.max() > 1.0):
            raise ValueError("boundary probabilities must lie in [0, 1]")
        object.__setattr__(self, "data", data)

    @property
    def height(self):
        return self.data.shape[0]

    @property
    def width(self):
        return self.data.shape[1]

    @property
    def shape(self):
        return self.data.shape


@dataclass(frozen=True)
class DerivativeMap:
    """Predicted depth differences (meters) to the 8 compass neighbors,
    channel order E, NE, N, NW, W, SW, S, SE (see DERIVATIVE_DIRECTIONS)."""

    data: np.ndarray

    def __post_init__(self):
        data = _freeze(self.data, np.float64, 3, 8)
        if not np.all(np.isfinite(data)):
            raise ValueError("derivative values must be finite")
        object.__setattr__(self, "data", data)

    @property
    def height(self):
        return self.data.shape[0]

    @property
    def width(self):
        return self.data.shape[1]

    @property
    def shape(self):
        return self.data.shape[:2]


@dataclass(frozen=True)
class SolverWeights:
    """Term weights of the completion objective.

    Defaults follow the reported operating point: lambda_d = 1e3,
    lambda_n = 1, lambda_s = 1e-3.  lambda_dd weights the optional
    derivative constraints.
    """

    lambda_d: float = 1000.0
    lambda_n: float = 1.0
    lambda_s: float = 1e-3
    lambda_dd: float = 1.0
    use_boundary_weight: bool = True

    def __post_init__(self):
        for name in ("lambda_d", "lambda_n", "lambda_s", "lambda_dd"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be nonnegative")


class Violation(NamedTuple):
    x: int
    y: int
    rule: str


def validate(image):
    """Check DepthImage invariants; returns a list of violations
    (empty iff the image is well formed).  Never raises."""
    out = []
    ys, xs = np.nonzero(image.valid & ~np.isfinite(image.data))
    out += [Violation(int(x), int(y), "valid pixel has non-finite depth")
            for y, x in zip(ys, xs)]
    finite = np.isfinite(image.data)
    ys, xs = np.nonzero(image.valid & finite & (image.data <= 0))
    out += [Violation(int(x), int(y), "valid pixel has depth <= 0")
            for y, x in zip(ys, xs)]
    return out


def count_valid(image):
    """Number of observed pixels."""
    return int(np.count_nonzero(image.valid))
