"""Input validation helpers shared by the estimator layer."""

import numpy as np

from .camera import CameraIntrinsics
from .errors import DimensionMismatch
from .images import BoundaryMap, DepthImage, DerivativeMap, NormalMap


def check_depth_image(obj, name="X"):
    """Accept a DepthImage, or coerce a 2-d array (NaN / <= 0 = missing)."""
    if isinstance(obj, DepthImage):
        return obj
    arr = np.asarray(obj, np.float64)
    if arr.ndim != 2:
        raise ValueError(f"{name} must be a DepthImage or a 2-d depth array")
    valid = np.isfinite(arr) & (arr > 0)
    data = np.where(valid, arr, 0.0)
    return DepthImage(data, valid)


def check_intrinsics(K, shape):
    if not isinstance(K, CameraIntrinsics):
        raise TypeError("intrinsics must be a CameraIntrinsics instance")
    if (K.height, K.width) != shape:
        raise DimensionMismatch("intrinsics do not match the image grid")
    return K


def check_map(obj, cls, shape, name):
    """Accept an instance of cls or coerce a plain array; None passes
    through.  The grid must match shape (h, w)."""
    if obj is None:
        return None
    if not isinstance(obj, cls):
        obj = cls(np.array(obj, np.float64))
    if obj.shape != shape:
        raise DimensionMismatch(f"{name} has grid {obj.shape}, "
                                f"expected {shape}")
    return obj


def check_same_shape(shape, normals=None, boundary=None, derivatives=None):
    return (check_map(normals, NormalMap, shape, "normals"),
            check_map(boundary, BoundaryMap, shape, "boundary"),
            check_map(derivatives, DerivativeMap, shape, "derivatives"))
