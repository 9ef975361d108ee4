"""Pinhole camera model and geometric derivation of normals, boundaries
and derivative maps from depth images."""

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch
from .images import (
    DERIVATIVE_OFFSETS,
    BoundaryMap,
    DepthImage,
    DerivativeMap,
    NormalMap,
)


@dataclass(frozen=True)
class CameraIntrinsics:
    fx: float
    fy: float
    cx: float
    cy: float
    width: int
    height: int

    def __post_init__(self):
        if self.fx <= 0 or self.fy <= 0:
            raise ValueError("focal lengths must be positive")
        if not (0 <= self.cx < self.width):
            raise ValueError("cx must lie within [0, width)")
        if not (0 <= self.cy < self.height):
            raise ValueError("cy must lie within [0, height)")


def ray_direction(pixel, K):
    """Unnormalized ray through a pixel: ((u-cx)/fx, (v-cy)/fy, 1).

    A 3-D point at depth d along this pixel is d * ray_direction, so its
    z component equals d exactly.
    """
    u, v = pixel
    if not (0 <= u < K.width and 0 <= v < K.height):
        raise IndexError(f"pixel {pixel} outside {K.width}x{K.height} image")
    return np.array([(u - K.cx) / K.fx, (v - K.cy) / K.fy, 1.0])


def back_project(pixel, depth, K):
    """3-D point (meters, camera frame) of a pixel at the given depth."""
    if depth <= 0:
        raise ValueError(f"depth must be positive, got {depth}")
    return depth * ray_direction(pixel, K)


def ray_grid(K):
    """(height, width, 3) array of ray_direction for every pixel."""
    u = (np.arange(K.width) - K.cx) / K.fx
    v = (np.arange(K.height) - K.cy) / K.fy
    rays = np.empty((K.height, K.width, 3))
    rays[..., 0] = u[None, :]
    rays[..., 1] = v[:, None]
    rays[..., 2] = 1.0
    return rays


def _shift(arr, dx, dy, fill):
    """arr sampled at (x+dx, y+dy), out-of-bounds entries set to fill."""
    out = np.full_like(arr, fill)
    h, w = arr.shape[:2]
    xs = slice(max(dx, 0), w + min(dx, 0))
    xd = slice(max(-dx, 0), w + min(-dx, 0))
    ys = slice(max(dy, 0), h + min(dy, 0))
    yd = slice(max(-dy, 0), h + min(-dy, 0))
    out[yd, xd] = arr[ys, xs]
    return out


def normals_from_depth(depth, K):
    """Estimate surface normals from a depth image.

    Tangents are central differences of back-projected points, falling back
    to one-sided differences at borders and next to holes.  Pixels without
    enough valid neighbors get the (0, 0, 0) sentinel.  Normals are oriented
    to face the camera (dot with the pixel ray is negative).
    """
    if (depth.height, depth.width) != (K.height, K.width):
        raise DimensionMismatch("depth image does not match intrinsics")
    rays = ray_grid(K)
    pts = rays * depth.data[..., None]
    ok = depth.valid

    def tangent(dx, dy):
        p_f = _shift(pts, dx, dy, np.nan)
        p_b = _shift(pts, -dx, -dy, np.nan)
        ok_f = _shift(ok, dx, dy, False)
        ok_b = _shift(ok, -dx, -dy, False)
        t = np.full_like(pts, np.nan)
        have = np.zeros(ok.shape, bool)
        # one-sided first so that central overrides where available
        m = ok & ok_b & ~have
        t[m] = pts[m] - p_b[m]
        have |= m
        m = ok & ok_f
        t[m] = p_f[m] - pts[m]
        have |= m
        m = ok_f & ok_b
        t[m] = (p_f[m] - p_b[m]) / 2.0
        return t, have

    tx, have_x = tangent(1, 0)
    ty, have_y = tangent(0, 1)
    n = np.cross(tx, ty)
    good = ok & have_x & have_y
    norm = np.linalg.norm(n, axis=2)
    good &= np.isfinite(norm) & (norm > 0)
    out = np.zeros_like(pts)
    out[good] = n[good] / norm[good, None]
    # camera-facing orientation: flip where the normal points along the ray
    flip = good & (np.einsum("hwc,hwc->hw", out, rays) > 0)
    out[flip] = -out[flip]
    return NormalMap(out)


def boundaries_from_depth(depth, jump_threshold):
    """Binary occlusion-boundary map: 1 where any valid 4-neighbor differs
    in depth by more than jump_threshold."""
    if jump_threshold <= 0:
        raise ValueError("jump_threshold must be positive")
    b = np.zeros(depth.shape)
    for dx, dy in ((1, 0), (-1, 0), (0, 1), (0, -1)):
        dq = _shift(depth.data, dx, dy, np.nan)
        okq = _shift(depth.valid, dx, dy, False)
        jump = depth.valid & okq & (np.abs(depth.data - dq) > jump_threshold)
        b[jump] = 1.0
    return BoundaryMap(b)


def derivatives_from_depth(depth):
    """Oracle derivative map: D(q) - D(p) per compass direction, 0 where the
    neighbor is out of bounds or either pixel is invalid."""
    d = np.zeros(depth.shape + (8,))
    for i, (dx, dy) in enumerate(DERIVATIVE_OFFSETS):
        dq = _shift(depth.data, dx, dy, np.nan)
        okq = _shift(depth.valid, dx, dy, False)
        m = depth.valid & okq
        d[m, i] = dq[m] - depth.data[m]
    return DerivativeMap(d)
