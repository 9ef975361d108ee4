"""Analytic scene rendering and hole generation for desk-scale benchmarks.

Scenes are lists of planes, spheres and axis-aligned boxes in camera
coordinates.  Rendering casts the pixel ray through each primitive and keeps
the nearest positive hit, producing ground-truth depth, analytic normals,
an occlusion-boundary map and (optionally) a flat-albedo color image for
the bilateral baseline.
"""

from dataclasses import dataclass, field

import numpy as np

from .camera import CameraIntrinsics, boundaries_from_depth, ray_grid
from .images import BoundaryMap, DepthImage, NormalMap

_EPS = 1e-9
BOUNDARY_JUMP_M = 0.05


@dataclass(frozen=True)
class Plane:
    """Infinite plane n . X = offset with unit normal n."""

    normal: tuple
    offset: float
    name: str = "plane"
    albedo: tuple = (0.5, 0.5, 0.5)

    def __post_init__(self):
        n = np.asarray(self.normal, np.float64)
        if abs(np.linalg.norm(n) - 1.0) > 1e-9:
            object.__setattr__(self, "normal", tuple(n / np.linalg.norm(n)))


@dataclass(frozen=True)
class Sphere:
    center: tuple
    radius: float
    name: str = "sphere"
    albedo: tuple = (0.5, 0.5, 0.5)

    def __post_init__(self):
        if self.radius <= 0:
            raise ValueError("sphere radius must be positive")


@dataclass(frozen=True)
class Box:
    min_corner: tuple
    max_corner: tuple
    name: str = "box"
    albedo: tuple = (0.5, 0.5, 0.5)

    def __post_init__(self):
        lo = np.asarray(self.min_corner, np.float64)
        hi = np.asarray(self.max_corner, np.float64)
        if not np.all(lo < hi):
            raise ValueError("box min corner must be strictly below max")


@dataclass(frozen=True)
class Scene:
    primitives: tuple

    def __post_init__(self):
        object.__setattr__(self, "primitives", tuple(self.primitives))


@dataclass(frozen=True)
class HoleSpec:
    """Valid-mask reduction recipe.

    kinds: random-keep-n(n, seed), random-drop-fraction(fraction, seed),
    rectangles(list of (x, y, w, h)), grazing-angle(max_angle_deg),
    far-range(max_depth_m).
    """

    kind: str
    n: int = 0
    fraction: float = 0.0
    seed: int = 0
    rectangles: tuple = ()
    max_angle_deg: float = 0.0
    max_depth_m: float = 0.0

    KINDS = ("random-keep-n", "random-drop-fraction", "rectangles",
             "grazing-angle", "far-range")

    def __post_init__(self):
        if self.kind not in self.KINDS:
            raise ValueError(f"unknown hole kind {self.kind!r}")
        if self.kind == "random-keep-n" and self.n < 0:
            raise ValueError("n must be nonnegative")
        if self.kind == "random-drop-fraction" and not 0 <= self.fraction <= 1:
            raise ValueError("fraction must lie in [0, 1]")
        if self.kind == "grazing-angle" and not 0 < self.max_angle_deg < 90:
            raise ValueError("max angle must lie in (0, 90) degrees")
        if self.kind == "far-range" and self.max_depth_m <= 0:
            raise ValueError("max depth must be positive")


def _intersect(prim, rays):
    """Nearest positive hit parameter t per pixel (inf where missed) and
    the camera-facing surface normal at the hit."""
    h, w = rays.shape[:2]
    t = np.full((h, w), np.inf)
    n = np.zeros((h, w, 3))
    if isinstance(prim, Plane):
        pn = np.asarray(prim.normal)
        denom = rays @ pn
        with np.errstate(divide="ignore", invalid="ignore"):
            tt = prim.offset / denom
        hit = np.isfinite(tt) & (tt > _EPS)
        t[hit] = tt[hit]
        n[hit] = pn
    elif isinstance(prim, Sphere):
        c = np.asarray(prim.center)
        rr = np.einsum("hwc,hwc->hw", rays, rays)
        rc = rays @ c
        disc = rc * rc - rr * (c @ c - prim.radius ** 2)
        root = np.sqrt(np.maximum(disc, 0.0))
        t1 = (rc - root) / rr
        t2 = (rc + root) / rr
        tt = np.where(t1 > _EPS, t1, t2)
        hit = (disc >= 0) & (tt > _EPS)
        t[hit] = tt[hit]
        pts = rays[hit] * tt[hit][:, None]
        n[hit] = (pts - c) / prim.radius
    elif isinstance(prim, Box):
        lo = np.asarray(prim.min_corner)
        hi = np.asarray(prim.max_corner)
        # avoid 0/0 for axis-parallel rays; the sign-preserving epsilon
        # keeps the slab logic consistent
        safe = np.where(rays == 0.0, 1e-300, rays)
        t_lo = lo / safe
        t_hi = hi / safe
        t_near = np.max(np.minimum(t_lo, t_hi), axis=-1)
        t_far = np.min(np.maximum(t_lo, t_hi), axis=-1)
        hit = (t_near <= t_far) & (t_far > _EPS)
        tt = np.where(t_near > _EPS, t_near, t_far)
        t[hit] = tt[hit]
        pts = rays[hit] * tt[hit][:, None]
        # pick the face whose plane the hit point lies on
        d_lo = np.abs(pts - lo)
        d_hi = np.abs(pts - hi)
        dist = np.concatenate([d_lo, d_hi], axis=1)
        face = np.argmin(dist, axis=1)
        normals = np.zeros((len(face), 3))
        for f in range(6):
            axis, sign = f % 3, -1.0 if f < 3 else 1.0
            normals[face == f, axis] = sign
        n[hit] = normals
    else:
        raise TypeError(f"unknown primitive {type(prim)!r}")
    # orient toward the camera
    facing = np.einsum("hwc,hwc->hw", n, rays) > 0
    n[facing] = -n[facing]
    return t, n


def _cast(scene, K):
    rays = ray_grid(K)
    h, w = rays.shape[:2]
    best_t = np.full((h, w), np.inf)
    best_n = np.zeros((h, w, 3))
    best_id = np.full((h, w), -1)
    for i, prim in enumerate(scene.primitives):
        t, n = _intersect(prim, rays)
        closer = t < best_t
        best_t[closer] = t[closer]
        best_n[closer] = n[closer]
        best_id[closer] = i
    valid = np.isfinite(best_t)
    depth = np.where(valid, best_t * 1.0, 0.0)  # depth = z since ray z = 1
    return depth, valid, best_n, best_id


def render_scene(scene, K):
    """Render to (DepthImage, NormalMap, BoundaryMap).

    The boundary map marks depth jumps above BOUNDARY_JUMP_M plus pixels
    whose winning primitive differs from a 4-neighbor's (occlusion contours
    only; creases inside a single primitive are not marked).
    """
    depth_arr, valid, normals, ids = _cast(scene, K)
    depth = DepthImage(depth_arr, valid)
    normals[~valid] = 0.0
    if valid.any():
        b = boundaries_from_depth(depth, BOUNDARY_JUMP_M).data.copy()
    else:
        b = np.zeros(depth.shape)
    for dx, dy in ((1, 0), (-1, 0), (0, 1), (0, -1)):
        shifted = np.full_like(ids, -2)
        h, w = ids.shape
        xs = slice(max(dx, 0), w + min(dx, 0))
        xd = slice(max(-dx, 0), w + min(-dx, 0))
        ys = slice(max(dy, 0), h + min(dy, 0))
        yd = slice(max(-dy, 0), h + min(-dy, 0))
        shifted[yd, xd] = ids[ys, xs]
        edge = valid & (shifted >= 0) & (shifted != ids)
        b[edge] = 1.0
    return depth, NormalMap(normals), BoundaryMap(b)


def render_color(scene, K):
    """Flat per-primitive albedo image in [0, 1], black where no hit."""
    _, valid, _, ids = _cast(scene, K)
    color = np.zeros(valid.shape + (3,))
    for i, prim in enumerate(scene.primitives):
        color[ids == i] = prim.albedo
    return color


def apply_holes(depth, spec, normals=None, K=None):
    """Return a copy of depth with the valid mask reduced per spec.

    Random modes are reproducible from their seed; random-keep-n masks are
    nested across n for a fixed seed (a larger n keeps a superset).
    grazing-angle requires normals and intrinsics.
    """
    valid = depth.valid.copy()
    if spec.kind in ("random-keep-n", "random-drop-fraction"):
        idx = np.nonzero(valid.ravel())[0]
        rng = np.random.default_rng(spec.seed)
        perm = rng.permutation(len(idx))
        if spec.kind == "random-keep-n":
            keep = min(spec.n, len(idx))
        else:
            keep = len(idx) - int(round(spec.fraction * len(idx)))
        drop = idx[perm[keep:]]
        flat = valid.ravel()
        flat[drop] = False
        valid = flat.reshape(depth.shape)
    elif spec.kind == "rectangles":
        for x, y, w, h in spec.rectangles:
            if x < 0 or y < 0 or x + w > depth.width or y + h > depth.height:
                raise ValueError(f"rectangle {(x, y, w, h)} out of bounds")
            valid[y:y + h, x:x + w] = False
    elif spec.kind == "grazing-angle":
        if normals is None or K is None:
            raise ValueError("grazing-angle holes need normals and intrinsics")
        rays = ray_grid(K)
        rhat = rays / np.linalg.norm(rays, axis=2, keepdims=True)
        cos = -np.einsum("hwc,hwc->hw", rhat, normals.data)
        limit = np.cos(np.radians(spec.max_angle_deg))
        valid &= cos >= limit
    elif spec.kind == "far-range":
        valid &= ~(depth.valid & (depth.data > spec.max_depth_m))
    return depth.with_mask(valid)


def perturb_normals(normals, sigma_deg, seed):
    """Rotate each normal about a random in-tangent-plane axis by an angle
    drawn from |N(0, sigma_deg)|, then re-normalize and re-apply the
    camera-facing z <= 0 convention.  Deterministic given seed."""
    if sigma_deg < 0:
        raise ValueError("sigma must be nonnegative")
    out = normals.data.copy()
    if sigma_deg == 0:
        return NormalMap(out)
    rng = np.random.default_rng(seed)
    h, w = normals.shape
    angles = np.abs(rng.normal(0.0, np.radians(sigma_deg), (h, w)))
    phi = rng.uniform(0.0, 2.0 * np.pi, (h, w))
    mask = normals.defined()
    n = out[mask]
    # orthonormal tangent frame per normal
    helper = np.zeros_like(n)
    use_y = np.abs(n[:, 0]) > 0.9
    helper[use_y, 1] = 1.0
    helper[~use_y, 0] = 1.0
    u = np.cross(n, helper)
    u /= np.linalg.norm(u, axis=1, keepdims=True)
    v = np.cross(n, u)
    a = angles[mask][:, None]
    ph = phi[mask][:, None]
    axis_dir = np.cos(ph) * u + np.sin(ph) * v
    # rotation about an axis orthogonal to n tilts n by exactly the angle
    tilted = np.cos(a) * n + np.sin(a) * np.cross(axis_dir, n)
    tilted /= np.linalg.norm(tilted, axis=1, keepdims=True)
    flip = tilted[:, 2] > 0
    tilted[flip] = -tilted[flip]
    out[mask] = tilted
    return NormalMap(out)


@dataclass(frozen=True)
class SuiteEntry:
    name: str
    scene: Scene
    K: CameraIntrinsics
    holes: HoleSpec


_SCENES = {
    "fronto": lambda: Scene([
        Plane((0, 0, -1), -2.5, "wall", (0.8, 0.8, 0.8)),
    ]),
    # gentle tilt keeps the per-pixel depth step well below the occlusion
    # jump threshold at 64x64, so the oracle boundary map stays empty
    "slant": lambda: Scene([
        Plane((-np.sin(np.radians(12.0)), 0.0, -np.cos(np.radians(12.0))),
              -2.5 * np.cos(np.radians(12.0)), "slant", (0.2, 0.6, 0.8)),
    ]),
    "step": lambda: Scene([
        Box((-3.0, -3.0, 1.6), (0.0, 3.0, 2.0), "foreground",
            (0.9, 0.2, 0.2)),
        Plane((0, 0, -1), -3.5, "backdrop", (0.9, 0.9, 0.9)),
    ]),
    "sphere": lambda: Scene([
        Sphere((0.0, 0.0, 3.0), 0.8, "ball", (0.2, 0.8, 0.3)),
        Plane((0, 0, -1), -4.0, "backdrop", (0.9, 0.9, 0.9)),
    ]),
    "boxroom": lambda: Scene([
        Plane((0, 0, -1), -6.0, "back", (0.9, 0.9, 0.9)),
        Plane((0, -1, 0), -1.5, "floor", (0.6, 0.4, 0.2)),
        Plane((0, 1, 0), -1.5, "ceiling", (0.95, 0.95, 0.9)),
        Plane((1, 0, 0), -2.0, "left", (0.3, 0.5, 0.9)),
        Plane((-1, 0, 0), -2.0, "right", (0.9, 0.7, 0.3)),
    ]),
}
_SCENE_ORDER = ("fronto", "slant", "step", "sphere", "boxroom")


def scene_by_name(name):
    if name not in _SCENES:
        raise KeyError(f"unknown scene {name!r}; choose from {_SCENE_ORDER}")
    return _SCENES[name]()


def default_intrinsics(width, height):
    """60-degree horizontal field of view pinhole camera."""
    f = width / (2.0 * np.tan(np.radians(30.0)))
    return CameraIntrinsics(f, f, width / 2.0, height / 2.0, width, height)


def standard_suite(seed):
    """Fixed benchmark: 5 scenes x {64x64, 128x128} x {50% random drop,
    rectangle holes}.  Deterministic given seed."""
    entries = []
    for si, key in enumerate(_SCENE_ORDER):
        for size in (64, 128):
            rects = (
                (size // 4, size // 4, size // 3, size // 3),
                (size // 2, 5 * size // 8, size // 4, size // 5),
            )
            specs = (
                ("drop", HoleSpec("random-drop-fraction", fraction=0.5,
                                  seed=seed + 13 * si + size)),
                ("rects", HoleSpec("rectangles", rectangles=rects)),
            )
            for tag, spec in specs:
                entries.append(SuiteEntry(
                    f"{key}_{size}_{tag}", scene_by_name(key),
                    default_intrinsics(size, size), spec))
    return entries
