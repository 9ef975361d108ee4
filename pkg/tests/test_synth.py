import numpy as np
import pytest

from depthfill import (
    Box,
    CameraIntrinsics,
    HoleSpec,
    Plane,
    Scene,
    Sphere,
    apply_holes,
    count_valid,
    normals_from_depth,
    perturb_normals,
    render_color,
    render_scene,
    standard_suite,
    validate,
)
from depthfill.camera import ray_grid
from depthfill.metrics import normal_metrics
from depthfill.synth import default_intrinsics, scene_by_name


def test_render_fronto_plane():
    K = default_intrinsics(16, 16)
    scene = Scene([Plane((0, 0, -1), -2.0)])
    depth, normals, boundary = render_scene(scene, K)
    assert np.allclose(depth.data, 2.0)
    assert np.all(depth.valid)
    assert np.allclose(normals.data,
                       np.broadcast_to([0, 0, -1], (16, 16, 3)))
    assert np.all(boundary.data == 0)


def test_render_sphere_on_axis():
    K = CameraIntrinsics(100, 100, 8, 8, 17, 17)
    scene = Scene([Sphere((0, 0, 5), 1.0)])
    depth, _, _ = render_scene(scene, K)
    assert depth.valid[8, 8]
    assert depth.data[8, 8] == pytest.approx(4.0, abs=1e-12)


def test_render_slanted_plane_ray_value():
    # plane x + z = 4 along ray (1, 0, 1): t + t = 4 => depth 2
    K = CameraIntrinsics(1.0, 1.0, 0.0, 1.0, 3, 3)
    n = np.array([-1.0, 0.0, -1.0]) / np.sqrt(2)
    scene = Scene([Plane(tuple(n), -4.0 / np.sqrt(2))])
    depth, _, _ = render_scene(scene, K)
    assert depth.data[1, 1] == pytest.approx(2.0)  # pixel (1,1): ray (1,0,1)


def test_render_empty_scene_all_invalid():
    depth, _, _ = render_scene(Scene([]), default_intrinsics(8, 8))
    assert count_valid(depth) == 0


def test_render_depth_satisfies_implicit_equations():
    K = default_intrinsics(32, 32)
    rays = ray_grid(K)
    for name in ("slant", "sphere", "boxroom"):
        scene = scene_by_name(name)
        depth, _, _ = render_scene(scene, K)
        pts = rays * depth.data[..., None]
        ok = depth.valid
        best = np.full(depth.shape, np.inf)
        for prim in scene.primitives:
            if isinstance(prim, Plane):
                res = np.abs(pts @ np.asarray(prim.normal) - prim.offset)
            elif isinstance(prim, Sphere):
                res = np.abs(np.linalg.norm(pts - prim.center, axis=2)
                             - prim.radius)
            else:
                continue
            best = np.minimum(best, res)
        assert np.max(best[ok]) < 1e-9


def test_render_normals_match_numeric_normals():
    K = default_intrinsics(48, 48)
    depth, normals, boundary = render_scene(scene_by_name("sphere"), K)
    numeric = normals_from_depth(depth, K)
    interior = numeric.defined() & normals.defined() & (boundary.data == 0)
    # stay clear of the sphere rim where the surface turns away
    rep = normal_metrics(numeric, normals, interior)
    assert rep.median_deg < 1.0


def test_render_boundary_marks_occlusion_step():
    K = default_intrinsics(64, 64)
    depth, _, boundary = render_scene(scene_by_name("step"), K)
    assert boundary.data.sum() >= 1
    # boundary pixels hug the depth discontinuity
    ys, xs = np.nonzero(boundary.data)
    jumps = np.abs(np.diff(depth.data, axis=1)).max(axis=0)
    assert jumps.max() > 0.5


def test_box_primitive_front_face():
    K = default_intrinsics(16, 16)
    scene = Scene([Box((-1, -1, 2), (1, 1, 3))])
    depth, normals, _ = render_scene(scene, K)
    assert depth.data[8, 8] == pytest.approx(2.0)
    assert np.allclose(normals.data[8, 8], [0, 0, -1])


def test_apply_holes_keep_all_and_none():
    K = default_intrinsics(16, 16)
    depth, _, _ = render_scene(scene_by_name("fronto"), K)
    assert np.array_equal(
        apply_holes(depth, HoleSpec("random-keep-n", n=256, seed=1)).valid,
        depth.valid)
    assert count_valid(
        apply_holes(depth, HoleSpec("random-keep-n", n=0, seed=1))) == 0


def test_apply_holes_exact_count_320x256():
    K = default_intrinsics(320, 256)
    depth, _, _ = render_scene(scene_by_name("boxroom"), K)
    kept = apply_holes(depth, HoleSpec("random-keep-n", n=2000, seed=7))
    assert count_valid(kept) == 2000


def test_apply_holes_deterministic_and_nested():
    K = default_intrinsics(32, 32)
    depth, _, _ = render_scene(scene_by_name("fronto"), K)
    a = apply_holes(depth, HoleSpec("random-keep-n", n=100, seed=9))
    b = apply_holes(depth, HoleSpec("random-keep-n", n=100, seed=9))
    assert np.array_equal(a.valid, b.valid)
    bigger = apply_holes(depth, HoleSpec("random-keep-n", n=300, seed=9))
    assert np.all(bigger.valid[a.valid])


def test_apply_holes_rectangles():
    K = default_intrinsics(16, 16)
    depth, _, _ = render_scene(scene_by_name("fronto"), K)
    out = apply_holes(depth, HoleSpec("rectangles",
                                      rectangles=((2, 3, 4, 5),)))
    assert count_valid(out) == 256 - 20
    assert not out.valid[3:8, 2:6].any()


def test_apply_holes_grazing_and_far():
    K = default_intrinsics(32, 32)
    depth, normals, _ = render_scene(scene_by_name("boxroom"), K)
    grazed = apply_holes(depth, HoleSpec("grazing-angle", max_angle_deg=45.0),
                         normals, K)
    assert count_valid(grazed) < count_valid(depth)
    far = apply_holes(depth, HoleSpec("far-range", max_depth_m=4.0))
    assert np.all(depth.data[far.valid] <= 4.0)
    assert count_valid(far) < count_valid(depth)


def test_perturb_normals_zero_sigma_identity():
    K = default_intrinsics(16, 16)
    _, normals, _ = render_scene(scene_by_name("slant"), K)
    out = perturb_normals(normals, 0.0, seed=1)
    assert np.array_equal(out.data, normals.data)


def test_perturb_normals_mean_deviation():
    # half-normal mean is sigma * sqrt(2/pi) ~ 7.98 degrees at sigma = 10
    K = default_intrinsics(128, 128)
    _, normals, _ = render_scene(scene_by_name("slant"), K)
    out = perturb_normals(normals, 10.0, seed=2)
    dots = np.clip(np.einsum("hwc,hwc->hw", out.data, normals.data), -1, 1)
    mean_dev = np.degrees(np.arccos(dots)).mean()
    assert 6.0 <= mean_dev <= 10.0


def test_perturb_normals_unit_and_reproducible():
    K = default_intrinsics(32, 32)
    _, normals, _ = render_scene(scene_by_name("sphere"), K)
    a = perturb_normals(normals, 15.0, seed=3)
    b = perturb_normals(normals, 15.0, seed=3)
    assert np.array_equal(a.data, b.data)
    norms = np.linalg.norm(a.data[a.defined()], axis=1)
    assert np.max(np.abs(norms - 1.0)) < 1e-6


def test_standard_suite_composition():
    entries = standard_suite(0)
    assert len(entries) == 20
    names = [e.name for e in entries]
    assert len(set(names)) == 20
    step_entries = [e for e in entries if e.name.startswith("step")]
    for e in entries:
        depth, normals, boundary = render_scene(e.scene, e.K)
        assert validate(depth) == []
    for e in step_entries:
        _, _, boundary = render_scene(e.scene, e.K)
        assert boundary.data.sum() >= 1


def test_render_color_flat_albedo():
    K = default_intrinsics(16, 16)
    color = render_color(scene_by_name("step"), K)
    assert color.shape == (16, 16, 3)
    assert len(np.unique(color.reshape(-1, 3), axis=0)) >= 2


def test_hole_spec_validation():
    with pytest.raises(ValueError):
        HoleSpec("random-keep-n", n=-1)
    with pytest.raises(ValueError):
        HoleSpec("random-drop-fraction", fraction=1.5)
    with pytest.raises(ValueError):
        HoleSpec("grazing-angle", max_angle_deg=95.0)
    with pytest.raises(ValueError):
        HoleSpec("far-range", max_depth_m=0.0)
    with pytest.raises(ValueError):
        HoleSpec("bogus")
