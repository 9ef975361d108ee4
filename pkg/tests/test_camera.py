import numpy as np
import pytest

from depthfill import (
    CameraIntrinsics,
    back_project,
    boundaries_from_depth,
    derivatives_from_depth,
    normals_from_depth,
    ray_direction,
)
from depthfill.images import DERIVATIVE_OFFSETS
from conftest import make_depth


def test_intrinsics_invariants():
    CameraIntrinsics(100, 100, 32, 32, 64, 64)
    with pytest.raises(ValueError):
        CameraIntrinsics(0, 100, 32, 32, 64, 64)
    with pytest.raises(ValueError):
        CameraIntrinsics(100, 100, 64, 32, 64, 64)


def test_ray_direction_principal_point():
    K = CameraIntrinsics(100, 100, 3, 4, 10, 10)
    assert np.allclose(ray_direction((3, 4), K), [0, 0, 1])


def test_ray_direction_identity(identity_K):
    assert np.allclose(ray_direction((1, 0), identity_K), [1, 0, 1])


def test_ray_direction_hand_value():
    K = CameraIntrinsics(100, 100, 2, 2, 8, 8)
    assert np.allclose(ray_direction((4, 2), K), [0.02, 0, 1])


def test_ray_direction_bounds():
    K = CameraIntrinsics(100, 100, 2, 2, 8, 8)
    with pytest.raises(IndexError):
        ray_direction((8, 0), K)


def test_back_project():
    K = CameraIntrinsics(100, 100, 2, 2, 8, 8)
    assert np.allclose(back_project((2, 2), 3.0, K), [0, 0, 3])
    assert np.allclose(back_project((4, 2), 2.0, K), [0.04, 0, 2])
    with pytest.raises(ValueError):
        back_project((2, 2), 0.0, K)


def test_back_project_identity(identity_K):
    assert np.allclose(back_project((1, 0), 2.0, identity_K), [2, 0, 2])


def test_back_project_z_equals_depth_exactly():
    K = CameraIntrinsics(123.4, 77.7, 31.2, 15.9, 64, 32)
    rng = np.random.default_rng(0)
    for _ in range(50):
        u = rng.integers(0, 64)
        v = rng.integers(0, 32)
        d = float(rng.uniform(0.1, 50))
        assert back_project((u, v), d, K)[2] == d


def test_back_project_scale_consistency():
    K = CameraIntrinsics(55, 60, 10, 12, 32, 32)
    p = (7, 21)
    assert np.allclose(back_project(p, 3.0, K), 3.0 * ray_direction(p, K))
    assert np.allclose(back_project(p, 6.0, K), 2.0 * back_project(p, 3.0, K))


def test_normals_fronto_parallel_plane():
    K = CameraIntrinsics(50, 50, 8, 8, 16, 16)
    nm = normals_from_depth(make_depth(np.full((16, 16), 2.0)), K)
    assert np.allclose(nm.data, np.broadcast_to([0, 0, -1], (16, 16, 3)))


def test_normals_slanted_plane():
    # plane x + z = 4: depth along ray (a, b, 1) is 4 / (1 + a)
    w = h = 16
    K = CameraIntrinsics(20.0, 20.0, 8.0, 8.0, w, h)
    a = (np.arange(w) - K.cx) / K.fx
    depth = make_depth(np.tile(4.0 / (1.0 + a), (h, 1)))
    nm = normals_from_depth(depth, K)
    expected = np.array([-1, 0, -1]) / np.sqrt(2)
    interior = nm.data[1:-1, 1:-1]
    assert np.max(np.abs(interior - expected)) < 1e-6


def test_normals_single_pixel_invalid():
    K = CameraIntrinsics(1, 1, 0, 0, 1, 1)
    nm = normals_from_depth(make_depth([[2.0]]), K)
    assert np.all(nm.data == 0)


def test_normals_hole_adjacent_fall_back():
    K = CameraIntrinsics(50, 50, 8, 8, 16, 16)
    valid = np.ones((16, 16), bool)
    valid[5:8, 5:8] = False
    nm = normals_from_depth(make_depth(np.full((16, 16), 2.0), valid), K)
    defined = nm.defined()
    assert np.allclose(nm.data[defined][:, 2], -1)
    assert not defined[6, 6]


def test_boundaries_constant_depth():
    b = boundaries_from_depth(make_depth(np.full((4, 4), 2.0)), 0.1)
    assert np.all(b.data == 0)


def test_boundaries_step():
    data = np.ones((4, 4))
    data[:, 2:] = 3.0
    b = boundaries_from_depth(make_depth(data), 0.1)
    expected = np.zeros((4, 4))
    expected[:, 1:3] = 1.0  # both columns adjacent to the jump
    assert np.array_equal(b.data, expected)


def test_boundaries_threshold_above_jump():
    data = np.ones((4, 4))
    data[:, 2:] = 3.0
    b = boundaries_from_depth(make_depth(data), 5.0)
    assert np.all(b.data == 0)


def test_boundaries_rejects_bad_threshold():
    with pytest.raises(ValueError):
        boundaries_from_depth(make_depth(np.ones((2, 2))), 0.0)


def test_derivatives_from_depth_directions():
    data = np.arange(9, dtype=float).reshape(3, 3) + 1.0
    d = derivatives_from_depth(make_depth(data))
    # center pixel (1, 1) has value 5; east neighbor 6, north 2, etc.
    center = d.data[1, 1]
    for i, (dx, dy) in enumerate(DERIVATIVE_OFFSETS):
        assert center[i] == data[1 + dy, 1 + dx] - data[1, 1]
    # out-of-bounds directions are zero
    assert d.data[0, 0, 2] == 0.0  # N from top row
