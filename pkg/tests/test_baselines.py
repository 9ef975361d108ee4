import numpy as np
import pytest

from depthfill import inpaint_joint_bilateral, inpaint_smooth
from depthfill.errors import SingularSystem, UnfilledPixels
from conftest import make_depth


def test_smooth_constant_fill():
    valid = np.ones((6, 6), bool)
    valid[2:4, 2:4] = False
    out = inpaint_smooth(make_depth(np.full((6, 6), 2.0), valid))
    assert np.max(np.abs(out.data - 2.0)) < 1e-8
    assert np.all(out.valid)


def test_smooth_linear_ramp_vs_dense_oracle():
    valid = np.array([[True, False, False, False, True]])
    raw = make_depth(np.array([[1.0, 0, 0, 0, 3.0]]), valid)
    out = inpaint_smooth(raw)
    # independent oracle: dense normal equations of the 5-unknown system
    lam_d, lam_s = 1000.0, 1e-3
    A = np.zeros((5, 5))
    b = np.zeros(5)
    for i, d in ((0, 1.0), (4, 3.0)):
        A[i, i] += lam_d
        b[i] += lam_d * d
    for p in range(4):
        r = np.zeros(5)
        r[p], r[p + 1] = 1, -1
        A += lam_s * np.outer(r, r)
    oracle = np.linalg.solve(A, b)
    assert np.allclose(out.data[0], oracle, atol=1e-9)
    assert np.allclose(out.data[0, 1:4], [1.5, 2.0, 2.5], atol=1e-3)


def test_smooth_preserves_fully_observed():
    rng = np.random.default_rng(0)
    raw = make_depth(rng.uniform(1, 3, (8, 8)))
    out = inpaint_smooth(raw)
    assert np.max(np.abs(out.data - raw.data) / raw.data) < 1e-4


def test_smooth_requires_observation():
    raw = make_depth(np.ones((3, 3)), np.zeros((3, 3), bool))
    with pytest.raises(SingularSystem):
        inpaint_smooth(raw)


def test_bilateral_uniform_neighborhood():
    valid = np.ones((5, 5), bool)
    valid[2, 2] = False
    raw = make_depth(np.full((5, 5), 2.0), valid)
    color = np.full((5, 5, 3), 0.5)
    out = inpaint_joint_bilateral(raw, color)
    assert out.data[2, 2] == pytest.approx(2.0)
    assert np.all(out.valid)


def test_bilateral_respects_color_edge():
    # hole between dark-left depth 1 and bright-right depth 3; with a tight
    # color sigma the dark hole pixel follows the left side
    w, h = 7, 5
    valid = np.ones((h, w), bool)
    valid[:, 3] = False
    data = np.ones((h, w))
    data[:, 4:] = 3.0
    color = np.zeros((h, w, 3))
    color[:, 4:] = 1.0  # hole column stays black
    raw = make_depth(data, valid)
    out = inpaint_joint_bilateral(raw, color, sigma_spatial=8.0,
                                  sigma_color=0.05, radius=3)
    # hand evaluation of the weight formula: cross-color weight is
    # exp(-3 / (2 * 0.05^2)) ~ 0, so the fill is dominated by depth-1 pixels
    assert abs(out.data[2, 3] - 1.0) < 0.05


def test_bilateral_identity_on_fully_observed():
    rng = np.random.default_rng(1)
    raw = make_depth(rng.uniform(1, 3, (6, 6)))
    color = rng.uniform(size=(6, 6, 3))
    out = inpaint_joint_bilateral(raw, color)
    assert np.array_equal(out.data, raw.data)


def test_bilateral_preserves_observed_exactly():
    valid = np.ones((6, 6), bool)
    valid[3, 3] = False
    raw = make_depth(np.full((6, 6), 2.0), valid)
    out = inpaint_joint_bilateral(raw, np.zeros((6, 6, 3)))
    assert np.array_equal(out.data[valid], raw.data[valid])


def test_bilateral_multi_pass_grows_inward():
    valid = np.ones((9, 9), bool)
    valid[1:8, 1:8] = False
    raw = make_depth(np.full((9, 9), 2.0), valid)
    out = inpaint_joint_bilateral(raw, np.full((9, 9, 3), 0.5), radius=1,
                                  max_passes=8)
    assert np.all(out.valid)
    assert np.allclose(out.data, 2.0)


def test_bilateral_reports_unfillable():
    valid = np.ones((9, 9), bool)
    valid[1:8, 1:8] = False
    raw = make_depth(np.full((9, 9), 2.0), valid)
    with pytest.raises(UnfilledPixels) as e:
        inpaint_joint_bilateral(raw, np.full((9, 9, 3), 0.5), radius=1,
                                max_passes=1)
    assert (4, 4) in e.value.pixels


def test_bilateral_rejects_bad_inputs():
    raw = make_depth(np.ones((3, 3)))
    with pytest.raises(ValueError):
        inpaint_joint_bilateral(raw, np.zeros((4, 4, 3)))
    with pytest.raises(ValueError):
        inpaint_joint_bilateral(raw, np.zeros((3, 3, 3)), sigma_spatial=0)
