import numpy as np
import pytest

from depthfill import DepthImage
from depthfill.camera import CameraIntrinsics


@pytest.fixture
def identity_K():
    # fx = fy = 1, principal point at the origin: ray (u, v, 1)
    return CameraIntrinsics(1.0, 1.0, 0.0, 0.0, 8, 8)


def make_depth(data, valid=None):
    data = np.asarray(data, float)
    if valid is None:
        valid = np.ones(data.shape, bool)
    return DepthImage(data, valid)
