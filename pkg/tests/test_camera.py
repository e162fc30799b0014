
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pano3d.camera import (
    CameraIntrinsics,
    depth_to_inverse,
    intrinsics_from_fov,
    inverse_to_depth,
    project,
    unproject,
)
from pano3d.errors import BehindCameraError, InvalidArgumentError, InvalidDepthError, NearZeroError


def test_intrinsics_from_fov_cityscapes():
    k = intrinsics_from_fov(60, 2048, 1024)
    assert k.fx == pytest.approx(1773.62, abs=0.01)
    assert k.fy == k.fx
    assert k.cx == 1024 and k.cy == 512


def test_intrinsics_from_fov_trivial_90():
    k = intrinsics_from_fov(90, 2, 2)
    assert k.fx == pytest.approx(1.0, rel=1e-12)
    assert k.cx == 1 and k.cy == 1


def test_intrinsics_from_fov_coco():
    k = intrinsics_from_fov(60, 640, 480)
    assert k.fx == pytest.approx(554.256, abs=0.001)


@pytest.mark.parametrize("fov", [0, -10, 180, 200])
def test_intrinsics_fov_out_of_range(fov):
    with pytest.raises(InvalidArgumentError):
        intrinsics_from_fov(fov, 640, 480)


def test_intrinsics_invalid_dimensions():
    with pytest.raises(InvalidArgumentError):
        intrinsics_from_fov(60, 0, 480)
    with pytest.raises(InvalidArgumentError):
        CameraIntrinsics(fx=-1, fy=1, cx=0, cy=0, width=2, height=2)


def test_fov_monotone_in_fx():
    fs = [intrinsics_from_fov(fov, 640, 480).fx for fov in (30, 45, 60, 90, 120)]
    assert all(a > b for a, b in zip(fs, fs[1:]))


def test_project_optical_axis(cam_vga):
    uv = project([0.0, 0.0, 5.0], cam_vga)
    assert uv[0] == cam_vga.cx and uv[1] == cam_vga.cy


def test_project_known_point():
    k = CameraIntrinsics(fx=500, fy=500, cx=320, cy=240, width=640, height=480)
    uv = project([1.0, 0.0, 2.0], k)
    assert uv[0] == pytest.approx(570.0)


def test_project_behind_camera(cam_vga):
    with pytest.raises(BehindCameraError):
        project([0, 0, -1.0], cam_vga)
    with pytest.raises(BehindCameraError):
        project([0, 0, 0.0], cam_vga)


def test_unproject_principal_point(cam_vga):
    p = unproject([cam_vga.cx, cam_vga.cy], 3.0, cam_vga)
    np.testing.assert_allclose(p, [0, 0, 3.0])


def test_unproject_known_pixel():
    k = CameraIntrinsics(fx=500, fy=500, cx=320, cy=240, width=640, height=480)
    p = unproject([570.0, 240.0], 2.0, k)
    np.testing.assert_allclose(p, [1.0, 0.0, 2.0])


def test_unproject_invalid_depth(cam_vga):
    with pytest.raises(InvalidDepthError):
        unproject([1.0, 1.0], 0.0, cam_vga)


@settings(max_examples=200)
@given(
    x=st.floats(-50, 50),
    y=st.floats(-50, 50),
    z=st.floats(0.01, 100),
)
def test_project_unproject_roundtrip(x, y, z):
    k = intrinsics_from_fov(60, 640, 480)
    p = np.array([x, y, z])
    back = unproject(project(p, k), z, k)
    np.testing.assert_allclose(back, p, rtol=1e-9, atol=1e-9)


def test_unproject_project_roundtrip_batch(cam_vga):
    rng = np.random.default_rng(7)
    px = rng.uniform(0, [cam_vga.width, cam_vga.height], size=(1000, 2))
    z = rng.uniform(0.1, 50, size=1000)
    uv = project(unproject(px, z, cam_vga), cam_vga)
    np.testing.assert_allclose(uv, px, atol=1e-9)


def test_inverse_depth_examples():
    assert depth_to_inverse(2.0) == 0.5
    assert depth_to_inverse(1.0) == 1.0
    assert inverse_to_depth(0.5) == 2.0


def test_inverse_depth_near_zero():
    with pytest.raises(NearZeroError):
        depth_to_inverse(1e-7)
    with pytest.raises(NearZeroError):
        inverse_to_depth(0.0)


@given(z=st.floats(1e-5, 1e5))
def test_inverse_depth_involution(z):
    assert inverse_to_depth(depth_to_inverse(z)) == pytest.approx(z, rel=1e-12)
