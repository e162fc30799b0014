"""Pinhole camera model: intrinsics from a field-of-view heuristic,
projection/unprojection, and inverse-depth conversions.

Camera coordinates are right-handed with x right, y down, z forward, so
the floor of an upright scene sits at positive y. Pixel coordinates are
continuous, origin at the top-left corner, u right and v down; the center
of integer pixel (col, row) is (col + 0.5, row + 0.5).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import BehindCameraError, InvalidArgumentError, InvalidDepthError, NearZeroError

DEPTH_EPS = 1e-6


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
            raise InvalidArgumentError(f"focal lengths must be positive, got fx={self.fx}, fy={self.fy}")
        if not (0 <= self.cx < self.width) or not (0 <= self.cy < self.height):
            raise InvalidArgumentError(
                f"principal point ({self.cx}, {self.cy}) outside image {self.width}x{self.height}"
            )

    def to_dict(self) -> dict:
        return {
            "fx": self.fx,
            "fy": self.fy,
            "cx": self.cx,
            "cy": self.cy,
            "width": self.width,
            "height": self.height,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "CameraIntrinsics":
        if "fov_deg" in d:
            return intrinsics_from_fov(d["fov_deg"], d["width"], d["height"])
        return cls(
            fx=float(d["fx"]),
            fy=float(d["fy"]),
            cx=float(d["cx"]),
            cy=float(d["cy"]),
            width=int(d["width"]),
            height=int(d["height"]),
        )


def intrinsics_from_fov(fov_deg: float, width: int, height: int) -> CameraIntrinsics:
    """Build intrinsics from a horizontal field of view.

    Square pixels (fx == fy) and a centered principal point are assumed;
    fx = (width / 2) / tan(fov / 2).
    """
    if not (0 < fov_deg < 180):
        raise InvalidArgumentError(f"fov_deg must be in (0, 180), got {fov_deg}")
    if width < 1 or height < 1:
        raise InvalidArgumentError(f"image size must be >= 1x1, got {width}x{height}")
    f = (width / 2.0) / math.tan(math.radians(fov_deg) / 2.0)
    return CameraIntrinsics(fx=f, fy=f, cx=width / 2.0, cy=height / 2.0, width=width, height=height)


def project(point, k: CameraIntrinsics):
    """Project camera-space point(s) (..., 3) to pixel coordinates (..., 2).

    Raises BehindCameraError if any z <= 0.
    """
    p = np.asarray(point, dtype=np.float64)
    z = p[..., 2]
    if np.any(z <= 0):
        raise BehindCameraError("cannot project points with z <= 0")
    u = k.fx * p[..., 0] / z + k.cx
    v = k.fy * p[..., 1] / z + k.cy
    return np.stack([u, v], axis=-1)


def unproject(pixel, depth, k: CameraIntrinsics):
    """Lift pixel coordinates (..., 2) with depth(s) to camera-space points (..., 3)."""
    px = np.asarray(pixel, dtype=np.float64)
    z = np.asarray(depth, dtype=np.float64)
    if np.any(z <= 0):
        raise InvalidDepthError("depth must be positive")
    x = (px[..., 0] - k.cx) * z / k.fx
    y = (px[..., 1] - k.cy) * z / k.fy
    return np.stack([x, y, np.broadcast_to(z, x.shape)], axis=-1)


def depth_to_inverse(depth):
    z = np.asarray(depth, dtype=np.float64)
    if np.any(z <= DEPTH_EPS):
        raise NearZeroError(f"depth must exceed {DEPTH_EPS}")
    out = 1.0 / z
    return float(out) if out.ndim == 0 else out


def inverse_to_depth(inv):
    w = np.asarray(inv, dtype=np.float64)
    if np.any(w <= DEPTH_EPS):
        raise NearZeroError(f"inverse depth must exceed {DEPTH_EPS}")
    out = 1.0 / w
    return float(out) if out.ndim == 0 else out
