"""Depth maps and back-projection of stuff pixels into a labeled point cloud."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .camera import DEPTH_EPS, CameraIntrinsics
from .errors import InvalidArgumentError
from .panoptic import VOID_ID, PanopticMap


class DepthMap:
    """Per-pixel metric depth with a validity flag; invalid pixels are
    excluded from every statistic downstream."""

    def __init__(self, depth, valid=None):
        d = np.asarray(depth, dtype=np.float64)
        if d.ndim != 2:
            raise InvalidArgumentError(f"depth must be 2-D, got shape {d.shape}")
        self.depth = d
        if valid is None:
            self.valid = np.isfinite(d) & (d > DEPTH_EPS)
        else:
            v = np.asarray(valid, dtype=bool)
            if v.shape != d.shape:
                raise InvalidArgumentError("validity mask shape does not match depth")
            self.valid = v & np.isfinite(d) & (d > DEPTH_EPS)

    @property
    def height(self) -> int:
        return self.depth.shape[0]

    @property
    def width(self) -> int:
        return self.depth.shape[1]


@dataclass
class LabeledPointCloud:
    """Points in camera coordinates with panoptic labels, row-major order."""

    points: np.ndarray  # (N, 3) float64
    segment_ids: np.ndarray  # (N,) int64
    category_ids: np.ndarray  # (N,) int64

    def __post_init__(self):
        self.points = np.asarray(self.points, dtype=np.float64).reshape(-1, 3)
        self.segment_ids = np.asarray(self.segment_ids, dtype=np.int64).reshape(-1)
        self.category_ids = np.asarray(self.category_ids, dtype=np.int64).reshape(-1)
        if not (len(self.points) == len(self.segment_ids) == len(self.category_ids)):
            raise InvalidArgumentError("point/label lengths differ")

    def __len__(self) -> int:
        return len(self.points)

    @classmethod
    def empty(cls) -> "LabeledPointCloud":
        return cls(np.zeros((0, 3)), np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64))


def filter_depth(depth: DepthMap, z_min: float = 0.1, z_max: float = 1000.0) -> DepthMap:
    """Invalidate pixels with depth outside (z_min, z_max]."""
    if not (0 < z_min < z_max):
        raise InvalidArgumentError(f"need 0 < z_min < z_max, got ({z_min}, {z_max})")
    keep = depth.valid & (depth.depth > z_min) & (depth.depth <= z_max)
    return DepthMap(depth.depth, keep)


def backproject_stuff(depth: DepthMap, pan: PanopticMap, k: CameraIntrinsics) -> LabeledPointCloud:
    """Lift every valid stuff pixel to a 3-D point at its pixel center.

    Exactly one point per valid pixel whose segment is stuff (non-void and
    not a thing); output order is row-major.
    """
    if (depth.height, depth.width) != (pan.height, pan.width):
        raise InvalidArgumentError("depth and panoptic dimensions differ")
    if (k.height, k.width) != (depth.height, depth.width):
        raise InvalidArgumentError("intrinsics dimensions differ from the rasters")

    stuff_ids = np.array([s.segment_id for s in pan.stuff_segments()], dtype=np.int64)
    is_stuff = np.isin(pan.segment_ids, stuff_ids) & (pan.segment_ids != VOID_ID)
    select = is_stuff & depth.valid
    rows, cols = np.nonzero(select)
    if rows.size == 0:
        return LabeledPointCloud.empty()

    z = depth.depth[rows, cols]
    u = cols + 0.5
    v = rows + 0.5
    x = (u - k.cx) * z / k.fx
    y = (v - k.cy) * z / k.fy
    seg = pan.segment_ids[rows, cols]
    cat = np.array([pan.segments[int(s)].category_id for s in seg], dtype=np.int64)
    return LabeledPointCloud(np.stack([x, y, z], axis=1), seg, cat)
