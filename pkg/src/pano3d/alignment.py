"""Placement of normalized instance meshes into camera coordinates.

The z center of an object is the mean of the high and low nearest-rank
percentiles of valid in-mask depths; the amodal bounding box drives both
the x-y translation and the isotropic scale.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from .backproject import DepthMap
from .camera import CameraIntrinsics, unproject
from .errors import DegenerateShapeError, EmptySupportError, InvalidArgumentError
from .masks import BinaryMask, bbox_of_mask
from .mesh import TriangleMesh
from .panoptic import InstanceObservation


@dataclass
class PlacedThing:
    mesh: TriangleMesh  # camera coordinates
    segment_id: int
    category_id: int
    z_c: float
    scale: float

    def __post_init__(self):
        if self.z_c <= 0:
            raise InvalidArgumentError(f"z_c must be positive, got {self.z_c}")


def nearest_rank_percentile(sorted_values: np.ndarray, p: float) -> float:
    """Nearest-rank percentile: the value at 1-based index ceil(p/100 * n)."""
    n = len(sorted_values)
    rank = int(np.ceil(p / 100.0 * n))
    rank = min(max(rank, 1), n)
    return float(sorted_values[rank - 1])


def estimate_z_center(
    depth: DepthMap, mask: BinaryMask, p_lo: float = 2.0, p_hi: float = 98.0
) -> float:
    """Mean of the p_lo-th and p_hi-th nearest-rank percentiles of the valid
    depths inside the mask."""
    if mask.data.shape != depth.depth.shape:
        raise InvalidArgumentError("mask and depth dimensions differ")
    values = depth.depth[mask.data & depth.valid]
    if values.size == 0:
        raise EmptySupportError("no valid depth pixel inside the mask")
    values = np.sort(values)
    return 0.5 * (nearest_rank_percentile(values, p_lo) + nearest_rank_percentile(values, p_hi))


def normalized_depth_extent(d_z: float, z_c: float, f: float, h: float) -> float:
    """Scale-normalized depth extent: (d_z / z_c) * (f / h)."""
    if z_c <= 0 or f <= 0 or h <= 0:
        raise InvalidArgumentError("z_c, f, and h must all be positive")
    return (d_z / z_c) * (f / h)


def depth_extent(dz_norm: float, z_c: float, f: float, h: float) -> float:
    """Inverse of normalized_depth_extent: d_z = dz_norm * z_c * h / f."""
    if z_c <= 0 or f <= 0 or h <= 0:
        raise InvalidArgumentError("z_c, f, and h must all be positive")
    return dz_norm * z_c * h / f


def place_mesh(
    mesh: TriangleMesh, obs: InstanceObservation, z_c: float, k: CameraIntrinsics
) -> PlacedThing:
    """Scale and translate a normalized mesh into camera coordinates.

    Isotropic scale makes the mesh's vertical extent, seen at depth z_c,
    span the amodal bbox height; translation puts the mesh center on the
    back-projected bbox center.
    """
    if z_c <= 0:
        raise InvalidArgumentError(f"z_c must be positive, got {z_c}")
    bbox = bbox_of_mask(obs.amodal_mask)
    extent_y = float(mesh.extent()[1])
    if extent_y <= 0:
        raise DegenerateShapeError("mesh has zero vertical extent")
    scale = (bbox.h * z_c / k.fy) / extent_y
    translation = unproject(np.array(bbox.center_pixel()), z_c, k)
    placed = mesh.transformed(scale, translation)
    return PlacedThing(
        mesh=placed,
        segment_id=obs.segment_id if obs.segment_id is not None else 0,
        category_id=obs.category_id,
        z_c=z_c,
        scale=scale,
    )


def chamfer_distance(a: np.ndarray, b: np.ndarray) -> float:
    """Symmetric mean nearest-neighbor distance between two point samples."""
    a = np.asarray(a, dtype=np.float64).reshape(-1, 3)
    b = np.asarray(b, dtype=np.float64).reshape(-1, 3)
    if len(a) == 0 or len(b) == 0:
        raise InvalidArgumentError("chamfer distance needs nonempty samples")
    d_ab = cKDTree(b).query(a)[0]
    d_ba = cKDTree(a).query(b)[0]
    return 0.5 * (float(d_ab.mean()) + float(d_ba.mean()))
