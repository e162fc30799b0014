"""Assembled 3-D scene: labeled stuff point cloud, placed thing meshes, and
layout-box-derived stuff surfaces."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .alignment import PlacedThing
from .backproject import LabeledPointCloud
from .errors import DegenerateLayoutError, InvalidArgumentError
from .mesh import TriangleMesh

# quad corner order for the face of a box with corner-index bit ``axis`` fixed
# to ``side``; corner index bits select the endpoint along each edge vector
_FACE_QUADS = {
    (0, 0): (0, 2, 6, 4),
    (0, 1): (1, 3, 7, 5),
    (1, 0): (0, 1, 5, 4),
    (1, 1): (2, 3, 7, 6),
    (2, 0): (0, 1, 3, 2),
    (2, 1): (4, 5, 7, 6),
}

_PARALLEL_TOL = 1e-6


class LayoutBox:
    """Oriented cuboid given by 8 corners; corner i sits at
    c0 + b0*e0 + b1*e1 + b2*e2 where (b0, b1, b2) are the bits of i."""

    def __init__(self, corners):
        c = np.asarray(corners, dtype=np.float64)
        if c.shape != (8, 3):
            raise InvalidArgumentError(f"layout box needs 8 corners, got shape {c.shape}")
        e = np.stack([c[1] - c[0], c[2] - c[0], c[4] - c[0]])
        scale = max(np.abs(e).max(), 1.0)
        for i in range(8):
            expect = c[0] + (i & 1) * e[0] + ((i >> 1) & 1) * e[1] + ((i >> 2) & 1) * e[2]
            if np.abs(c[i] - expect).max() > _PARALLEL_TOL * scale:
                raise InvalidArgumentError("corners do not form a parallelepiped")
        self.corners = c
        self.edges = e

    @classmethod
    def axis_aligned(cls, center, size) -> "LayoutBox":
        center = np.asarray(center, dtype=np.float64)
        half = np.asarray(size, dtype=np.float64) / 2.0
        corners = np.array(
            [
                center + half * np.array([(i & 1) * 2 - 1, ((i >> 1) & 1) * 2 - 1, ((i >> 2) & 1) * 2 - 1])
                for i in range(8)
            ]
        )
        return cls(corners)

    def contains(self, point) -> bool:
        coords = np.linalg.solve(self.edges.T, np.asarray(point, dtype=np.float64) - self.corners[0])
        return bool(np.all(coords > 0) and np.all(coords < 1))

    def center(self) -> np.ndarray:
        return self.corners.mean(axis=0)


def layout_box_to_stuff_meshes(
    box: LayoutBox, categories: dict[str, int]
) -> list[tuple[TriangleMesh, int]]:
    """Turn a room layout box into 6 inward-facing face meshes labeled
    wall/ceiling/floor.

    The face whose inward normal points most toward -y (up, in y-down camera
    coordinates) is the floor; most toward +y is the ceiling; the other four
    are walls. The camera origin must lie inside the box.
    """
    for key in ("wall", "ceiling", "floor"):
        if key not in categories:
            raise InvalidArgumentError(f"categories must provide a {key!r} id")
    if not box.contains(np.zeros(3)):
        raise DegenerateLayoutError("camera origin is not inside the layout box")

    center = box.center()
    faces = []
    for quad_key, quad in _FACE_QUADS.items():
        pts = box.corners[list(quad)]
        normal = np.cross(pts[1] - pts[0], pts[2] - pts[0])
        norm = np.linalg.norm(normal)
        if norm == 0:
            raise DegenerateLayoutError("degenerate face in layout box")
        normal /= norm
        # orient inward (toward the box center)
        if np.dot(normal, center - pts.mean(axis=0)) < 0:
            pts = pts[::-1]
            normal = -normal
        mesh = TriangleMesh(pts, [[0, 1, 2], [0, 2, 3]])
        faces.append((mesh, normal))

    down = np.array([f[1][1] for f in faces])  # inward-normal y components
    floor_idx = int(np.argmin(down))  # most aligned with -y
    ceiling_idx = int(np.argmax(down))
    out = []
    for i, (mesh, _normal) in enumerate(faces):
        if i == floor_idx:
            cat = categories["floor"]
        elif i == ceiling_idx:
            cat = categories["ceiling"]
        else:
            cat = categories["wall"]
        out.append((mesh, cat))
    return out


@dataclass
class Scene3D:
    """Stuff point cloud plus placed thing meshes; segment ids are unique
    across all members. ``stuff_meshes`` holds layout-derived stuff surfaces
    as (mesh, segment_id, category_id)."""

    stuff: LabeledPointCloud
    things: list[PlacedThing] = field(default_factory=list)
    stuff_meshes: list[tuple[TriangleMesh, int, int]] = field(default_factory=list)

    def __post_init__(self):
        self.segment_registry()  # validates uniqueness

    def segment_registry(self) -> dict[int, tuple[int, bool]]:
        """segment_id -> (category_id, is_thing) across all scene members."""
        registry: dict[int, tuple[int, bool]] = {}
        if len(self.stuff):
            pairs = np.unique(
                np.stack([self.stuff.segment_ids, self.stuff.category_ids], axis=1), axis=0
            )
            for seg, cat in pairs:
                seg, cat = int(seg), int(cat)
                prev = registry.setdefault(seg, (cat, False))
                if prev != (cat, False):
                    raise InvalidArgumentError(f"segment id {seg} reused with conflicting labels")
        for mesh, seg, cat in self.stuff_meshes:
            prev = registry.setdefault(seg, (cat, False))
            if prev != (cat, False):
                raise InvalidArgumentError(f"segment id {seg} reused with conflicting labels")
        for thing in self.things:
            if thing.segment_id in registry:
                raise InvalidArgumentError(f"segment id {thing.segment_id} reused across scene members")
            registry[thing.segment_id] = (thing.category_id, True)
        return registry
