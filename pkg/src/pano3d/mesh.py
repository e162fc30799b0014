"""Triangle meshes: OBJ loading (with fan triangulation), OBJ/PLY writing,
normalization, and uniform surface sampling."""

from __future__ import annotations

import numpy as np

from .errors import DegenerateShapeError, InputIOError, InvalidArgumentError


class TriangleMesh:
    __slots__ = ("vertices", "faces")

    def __init__(self, vertices, faces):
        v = np.asarray(vertices, dtype=np.float64).reshape(-1, 3)
        f = np.asarray(faces, dtype=np.int64).reshape(-1, 3)
        if f.size and (f.min() < 0 or f.max() >= len(v)):
            raise InvalidArgumentError("face index out of range")
        self.vertices = v
        self.faces = f

    def num_triangles(self) -> int:
        return len(self.faces)

    def extent(self) -> np.ndarray:
        """Axis-aligned extent (max - min) per axis."""
        if len(self.vertices) == 0:
            return np.zeros(3)
        return self.vertices.max(axis=0) - self.vertices.min(axis=0)

    def transformed(self, scale: float, translation) -> "TriangleMesh":
        t = np.asarray(translation, dtype=np.float64).reshape(3)
        return TriangleMesh(self.vertices * scale + t, self.faces)

    def normalized(self) -> "TriangleMesh":
        """Centroid moved to the origin, then scaled so max |coordinate| <= 1."""
        if len(self.vertices) == 0:
            raise DegenerateShapeError("cannot normalize an empty mesh")
        v = self.vertices - self.vertices.mean(axis=0)
        m = np.abs(v).max()
        if m <= 0:
            raise DegenerateShapeError("mesh collapses to a single point")
        return TriangleMesh(v / m, self.faces)

    def triangle_areas(self) -> np.ndarray:
        a = self.vertices[self.faces[:, 0]]
        b = self.vertices[self.faces[:, 1]]
        c = self.vertices[self.faces[:, 2]]
        return 0.5 * np.linalg.norm(np.cross(b - a, c - a), axis=1)

    def sample_points(self, n: int, rng: np.random.Generator | None = None) -> np.ndarray:
        """Uniform area-weighted surface samples, shape (n, 3)."""
        if self.num_triangles() == 0:
            raise DegenerateShapeError("cannot sample a mesh with no triangles")
        rng = rng or np.random.default_rng(0)
        areas = self.triangle_areas()
        total = areas.sum()
        if total <= 0:
            raise DegenerateShapeError("mesh has zero surface area")
        idx = rng.choice(len(areas), size=n, p=areas / total)
        r1 = np.sqrt(rng.random(n))
        r2 = rng.random(n)
        a = self.vertices[self.faces[idx, 0]]
        b = self.vertices[self.faces[idx, 1]]
        c = self.vertices[self.faces[idx, 2]]
        return (1 - r1)[:, None] * a + (r1 * (1 - r2))[:, None] * b + (r1 * r2)[:, None] * c


def load_obj(path) -> TriangleMesh:
    """Read vertices and faces from an OBJ file; polygons are fan-triangulated."""
    vertices = []
    faces = []
    try:
        with open(path, "r") as fh:
            for line in fh:
                parts = line.split()
                if not parts:
                    continue
                if parts[0] == "v":
                    vertices.append([float(parts[1]), float(parts[2]), float(parts[3])])
                elif parts[0] == "f":
                    idx = [int(p.split("/")[0]) for p in parts[1:]]
                    idx = [i - 1 if i > 0 else len(vertices) + i for i in idx]
                    for j in range(1, len(idx) - 1):
                        faces.append([idx[0], idx[j], idx[j + 1]])
    except OSError as e:
        raise InputIOError(f"cannot read OBJ {path}: {e}") from e
    except (ValueError, IndexError) as e:
        raise InputIOError(f"malformed OBJ {path}: {e}") from e
    if not vertices:
        raise InputIOError(f"OBJ {path} contains no vertices")
    return TriangleMesh(np.array(vertices), np.array(faces, dtype=np.int64).reshape(-1, 3))


def load_normalized_mesh(path) -> TriangleMesh:
    """Load an OBJ and re-normalize to centroid-origin, max |coord| <= 1."""
    return load_obj(path).normalized()


def save_obj(mesh: TriangleMesh, path) -> None:
    with open(path, "w") as fh:
        for v in mesh.vertices:
            fh.write(f"v {v[0]:.9g} {v[1]:.9g} {v[2]:.9g}\n")
        for f in mesh.faces:
            fh.write(f"f {f[0] + 1} {f[1] + 1} {f[2] + 1}\n")


def save_ply_mesh(mesh: TriangleMesh, path) -> None:
    with open(path, "w") as fh:
        fh.write("ply\nformat ascii 1.0\n")
        fh.write(f"element vertex {len(mesh.vertices)}\n")
        fh.write("property float x\nproperty float y\nproperty float z\n")
        fh.write(f"element face {len(mesh.faces)}\n")
        fh.write("property list uchar int vertex_indices\nend_header\n")
        for v in mesh.vertices:
            fh.write(f"{v[0]:.9g} {v[1]:.9g} {v[2]:.9g}\n")
        for f in mesh.faces:
            fh.write(f"3 {f[0]} {f[1]} {f[2]}\n")


def save_ply_points(points: np.ndarray, path, segment_ids=None, category_ids=None) -> None:
    """Write a point cloud as ASCII PLY, optionally with per-point labels."""
    pts = np.asarray(points, dtype=np.float64).reshape(-1, 3)
    with_labels = segment_ids is not None
    with open(path, "w") as fh:
        fh.write("ply\nformat ascii 1.0\n")
        fh.write(f"element vertex {len(pts)}\n")
        fh.write("property float x\nproperty float y\nproperty float z\n")
        if with_labels:
            fh.write("property int segment_id\nproperty int category_id\n")
        fh.write("end_header\n")
        if with_labels:
            for p, s, c in zip(pts, segment_ids, category_ids):
                fh.write(f"{p[0]:.9g} {p[1]:.9g} {p[2]:.9g} {int(s)} {int(c)}\n")
        else:
            for p in pts:
                fh.write(f"{p[0]:.9g} {p[1]:.9g} {p[2]:.9g}\n")


def load_ply_points(path) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Read an ASCII PLY point cloud written by save_ply_points."""
    try:
        with open(path, "r") as fh:
            line = fh.readline().strip()
            if line != "ply":
                raise InputIOError(f"{path} is not a PLY file")
            n = 0
            props = []
            while True:
                line = fh.readline()
                if not line:
                    raise InputIOError(f"{path}: truncated header")
                line = line.strip()
                if line.startswith("element vertex"):
                    n = int(line.split()[-1])
                elif line.startswith("property") and not line.startswith("property list"):
                    props.append(line.split()[-1])
                elif line == "end_header":
                    break
            data = np.loadtxt(fh, max_rows=n, ndmin=2) if n else np.zeros((0, len(props)))
    except OSError as e:
        raise InputIOError(f"cannot read PLY {path}: {e}") from e
    pts = data[:, :3]
    if "segment_id" in props:
        i = props.index("segment_id")
        seg = data[:, i].astype(np.int64)
        cat = data[:, i + 1].astype(np.int64)
    else:
        seg = np.zeros(len(pts), dtype=np.int64)
        cat = np.zeros(len(pts), dtype=np.int64)
    return pts, seg, cat
