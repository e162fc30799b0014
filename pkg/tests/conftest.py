import numpy as np
import pytest

from pano3d.backproject import DepthMap, backproject_stuff
from pano3d.camera import CameraIntrinsics, intrinsics_from_fov
from pano3d.mesh import TriangleMesh
from pano3d.panoptic import PanopticMap, SegmentInfo
from pano3d.raster import rasterize_scene, warmup
from pano3d.scene import Scene3D


@pytest.fixture(scope="session", autouse=True)
def jit_warmup():
    # compile the raster kernels once so timed tests measure the kernels only
    warmup()


def random_panoptic(rng, width, height, max_segments=6, max_category=4, full_cover=False):
    """Random panoptic map built from painted rectangles (plus optional
    background fill), with roughly half the segments marked as things."""
    raster = np.zeros((height, width), dtype=np.int64)
    next_id = 1
    n = int(rng.integers(1, max_segments + 1))
    if full_cover:
        raster[:] = next_id
        next_id += 1
        n = max(0, n - 1)
    for _ in range(n):
        x0 = int(rng.integers(0, width))
        y0 = int(rng.integers(0, height))
        x1 = int(rng.integers(x0, width)) + 1
        y1 = int(rng.integers(y0, height)) + 1
        raster[y0:y1, x0:x1] = next_id
        next_id += 1
    infos = [
        SegmentInfo(
            int(seg),
            int(rng.integers(1, max_category + 1)),
            is_thing=bool(rng.integers(0, 2)),
            score=float(rng.random()),
        )
        for seg in np.unique(raster)
        if seg != 0
    ]
    return PanopticMap(raster, infos)


def pixel_rect_mesh(k: CameraIntrinsics, x0, y0, x1, y1, z):
    """Fronto-parallel rectangle whose corners sit at the centers of the
    bbox corner pixels, so it rasterizes to exactly that pixel rectangle."""
    u0, u1 = x0 + 0.5, x1 + 0.5
    v0, v1 = y0 + 0.5, y1 + 0.5
    corners = []
    for u, v in ((u0, v0), (u1, v0), (u1, v1), (u0, v1)):
        corners.append([(u - k.cx) * z / k.fx, (v - k.cy) * z / k.fy, z])
    return TriangleMesh(np.array(corners), [[0, 1, 2], [0, 2, 3]])


def grid_mesh(nx, ny, extent=1.0):
    """Flat grid of 2*nx*ny triangles in the x-y plane, centered at origin."""
    xs = np.linspace(-extent / 2, extent / 2, nx + 1)
    ys = np.linspace(-extent / 2, extent / 2, ny + 1)
    gx, gy = np.meshgrid(xs, ys)
    verts = np.stack([gx.ravel(), gy.ravel(), np.zeros(gx.size)], axis=1)
    faces = []
    for j in range(ny):
        for i in range(nx):
            a = j * (nx + 1) + i
            b = a + 1
            c = a + nx + 1
            d = c + 1
            faces.append([a, b, d])
            faces.append([a, d, c])
    return TriangleMesh(verts, np.array(faces))


def build_synthetic_scene(rng, k, n_things=None, z_stuff=(2.0, 10.0), z_things=(0.5, 1.5)):
    """Synthetic scene whose rasterization is exactly reproducible: a full
    stuff cloud plus non-overlapping fronto-parallel rectangle things closer
    to the camera.

    Returns (scene, gt_pan, gt_depth, thing_specs); gt_pan/gt_depth are the
    rasterization of the scene (its own 2-D ground truth), thing_specs the
    pixel rectangles ((x0, y0, x1, y1), z, segment_id, category_id).
    """
    w, h = k.width, k.height
    stuff_pan = random_panoptic(rng, w, h, max_segments=4, full_cover=True)
    stuff_infos = [
        SegmentInfo(s.segment_id, s.category_id, is_thing=False) for s in stuff_pan.segments.values()
    ]
    stuff_pan = PanopticMap(stuff_pan.segment_ids, stuff_infos)
    depth = DepthMap(rng.uniform(z_stuff[0], z_stuff[1], size=(h, w)))
    cloud = backproject_stuff(depth, stuff_pan, k)

    from pano3d.alignment import PlacedThing

    if n_things is None:
        n_things = int(rng.integers(1, 11))
    # one rectangle per 5x2 grid cell keeps things disjoint
    cells = [(cx, cy) for cy in range(2) for cx in range(5)]
    rng.shuffle(cells)
    cw, ch = w // 5, h // 2
    things = []
    thing_specs = []
    next_seg = max(stuff_pan.segments) + 1
    for i, (cx, cy) in enumerate(cells[:n_things]):
        bx, by = cx * cw, cy * ch
        x0 = bx + 2 + int(rng.integers(0, max(1, cw - 10)))
        y0 = by + 2 + int(rng.integers(0, max(1, ch - 10)))
        x1 = min(x0 + 3 + int(rng.integers(0, cw // 2)), bx + cw - 2)
        y1 = min(y0 + 3 + int(rng.integers(0, ch // 2)), by + ch - 2)
        z = float(rng.uniform(*z_things))
        mesh = pixel_rect_mesh(k, x0, y0, x1, y1, z)
        things.append(
            PlacedThing(mesh=mesh, segment_id=next_seg, category_id=100 + i, z_c=z, scale=1.0)
        )
        thing_specs.append({"bbox": (x0, y0, x1, y1), "z": z, "segment_id": next_seg, "category_id": 100 + i})
        next_seg += 1
    scene = Scene3D(stuff=cloud, things=things)
    gt_pan, gt_depth = rasterize_scene(scene, k)
    return scene, gt_pan, gt_depth, thing_specs


def reassemble_from_gt(gt_pan, gt_depth, k, thing_specs):
    """Re-run the assembly stage on the rendered ground truth: back-project
    the stuff pixels, then re-place each thing from its amodal rectangle and
    the percentile z-center rule over its visible pixels."""
    from pano3d.alignment import estimate_z_center, place_mesh
    from pano3d.masks import BinaryMask
    from pano3d.panoptic import InstanceObservation

    cloud = backproject_stuff(gt_depth, gt_pan, k)
    things = []
    for spec in thing_specs:
        x0, y0, x1, y1 = spec["bbox"]
        amodal = np.zeros((k.height, k.width), dtype=bool)
        amodal[y0 : y1 + 1, x0 : x1 + 1] = True
        modal = gt_pan.segment_ids == spec["segment_id"]
        obs = InstanceObservation(
            category_id=spec["category_id"],
            score=1.0,
            modal_mask=BinaryMask(modal),
            amodal_mask=BinaryMask(amodal),
            segment_id=spec["segment_id"],
        )
        z_c = estimate_z_center(gt_depth, obs.modal_mask)
        mesh = pixel_rect_mesh(k, x0, y0, x1, y1, spec["z"]).normalized()
        things.append(place_mesh(mesh, obs, z_c, k))
    return Scene3D(stuff=cloud, things=things)


def write_manifest_dir(dirpath, k, gt_pan, gt_depth, thing_specs):
    """Materialize a synthetic scene's ground truth as the on-disk inputs the
    assemble pipeline consumes; returns the manifest path."""
    import json
    import os

    from pano3d.dataset import save_panoptic
    from pano3d.imageio import save_depth_png, save_mask_png
    from pano3d.masks import BinaryMask
    from pano3d.mesh import save_obj

    dirpath = str(dirpath)
    os.makedirs(dirpath, exist_ok=True)
    save_depth_png(gt_depth, os.path.join(dirpath, "depth.png"))
    save_panoptic(gt_pan, os.path.join(dirpath, "pan.png"), os.path.join(dirpath, "pan.json"))
    instances = []
    for spec in thing_specs:
        seg = spec["segment_id"]
        x0, y0, x1, y1 = spec["bbox"]
        amodal = np.zeros((k.height, k.width), dtype=bool)
        amodal[y0 : y1 + 1, x0 : x1 + 1] = True
        save_mask_png(BinaryMask(amodal), os.path.join(dirpath, f"amodal_{seg}.png"))
        modal = BinaryMask(gt_pan.segment_ids == seg)
        save_mask_png(modal, os.path.join(dirpath, f"modal_{seg}.png"))
        mesh = pixel_rect_mesh(k, x0, y0, x1, y1, spec["z"]).normalized()
        save_obj(mesh, os.path.join(dirpath, f"mesh_{seg}.obj"))
        instances.append(
            {
                "segment_id": seg,
                "category_id": spec["category_id"],
                "score": 1.0,
                "modal_mask": f"modal_{seg}.png",
                "amodal_mask": f"amodal_{seg}.png",
                "mesh": f"mesh_{seg}.obj",
                "centered": True,
            }
        )
    manifest = {
        "camera": k.to_dict(),
        "depth": {"path": "depth.png", "scale": 1000.0},
        "panoptic": {"png": "pan.png", "json": "pan.json"},
        "instances": instances,
    }
    path = os.path.join(dirpath, "manifest.json")
    with open(path, "w") as fh:
        json.dump(manifest, fh, sort_keys=True, indent=1)
    return path


@pytest.fixture
def cam_small():
    return intrinsics_from_fov(60.0, 64, 48)


@pytest.fixture
def cam_vga():
    return intrinsics_from_fov(60.0, 640, 480)
