"""Manifest-driven assembly of a Scene3D from per-image files, plus scene
directory export/import used by the CLI."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field

import numpy as np

from .alignment import estimate_z_center, place_mesh
from .backproject import DepthMap, LabeledPointCloud, backproject_stuff, filter_depth
from .camera import CameraIntrinsics, inverse_to_depth
from .dataset import load_panoptic, save_panoptic
from .errors import InputIOError, InvalidArgumentError
from .imageio import load_depth_png, load_mask_png, load_pfm, save_depth_png
from .mesh import (
    TriangleMesh,
    load_normalized_mesh,
    load_ply_points,
    save_obj,
    load_obj,
    save_ply_points,
)
from .panoptic import InstanceObservation, PanopticMap
from .scene import Scene3D


@dataclass
class ManifestOptions:
    percentiles: tuple[float, float] = (2.0, 98.0)
    depth_range: tuple[float, float] = (0.1, 1000.0)
    margin: int = 0
    taus: tuple[float, ...] = (0.5, 0.4, 0.3)


@dataclass
class Manifest:
    camera: CameraIntrinsics
    depth_path: str
    panoptic_png: str
    panoptic_json: str
    instances: list[dict] = field(default_factory=list)
    depth_scale: float = 1000.0
    options: ManifestOptions = field(default_factory=ManifestOptions)
    base_dir: str = "."

    def resolve(self, path: str) -> str:
        return path if os.path.isabs(path) else os.path.join(self.base_dir, path)


def load_manifest(path) -> Manifest:
    try:
        with open(path, "r") as fh:
            raw = json.load(fh)
    except OSError as e:
        raise InputIOError(f"cannot read manifest {path}: {e}") from e
    except json.JSONDecodeError as e:
        raise InputIOError(f"malformed manifest {path}: {e}") from e

    for key in ("camera", "depth", "panoptic"):
        if key not in raw:
            raise InvalidArgumentError(f"manifest is missing the {key!r} entry")
    camera = CameraIntrinsics.from_dict(raw["camera"])
    depth_entry = raw["depth"]
    if isinstance(depth_entry, str):
        depth_path, depth_scale = depth_entry, 1000.0
    else:
        depth_path = depth_entry["path"]
        depth_scale = float(depth_entry.get("scale", 1000.0))
    opts_raw = raw.get("options", {})
    options = ManifestOptions(
        percentiles=tuple(opts_raw.get("percentiles", (2.0, 98.0))),
        depth_range=tuple(opts_raw.get("depth_range", (0.1, 1000.0))),
        margin=int(opts_raw.get("margin", 0)),
        taus=tuple(opts_raw.get("taus", (0.5, 0.4, 0.3))),
    )
    return Manifest(
        camera=camera,
        depth_path=depth_path,
        panoptic_png=raw["panoptic"]["png"],
        panoptic_json=raw["panoptic"]["json"],
        instances=list(raw.get("instances", [])),
        depth_scale=depth_scale,
        options=options,
        base_dir=os.path.dirname(os.path.abspath(path)),
    )


def _load_depth(manifest: Manifest) -> DepthMap:
    path = manifest.resolve(manifest.depth_path)
    if path.lower().endswith(".pfm"):
        return load_pfm(path)
    return load_depth_png(path, manifest.depth_scale)


def assemble_scene(manifest: Manifest) -> Scene3D:
    """Run the stage-wise dataflow: filter depth, back-project stuff, and
    place each instance mesh with the percentile z-center rule (or the
    supplied inverse z-center when present)."""
    k = manifest.camera
    depth = _load_depth(manifest)
    if (depth.height, depth.width) != (k.height, k.width):
        raise InvalidArgumentError(
            f"depth size {depth.width}x{depth.height} does not match camera {k.width}x{k.height}"
        )
    depth = filter_depth(depth, *manifest.options.depth_range)
    pan = load_panoptic(manifest.resolve(manifest.panoptic_png), manifest.resolve(manifest.panoptic_json))
    if (pan.height, pan.width) != (k.height, k.width):
        raise InvalidArgumentError(
            f"panoptic size {pan.width}x{pan.height} does not match camera {k.width}x{k.height}"
        )

    stuff = backproject_stuff(depth, pan, k)

    things = []
    p_lo, p_hi = manifest.options.percentiles
    for entry in manifest.instances:
        modal = load_mask_png(manifest.resolve(entry["modal_mask"]))
        amodal = load_mask_png(manifest.resolve(entry["amodal_mask"]))
        obs = InstanceObservation(
            category_id=int(entry["category_id"]),
            score=float(entry.get("score", 1.0)),
            modal_mask=modal,
            amodal_mask=amodal,
            mesh_ref=entry["mesh"],
            inv_zc=entry.get("inv_zc"),
            dz_norm=entry.get("dz_norm"),
            centered=bool(entry.get("centered", True)),
            segment_id=int(entry["segment_id"]),
        )
        if obs.inv_zc is not None:
            z_c = inverse_to_depth(float(obs.inv_zc))
        else:
            z_c = estimate_z_center(depth, modal, p_lo, p_hi)
        mesh = load_normalized_mesh(manifest.resolve(entry["mesh"]))
        things.append(place_mesh(mesh, obs, z_c, k))

    return Scene3D(stuff=stuff, things=things)


def save_scene(scene: Scene3D, k: CameraIntrinsics, out_dir, sample_points: int = 0) -> str:
    """Write the scene as stuff.ply + per-thing OBJ files + scene.json.

    With sample_points > 0 an additional things_points.ply holds uniform
    surface samples of every thing mesh for point-cloud-only viewers.
    """
    os.makedirs(out_dir, exist_ok=True)
    stuff_name = "stuff.ply"
    save_ply_points(
        scene.stuff.points,
        os.path.join(out_dir, stuff_name),
        scene.stuff.segment_ids,
        scene.stuff.category_ids,
    )
    things_meta = []
    for thing in scene.things:
        name = f"thing_{thing.segment_id}.obj"
        save_obj(thing.mesh, os.path.join(out_dir, name))
        things_meta.append(
            {
                "mesh": name,
                "segment_id": thing.segment_id,
                "category_id": thing.category_id,
                "z_c": thing.z_c,
                "scale": thing.scale,
            }
        )
    stuff_meshes_meta = []
    for i, (mesh, seg, cat) in enumerate(scene.stuff_meshes):
        name = f"stuff_mesh_{seg}.obj"
        save_obj(mesh, os.path.join(out_dir, name))
        stuff_meshes_meta.append({"mesh": name, "segment_id": seg, "category_id": cat})

    if sample_points > 0 and scene.things:
        rng = np.random.default_rng(0)
        samples = [t.mesh.sample_points(sample_points, rng) for t in scene.things]
        seg = np.concatenate([np.full(sample_points, t.segment_id) for t in scene.things])
        cat = np.concatenate([np.full(sample_points, t.category_id) for t in scene.things])
        save_ply_points(np.concatenate(samples), os.path.join(out_dir, "things_points.ply"), seg, cat)

    meta = {
        "camera": k.to_dict(),
        "stuff": stuff_name,
        "things": things_meta,
        "stuff_meshes": stuff_meshes_meta,
    }
    scene_json = os.path.join(out_dir, "scene.json")
    with open(scene_json, "w") as fh:
        json.dump(meta, fh, sort_keys=True, indent=1)
        fh.write("\n")
    return scene_json


def load_scene(scene_json) -> tuple[Scene3D, CameraIntrinsics]:
    try:
        with open(scene_json, "r") as fh:
            meta = json.load(fh)
    except OSError as e:
        raise InputIOError(f"cannot read scene {scene_json}: {e}") from e
    except json.JSONDecodeError as e:
        raise InputIOError(f"malformed scene {scene_json}: {e}") from e
    base = os.path.dirname(os.path.abspath(scene_json))
    k = CameraIntrinsics.from_dict(meta["camera"])
    pts, seg, cat = load_ply_points(os.path.join(base, meta["stuff"]))
    stuff = LabeledPointCloud(pts, seg, cat)

    from .alignment import PlacedThing  # placement metadata round-trips through scene.json

    things = []
    for t in meta.get("things", []):
        mesh = load_obj(os.path.join(base, t["mesh"]))
        things.append(
            PlacedThing(
                mesh=mesh,
                segment_id=int(t["segment_id"]),
                category_id=int(t["category_id"]),
                z_c=float(t["z_c"]),
                scale=float(t["scale"]),
            )
        )
    stuff_meshes = [
        (load_obj(os.path.join(base, m["mesh"])), int(m["segment_id"]), int(m["category_id"]))
        for m in meta.get("stuff_meshes", [])
    ]
    return Scene3D(stuff=stuff, things=things, stuff_meshes=stuff_meshes), k


def export_reprojection(scene: Scene3D, k: CameraIntrinsics, out_dir) -> tuple[str, str, str]:
    """Rasterize the scene and write the panoptic PNG+JSON and the depth PNG."""
    from .raster import rasterize_scene

    os.makedirs(out_dir, exist_ok=True)
    pan, depth = rasterize_scene(scene, k)
    png = os.path.join(out_dir, "reprojected_panoptic.png")
    js = os.path.join(out_dir, "reprojected_panoptic.json")
    dp = os.path.join(out_dir, "reprojected_depth.png")
    save_panoptic(pan, png, js)
    save_depth_png(depth, dp)
    return png, js, dp
