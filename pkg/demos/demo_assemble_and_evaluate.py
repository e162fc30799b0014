"""End-to-end walkthrough: build synthetic per-image neural outputs on disk,
assemble a 3D scene from them, re-project it, and score the re-projection
against the 2D panoptic ground truth.

Run:  python3 demos/demo_assemble_and_evaluate.py
"""

import json
import os
import tempfile

import numpy as np

from pano3d import (
    BinaryMask,
    DepthMap,
    PanopticMap,
    PlacedThing,
    Scene3D,
    SegmentInfo,
    TriangleMesh,
    assemble_scene,
    backproject_stuff,
    evaluate_reprojection,
    intrinsics_from_fov,
    load_manifest,
    rasterize_scene,
    save_depth_png,
    save_mask_png,
    save_obj,
    save_panoptic,
    save_scene,
)


def fronto_parallel_rect(k, x0, y0, x1, y1, z):
    """Rectangle whose corners sit at the centers of the bbox corner pixels,
    so it rasterizes to exactly that pixel rectangle."""
    corners = []
    for u, v in ((x0 + 0.5, y0 + 0.5), (x1 + 0.5, y0 + 0.5), (x1 + 0.5, y1 + 0.5), (x0 + 0.5, y1 + 0.5)):
        corners.append([(u - k.cx) * z / k.fx, (v - k.cy) * z / k.fy, z])
    return TriangleMesh(np.array(corners), [[0, 1, 2], [0, 2, 3]])


def main():
    rng = np.random.default_rng(42)
    k = intrinsics_from_fov(60.0, 128, 96)
    print(f"camera: {k.width}x{k.height}, fx={k.fx:.2f}, fy={k.fy:.2f}")

    # --- 1. Fabricate a ground-truth scene: stuff background + two things ---
    stuff_pan = PanopticMap(
        np.full((k.height, k.width), 1), [SegmentInfo(1, 30, is_thing=False)]
    )
    stuff_depth = DepthMap(rng.uniform(4.0, 9.0, size=(k.height, k.width)))
    cloud = backproject_stuff(stuff_depth, stuff_pan, k)
    print(f"back-projected stuff cloud: {len(cloud)} points")

    thing_boxes = [((20, 20, 49, 59), 1.2, 2, 5), ((70, 30, 109, 69), 1.8, 3, 7)]
    things = [
        PlacedThing(
            mesh=fronto_parallel_rect(k, *bbox, z),
            segment_id=seg,
            category_id=cat,
            z_c=z,
            scale=1.0,
        )
        for bbox, z, seg, cat in thing_boxes
    ]
    scene = Scene3D(stuff=cloud, things=things)
    gt_pan, gt_depth = rasterize_scene(scene, k)
    print(f"rendered ground truth: {len(gt_pan.segments)} segments")

    # --- 2. Write the per-image inputs the assemble stage consumes ---
    workdir = tempfile.mkdtemp(prefix="pano3d_demo_")
    save_depth_png(gt_depth, os.path.join(workdir, "depth.png"))
    save_panoptic(gt_pan, os.path.join(workdir, "pan.png"), os.path.join(workdir, "pan.json"))
    instances = []
    for bbox, z, seg, cat in thing_boxes:
        x0, y0, x1, y1 = bbox
        amodal = np.zeros((k.height, k.width), dtype=bool)
        amodal[y0 : y1 + 1, x0 : x1 + 1] = True
        save_mask_png(BinaryMask(amodal), os.path.join(workdir, f"amodal_{seg}.png"))
        save_mask_png(
            BinaryMask(gt_pan.segment_ids == seg), os.path.join(workdir, f"modal_{seg}.png")
        )
        save_obj(
            fronto_parallel_rect(k, *bbox, z).normalized(),
            os.path.join(workdir, f"mesh_{seg}.obj"),
        )
        instances.append(
            {
                "segment_id": seg,
                "category_id": cat,
                "score": 1.0,
                "modal_mask": f"modal_{seg}.png",
                "amodal_mask": f"amodal_{seg}.png",
                "mesh": f"mesh_{seg}.obj",
                "centered": True,
            }
        )
    manifest_path = os.path.join(workdir, "manifest.json")
    with open(manifest_path, "w") as fh:
        json.dump(
            {
                "camera": k.to_dict(),
                "depth": {"path": "depth.png", "scale": 1000.0},
                "panoptic": {"png": "pan.png", "json": "pan.json"},
                "instances": instances,
            },
            fh,
            sort_keys=True,
            indent=1,
        )
    print(f"wrote inputs to {workdir}")

    # --- 3. Assemble: depth percentiles -> z-centers, bbox -> mesh placement ---
    assembled = assemble_scene(load_manifest(manifest_path))
    for t in assembled.things:
        print(f"  thing {t.segment_id}: z_c={t.z_c:.3f}, scale={t.scale:.4f}")
    scene_json = save_scene(assembled, k, os.path.join(workdir, "scene"))
    print(f"saved scene to {scene_json}")

    # --- 4. Evaluate the re-projection against the 2D ground truth ---
    print(f"{'tau':>5} {'PQ':>8} {'SQ':>8} {'RQ':>8} {'TP':>3} {'FP':>3} {'FN':>3}")
    for m in evaluate_reprojection(assembled, gt_pan, k):
        print(
            f"{m.tau:>5.2f} {m.pq:>8.4f} {m.sq:>8.4f} {m.rq:>8.4f} "
            f"{m.tp:>3d} {m.fp:>3d} {m.fn:>3d}"
        )


if __name__ == "__main__":
    main()
