"""Command-line interface: assemble, reproject, evaluate, split-dataset.

Every failure is reported as one JSON object on stderr with a stable
``error`` code, and the process exits nonzero.
"""

from __future__ import annotations

import json
import os
import sys

import click

from .camera import CameraIntrinsics, intrinsics_from_fov
from .dataset import read_records_jsonl, split_and_filter, write_records_jsonl
from .errors import Pano3DError
from .metrics import evaluate_reprojection
from .pipeline import (
    assemble_scene,
    export_reprojection,
    load_manifest,
    load_scene,
    save_scene,
)


def _fail(err: Pano3DError) -> None:
    json.dump({"error": err.code, "message": err.message}, sys.stderr)
    sys.stderr.write("\n")
    sys.exit(1)


def _parse_taus(text: str) -> tuple[float, ...]:
    return tuple(float(t) for t in text.split(",") if t.strip())


@click.group()
def main():
    """Assemble single-image panoptic 3D scenes and evaluate them by
    re-projection."""


@main.command()
@click.argument("manifest_path", type=click.Path(exists=True))
@click.option("--out-dir", required=True, type=click.Path())
@click.option("--camera-fov", type=float, default=None, help="Override: horizontal FOV in degrees.")
@click.option("--width", type=int, default=None, help="Override: image width in pixels.")
@click.option("--height", type=int, default=None, help="Override: image height in pixels.")
@click.option("--depth-scale", type=float, default=None, help="Override: depth PNG units per meter.")
@click.option("--percentiles", type=(float, float), default=None, help="z-center percentiles (lo hi).")
@click.option("--sample-points", type=int, default=0, help="Also export N surface samples per thing.")
def assemble(manifest_path, out_dir, camera_fov, width, height, depth_scale, percentiles, sample_points):
    """Assemble a 3D scene from the per-image files listed in MANIFEST_PATH."""
    try:
        manifest = load_manifest(manifest_path)
        if camera_fov is not None:
            w = width or manifest.camera.width
            h = height or manifest.camera.height
            manifest.camera = intrinsics_from_fov(camera_fov, w, h)
        if depth_scale is not None:
            manifest.depth_scale = depth_scale
        if percentiles is not None:
            manifest.options.percentiles = percentiles
        scene = assemble_scene(manifest)
        scene_json = save_scene(scene, manifest.camera, out_dir, sample_points=sample_points)
    except Pano3DError as e:
        _fail(e)
    click.echo(scene_json)


@main.command()
@click.argument("scene_json", type=click.Path(exists=True))
@click.option("--out-dir", required=True, type=click.Path())
def reproject(scene_json, out_dir):
    """Render SCENE_JSON back into its camera as a COCO panoptic PNG + depth."""
    try:
        scene, k = load_scene(scene_json)
        png, js, dp = export_reprojection(scene, k, out_dir)
    except Pano3DError as e:
        _fail(e)
    click.echo(png)
    click.echo(js)
    click.echo(dp)


@main.command()
@click.argument("scene_json", type=click.Path(exists=True))
@click.argument("gt_png", type=click.Path(exists=True))
@click.argument("gt_json", type=click.Path(exists=True))
@click.option("--taus", default="0.5,0.4,0.3", show_default=True, help="Comma-separated IoU thresholds.")
@click.option("--out", type=click.Path(), default=None, help="Write metrics JSON here instead of stdout.")
def evaluate(scene_json, gt_png, gt_json, taus, out):
    """Re-project SCENE_JSON and score PQ/SQ/RQ against the ground-truth
    panoptic annotation."""
    from .dataset import load_panoptic

    try:
        scene, k = load_scene(scene_json)
        gt = load_panoptic(gt_png, gt_json)
        results = evaluate_reprojection(scene, gt, k, taus=_parse_taus(taus))
    except Pano3DError as e:
        _fail(e)
    payload = json.dumps([m.to_dict() for m in results], sort_keys=True, indent=1) + "\n"
    if out:
        with open(out, "w") as fh:
            fh.write(payload)
    else:
        click.echo(payload, nl=False)


@main.command("split-dataset")
@click.argument("records_jsonl", type=click.Path(exists=True))
@click.option("--train-count", required=True, type=int, help="Number of leading houses in the train set.")
@click.option("--house-order", type=click.Path(exists=True), default=None,
              help="File with one house id per line; default: first-appearance order in the records.")
@click.option("--out-dir", required=True, type=click.Path())
def split_dataset(records_jsonl, train_count, house_order, out_dir):
    """Split records by house, invalidate cross-split models, drop empty images."""
    try:
        records = read_records_jsonl(records_jsonl)
        if not records and not house_order:
            os.makedirs(out_dir, exist_ok=True)
            write_records_jsonl([], os.path.join(out_dir, "train.jsonl"))
            write_records_jsonl([], os.path.join(out_dir, "test.jsonl"))
            with open(os.path.join(out_dir, "invalidated_models.json"), "w") as fh:
                fh.write("[]\n")
            click.echo("train: 0 images, test: 0 images, invalidated models: 0")
            return
        if house_order:
            with open(house_order) as fh:
                order = [line.strip() for line in fh if line.strip()]
        else:
            order = list(dict.fromkeys(r.house_id for r in records))
        result = split_and_filter(records, order, train_count)
    except Pano3DError as e:
        _fail(e)
    os.makedirs(out_dir, exist_ok=True)
    write_records_jsonl(result.train, os.path.join(out_dir, "train.jsonl"))
    write_records_jsonl(result.test, os.path.join(out_dir, "test.jsonl"))
    report = os.path.join(out_dir, "invalidated_models.json")
    with open(report, "w") as fh:
        json.dump(sorted(result.invalidated_models), fh)
        fh.write("\n")
    click.echo(
        f"train: {len(result.train)} images, test: {len(result.test)} images, "
        f"invalidated models: {len(result.invalidated_models)}"
    )


if __name__ == "__main__":
    main()
