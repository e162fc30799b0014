"""Dataset procedures: house-based train/test split with cross-split model
invalidation and empty-image filtering, plus COCO-style panoptic PNG
encoding/decoding."""

from __future__ import annotations

import json
from dataclasses import dataclass, replace

import numpy as np
from PIL import Image

from .errors import DecodingError, EncodingError, InvalidArgumentError
from .panoptic import VOID_ID, PanopticMap, SegmentInfo

MAX_SEGMENT_ID = 256**3 - 1


@dataclass(frozen=True)
class InstanceEntry:
    instance_id: int
    model_id: str
    category_id: int
    centered: bool
    valid: bool = True


@dataclass(frozen=True)
class ImageRecord:
    image_id: str
    house_id: str
    instances: tuple[InstanceEntry, ...]

    def __post_init__(self):
        ids = [i.instance_id for i in self.instances]
        if len(ids) != len(set(ids)):
            raise InvalidArgumentError(f"duplicate instance ids in image {self.image_id}")


@dataclass
class SplitResult:
    train: list[ImageRecord]
    test: list[ImageRecord]
    invalidated_models: set[str]


def split_and_filter(
    records: list[ImageRecord], house_order: list[str], train_count: int
) -> SplitResult:
    """Assign the first ``train_count`` houses to train and the rest to test,
    invalidate models that occur on both sides, and drop images left without
    any valid centered thing."""
    if not (0 <= train_count < len(house_order)):
        raise InvalidArgumentError(
            f"train_count must be in [0, {len(house_order)}), got {train_count}"
        )
    house_rank = {h: i for i, h in enumerate(house_order)}
    for rec in records:
        if rec.house_id not in house_rank:
            raise InvalidArgumentError(f"unknown house {rec.house_id!r}")

    train_raw = [r for r in records if house_rank[r.house_id] < train_count]
    test_raw = [r for r in records if house_rank[r.house_id] >= train_count]

    train_models = {i.model_id for r in train_raw for i in r.instances}
    test_models = {i.model_id for r in test_raw for i in r.instances}
    invalid = train_models & test_models

    def process(split: list[ImageRecord]) -> list[ImageRecord]:
        out = []
        for rec in split:
            flagged = tuple(
                replace(inst, valid=inst.model_id not in invalid) for inst in rec.instances
            )
            if any(i.valid and i.centered for i in flagged):
                out.append(ImageRecord(rec.image_id, rec.house_id, flagged))
        return out

    return SplitResult(train=process(train_raw), test=process(test_raw), invalidated_models=invalid)


# --- JSONL record files ---


def record_to_dict(rec: ImageRecord) -> dict:
    return {
        "image_id": rec.image_id,
        "house_id": rec.house_id,
        "instances": [
            {
                "instance_id": i.instance_id,
                "model_id": i.model_id,
                "category_id": i.category_id,
                "centered": i.centered,
                "valid": i.valid,
            }
            for i in rec.instances
        ],
    }


def record_from_dict(d: dict) -> ImageRecord:
    return ImageRecord(
        image_id=d["image_id"],
        house_id=d["house_id"],
        instances=tuple(
            InstanceEntry(
                instance_id=int(i["instance_id"]),
                model_id=str(i["model_id"]),
                category_id=int(i["category_id"]),
                centered=bool(i["centered"]),
                valid=bool(i.get("valid", True)),
            )
            for i in d["instances"]
        ),
    )


def read_records_jsonl(path) -> list[ImageRecord]:
    records = []
    with open(path, "r") as fh:
        for line in fh:
            line = line.strip()
            if line:
                records.append(record_from_dict(json.loads(line)))
    return records


def write_records_jsonl(records: list[ImageRecord], path) -> None:
    with open(path, "w") as fh:
        for rec in records:
            fh.write(json.dumps(record_to_dict(rec), sort_keys=True) + "\n")


# --- COCO panoptic PNG ---


def id_to_rgb(segment_id: int) -> tuple[int, int, int]:
    if not (0 <= segment_id <= MAX_SEGMENT_ID):
        raise EncodingError(f"segment id {segment_id} does not fit in 24 bits")
    return (segment_id % 256, (segment_id // 256) % 256, segment_id // 65536)


def rgb_to_id(rgb) -> int:
    r, g, b = rgb
    return int(r) + 256 * int(g) + 65536 * int(b)


def encode_panoptic_png(pan: PanopticMap) -> tuple[Image.Image, list[dict]]:
    """Encode id = R + 256*G + 256^2*B (void 0 -> black) plus a COCO-style
    segments_info list."""
    ids = pan.segment_ids
    if ids.min() < 0 or ids.max() > MAX_SEGMENT_ID:
        raise EncodingError("segment ids must be in [0, 256^3)")
    rgb = np.zeros((pan.height, pan.width, 3), dtype=np.uint8)
    rgb[..., 0] = ids % 256
    rgb[..., 1] = (ids // 256) % 256
    rgb[..., 2] = ids // 65536
    segments_info = []
    for seg_id in sorted(pan.segments):
        info = pan.segments[seg_id]
        entry = {
            "id": seg_id,
            "category_id": info.category_id,
            "iscrowd": 0,
            "isthing": int(info.is_thing),
            "area": int((ids == seg_id).sum()),
        }
        if info.score is not None:
            entry["score"] = info.score
        segments_info.append(entry)
    return Image.fromarray(rgb, mode="RGB"), segments_info


def decode_panoptic_png(image: Image.Image, segments_info: list[dict]) -> PanopticMap:
    rgb = np.asarray(image.convert("RGB"), dtype=np.int64)
    ids = rgb[..., 0] + 256 * rgb[..., 1] + 65536 * rgb[..., 2]
    declared = {int(s["id"]) for s in segments_info}
    present = set(np.unique(ids).tolist()) - {VOID_ID}
    unknown = present - declared
    if unknown:
        raise DecodingError(f"pixel ids missing from segments_info: {sorted(unknown)[:10]}")
    infos = [
        SegmentInfo(
            segment_id=int(s["id"]),
            category_id=int(s["category_id"]),
            is_thing=bool(s.get("isthing", 1)),
            score=float(s["score"]) if "score" in s else None,
        )
        for s in segments_info
        if int(s["id"]) in present
    ]
    return PanopticMap(ids, infos)


def save_panoptic(pan: PanopticMap, png_path, json_path) -> None:
    image, segments_info = encode_panoptic_png(pan)
    image.save(png_path)
    with open(json_path, "w") as fh:
        json.dump({"segments_info": segments_info}, fh, sort_keys=True, indent=1)
        fh.write("\n")


def load_panoptic(png_path, json_path) -> PanopticMap:
    image = Image.open(png_path)
    with open(json_path, "r") as fh:
        meta = json.load(fh)
    segments_info = meta["segments_info"] if isinstance(meta, dict) else meta
    return decode_panoptic_png(image, segments_info)
