"""Panoptic map data model and deterministic instance/semantic fusion."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import InvalidArgumentError
from .masks import BinaryMask

VOID_ID = 0


@dataclass(frozen=True)
class SegmentInfo:
    segment_id: int
    category_id: int
    is_thing: bool
    score: Optional[float] = None

    def __post_init__(self):
        if self.segment_id <= 0:
            raise InvalidArgumentError(f"segment_id must be positive, got {self.segment_id}")
        if self.score is not None and not (0.0 <= self.score <= 1.0):
            raise InvalidArgumentError(f"score must be in [0, 1], got {self.score}")


class PanopticMap:
    """Per-pixel segment ids (0 = void) plus per-segment metadata.

    Every nonzero id present in the raster must have a SegmentInfo entry and
    vice versa.
    """

    def __init__(self, segment_ids, segments: list[SegmentInfo]):
        raster = np.asarray(segment_ids)
        if raster.ndim != 2:
            raise InvalidArgumentError(f"segment raster must be 2-D, got shape {raster.shape}")
        self.segment_ids = raster.astype(np.int64)
        self.segments = {s.segment_id: s for s in segments}
        if len(self.segments) != len(segments):
            raise InvalidArgumentError("duplicate segment ids")
        present = set(np.unique(self.segment_ids).tolist()) - {VOID_ID}
        declared = set(self.segments)
        if present != declared:
            raise InvalidArgumentError(
                f"raster/segment mismatch: raster-only {sorted(present - declared)}, "
                f"info-only {sorted(declared - present)}"
            )

    @property
    def height(self) -> int:
        return self.segment_ids.shape[0]

    @property
    def width(self) -> int:
        return self.segment_ids.shape[1]

    def mask_of(self, segment_id: int) -> BinaryMask:
        return BinaryMask(self.segment_ids == segment_id)

    def stuff_segments(self) -> list[SegmentInfo]:
        return [s for s in self.segments.values() if not s.is_thing]

    def thing_segments(self) -> list[SegmentInfo]:
        return [s for s in self.segments.values() if s.is_thing]

    def __eq__(self, other):
        return (
            isinstance(other, PanopticMap)
            and np.array_equal(self.segment_ids, other.segment_ids)
            and self.segments == other.segments
        )


@dataclass
class InstanceObservation:
    """One predicted "thing": masks, mesh reference, and placement scalars."""

    category_id: int
    score: float
    modal_mask: BinaryMask
    amodal_mask: BinaryMask
    mesh_ref: str = ""
    dz_norm: Optional[float] = None
    inv_zc: Optional[float] = None
    centered: bool = True
    segment_id: Optional[int] = None

    def __post_init__(self):
        if not (0.0 <= self.score <= 1.0):
            raise InvalidArgumentError(f"score must be in [0, 1], got {self.score}")
        if self.amodal_mask.area() < 1:
            raise InvalidArgumentError("amodal mask must be nonempty")


def fuse_panoptic(
    instances: list[InstanceObservation],
    semantic,
    overlap_thresh: float = 0.5,
    stuff_min_area: int = 4096,
) -> PanopticMap:
    """Fuse instance predictions with a semantic raster into one panoptic map.

    Instances claim pixels in descending score order (ties broken by list
    position) using their modal masks; an instance survives only if the
    unclaimed fraction of its mask is at least ``overlap_thresh`` and it is
    painted only on still-unclaimed pixels. Remaining pixels take stuff
    categories from ``semantic`` (one segment per nonzero category), with
    segments under ``stuff_min_area`` pixels dropped to void.
    """
    sem = np.asarray(semantic)
    if sem.ndim != 2:
        raise InvalidArgumentError(f"semantic raster must be 2-D, got shape {sem.shape}")
    h, w = sem.shape
    for obs in instances:
        if obs.modal_mask.data.shape != (h, w):
            raise InvalidArgumentError("instance mask dimensions do not match the semantic raster")

    raster = np.zeros((h, w), dtype=np.int64)
    infos: list[SegmentInfo] = []
    order = sorted(range(len(instances)), key=lambda i: (-instances[i].score, i))
    next_id = 1
    for idx in order:
        obs = instances[idx]
        mask = obs.modal_mask.data
        total = mask.sum()
        if total == 0:
            continue
        free = mask & (raster == 0)
        if free.sum() / total < overlap_thresh:
            continue
        raster[free] = next_id
        infos.append(SegmentInfo(next_id, obs.category_id, is_thing=True, score=obs.score))
        next_id += 1

    unclaimed = raster == 0
    for cat in np.unique(sem[unclaimed]):
        if cat == 0:
            continue
        region = unclaimed & (sem == cat)
        if region.sum() < stuff_min_area:
            continue
        raster[region] = next_id
        infos.append(SegmentInfo(next_id, int(cat), is_thing=False))
        next_id += 1

    return PanopticMap(raster, infos)
