"""Panoptic quality scoring of a predicted panoptic map against ground truth,
and the full re-projection evaluation (render the scene, then score)."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .camera import CameraIntrinsics
from .errors import InvalidArgumentError
from .panoptic import VOID_ID, PanopticMap
from .raster import rasterize_scene
from .scene import Scene3D

DEFAULT_TAUS = (0.5, 0.4, 0.3)


@dataclass
class ClassMetrics:
    tp: int = 0
    fp: int = 0
    fn: int = 0
    iou_sum: float = 0.0

    @property
    def pq(self) -> float:
        denom = self.tp + 0.5 * self.fp + 0.5 * self.fn
        return self.iou_sum / denom if denom > 0 else 0.0

    @property
    def sq(self) -> float:
        return self.iou_sum / self.tp if self.tp > 0 else 0.0

    @property
    def rq(self) -> float:
        denom = self.tp + 0.5 * self.fp + 0.5 * self.fn
        return self.tp / denom if denom > 0 else 0.0


@dataclass
class PanopticMetrics:
    """Pooled PQ/SQ/RQ at one IoU threshold, with a per-category breakdown.

    ``pq``/``sq``/``rq`` pool all segments; ``pq_class_avg`` averages the
    per-category PQ over categories present in the ground truth.
    """

    tau: float
    tp: int
    fp: int
    fn: int
    iou_sum: float
    per_class: dict[int, ClassMetrics] = field(default_factory=dict)
    matches: list[tuple[int, int, float]] = field(default_factory=list)  # (pred_id, gt_id, iou)

    @property
    def pq(self) -> float:
        denom = self.tp + 0.5 * self.fp + 0.5 * self.fn
        return self.iou_sum / denom if denom > 0 else 0.0

    @property
    def sq(self) -> float:
        return self.iou_sum / self.tp if self.tp > 0 else 0.0

    @property
    def rq(self) -> float:
        denom = self.tp + 0.5 * self.fp + 0.5 * self.fn
        return self.tp / denom if denom > 0 else 0.0

    @property
    def pq_class_avg(self) -> float:
        if not self.per_class:
            return 0.0
        return float(np.mean([c.pq for c in self.per_class.values()]))

    def to_dict(self) -> dict:
        return {
            "tau": self.tau,
            "PQ": self.pq,
            "SQ": self.sq,
            "RQ": self.rq,
            "PQ_class_avg": self.pq_class_avg,
            "TP": self.tp,
            "FP": self.fp,
            "FN": self.fn,
            "per_class": [
                {
                    "category_id": cat,
                    "PQ": c.pq,
                    "SQ": c.sq,
                    "RQ": c.rq,
                    "TP": c.tp,
                    "FP": c.fp,
                    "FN": c.fn,
                }
                for cat, c in sorted(self.per_class.items())
            ],
        }


def segment_ious(pred: PanopticMap, gt: PanopticMap) -> dict[tuple[int, int], float]:
    """IoU for every overlapping same-category (pred, gt) segment pair.

    Ground-truth void pixels are excluded from pred areas, so they never
    enter an IoU denominator.
    """
    if pred.segment_ids.shape != gt.segment_ids.shape:
        raise InvalidArgumentError("pred/gt dimensions differ")
    gt_void = gt.segment_ids == VOID_ID

    gt_ids, gt_counts = np.unique(gt.segment_ids, return_counts=True)
    gt_area = {int(i): int(c) for i, c in zip(gt_ids, gt_counts) if i != VOID_ID}

    nonvoid = ~gt_void
    p_ids, p_counts = np.unique(pred.segment_ids[nonvoid], return_counts=True)
    pred_area = {int(i): int(c) for i, c in zip(p_ids, p_counts) if i != VOID_ID}

    offset = int(gt.segment_ids.max()) + 1
    combined = pred.segment_ids.astype(np.int64) * offset + gt.segment_ids
    pair_ids, pair_counts = np.unique(combined, return_counts=True)

    ious: dict[tuple[int, int], float] = {}
    for pid, count in zip(pair_ids, pair_counts):
        p = int(pid // offset)
        g = int(pid % offset)
        if p == VOID_ID or g == VOID_ID:
            continue
        if pred.segments[p].category_id != gt.segments[g].category_id:
            continue
        union = pred_area.get(p, 0) + gt_area[g] - int(count)
        if union > 0:
            ious[(p, g)] = int(count) / union
    return ious


def panoptic_quality(pred: PanopticMap, gt: PanopticMap, tau: float) -> PanopticMetrics:
    """Greedy descending-IoU matching of same-category segments with strict
    IoU > tau, then PQ = sum(IoU)/(TP + FP/2 + FN/2)."""
    if not (0 < tau <= 1):
        raise InvalidArgumentError(f"tau must be in (0, 1], got {tau}")
    ious = segment_ious(pred, gt)

    candidates = sorted(ious.items(), key=lambda kv: (-kv[1], kv[0][0], kv[0][1]))
    used_pred: set[int] = set()
    used_gt: set[int] = set()
    matches: list[tuple[int, int, float]] = []
    for (p, g), iou in candidates:
        if iou <= tau:
            continue
        if p in used_pred or g in used_gt:
            continue
        used_pred.add(p)
        used_gt.add(g)
        matches.append((p, g, iou))

    per_class: dict[int, ClassMetrics] = {}
    gt_categories = {s.category_id for s in gt.segments.values()}
    for cat in gt_categories:
        per_class[cat] = ClassMetrics()

    tp = len(matches)
    iou_sum = 0.0
    for p, g, iou in matches:
        iou_sum += iou
        cm = per_class[gt.segments[g].category_id]
        cm.tp += 1
        cm.iou_sum += iou

    fn = 0
    for g, info in gt.segments.items():
        if g not in used_gt:
            fn += 1
            per_class[info.category_id].fn += 1

    fp = 0
    gt_void = gt.segment_ids == VOID_ID
    for p, info in pred.segments.items():
        if p in used_pred:
            continue
        # a prediction entirely inside gt void is invisible to the gt and ignored
        visible = np.any((pred.segment_ids == p) & ~gt_void)
        if not visible:
            continue
        fp += 1
        if info.category_id in per_class:
            per_class[info.category_id].fp += 1

    return PanopticMetrics(
        tau=tau, tp=tp, fp=fp, fn=fn, iou_sum=iou_sum, per_class=per_class, matches=matches
    )


def evaluate_reprojection(
    scene: Scene3D,
    gt: PanopticMap,
    k: CameraIntrinsics,
    taus=DEFAULT_TAUS,
) -> list[PanopticMetrics]:
    """Render the scene into the camera and score it against the 2-D ground
    truth at each IoU threshold."""
    if (k.height, k.width) != (gt.height, gt.width):
        raise InvalidArgumentError("intrinsics and ground-truth dimensions differ")
    pred, _depth = rasterize_scene(scene, k)
    return [panoptic_quality(pred, gt, tau) for tau in taus]
