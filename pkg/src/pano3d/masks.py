"""Binary masks, tight bounding boxes, and mask IoU."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import EmptyMaskError, InvalidArgumentError


class BinaryMask:
    """A boolean occupancy raster of shape (height, width)."""

    __slots__ = ("data",)

    def __init__(self, data):
        arr = np.asarray(data)
        if arr.ndim != 2:
            raise InvalidArgumentError(f"mask must be 2-D, got shape {arr.shape}")
        self.data = arr.astype(bool)

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def width(self) -> int:
        return self.data.shape[1]

    def area(self) -> int:
        return int(self.data.sum())

    @classmethod
    def zeros(cls, width: int, height: int) -> "BinaryMask":
        return cls(np.zeros((height, width), dtype=bool))

    @classmethod
    def from_rle(cls, rle: dict) -> "BinaryMask":
        """Decode COCO-style uncompressed RLE: column-major runs alternating
        background/foreground, starting with background."""
        h, w = rle["size"]
        counts = rle["counts"]
        if sum(counts) != h * w:
            raise InvalidArgumentError("RLE counts do not cover the mask")
        flat = np.zeros(h * w, dtype=bool)
        pos = 0
        val = False
        for run in counts:
            if val:
                flat[pos : pos + run] = True
            pos += run
            val = not val
        return cls(flat.reshape((w, h)).T)

    def to_rle(self) -> dict:
        flat = self.data.T.reshape(-1)
        counts = []
        # runs alternate starting with background
        changes = np.flatnonzero(np.diff(flat.astype(np.int8)))
        prev = 0
        runs = []
        for c in changes:
            runs.append(c + 1 - prev)
            prev = c + 1
        runs.append(flat.size - prev)
        if flat.size and flat[0]:
            counts = [0] + runs
        else:
            counts = runs
        return {"size": [self.height, self.width], "counts": counts}

    def __eq__(self, other):
        return isinstance(other, BinaryMask) and np.array_equal(self.data, other.data)


@dataclass(frozen=True)
class BBox:
    """Tight pixel-index bounds, inclusive on both ends."""

    x_min: int
    y_min: int
    x_max: int
    y_max: int

    def __post_init__(self):
        if self.x_min > self.x_max or self.y_min > self.y_max:
            raise InvalidArgumentError(f"degenerate bbox {self}")

    @property
    def h(self) -> int:
        return self.y_max - self.y_min

    @property
    def w(self) -> int:
        return self.x_max - self.x_min

    def center_pixel(self) -> tuple[float, float]:
        """Continuous pixel coordinates of the box center (pixel-center convention)."""
        return ((self.x_min + self.x_max) / 2.0 + 0.5, (self.y_min + self.y_max) / 2.0 + 0.5)


def mask_iou(a: BinaryMask, b: BinaryMask) -> float:
    """Intersection over union of two same-sized masks; 0 when both empty."""
    if a.data.shape != b.data.shape:
        raise InvalidArgumentError(f"mask shapes differ: {a.data.shape} vs {b.data.shape}")
    inter = np.logical_and(a.data, b.data).sum()
    union = np.logical_or(a.data, b.data).sum()
    if union == 0:
        return 0.0
    return float(inter) / float(union)


def bbox_of_mask(m: BinaryMask) -> BBox:
    rows = np.flatnonzero(m.data.any(axis=1))
    if rows.size == 0:
        raise EmptyMaskError("cannot take the bbox of an empty mask")
    cols = np.flatnonzero(m.data.any(axis=0))
    return BBox(x_min=int(cols[0]), y_min=int(rows[0]), x_max=int(cols[-1]), y_max=int(rows[-1]))
