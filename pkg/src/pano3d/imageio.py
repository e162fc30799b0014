"""Depth-map and mask file I/O: 16-bit PNG (scaled integer, 0 = invalid),
32-bit float PFM, and 8-bit mask PNGs (nonzero = set)."""

from __future__ import annotations

import numpy as np
from PIL import Image

from .backproject import DepthMap
from .errors import InputIOError
from .masks import BinaryMask

DEFAULT_DEPTH_SCALE = 1000.0  # stored value / scale = meters


def load_depth_png(path, scale: float = DEFAULT_DEPTH_SCALE) -> DepthMap:
    try:
        img = Image.open(path)
    except OSError as e:
        raise InputIOError(f"cannot read depth PNG {path}: {e}") from e
    raw = np.asarray(img)
    if raw.ndim != 2:
        raise InputIOError(f"depth PNG {path} must be single-channel")
    depth = raw.astype(np.float64) / scale
    return DepthMap(depth, raw > 0)


def save_depth_png(depth: DepthMap, path, scale: float = DEFAULT_DEPTH_SCALE) -> None:
    raw = np.where(depth.valid, np.round(depth.depth * scale), 0.0)
    if raw.max() > 65535:
        raise InputIOError(f"depth exceeds 16-bit range at scale {scale}")
    Image.fromarray(raw.astype(np.uint16)).save(path)


def load_pfm(path) -> DepthMap:
    """Read a single-channel PFM; nonpositive or non-finite values are invalid."""
    try:
        with open(path, "rb") as fh:
            header = fh.readline().strip()
            if header != b"Pf":
                raise InputIOError(f"{path}: only single-channel (Pf) PFM is supported")
            dims = fh.readline().split()
            width, height = int(dims[0]), int(dims[1])
            scale = float(fh.readline().strip())
            data = np.fromfile(fh, "<f4" if scale < 0 else ">f4", count=width * height)
    except (OSError, ValueError, IndexError) as e:
        raise InputIOError(f"malformed PFM {path}: {e}") from e
    if data.size != width * height:
        raise InputIOError(f"truncated PFM {path}")
    depth = data.reshape(height, width)[::-1].astype(np.float64)  # PFM rows are bottom-up
    return DepthMap(depth, np.isfinite(depth) & (depth > 0))


def save_pfm(depth: DepthMap, path) -> None:
    data = np.where(depth.valid, depth.depth, 0.0).astype("<f4")
    with open(path, "wb") as fh:
        fh.write(b"Pf\n")
        fh.write(f"{depth.width} {depth.height}\n".encode())
        fh.write(b"-1.0\n")
        data[::-1].tofile(fh)


def load_mask_png(path) -> BinaryMask:
    try:
        img = Image.open(path).convert("L")
    except OSError as e:
        raise InputIOError(f"cannot read mask PNG {path}: {e}") from e
    return BinaryMask(np.asarray(img) > 0)


def save_mask_png(mask: BinaryMask, path) -> None:
    Image.fromarray((mask.data * 255).astype(np.uint8), mode="L").save(path)
