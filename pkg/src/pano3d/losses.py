"""Boundary-object classification and indicator-gated loss aggregation.

Shape-related loss terms of boundary (image-edge-cut) instances are
excluded from the total; the six image-level terms are always summed.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field

from .errors import EmptyMaskError, InvalidArgumentError, InvalidLedgerError
from .masks import BinaryMask, bbox_of_mask

ZC_EPS = 1e-6

UNGATED_KEYS = ("mask", "box", "class", "panoptic", "semantic", "depth")
GATED_KEYS = ("dz", "zc", "voxel", "mesh")


class FlagReason(enum.Enum):
    OK = "ok"
    TOUCHES_BORDER = "touches_border"
    NONPOSITIVE_ZC = "nonpositive_zc"


@dataclass(frozen=True)
class CenteredFlag:
    reason: FlagReason

    @property
    def is_centered(self) -> bool:
        return self.reason is FlagReason.OK


def classify_boundary(
    amodal_mask: BinaryMask, width: int, height: int, margin: int = 0
) -> CenteredFlag:
    """Boundary iff the mask bbox touches an image edge within ``margin`` px."""
    if amodal_mask.data.shape != (height, width):
        raise InvalidArgumentError("mask dimensions do not match the image")
    if amodal_mask.area() == 0:
        raise EmptyMaskError("cannot classify an empty mask")
    bbox = bbox_of_mask(amodal_mask)
    touches = (
        bbox.x_min <= margin
        or bbox.y_min <= margin
        or bbox.x_max >= width - 1 - margin
        or bbox.y_max >= height - 1 - margin
    )
    return CenteredFlag(FlagReason.TOUCHES_BORDER if touches else FlagReason.OK)


def frustum_validity(z_c: float) -> CenteredFlag:
    """Instances whose z center is not in front of the camera are invalid."""
    if z_c <= ZC_EPS:
        return CenteredFlag(FlagReason.NONPOSITIVE_ZC)
    return CenteredFlag(FlagReason.OK)


@dataclass
class LossLedger:
    """Per-head loss scalars: six ungated image-level terms plus four gated
    per-instance terms with one centered flag per instance."""

    ungated: dict[str, float]
    gated: list[dict[str, float]] = field(default_factory=list)
    flags: list[CenteredFlag] = field(default_factory=list)

    def validate(self) -> None:
        if set(self.ungated) != set(UNGATED_KEYS):
            raise InvalidLedgerError(f"ungated keys must be {UNGATED_KEYS}, got {sorted(self.ungated)}")
        if len(self.gated) != len(self.flags):
            raise InvalidLedgerError("one centered flag required per instance")
        for v in self.ungated.values():
            _check_component(v)
        for inst in self.gated:
            if set(inst) != set(GATED_KEYS):
                raise InvalidLedgerError(f"gated keys must be {GATED_KEYS}, got {sorted(inst)}")
            for v in inst.values():
                _check_component(v)

    @classmethod
    def from_json(cls, text: str) -> "LossLedger":
        rec = json.loads(text)
        flags = []
        for f in rec.get("flags", []):
            if isinstance(f, bool):
                flags.append(CenteredFlag(FlagReason.OK if f else FlagReason.TOUCHES_BORDER))
            else:
                flags.append(CenteredFlag(FlagReason(f)))
        return cls(
            ungated={k: float(v) for k, v in rec["ungated"].items()},
            gated=[{k: float(v) for k, v in g.items()} for g in rec.get("gated", [])],
            flags=flags,
        )


def _check_component(v: float) -> None:
    if not math.isfinite(v) or v < 0:
        raise InvalidLedgerError(f"loss component must be finite and >= 0, got {v}")


def aggregate_loss(ledger: LossLedger, reduction: str = "mean") -> float:
    """Total loss: sum of ungated terms plus the reduced gated terms of
    centered instances only. Boundary instances contribute exactly zero.

    reduction: "mean" (default) averages gated sums over centered instances;
    "sum" adds them.
    """
    if reduction not in ("mean", "sum"):
        raise InvalidArgumentError(f"reduction must be 'mean' or 'sum', got {reduction!r}")
    ledger.validate()
    total = sum(ledger.ungated[k] for k in UNGATED_KEYS)
    centered = [
        sum(inst[k] for k in GATED_KEYS)
        for inst, flag in zip(ledger.gated, ledger.flags)
        if flag.is_centered
    ]
    if centered:
        gated = sum(centered)
        if reduction == "mean":
            gated /= len(centered)
        total += gated
    return total
