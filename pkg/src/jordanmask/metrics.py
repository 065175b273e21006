"""Pixel-level agreement metrics between a predicted and a reference mask."""

from __future__ import annotations

from dataclasses import dataclass

from .grid import BinaryImage

__all__ = ["ConfusionCounts", "MetricsReport", "confusion", "compute_metrics"]


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int
    fp: int
    fn: int
    tn: int

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.fn + self.tn


@dataclass(frozen=True)
class MetricsReport:
    """Each value is None when its ratio is 0/0."""

    iou: float | None
    dice: float | None
    precision: float | None
    recall: float | None
    accuracy: float | None


def confusion(pred: BinaryImage, truth: BinaryImage) -> ConfusionCounts:
    if (pred.width, pred.height) != (truth.width, truth.height):
        raise ValueError(
            f"size mismatch: prediction {pred.width}x{pred.height}, "
            f"reference {truth.width}x{truth.height}"
        )
    p = pred.bits.astype(bool)
    t = truth.bits.astype(bool)
    tp = int((p & t).sum())
    fp = int((p & ~t).sum())
    fn = int((~p & t).sum())
    tn = int((~p & ~t).sum())
    return ConfusionCounts(tp, fp, fn, tn)


def _ratio(num: int, den: int) -> float | None:
    return num / den if den else None


def compute_metrics(c: ConfusionCounts) -> MetricsReport:
    return MetricsReport(
        iou=_ratio(c.tp, c.tp + c.fp + c.fn),
        dice=_ratio(2 * c.tp, 2 * c.tp + c.fp + c.fn),
        precision=_ratio(c.tp, c.tp + c.fp),
        recall=_ratio(c.tp, c.tp + c.fn),
        accuracy=_ratio(c.tp + c.tn, c.total),
    )
