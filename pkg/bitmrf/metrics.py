"""Pixelwise segmentation metrics and empirical ROC curves over confidence levels.

Notation of the confusion counts, S the segmentation and G the ground truth:
    n00: in neither S nor G
    n01: in G only (missed object pixels)
    n10: in S only (false object pixels)
    n11: in both S and G
"""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np
from scipy.integrate import trapezoid

from bitmrf.constants import N_LEVELS, BinaryMask, ConfidenceMap, Headers
from bitmrf.ensemble import threshold_all
from bitmrf.exceptions.clean_exceptions import BitMrfError
from bitmrf.input_validation import check_same_shape, validate_binary
from bitmrf.logger import logger


@dataclass(frozen=True)
class ConfusionCounts:
    """Pixel counts of the four membership combinations of segmentation and ground truth."""

    n00: int
    n01: int
    n10: int
    n11: int

    def __post_init__(self):
        if min(self.n00, self.n01, self.n10, self.n11) < 0:
            raise BitMrfError(f"Confusion counts must be non-negative, got {self}.")

    @property
    def n(self) -> int:
        """Total pixel count."""
        return self.n00 + self.n01 + self.n10 + self.n11

    def __add__(self, other: ConfusionCounts) -> ConfusionCounts:
        return ConfusionCounts(
            self.n00 + other.n00, self.n01 + other.n01, self.n10 + other.n10, self.n11 + other.n11
        )

    def as_dict(self) -> dict[str, int]:
        return {Headers.N00: self.n00, Headers.N01: self.n01, Headers.N10: self.n10, Headers.N11: self.n11}


@dataclass(frozen=True)
class MetricReport:
    """All pixelwise metrics of one segmentation.

    Attributes:
        sd_normalized: Symmetric difference divided by the pixel count.
        sd_raw: Number of pixels in exactly one of segmentation and ground truth.
        sen: Sensitivity, NaN if the ground truth has no object pixel.
        spe: Specificity, NaN if the ground truth has no background pixel.
        ppv: Positive predictive value, NaN if the segmentation marks nothing.
        fscore: Harmonic mean of sen and ppv.
        rand_index: Fraction of pixels on which both masks agree.
        undefined: Names of the metrics that are NaN.
    """

    sd_normalized: float
    sd_raw: int
    sen: float
    spe: float
    ppv: float
    fscore: float
    rand_index: float
    undefined: tuple[str, ...] = ()

    def as_row(self) -> dict[str, float]:
        """Metric values keyed by column name, in table order."""
        values = [self.sd_normalized, float(self.sd_raw), self.sen, self.spe, self.ppv, self.fscore, self.rand_index]
        return dict(zip(Headers.METRICS, values))


@dataclass(frozen=True)
class RocCurve:
    """Empirical ROC curve over the confidence levels.

    Attributes:
        level_points: (fpr, tpr) of every confidence level, level 0 first.
        points: The level points plus the anchors (0, 0) and (1, 1), sorted by fpr then tpr.
        auc: Area under the sorted polyline by the trapezoidal rule, NaN if undefined.
    """

    level_points: tuple[tuple[float, float], ...]
    points: tuple[tuple[float, float], ...]
    auc: float

    @property
    def defined(self) -> bool:
        return not math.isnan(self.auc)


def confusion(seg: BinaryMask, gt: BinaryMask) -> ConfusionCounts:
    """Count the four membership combinations of two binary masks.

    Raises:
        BitMrfError: On a dimension mismatch.
    """
    validate_binary(seg, "segmentation")
    validate_binary(gt, "ground truth")
    check_same_shape(seg, gt, "segmentation and ground truth")
    in_seg = seg == 1
    in_gt = gt == 1
    return ConfusionCounts(
        n00=int(np.count_nonzero(~in_seg & ~in_gt)),
        n01=int(np.count_nonzero(~in_seg & in_gt)),
        n10=int(np.count_nonzero(in_seg & ~in_gt)),
        n11=int(np.count_nonzero(in_seg & in_gt)),
    )


def _check_not_empty(counts: ConfusionCounts) -> None:
    if counts.n == 0:
        raise BitMrfError("Cannot compute a metric of an empty mask.")


def symmetric_difference_raw(counts: ConfusionCounts) -> int:
    """Number of pixels in exactly one of the two masks."""
    return counts.n01 + counts.n10


def symmetric_difference(counts: ConfusionCounts) -> float:
    """Symmetric difference normalized by the pixel count, in [0, 1].

    Raises:
        BitMrfError: For an empty mask.
    """
    _check_not_empty(counts)
    return symmetric_difference_raw(counts) / counts.n


def _ratio(numerator: int, denominator: int) -> float:
    return numerator / denominator if denominator > 0 else math.nan


def sensitivity(counts: ConfusionCounts) -> float:
    """n11 / (n11 + n01), NaN without object pixels in the ground truth."""
    return _ratio(counts.n11, counts.n11 + counts.n01)


def specificity(counts: ConfusionCounts) -> float:
    """n00 / (n00 + n10), NaN without background pixels in the ground truth."""
    return _ratio(counts.n00, counts.n00 + counts.n10)


def ppv(counts: ConfusionCounts) -> float:
    """n11 / (n11 + n10), NaN when the segmentation marks nothing."""
    return _ratio(counts.n11, counts.n11 + counts.n10)


def fscore(sen: float, ppv_: float) -> float:
    """Harmonic mean 2 * sen * ppv / (sen + ppv); 0 when both are 0 and NaN when either is NaN."""
    if math.isnan(sen) or math.isnan(ppv_):
        return math.nan
    if sen + ppv_ == 0.0:
        return 0.0
    return 2.0 * sen * ppv_ / (sen + ppv_)


def rand_index(counts: ConfusionCounts) -> float:
    """Fraction of agreeing pixels, (n11 + n00) / n.

    Computed as 1 - SD so that RI = 1 - SD holds exactly in floating point.

    Raises:
        BitMrfError: For an empty mask.
    """
    return 1.0 - symmetric_difference(counts)


def report_from_counts(counts: ConfusionCounts) -> MetricReport:
    """Compute every metric from confusion counts.

    Raises:
        BitMrfError: For an empty mask.
    """
    sen, spe, ppv_ = sensitivity(counts), specificity(counts), ppv(counts)
    f_score = fscore(sen, ppv_)
    named = {Headers.SEN: sen, Headers.SPE: spe, Headers.PPV: ppv_, Headers.FSCORE: f_score}
    undefined = tuple(name for name, value in named.items() if math.isnan(value))
    if undefined:
        logger.debug("Undefined metrics for %s: %s.", counts, ", ".join(undefined))
    return MetricReport(
        sd_normalized=symmetric_difference(counts),
        sd_raw=symmetric_difference_raw(counts),
        sen=sen,
        spe=spe,
        ppv=ppv_,
        fscore=f_score,
        rand_index=rand_index(counts),
        undefined=undefined,
    )


def evaluate(seg: BinaryMask, gt: BinaryMask) -> MetricReport:
    """Metric report of a segmentation against its ground truth."""
    return report_from_counts(confusion(seg, gt))


def confusion_per_level(confidence: ConfidenceMap, gt: BinaryMask) -> list[ConfusionCounts]:
    """Confusion counts of the thresholded masks of every confidence level, level 0 first."""
    check_same_shape(confidence, gt, "confidence map and ground truth")
    return [confusion(mask, gt) for mask in threshold_all(confidence)]


def roc_from_counts(counts_per_level: Sequence[ConfusionCounts]) -> RocCurve:
    """Empirical ROC curve from the confusion counts of each confidence level.

    Every level gives the point (fpr, tpr) = (1 - SPE, SEN). The anchors (0, 0) and (1, 1) are added,
    the points are sorted by fpr then tpr, and the area is integrated with the trapezoidal rule.
    If the ground truth lacks one of the classes the curve is undefined: the level points are NaN and so is the AUC.

    Args:
        counts_per_level: Confusion counts, level 0 first.

    Returns:
        The ROC curve.
    """
    if len(counts_per_level) != N_LEVELS:
        raise BitMrfError(f"Expected counts for {N_LEVELS} levels, got {len(counts_per_level)}.")

    level_points = tuple((1.0 - specificity(c), sensitivity(c)) for c in counts_per_level)
    if any(math.isnan(fpr) or math.isnan(tpr) for fpr, tpr in level_points):
        logger.warning("The ground truth has a single class, the ROC curve is undefined.")
        return RocCurve(level_points, ((0.0, 0.0), (1.0, 1.0)), math.nan)

    points = tuple(sorted(level_points + ((0.0, 0.0), (1.0, 1.0))))
    fpr, tpr = np.array(points).T
    auc = float(trapezoid(tpr, fpr))
    return RocCurve(level_points, points, auc)


def roc_from_confidence(confidence: ConfidenceMap, gt: BinaryMask) -> RocCurve:
    """Empirical ROC curve of a confidence map against its ground truth.

    Raises:
        BitMrfError: On a dimension mismatch.
    """
    return roc_from_counts(confusion_per_level(confidence, gt))
