"""Bit-plane initialized ensemble of MRF optimizations combined by pixelwise voting."""

from __future__ import annotations

from collections.abc import Iterator
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np
import numpy.typing as npt

from bitmrf.bitplane import slice_bit_planes
from bitmrf.constants import N_LEVELS, N_PLANES, BinaryMask, ConfidenceMap, Defaults, GrayImage, LabelField
from bitmrf.constants import Neighborhood, Optimizer
from bitmrf.exceptions.clean_exceptions import BitMrfError
from bitmrf.input_validation import check_same_shape, parse_neighborhood, parse_optimizer, validate_beta
from bitmrf.input_validation import validate_binary, validate_gray_image, validate_level
from bitmrf.logger import logger
from bitmrf.mrf import MrfModel, OptimizeReport, SaSchedule, estimate_params, icm, simulated_annealing
from bitmrf.utils import read_only, round_half_up


@dataclass(frozen=True)
class EnsembleConfig:
    """Settings shared by all eight members of the ensemble.

    Attributes:
        beta: Coupling strength in (0, 10].
        neighborhood: 4- or 8-connectivity.
        optimizer: ICM or simulated annealing.
        max_sweeps: Sweep limit of ICM.
        reestimate: Refresh the class parameters after each sweep.
        schedule: Annealing schedule; member j uses seed schedule.seed + j.
        std_floor: Smallest class standard deviation.
        threads: Number of members optimized concurrently.
    """

    beta: float = Defaults.BETA
    neighborhood: Neighborhood = Neighborhood.FOUR
    optimizer: Optimizer = Optimizer.ICM
    max_sweeps: int = Defaults.MAX_SWEEPS
    reestimate: bool = False
    schedule: SaSchedule = field(default_factory=SaSchedule)
    std_floor: float = Defaults.STD_FLOOR
    threads: int = Defaults.THREADS

    def __post_init__(self):
        object.__setattr__(self, "beta", validate_beta(self.beta))
        object.__setattr__(self, "neighborhood", parse_neighborhood(self.neighborhood))
        object.__setattr__(self, "optimizer", parse_optimizer(self.optimizer))
        if self.max_sweeps < 1:
            raise BitMrfError(f"max_sweeps must be at least 1, got {self.max_sweeps}.")
        if self.threads < 1:
            raise BitMrfError(f"threads must be at least 1, got {self.threads}.")
        if not self.std_floor > 0.0:
            raise BitMrfError(f"The std floor must be positive, got {self.std_floor}.")


@dataclass(frozen=True)
class EnsembleResult:
    """Output of one ensemble segmentation.

    Unpacks as (confidence, members).

    Attributes:
        confidence: Votes per pixel, 0..8.
        members: Oriented labelling of every member, in plane order.
        reports: Optimization report of every member, in plane order.
    """

    confidence: ConfidenceMap
    members: tuple[LabelField, ...]
    reports: tuple[OptimizeReport, ...]

    def __iter__(self) -> Iterator:
        return iter((self.confidence, self.members))


def orient_object_label(image: GrayImage, labels: LabelField) -> LabelField:
    """Flip a labelling if needed so that label 1 is the class with the higher mean intensity.

    The labelling is returned unchanged when both means are equal or one class is empty.

    Raises:
        BitMrfError: On a dimension mismatch.
    """
    validate_binary(labels)
    check_same_shape(image, labels)
    values = np.asarray(image, dtype=np.float64)
    ones = labels == 1
    if ones.all() or not ones.any():
        return labels
    if values[ones].mean() < values[~ones].mean():
        return (1 - labels).astype(np.uint8)
    return labels


def _run_member(image: GrayImage, plane: BinaryMask, index: int, config: EnsembleConfig):
    model = MrfModel(estimate_params(image, plane, config.std_floor), config.beta, config.neighborhood)
    if config.optimizer == Optimizer.SA:
        schedule = replace(config.schedule, seed=config.schedule.seed + index)
        labels, report = simulated_annealing(image, plane, model, schedule, config.reestimate, config.std_floor)
    else:
        labels, report = icm(image, plane, model, config.max_sweeps, config.reestimate, config.std_floor)
    logger.info(
        "Member %d: %d sweeps, energy %.4f, converged %s.", index, report.sweeps, report.final_energy, report.converged
    )
    return read_only(orient_object_label(image, labels).astype(np.uint8)), report


def segment_ensemble(image: GrayImage, config: EnsembleConfig | None = None) -> EnsembleResult:
    """Segment an image with eight MRF optimizations, each started from one bit plane, and count the votes.

    Member j estimates the class parameters with bit plane j as labelling, optimizes from that plane
    and orients its result so that label 1 marks the brighter class.

    Args:
        image: 8-bit intensities.
        config: Ensemble settings, the defaults if None.

    Returns:
        The confidence map with the member labellings and reports.
    """
    validate_gray_image(image)
    config = config if config is not None else EnsembleConfig()
    planes = slice_bit_planes(image)

    jobs = [(image, plane, index, config) for index, plane in enumerate(planes)]
    if config.threads > 1:
        with ThreadPoolExecutor(max_workers=min(config.threads, N_PLANES)) as executor:
            outcomes = list(executor.map(lambda job: _run_member(*job), jobs))
    else:
        outcomes = [_run_member(*job) for job in jobs]

    members = tuple(labels for labels, _ in outcomes)
    votes = np.sum(np.stack(members), axis=0, dtype=np.int64).astype(np.uint8)
    return EnsembleResult(read_only(votes), members, tuple(report for _, report in outcomes))


def _validate_confidence(confidence: ConfidenceMap) -> None:
    if not isinstance(confidence, np.ndarray) or confidence.ndim != 2 or confidence.size == 0:
        raise BitMrfError("A confidence map must be a non-empty 2-D array.")
    if confidence.min() < 0 or confidence.max() > N_PLANES:
        raise BitMrfError(f"Confidence values must be in [0, {N_PLANES}].")


def threshold_confidence(confidence: ConfidenceMap, level: int) -> BinaryMask:
    """Mask of the pixels with more than `level` votes.

    Level 0 admits every pixel with at least one vote, level 7 needs all eight.

    Raises:
        BitMrfError: If the level is outside [0, 7].
    """
    level = validate_level(level)
    _validate_confidence(confidence)
    return (confidence > level).astype(np.uint8)


def threshold_all(confidence: ConfidenceMap) -> npt.NDArray[np.uint8]:
    """Masks of all confidence levels, shape (8, height, width), level 0 first."""
    _validate_confidence(confidence)
    levels = np.arange(N_LEVELS).reshape(-1, 1, 1)
    return (confidence[np.newaxis] > levels).astype(np.uint8)


def confidence_to_image(confidence: ConfidenceMap) -> GrayImage:
    """Scale vote counts to gray levels, votes * 255 / 8 rounded half up; 4 votes give 128."""
    _validate_confidence(confidence)
    return round_half_up(confidence.astype(np.float64) * 255.0 / N_PLANES).astype(np.uint8)


def image_to_confidence(image: GrayImage) -> ConfidenceMap:
    """Recover the vote counts from a probability map written by `confidence_to_image`.

    Raises:
        BitMrfError: If the image holds gray levels that no vote count maps to.
    """
    validate_gray_image(image, "probability map")
    votes = round_half_up(np.asarray(image, dtype=np.float64) * N_PLANES / 255.0).astype(np.uint8)
    if not np.array_equal(confidence_to_image(votes), image):
        raise BitMrfError("The probability map holds gray levels other than round(votes * 255 / 8).")
    return read_only(votes)
