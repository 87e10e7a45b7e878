"""Functions to validate user input and array arguments for bitmrf."""

from __future__ import annotations

from typing import Any

import numpy as np
import numpy.typing as npt

from bitmrf.constants import N_LEVELS, Aggregation, Defaults, Neighborhood, Optimizer
from bitmrf.exceptions.clean_exceptions import BitMrfError, UsageError


def validate_gray_image(image: npt.NDArray[Any], name: str = "image") -> None:
    """Check that an array is a non-empty 2-D field of 8-bit intensities.

    Args:
        image: Array to check.
        name: Name used in the error message.

    Raises:
        BitMrfError: If the array is not 2-D, is empty, or holds values outside [0, 255].
    """
    if not isinstance(image, np.ndarray) or image.ndim != 2:
        raise BitMrfError(f"The {name} must be a 2-D array, got {getattr(image, 'shape', type(image))}.")
    if image.shape[0] < 1 or image.shape[1] < 1:
        raise BitMrfError(f"The {name} has zero size.")
    if image.dtype != np.uint8 and (image.min() < 0 or image.max() > 255):
        raise BitMrfError(f"The {name} holds values outside [0, 255].")


def validate_binary(field: npt.NDArray[Any], name: str = "labels") -> None:
    """Check that an array is a non-empty 2-D field of zeros and ones.

    Raises:
        BitMrfError: If the array is not 2-D, is empty, or holds other values than 0 and 1.
    """
    if not isinstance(field, np.ndarray) or field.ndim != 2:
        raise BitMrfError(f"The {name} must be a 2-D array, got {getattr(field, 'shape', type(field))}.")
    if field.size == 0:
        raise BitMrfError(f"The {name} has zero size.")
    if np.any((field != 0) & (field != 1)):
        raise BitMrfError(f"The {name} must only contain 0 and 1.")


def check_same_shape(first: npt.NDArray[Any], second: npt.NDArray[Any], what: str = "image and labels") -> None:
    """Raise if two fields do not share dimensions.

    Raises:
        BitMrfError: On a dimension mismatch.
    """
    if first.shape != second.shape:
        raise BitMrfError(f"Dimension mismatch between {what}: {first.shape} != {second.shape}.")


def validate_level(level: int) -> int:
    """Check that a confidence level is in [0, 7].

    Raises:
        BitMrfError: If the level is out of range.
    """
    if isinstance(level, bool) or int(level) != level or not 0 <= level < N_LEVELS:
        raise BitMrfError(f"Confidence level must be an integer in [0, {N_LEVELS - 1}], got {level}.")
    return int(level)


def validate_levels(levels: list[int] | tuple[int, ...]) -> tuple[int, ...]:
    """Check a set of confidence levels, returning them sorted without duplicates."""
    if not levels:
        raise BitMrfError("At least one confidence level must be reported.")
    return tuple(sorted({validate_level(level) for level in levels}))


def validate_beta(beta: float) -> float:
    """Check that the coupling strength is in (0, 10].

    Raises:
        BitMrfError: If beta is out of range.
    """
    if not 0.0 < beta <= Defaults.BETA_MAX:
        raise BitMrfError(f"beta must be in (0, {Defaults.BETA_MAX}], got {beta}.")
    return float(beta)


def validate_mask_threshold(threshold: int) -> int:
    """Check that a mask binarization threshold is an intensity in [1, 255]."""
    if isinstance(threshold, bool) or int(threshold) != threshold or not 1 <= threshold <= 255:
        raise BitMrfError(f"Mask threshold must be an integer in [1, 255], got {threshold}.")
    return int(threshold)


def validate_schedule(t0: float, cooling: float, t_min: float) -> None:
    """Check a geometric annealing schedule.

    Raises:
        BitMrfError: Unless t0 > t_min > 0 and 0 < cooling < 1.
    """
    if not t_min > 0.0:
        raise BitMrfError(f"The stopping temperature must be positive, got {t_min}.")
    if not t0 > t_min:
        raise BitMrfError(f"The initial temperature ({t0}) must exceed the stopping temperature ({t_min}).")
    if not 0.0 < cooling < 1.0:
        raise BitMrfError(f"The cooling factor must be in (0, 1), got {cooling}.")


def parse_neighborhood(value: Any) -> Neighborhood:
    """Convert 4, 8, '4', '8' or a Neighborhood to a Neighborhood.

    Raises:
        UsageError: For any other value.
    """
    if isinstance(value, Neighborhood):
        return value
    try:
        return Neighborhood(int(value))
    except (TypeError, ValueError) as e:
        raise UsageError(f"Neighborhood must be 4 or 8, got '{value}'.") from e


def parse_optimizer(value: Any) -> Optimizer:
    """Convert 'icm', 'sa' or an Optimizer to an Optimizer.

    Raises:
        UsageError: For any other value.
    """
    if isinstance(value, Optimizer):
        return value
    try:
        return Optimizer(str(value).lower())
    except ValueError as e:
        raise UsageError(f"Optimizer must be one of 'icm', 'sa', got '{value}'.") from e


def parse_aggregation(value: Any) -> Aggregation:
    """Convert 'mean', 'pooled' or an Aggregation to an Aggregation.

    Raises:
        UsageError: For any other value.
    """
    if isinstance(value, Aggregation):
        return value
    try:
        return Aggregation(str(value).lower())
    except ValueError as e:
        raise UsageError(f"Aggregation must be one of 'mean', 'pooled', got '{value}'.") from e


def validate_mask_suffix(suffix: str) -> str:
    """Check that a mask suffix is not empty, otherwise every image would be its own mask.

    Raises:
        UsageError: If the suffix is empty.
    """
    if not suffix:
        raise UsageError("The mask suffix must not be empty, masks would be the images themselves.")
    return suffix
