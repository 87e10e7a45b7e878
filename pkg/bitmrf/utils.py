"""Collection of commonly used utilities."""

from __future__ import annotations

import sys
from typing import Any

import numpy as np
import numpy.typing as npt

from bitmrf.logger import logger


def abort(message: str, status: int = 1) -> SystemExit:
    """Exit the program with a message and exit code (1 by default).

    Args:
        message: The message to be logged.
        status: Which system exit code to use. 0 indicates success.
        I.e. there were no errors, while 1 (usage error) or 2 (data error) indicates that an error occurred.

    Returns:
        SystemExit: Makes type checkers happy when using the ``raise`` keyword with this function. I.e.
            `>>> raise abort("Something when terribly wrong.")`
    """
    if status == 0:
        logger.info(message)
    else:
        logger.error(message)
    return sys.exit(status)


def read_only(array: npt.NDArray[Any]) -> npt.NDArray[Any]:
    """Mark an array as immutable so it can be shared between threads.

    Args:
        array: Array to protect. It is modified in place.

    Returns:
        The same array, flagged as not writeable.
    """
    array.flags.writeable = False
    return array


def round_half_up(values: npt.NDArray[np.float64] | float) -> npt.NDArray[np.int64]:
    """Round to the nearest integer, with halves rounded up (numpy rounds halves to even).

    Args:
        values: Non-negative values to round.

    Returns:
        Rounded integers.
    """
    return np.floor(np.asarray(values, dtype=np.float64) + 0.5).astype(np.int64)


def neighbor_offsets_in_bounds(
    row: int, col: int, height: int, width: int, offsets: tuple[tuple[int, int], ...]
) -> list[tuple[int, int]]:
    """List the in-bounds neighbor coordinates of a pixel.

    Args:
        row: Pixel row.
        col: Pixel column.
        height: Image height.
        width: Image width.
        offsets: Neighborhood offsets.

    Returns:
        Coordinates of the neighbors inside the image, in offset order.
    """
    return [
        (row + d_row, col + d_col)
        for d_row, d_col in offsets
        if 0 <= row + d_row < height and 0 <= col + d_col < width
    ]
