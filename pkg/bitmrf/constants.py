"""Define custom enumerations and constants."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import TypeAlias

import numpy as np
import numpy.typing as npt

GrayImage: TypeAlias = npt.NDArray[np.uint8]
BinaryMask: TypeAlias = npt.NDArray[np.uint8]
LabelField: TypeAlias = npt.NDArray[np.uint8]
ConfidenceMap: TypeAlias = npt.NDArray[np.uint8]

N_PLANES = 8
N_LEVELS = 8  # Confidence levels 0..7, a pixel passes level L when it has more than L votes.


@dataclass(frozen=True)
class _Headers:
    """Column names of the CSV tables."""

    IMAGE = "image"
    LEVEL = "level"
    SD_NORM = "SD_norm"
    SD_RAW = "SD_raw"
    SEN = "SEN"
    SPE = "SPE"
    PPV = "PPV"
    FSCORE = "FSCORE"
    RI = "RI"
    N_IMAGES = "n_images"
    FPR = "fpr"
    TPR = "tpr"
    AUC = "auc"
    N00 = "n00"
    N01 = "n01"
    N10 = "n10"
    N11 = "n11"

    # Fixed column order of the metric tables.
    METRICS = [SD_NORM, SD_RAW, SEN, SPE, PPV, FSCORE, RI]
    COUNTS = [N00, N01, N10, N11]


Headers = _Headers()


@dataclass(frozen=True)
class _Keywords:
    """Keys accepted in a config file, identical to the long command line flags with '_' as separator.

    Attributes:
        _items: Private helper to iterate through all keywords.
        _members: Private helper to check membership.
    """

    BETA = "beta"
    NEIGHBORHOOD = "neighborhood"
    OPTIMIZER = "optimizer"
    MAX_SWEEPS = "max_sweeps"
    SA_T0 = "sa_t0"
    SA_COOLING = "sa_cooling"
    SA_TMIN = "sa_tmin"
    SEED = "seed"
    REESTIMATE = "reestimate"
    LEVEL = "level"
    LEVELS = "levels"
    MASK_SUFFIX = "mask_suffix"
    MASK_THRESHOLD = "mask_threshold"
    IMAGE_GLOB = "image_glob"
    THREADS = "threads"
    OUT = "out"
    DUMP_MEMBERS = "dump_members"
    PLOT = "plot"
    AGGREGATION = "aggregation"

    _items = [
        BETA,
        NEIGHBORHOOD,
        OPTIMIZER,
        MAX_SWEEPS,
        SA_T0,
        SA_COOLING,
        SA_TMIN,
        SEED,
        REESTIMATE,
        LEVEL,
        LEVELS,
        MASK_SUFFIX,
        MASK_THRESHOLD,
        IMAGE_GLOB,
        THREADS,
        OUT,
        DUMP_MEMBERS,
        PLOT,
        AGGREGATION,
    ]
    _members = set(_items)

    booleans = {REESTIMATE, DUMP_MEMBERS, PLOT}
    integers = {NEIGHBORHOOD, MAX_SWEEPS, SEED, LEVEL, MASK_THRESHOLD, THREADS}
    floats = {BETA, SA_T0, SA_COOLING, SA_TMIN}

    def __iter__(self):
        return self._items.__iter__()

    def __contains__(self, item):
        return item in self._members


Keywords = _Keywords()


@dataclass(frozen=True)
class _Defaults:
    """Default values of the model, the optimizers and the command line tool."""

    BETA = 1.0
    BETA_MAX = 10.0
    STD_FLOOR = 0.5
    NEIGHBORHOOD = 4
    OPTIMIZER = "icm"
    MAX_SWEEPS = 20
    SA_T0 = 4.0
    SA_COOLING = 0.95
    SA_TMIN = 0.05
    SEED = 0
    LEVEL = 3
    MASK_SUFFIX = "_mask"
    MASK_THRESHOLD = 1
    IMAGE_GLOB = "*.png"
    THREADS = 1
    OUT = "."
    # At most this many pixels are swept by the scalar row-major loop instead of the vectorized wavefront.
    SCALAR_SWEEP_MAX_PIXELS = 64


Defaults = _Defaults()


class _StringEnum(Enum):
    """Enum that compares equal to its command line spelling."""

    def __eq__(self, other: object) -> bool:
        """Implement the equality function to compare enums with their value or name.

        Arguments:
            other: Item to compare with.

        Returns:
            Whether enums are equal.

        Example:
            >>>Optimizer.ICM == "icm"
            >>>True
        """
        if isinstance(other, Enum):
            return self.__class__ == other.__class__ and self.value == other.value
        if isinstance(other, str):
            return str(self.value) == other.lower() or self.name == other.upper()
        if isinstance(other, int) and not isinstance(other, bool):
            return self.value == other
        return False

    def __hash__(self) -> int:
        return hash((self.__class__.__name__, self.value))


class Neighborhood(_StringEnum):
    """First (4) or second (8) order neighborhood system."""

    FOUR = 4
    EIGHT = 8

    @property
    def offsets(self) -> tuple[tuple[int, int], ...]:
        """Row and column offsets of all neighbors of a pixel."""
        if self.value == 4:
            return ((-1, 0), (0, -1), (0, 1), (1, 0))
        return ((-1, -1), (-1, 0), (-1, 1), (0, -1), (0, 1), (1, -1), (1, 0), (1, 1))

    @property
    def forward_offsets(self) -> tuple[tuple[int, int], ...]:
        """Half of the offsets, so that every unordered neighbor pair is visited exactly once."""
        if self.value == 4:
            return ((0, 1), (1, 0))
        return ((0, 1), (1, -1), (1, 0), (1, 1))


class Optimizer(_StringEnum):
    """Legal optimizers of the MRF energy."""

    ICM = "icm"
    SA = "sa"


class Aggregation(_StringEnum):
    """How per-image results are combined into one table row per confidence level."""

    MEAN = "mean"  # Average of the per-image metrics, NaN ignored.
    POOLED = "pooled"  # Metrics of the confusion counts summed over all images.
