"""Bit plane slicing of 8-bit grayscale images."""

from __future__ import annotations

from collections.abc import Iterator
from dataclasses import dataclass

import numpy as np

from bitmrf.constants import N_PLANES, BinaryMask, GrayImage
from bitmrf.exceptions.clean_exceptions import BitMrfError
from bitmrf.input_validation import validate_binary, validate_gray_image
from bitmrf.utils import read_only


@dataclass(frozen=True)
class BitPlaneSet:
    """The eight bit planes of an image; planes[j] holds bit j, j = 0 being the least significant bit.

    Attributes:
        planes: Exactly eight binary masks of equal shape.
    """

    planes: tuple[BinaryMask, ...]

    def __post_init__(self):
        if len(self.planes) != N_PLANES:
            raise BitMrfError(f"A bit plane set needs exactly {N_PLANES} planes, got {len(self.planes)}.")
        shapes = {plane.shape for plane in self.planes}
        if len(shapes) != 1:
            raise BitMrfError(f"Dimension mismatch among bit planes: {sorted(shapes)}.")
        for plane in self.planes:
            validate_binary(plane, "bit plane")

    @property
    def shape(self) -> tuple[int, int]:
        """Shape (height, width) shared by all planes."""
        return self.planes[0].shape

    def __getitem__(self, index: int) -> BinaryMask:
        return self.planes[index]

    def __len__(self) -> int:
        return len(self.planes)

    def __iter__(self) -> Iterator[BinaryMask]:
        return iter(self.planes)


def slice_bit_planes(image: GrayImage) -> BitPlaneSet:
    """Split an image into its eight bit planes.

    Plane j is 1 at a pixel exactly when bit j of the pixel intensity is set.

    Args:
        image: 8-bit intensities.

    Returns:
        The bit planes, least significant first.
    """
    validate_gray_image(image)
    data = np.asarray(image, dtype=np.uint8)
    return BitPlaneSet(tuple(read_only(((data >> bit) & 1).astype(np.uint8)) for bit in range(N_PLANES)))


def reconstruct(planes: BitPlaneSet) -> GrayImage:
    """Rebuild the image from its bit planes as the sum of planes[j] * 2**j.

    Args:
        planes: A complete bit plane set.

    Returns:
        8-bit intensities.
    """
    image = np.zeros(planes.shape, dtype=np.uint8)
    for bit, plane in enumerate(planes):
        image |= (plane.astype(np.uint8) << bit).astype(np.uint8)
    return image
