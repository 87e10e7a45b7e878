"""Test functions for bit plane slicing."""

import numpy as np
import pytest

from bitmrf.bitplane import BitPlaneSet, reconstruct, slice_bit_planes
from bitmrf.exceptions.clean_exceptions import BitMrfError


@pytest.mark.parametrize(
    "intensity, expected",
    [
        (5, [1, 0, 1, 0, 0, 0, 0, 0]),
        (0, [0] * 8),
        (255, [1] * 8),
        (178, [0, 1, 0, 0, 1, 1, 0, 1]),
    ],
)
def test_slice_binary_expansion(intensity, expected):
    planes = slice_bit_planes(np.array([[intensity]], dtype=np.uint8))
    assert [int(plane[0, 0]) for plane in planes] == expected


def test_slice_constant_image():
    """Plane j of a constant image c is the constant (c >> j) & 1."""
    for value in [0, 1, 77, 128, 254]:
        planes = slice_bit_planes(np.full((3, 4), value, dtype=np.uint8))
        for bit, plane in enumerate(planes):
            np.testing.assert_array_equal(plane, np.full((3, 4), (value >> bit) & 1))


def test_slice_planes_are_read_only_and_binary():
    image = np.random.default_rng(0).integers(0, 256, size=(6, 6)).astype(np.uint8)
    planes = slice_bit_planes(image)
    assert len(planes) == 8
    assert planes.shape == (6, 6)
    for plane in planes:
        assert not plane.flags.writeable
        assert plane.dtype == np.uint8
        assert set(np.unique(plane)) <= {0, 1}


def test_reconstruct_round_trip_random_images():
    """reconstruct(slice(I)) = I for 1000 random images up to 64x64."""
    rng = np.random.default_rng(2024)
    for _ in range(1000):
        height, width = rng.integers(1, 65, size=2)
        image = rng.integers(0, 256, size=(height, width)).astype(np.uint8)
        np.testing.assert_array_equal(reconstruct(slice_bit_planes(image)), image)


def test_reconstruct_zero_planes():
    planes = BitPlaneSet(tuple(np.zeros((2, 3), dtype=np.uint8) for _ in range(8)))
    np.testing.assert_array_equal(reconstruct(planes), np.zeros((2, 3)))


def test_reconstruct_only_plane_seven():
    zeros = [np.zeros((2, 2), dtype=np.uint8) for _ in range(7)]
    planes = BitPlaneSet(tuple(zeros + [np.ones((2, 2), dtype=np.uint8)]))
    np.testing.assert_array_equal(reconstruct(planes), np.full((2, 2), 128))


def test_bit_plane_set_needs_eight_planes():
    with pytest.raises(BitMrfError, match="exactly 8 planes"):
        BitPlaneSet(tuple(np.zeros((2, 2), dtype=np.uint8) for _ in range(7)))


def test_bit_plane_set_dimension_mismatch():
    planes = [np.zeros((2, 2), dtype=np.uint8) for _ in range(7)] + [np.zeros((2, 3), dtype=np.uint8)]
    with pytest.raises(BitMrfError, match="Dimension mismatch"):
        BitPlaneSet(tuple(planes))


def test_bit_plane_set_rejects_non_binary():
    planes = [np.zeros((2, 2), dtype=np.uint8) for _ in range(7)] + [np.full((2, 2), 3, dtype=np.uint8)]
    with pytest.raises(BitMrfError, match="only contain 0 and 1"):
        BitPlaneSet(tuple(planes))
