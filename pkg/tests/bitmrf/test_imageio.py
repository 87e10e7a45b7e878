"""Test functions for reading and writing images, masks and datasets."""

from pathlib import Path

import numpy as np
import pytest
from PIL import Image
from utils_for_tests import read_png, write_png

from bitmrf import imageio
from bitmrf.exceptions.clean_exceptions import BitMrfError, UsageError


def test_load_gray_is_identity_on_grayscale(tmp_path):
    """Test that an 8-bit grayscale PNG is loaded byte for byte."""
    data = np.array([[0, 128], [255, 5]], dtype=np.uint8)
    path = write_png(data, tmp_path / "gray.png")
    image = imageio.load_gray(path)
    np.testing.assert_array_equal(image, data)
    assert image.dtype == np.uint8
    assert not image.flags.writeable


@pytest.mark.parametrize(
    "rgb, expected",
    [
        ((255, 255, 255), 255),
        ((0, 0, 0), 0),
        # 0.299 * 100 + 0.587 * 200 + 0.114 * 50 = 153.0
        ((100, 200, 50), 153),
        ((255, 0, 0), 76),
        ((0, 255, 0), 150),
        ((0, 0, 255), 29),
    ],
)
def test_load_gray_converts_rgb_with_luma(tmp_path, rgb, expected):
    """Test the integer luma conversion, rounded half up."""
    data = np.array([[rgb]], dtype=np.uint8)
    path = write_png(data, tmp_path / "rgb.png", mode="RGB")
    assert imageio.load_gray(path)[0, 0] == expected


def test_load_gray_ignores_alpha(tmp_path):
    data = np.array([[[100, 200, 50, 0], [255, 255, 255, 255]]], dtype=np.uint8)
    path = write_png(data, tmp_path / "rgba.png", mode="RGBA")
    np.testing.assert_array_equal(imageio.load_gray(path), [[153, 255]])


def test_load_gray_reads_pgm(tmp_path):
    data = np.arange(12, dtype=np.uint8).reshape(3, 4) * 20
    path = tmp_path / "image.pgm"
    Image.fromarray(data, mode="L").save(path)
    np.testing.assert_array_equal(imageio.load_gray(path), data)


def test_load_gray_missing_file(tmp_path):
    with pytest.raises(BitMrfError, match="Could not find the file"):
        imageio.load_gray(tmp_path / "missing.png")


def test_load_gray_decode_failure(tmp_path):
    path = tmp_path / "broken.png"
    path.write_bytes(b"this is not a png")
    with pytest.raises(BitMrfError, match="Could not decode"):
        imageio.load_gray(path)


def test_load_gray_rejects_16_bit(tmp_path):
    path = tmp_path / "deep.png"
    Image.fromarray(np.full((2, 2), 40000, dtype=np.uint16)).save(path)
    with pytest.raises(BitMrfError, match="only 8-bit images"):
        imageio.load_gray(path)


def test_to_gray_rejects_zero_size():
    with pytest.raises(BitMrfError, match="zero size"):
        imageio.to_gray(Image.new("L", (0, 3)))


@pytest.mark.parametrize("pixel, threshold, expected", [(0, 1, 0), (1, 1, 1), (7, 1, 1), (99, 100, 0), (100, 100, 1)])
def test_load_mask_threshold(tmp_path, pixel, threshold, expected):
    path = write_png(np.array([[pixel]], dtype=np.uint8), tmp_path / "mask.png")
    assert imageio.load_mask(path, threshold)[0, 0] == expected


def test_load_mask_is_binary_for_random_images(tmp_path):
    rng = np.random.default_rng(3)
    for index in range(10):
        data = rng.integers(0, 256, size=(9, 7)).astype(np.uint8)
        mask = imageio.load_mask(write_png(data, tmp_path / f"random_{index}.png"), int(rng.integers(1, 256)))
        assert set(np.unique(mask)) <= {0, 1}


@pytest.mark.parametrize("threshold", [0, 256, -3])
def test_load_mask_invalid_threshold(tmp_path, threshold):
    path = write_png(np.zeros((2, 2), dtype=np.uint8), tmp_path / "mask.png")
    with pytest.raises(BitMrfError, match="Mask threshold"):
        imageio.load_mask(path, threshold)


@pytest.mark.parametrize("value, byte", [(1, 255), (0, 0)])
def test_save_mask_writes_0_and_255(tmp_path, value, byte):
    path = tmp_path / "one.png"
    imageio.save_mask(np.array([[value]], dtype=np.uint8), path)
    assert read_png(path)[0, 0] == byte


def test_save_mask_round_trip(tmp_path):
    mask = (np.random.default_rng(0).random((13, 17)) > 0.5).astype(np.uint8)
    path = tmp_path / "mask.png"
    imageio.save_mask(mask, path)
    np.testing.assert_array_equal(imageio.load_mask(path, 1), mask)


def test_save_gray_round_trip(tmp_path):
    image = np.random.default_rng(1).integers(0, 256, size=(8, 5)).astype(np.uint8)
    path = tmp_path / "image.png"
    imageio.save_gray(image, path)
    np.testing.assert_array_equal(imageio.load_gray(path), image)


def test_save_mask_rejects_non_binary(tmp_path):
    with pytest.raises(BitMrfError, match="only contain 0 and 1"):
        imageio.save_mask(np.array([[0, 2]], dtype=np.uint8), tmp_path / "bad.png")


def test_save_mask_unwritable(tmp_path):
    with pytest.raises(BitMrfError, match="Could not write"):
        imageio.save_mask(np.ones((2, 2), dtype=np.uint8), tmp_path / "missing_dir" / "mask.png")


def test_list_dataset_pairs_images_and_masks(tmp_path):
    """Test pairing by name, name ordering and images without a mask."""
    blank = np.zeros((2, 2), dtype=np.uint8)
    for name in ["dna-1.png", "dna-0.png", "dna-0_mask.png", "dna-1_mask.png", "lonely.png", "notes.txt"]:
        if name.endswith(".png"):
            write_png(blank, tmp_path / name)
        else:
            (tmp_path / name).write_text("not an image")

    pairs = imageio.list_dataset(tmp_path)
    assert pairs == [
        (tmp_path / "dna-0.png", tmp_path / "dna-0_mask.png"),
        (tmp_path / "dna-1.png", tmp_path / "dna-1_mask.png"),
        (tmp_path / "lonely.png", None),
    ]
    assert imageio.list_dataset(tmp_path) == pairs


def test_list_dataset_custom_suffix(tmp_path):
    blank = np.zeros((2, 2), dtype=np.uint8)
    write_png(blank, tmp_path / "a.png")
    write_png(blank, tmp_path / "a-gt.png")
    assert imageio.list_dataset(tmp_path, mask_suffix="-gt") == [(tmp_path / "a.png", tmp_path / "a-gt.png")]


def test_list_dataset_empty_directory(tmp_path):
    assert imageio.list_dataset(tmp_path) == []


def test_list_dataset_missing_directory(tmp_path):
    with pytest.raises(BitMrfError, match="Could not find the dataset directory"):
        imageio.list_dataset(Path(tmp_path) / "nowhere")


def test_list_dataset_rejects_empty_suffix(tmp_path):
    """With an empty suffix every image would be paired with itself as ground truth."""
    write_png(np.zeros((2, 2), dtype=np.uint8), tmp_path / "a.png")
    with pytest.raises(UsageError, match="mask suffix must not be empty"):
        imageio.list_dataset(tmp_path, "*.png", "")
