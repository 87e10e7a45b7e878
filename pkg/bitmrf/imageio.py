"""Reading and writing of grayscale images, binary masks and dataset directories."""

from __future__ import annotations

from pathlib import Path

import numpy as np
from PIL import Image, UnidentifiedImageError

from bitmrf.constants import BinaryMask, Defaults, GrayImage
from bitmrf.exceptions.clean_exceptions import BitMrfError
from bitmrf.input_validation import validate_binary, validate_gray_image, validate_mask_suffix, validate_mask_threshold
from bitmrf.logger import logger
from bitmrf.utils import read_only

_LUMA_WEIGHTS = np.array([299, 587, 114], dtype=np.int64)
_UNSUPPORTED_MODES = {"I", "I;16", "I;16B", "I;16L", "I;16N", "F"}


def _open_image(path: str | Path) -> Image.Image:
    """Open and fully decode an image file.

    Raises:
        BitMrfError: If the file does not exist or cannot be decoded.
    """
    path = Path(path)
    if not path.is_file():
        raise BitMrfError(f"Could not find the file: '{path}'!")
    try:
        with Image.open(path) as image:
            image.load()
            return image.copy()
    except (UnidentifiedImageError, OSError, SyntaxError, ValueError) as e:
        raise BitMrfError(f"Could not decode '{path}' as an image: {e}") from e


def to_gray(image: Image.Image, source: str | Path = "<image>") -> GrayImage:
    """Convert a decoded image to 8-bit intensities.

    Multi-channel images are converted with integer luma weights 0.299 R + 0.587 G + 0.114 B,
    rounded half up. The alpha channel is ignored.

    Args:
        image: Decoded image.
        source: Name used in error messages.

    Returns:
        Intensities, shape (height, width).

    Raises:
        BitMrfError: On 16-bit or floating point images, or a zero-sized image.
    """
    if image.width == 0 or image.height == 0:
        raise BitMrfError(f"The image '{source}' has zero size.")
    if image.mode in _UNSUPPORTED_MODES:
        raise BitMrfError(f"The image '{source}' has mode '{image.mode}', only 8-bit images are supported.")

    if image.mode == "L":
        data = np.asarray(image, dtype=np.uint8)
    elif image.mode == "LA":
        data = np.asarray(image, dtype=np.uint8)[:, :, 0]
    elif image.mode == "1":
        data = np.asarray(image.convert("L"), dtype=np.uint8)
    else:
        rgb = np.asarray(image.convert("RGB"), dtype=np.int64)
        data = ((rgb @ _LUMA_WEIGHTS + 500) // 1000).astype(np.uint8)
    return np.ascontiguousarray(data, dtype=np.uint8)


def load_gray(path: str | Path) -> GrayImage:
    """Load an 8-bit grayscale image from a PNG or PGM file.

    Args:
        path: Image file.

    Returns:
        Read-only intensities, shape (height, width).

    Raises:
        BitMrfError: If the file is missing, cannot be decoded or has zero size.
    """
    data = to_gray(_open_image(path), path)
    logger.debug("Loaded '%s' with shape %s.", path, data.shape)
    return read_only(data)


def load_mask(path: str | Path, threshold: int = Defaults.MASK_THRESHOLD) -> BinaryMask:
    """Load a ground truth mask; a pixel is foreground when its intensity is at least the threshold.

    The default threshold of 1 makes every non-zero pixel foreground, which suits ground truth images
    storing one label value per cell.

    Args:
        path: Mask file.
        threshold: Intensity in [1, 255].

    Returns:
        Read-only binary mask.
    """
    validate_mask_threshold(threshold)
    data = load_gray(path)
    return read_only((data >= threshold).astype(np.uint8))


def save_gray(image: GrayImage, path: str | Path) -> None:
    """Write intensities as an 8-bit grayscale PNG.

    Args:
        image: Intensities, shape (height, width).
        path: Output file, its parent directory must exist.

    Raises:
        BitMrfError: If the file cannot be written.
    """
    validate_gray_image(image)
    path = Path(path)
    try:
        Image.fromarray(np.ascontiguousarray(image, dtype=np.uint8), mode="L").save(path, format="PNG")
    except OSError as e:
        raise BitMrfError(f"Could not write '{path}': {e}") from e


def save_mask(mask: BinaryMask, path: str | Path) -> None:
    """Write a binary mask as an 8-bit PNG, 0 as black and 1 as white (255).

    Args:
        mask: Binary mask.
        path: Output file, its parent directory must exist.
    """
    validate_binary(mask, "mask")
    save_gray((np.asarray(mask, dtype=np.uint8) * 255).astype(np.uint8), path)


def list_dataset(
    directory: str | Path, image_glob: str = Defaults.IMAGE_GLOB, mask_suffix: str = Defaults.MASK_SUFFIX
) -> list[tuple[Path, Path | None]]:
    """Enumerate the images of a dataset directory with their ground truth masks.

    The mask of image `<stem>.png` is `<stem><mask_suffix>.png` in the same directory.
    Files whose stem ends with the mask suffix are masks, not images.

    Args:
        directory: Dataset directory.
        image_glob: Pattern matching the image files.
        mask_suffix: Suffix appended to an image stem to name its mask.

    Returns:
        Pairs of (image path, mask path or None), sorted by image file name.

    Raises:
        BitMrfError: If the directory does not exist.
        UsageError: If the mask suffix is empty.
    """
    validate_mask_suffix(mask_suffix)
    directory = Path(directory)
    if not directory.is_dir():
        raise BitMrfError(f"Could not find the dataset directory: '{directory}'!")

    pairs: list[tuple[Path, Path | None]] = []
    for image_path in sorted(directory.glob(image_glob), key=lambda p: p.name):
        if not image_path.is_file() or image_path.stem.endswith(mask_suffix):
            continue
        mask_path = directory / f"{image_path.stem}{mask_suffix}.png"
        pairs.append((image_path, mask_path if mask_path.is_file() else None))
    return pairs
