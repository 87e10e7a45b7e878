"""Batch evaluation of the ensemble over a dataset directory: metric tables, ROC data and a synthetic dataset."""

from __future__ import annotations

from collections.abc import Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from functools import reduce
from pathlib import Path

import numpy as np
import pandas as pd
from tqdm import tqdm

from bitmrf import imageio, visualization
from bitmrf.constants import N_LEVELS, Aggregation, BinaryMask, ConfidenceMap, Defaults, GrayImage, Headers
from bitmrf.ensemble import EnsembleConfig, segment_ensemble
from bitmrf.exceptions.clean_exceptions import BitMrfError
from bitmrf.input_validation import check_same_shape, parse_aggregation, validate_levels, validate_mask_suffix
from bitmrf.input_validation import validate_mask_threshold
from bitmrf.logger import logger
from bitmrf.metrics import ConfusionCounts, MetricReport, RocCurve, confusion_per_level, report_from_counts
from bitmrf.metrics import roc_from_counts

FLOAT_FORMAT = "%.6f"
POOLED = "pooled"


@dataclass(frozen=True)
class RunConfig:
    """Settings of a batch run.

    Attributes:
        dataset_dir: Directory holding the images and their masks.
        ensemble: Settings of the segmentation ensemble.
        out_dir: Directory receiving the CSV files; created if missing.
        levels: Confidence levels reported in the tables.
        aggregation: Which aggregated tables to write.
        mask_suffix: Suffix naming the mask of an image.
        mask_threshold: Mask intensity from which a pixel is foreground.
        image_glob: Pattern matching the image files.
        threads: Number of images segmented concurrently.
        plot: Also draw the ROC figure.
    """

    dataset_dir: Path
    ensemble: EnsembleConfig = field(default_factory=EnsembleConfig)
    out_dir: Path = Path(Defaults.OUT)
    levels: tuple[int, ...] = tuple(range(N_LEVELS))
    aggregation: tuple[Aggregation, ...] = (Aggregation.MEAN, Aggregation.POOLED)
    mask_suffix: str = Defaults.MASK_SUFFIX
    mask_threshold: int = Defaults.MASK_THRESHOLD
    image_glob: str = Defaults.IMAGE_GLOB
    threads: int = Defaults.THREADS
    plot: bool = False

    def __post_init__(self):
        object.__setattr__(self, "dataset_dir", Path(self.dataset_dir))
        object.__setattr__(self, "out_dir", Path(self.out_dir))
        object.__setattr__(self, "levels", validate_levels(self.levels))
        object.__setattr__(self, "aggregation", tuple(parse_aggregation(mode) for mode in self.aggregation))
        validate_mask_threshold(self.mask_threshold)
        validate_mask_suffix(self.mask_suffix)
        if self.threads < 1:
            raise BitMrfError(f"threads must be at least 1, got {self.threads}.")


@dataclass(frozen=True)
class ImageResult:
    """Evaluation of one dataset image.

    Attributes:
        name: Image file stem.
        confidence: Confidence map of the ensemble.
        counts: Confusion counts of every confidence level, level 0 first.
        reports: Metric reports of every confidence level, level 0 first.
        roc: ROC curve of the image.
    """

    name: str
    confidence: ConfidenceMap
    counts: tuple[ConfusionCounts, ...]
    reports: tuple[MetricReport, ...]
    roc: RocCurve


@dataclass(frozen=True)
class AggregateRow:
    """Aggregated metrics of one confidence level.

    Attributes:
        level: Confidence level, 0..7.
        values: Metric values keyed by column name, in table order.
        n_images: Number of images aggregated, always positive.
    """

    level: int
    values: dict[str, float]
    n_images: int

    def __post_init__(self):
        if self.n_images < 1:
            raise BitMrfError(f"An aggregate row needs at least one image, got {self.n_images}.")


def _rows(table: pd.DataFrame | None) -> list[AggregateRow]:
    if table is None:
        return []
    return [
        AggregateRow(
            level=int(record[Headers.LEVEL]),
            values={metric: float(record[metric]) for metric in Headers.METRICS},
            n_images=int(record[Headers.N_IMAGES]),
        )
        for record in table.to_dict("records")
    ]


@dataclass(frozen=True)
class BatchResult:
    """Tables of a batch run; an aggregation that was not requested is None."""

    per_image: pd.DataFrame
    mean: pd.DataFrame | None
    pooled: pd.DataFrame | None

    @property
    def mean_rows(self) -> list[AggregateRow]:
        return _rows(self.mean)

    @property
    def pooled_rows(self) -> list[AggregateRow]:
        return _rows(self.pooled)


@dataclass(frozen=True)
class RocResult:
    """ROC curves of every image and the curve of the pooled confusion counts."""

    per_image: dict[str, RocCurve]
    pooled: RocCurve


def process_image(image_path: str | Path, mask_path: str | Path, config: RunConfig) -> ImageResult:
    """Segment one image with the ensemble and evaluate every confidence level against its mask.

    Raises:
        BitMrfError: If the files cannot be read or their dimensions differ.
    """
    image = imageio.load_gray(image_path)
    gt = imageio.load_mask(mask_path, config.mask_threshold)
    check_same_shape(image, gt, f"'{image_path}' and its mask")
    confidence = segment_ensemble(image, config.ensemble).confidence
    counts = tuple(confusion_per_level(confidence, gt))
    return ImageResult(
        name=Path(image_path).stem,
        confidence=confidence,
        counts=counts,
        reports=tuple(report_from_counts(c) for c in counts),
        roc=roc_from_counts(counts),
    )


def paired_images(config: RunConfig) -> list[tuple[Path, Path]]:
    """Images of the dataset that have a mask; unpaired images are skipped with a warning.

    Raises:
        BitMrfError: If no image has a mask.
    """
    pairs = []
    for image_path, mask_path in imageio.list_dataset(config.dataset_dir, config.image_glob, config.mask_suffix):
        if mask_path is None:
            logger.warning("Skipping '%s': no mask named '%s%s.png'.", image_path, image_path.stem, config.mask_suffix)
            continue
        pairs.append((image_path, mask_path))
    if not pairs:
        raise BitMrfError(f"The dataset '{config.dataset_dir}' holds no image with a mask.")
    return pairs


def process_dataset(config: RunConfig) -> list[ImageResult]:
    """Process every paired image of the dataset; results are in dataset order."""
    pairs = paired_images(config)
    logger.info("Processing %d images from '%s'.", len(pairs), config.dataset_dir)
    if config.threads > 1:
        # Members of one image run sequentially when images run in parallel.
        config = replace(config, ensemble=replace(config.ensemble, threads=1))
        with ThreadPoolExecutor(max_workers=config.threads) as executor:
            jobs = executor.map(lambda pair: process_image(*pair, config), pairs)
            return list(tqdm(jobs, total=len(pairs)))
    return [process_image(image_path, mask_path, config) for image_path, mask_path in tqdm(pairs)]


def _prepare_out_dir(out_dir: Path) -> Path:
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise BitMrfError(f"Could not create the output directory '{out_dir}': {e}") from e
    return out_dir


def write_csv(table: pd.DataFrame, path: Path) -> Path:
    """Write a table with fixed float formatting.

    Raises:
        BitMrfError: If the file cannot be written.
    """
    try:
        table.to_csv(path, index=False, float_format=FLOAT_FORMAT, na_rep="nan", lineterminator="\n")
    except OSError as e:
        raise BitMrfError(f"Could not write '{path}': {e}") from e
    return path


def write_table(table: pd.DataFrame, path: Path) -> pd.DataFrame:
    write_csv(table, path)
    return table


def per_image_table(results: Sequence[ImageResult], levels: Sequence[int]) -> pd.DataFrame:
    """One row per image and level with all metrics."""
    rows = [
        {Headers.IMAGE: result.name, Headers.LEVEL: level, **result.reports[level].as_row()}
        for result in results
        for level in levels
    ]
    return pd.DataFrame(rows, columns=[Headers.IMAGE, Headers.LEVEL] + Headers.METRICS)


def mean_table(per_image: pd.DataFrame) -> pd.DataFrame:
    """Average the per-image metrics of every level, ignoring undefined values."""
    table = per_image.groupby(Headers.LEVEL, sort=True)[Headers.METRICS].mean().reset_index()
    table[Headers.N_IMAGES] = per_image.groupby(Headers.LEVEL, sort=True)[Headers.IMAGE].count().to_numpy()
    return table[[Headers.LEVEL] + Headers.METRICS + [Headers.N_IMAGES]]


def pooled_table(results: Sequence[ImageResult], levels: Sequence[int]) -> pd.DataFrame:
    """Metrics of the confusion counts summed over all images, for every level."""
    rows = []
    for level in levels:
        counts = reduce(lambda a, b: a + b, (result.counts[level] for result in results))
        rows.append({Headers.LEVEL: level, **report_from_counts(counts).as_row(), Headers.N_IMAGES: len(results)})
    return pd.DataFrame(rows, columns=[Headers.LEVEL] + Headers.METRICS + [Headers.N_IMAGES])


def run_batch(config: RunConfig, results: Sequence[ImageResult] | None = None) -> BatchResult:
    """Evaluate the ensemble on a dataset and write the metric tables.

    Writes `per_image_metrics.csv` and, depending on the aggregation, `table_mean.csv` with the
    average of the per-image metrics and `table_pooled.csv` with the metrics of the summed counts.

    Args:
        config: Batch settings.
        results: Already processed images, to avoid segmenting the dataset twice.

    Returns:
        The written tables.

    Raises:
        BitMrfError: If the dataset is empty or the output cannot be written.
    """
    results = process_dataset(config) if results is None else results
    out_dir = _prepare_out_dir(config.out_dir)

    per_image = per_image_table(results, config.levels)
    write_csv(per_image, out_dir / "per_image_metrics.csv")
    mean = pooled = None
    if Aggregation.MEAN in config.aggregation:
        mean = write_table(mean_table(per_image), out_dir / "table_mean.csv")
    if Aggregation.POOLED in config.aggregation:
        pooled = write_table(pooled_table(results, config.levels), out_dir / "table_pooled.csv")
    logger.info("Wrote the metric tables of %d images to '%s'.", len(results), out_dir)
    return BatchResult(per_image, mean, pooled)


def roc_table(curve: RocCurve) -> pd.DataFrame:
    """Columns level, fpr and tpr of the level points of a curve."""
    fpr, tpr = zip(*curve.level_points)
    return pd.DataFrame({Headers.LEVEL: range(N_LEVELS), Headers.FPR: fpr, Headers.TPR: tpr})


def emit_roc(config: RunConfig, results: Sequence[ImageResult] | None = None) -> RocResult:
    """Write the ROC curve of every image and of the pooled confusion counts.

    Writes `roc_<image>.csv` per image and `roc_pooled.csv` (level, fpr, tpr), `auc.csv` (image, auc with
    a last row for the pooled curve) and, if plotting, `roc.png`.

    Args:
        config: Batch settings.
        results: Already processed images, to avoid segmenting the dataset twice.

    Returns:
        All curves.
    """
    results = process_dataset(config) if results is None else results
    out_dir = _prepare_out_dir(config.out_dir)

    pooled_counts = [reduce(lambda a, b: a + b, (r.counts[level] for r in results)) for level in range(N_LEVELS)]
    pooled = roc_from_counts(pooled_counts)
    curves = {result.name: result.roc for result in results}

    for name, curve in curves.items():
        write_csv(roc_table(curve), out_dir / f"roc_{name}.csv")
    write_csv(roc_table(pooled), out_dir / "roc_pooled.csv")
    auc = pd.DataFrame(
        {Headers.IMAGE: list(curves) + [POOLED], Headers.AUC: [c.auc for c in curves.values()] + [pooled.auc]}
    )
    write_csv(auc, out_dir / "auc.csv")
    if config.plot:
        visualization.plot_roc({**curves, POOLED: pooled}, out_dir / "roc.png")
    logger.info("Pooled AUC over %d images: %.4f.", len(results), pooled.auc)
    return RocResult(curves, pooled)


def best_level(table: pd.DataFrame, metric: str = Headers.FSCORE, maximize: bool = True) -> int:
    """Confidence level with the best value of a metric; the lowest such level on ties.

    Raises:
        BitMrfError: If the metric is undefined at every level.
    """
    values = table[metric]
    if values.isna().all():
        raise BitMrfError(f"{metric} is undefined at every level.")
    index = values.idxmax() if maximize else values.idxmin()
    return int(table.loc[index, Headers.LEVEL])


def synthetic_disk_image(
    size: int, rng: np.random.Generator, disks: tuple[int, int] = (3, 6), radius: tuple[int, int] = (15, 35)
) -> tuple[GrayImage, BinaryMask]:
    """Bright disks (uniform 185..215) on a dark background (uniform 5..35) with their ground truth.

    Args:
        size: Height and width in pixels.
        rng: Random generator.
        disks: Inclusive range of the number of disks.
        radius: Inclusive range of the disk radii, clipped to the image.

    Returns:
        The image and the disk mask.
    """
    rows, cols = np.indices((size, size))
    mask = np.zeros((size, size), dtype=bool)
    for _ in range(rng.integers(disks[0], disks[1] + 1)):
        r = int(rng.integers(min(radius[0], size // 4), min(radius[1], size // 2) + 1))
        center_row, center_col = rng.integers(r, max(r + 1, size - r), size=2)
        mask |= (rows - center_row) ** 2 + (cols - center_col) ** 2 <= r**2
    foreground = rng.integers(185, 216, size=(size, size))
    background = rng.integers(5, 36, size=(size, size))
    image = np.where(mask, foreground, background).astype(np.uint8)
    return image, mask.astype(np.uint8)


def make_synthetic_dataset(
    out_dir: str | Path, count: int = 10, size: int = 256, seed: int = 0, mask_suffix: str = Defaults.MASK_SUFFIX
) -> list[tuple[Path, Path]]:
    """Write a dataset of synthetic disk images `disks_<i>.png` with masks `disks_<i><mask_suffix>.png`.

    Raises:
        BitMrfError: On invalid sizes or an unwritable directory.
        UsageError: If the mask suffix is empty.
    """
    validate_mask_suffix(mask_suffix)
    if count < 1 or size < 8:
        raise BitMrfError(f"A synthetic dataset needs at least one image of at least 8x8 pixels, got {count}x{size}.")
    out_dir = _prepare_out_dir(Path(out_dir))
    rng = np.random.default_rng(seed)
    pairs = []
    for index in range(count):
        image, mask = synthetic_disk_image(size, rng)
        image_path = out_dir / f"disks_{index:03d}.png"
        mask_path = out_dir / f"disks_{index:03d}{mask_suffix}.png"
        imageio.save_gray(image, image_path)
        imageio.save_mask(mask, mask_path)
        pairs.append((image_path, mask_path))
    logger.info("Wrote %d synthetic images to '%s'.", count, out_dir)
    return pairs
