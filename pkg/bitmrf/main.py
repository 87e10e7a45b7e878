"""Main module of bitmrf."""

from __future__ import annotations

import logging
import time
from pathlib import Path
from typing import Any

import pandas as pd

from bitmrf import ensemble, harness, imageio, metrics, visualization
from bitmrf.bitplane import slice_bit_planes
from bitmrf.constants import N_LEVELS, Aggregation, Defaults, Headers, Keywords
from bitmrf.exceptions.clean_exceptions import BitMrfError, UsageError
from bitmrf.get_version import get_version
from bitmrf.input_validation import validate_level
from bitmrf.launch_args_parser import get_parser
from bitmrf.logger import handle_error_messages, logger
from bitmrf.mrf import SaSchedule
from bitmrf.read_config import ReadConfigFile
from bitmrf.utils import abort

DEFAULT_SETTINGS: dict[str, Any] = {
    Keywords.BETA: Defaults.BETA,
    Keywords.NEIGHBORHOOD: Defaults.NEIGHBORHOOD,
    Keywords.OPTIMIZER: Defaults.OPTIMIZER,
    Keywords.MAX_SWEEPS: Defaults.MAX_SWEEPS,
    Keywords.SA_T0: Defaults.SA_T0,
    Keywords.SA_COOLING: Defaults.SA_COOLING,
    Keywords.SA_TMIN: Defaults.SA_TMIN,
    Keywords.SEED: Defaults.SEED,
    Keywords.REESTIMATE: False,
    Keywords.LEVEL: Defaults.LEVEL,
    Keywords.LEVELS: tuple(range(N_LEVELS)),
    Keywords.MASK_SUFFIX: Defaults.MASK_SUFFIX,
    Keywords.MASK_THRESHOLD: Defaults.MASK_THRESHOLD,
    Keywords.IMAGE_GLOB: Defaults.IMAGE_GLOB,
    Keywords.THREADS: Defaults.THREADS,
    Keywords.OUT: Defaults.OUT,
    Keywords.DUMP_MEMBERS: False,
    Keywords.PLOT: False,
    Keywords.AGGREGATION: "both",
}


def resolve_settings(options: dict[str, Any]) -> dict[str, Any]:
    """Layer the settings: built-in defaults, then the config file, then the command line options.

    Args:
        options: Parsed command line options; None means not given.

    Returns:
        One value for every keyword.
    """
    settings = dict(DEFAULT_SETTINGS)
    if options.get("config") is not None:
        settings.update(ReadConfigFile(options["config"]).values)
    for key, value in options.items():
        if key in Keywords and value is not None:
            settings[key] = tuple(value) if isinstance(value, list) else value
    return settings


def ensemble_config(settings: dict[str, Any]) -> ensemble.EnsembleConfig:
    """Build the ensemble settings, reporting invalid values as usage errors.

    Raises:
        UsageError: If a model or schedule value is out of range.
    """
    try:
        schedule = SaSchedule(
            t0=settings[Keywords.SA_T0],
            cooling=settings[Keywords.SA_COOLING],
            t_min=settings[Keywords.SA_TMIN],
            seed=settings[Keywords.SEED],
        )
        return ensemble.EnsembleConfig(
            beta=settings[Keywords.BETA],
            neighborhood=settings[Keywords.NEIGHBORHOOD],
            optimizer=settings[Keywords.OPTIMIZER],
            max_sweeps=settings[Keywords.MAX_SWEEPS],
            reestimate=settings[Keywords.REESTIMATE],
            schedule=schedule,
            threads=settings[Keywords.THREADS],
        )
    except UsageError:
        raise
    except BitMrfError as e:
        raise UsageError(str(e)) from e


def run_config(settings: dict[str, Any], dataset_dir: str) -> harness.RunConfig:
    """Build the batch settings; the ensemble runs single-threaded and images are spread over the threads.

    Raises:
        UsageError: If a value is out of range.
    """
    aggregation = str(settings[Keywords.AGGREGATION]).lower()
    modes = (Aggregation.MEAN, Aggregation.POOLED) if aggregation == "both" else (aggregation,)
    try:
        return harness.RunConfig(
            dataset_dir=Path(dataset_dir),
            ensemble=ensemble_config({**settings, Keywords.THREADS: 1}),
            out_dir=Path(settings[Keywords.OUT]),
            levels=settings[Keywords.LEVELS],
            aggregation=modes,
            mask_suffix=settings[Keywords.MASK_SUFFIX],
            mask_threshold=settings[Keywords.MASK_THRESHOLD],
            image_glob=settings[Keywords.IMAGE_GLOB],
            threads=settings[Keywords.THREADS],
            plot=settings[Keywords.PLOT],
        )
    except UsageError:
        raise
    except (BitMrfError, ValueError) as e:
        raise UsageError(str(e)) from e


def _output_dir(settings: dict[str, Any]) -> Path:
    out_dir = Path(settings[Keywords.OUT])
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise BitMrfError(f"Could not create the output directory '{out_dir}': {e}") from e
    return out_dir


def segment(image: str, settings: dict[str, Any]) -> ensemble.EnsembleResult:
    """Segment one image; write the probability map, the mask at the chosen level and optional extras."""
    config = ensemble_config(settings)
    try:
        level = validate_level(settings[Keywords.LEVEL])
    except BitMrfError as e:
        raise UsageError(str(e)) from e
    gray = imageio.load_gray(image)
    out_dir = _output_dir(settings)
    stem = Path(image).stem

    result = ensemble.segment_ensemble(gray, config)
    imageio.save_gray(ensemble.confidence_to_image(result.confidence), out_dir / f"{stem}_probability.png")
    imageio.save_mask(ensemble.threshold_confidence(result.confidence, level), out_dir / f"{stem}_level{level}.png")
    if settings[Keywords.DUMP_MEMBERS]:
        for index, member in enumerate(result.members):
            imageio.save_mask(member, out_dir / f"{stem}_member{index}.png")
    if settings[Keywords.PLOT]:
        visualization.plot_confidence_levels(result.confidence, out_dir / f"{stem}_levels.png")
    logger.info("Segmented '%s' into '%s'.", image, out_dir)
    return result


def slice_image(image: str, settings: dict[str, Any]) -> None:
    """Write the bit planes of an image as plane_<j>.png."""
    gray = imageio.load_gray(image)
    planes = slice_bit_planes(gray)
    out_dir = _output_dir(settings)
    for bit, plane in enumerate(planes):
        imageio.save_mask(plane, out_dir / f"plane_{bit}.png")
    if settings[Keywords.PLOT]:
        visualization.plot_bit_planes(gray, planes, out_dir / "bit_planes.png")


def evaluate(segmentation: str, ground_truth: str, settings: dict[str, Any], out: str | None) -> metrics.MetricReport:
    """Print the metrics of a segmentation as a table and a CSV row; optionally write evaluation.csv."""
    threshold = settings[Keywords.MASK_THRESHOLD]
    report = metrics.evaluate(imageio.load_mask(segmentation, threshold), imageio.load_mask(ground_truth, threshold))
    if report.undefined:
        logger.warning("Undefined metrics (reported as nan): %s.", ", ".join(report.undefined))

    table = pd.DataFrame([report.as_row()], columns=Headers.METRICS)
    print(table.to_string(index=False, float_format=lambda value: f"{value:.6f}"))
    print(table.to_csv(index=False, float_format=harness.FLOAT_FORMAT, na_rep="nan", lineterminator="\n"), end="")
    if out is not None:
        harness.write_csv(table, _output_dir({Keywords.OUT: out}) / "evaluation.csv")
    return report


def batch(dataset_dir: str, settings: dict[str, Any]) -> harness.BatchResult:
    """Evaluate a dataset and report the best confidence level of every aggregated table."""
    result = harness.run_batch(run_config(settings, dataset_dir))
    for name, table in (("mean", result.mean), ("pooled", result.pooled)):
        if table is None:
            continue
        try:
            print(f"Aggregation '{name}': best level {harness.best_level(table)}")
        except BitMrfError as e:
            logger.warning("Aggregation '%s': no best level, %s", name, e)
        print(table.to_string(index=False, float_format=lambda value: f"{value:.4f}"))
    return result


def roc(dataset_dir: str, settings: dict[str, Any], ground_truth: str | None = None) -> harness.RocResult:
    """Write the ROC curves of a dataset and print the pooled AUC.

    With a ground truth, `dataset_dir` is instead a probability map written by segment and only its curve is
    written, to `<stem>_roc.csv`.
    """
    if ground_truth is not None:
        confidence = ensemble.image_to_confidence(imageio.load_gray(dataset_dir))
        gt = imageio.load_mask(ground_truth, settings[Keywords.MASK_THRESHOLD])
        curve = metrics.roc_from_confidence(confidence, gt)
        harness.write_csv(harness.roc_table(curve), _output_dir(settings) / f"{Path(dataset_dir).stem}_roc.csv")
        print(f"AUC: {curve.auc:.6f}")
        return harness.RocResult({Path(dataset_dir).stem: curve}, curve)

    result = harness.emit_roc(run_config(settings, dataset_dir))
    print(f"Pooled AUC: {result.pooled.auc:.6f}")
    return result


def run(command: str, **options: Any) -> Any:
    """Dispatch a subcommand.

    Args:
        command: Name of the subcommand.
        options: Parsed command line options of the subcommand.

    Returns:
        The result of the subcommand.
    """
    settings = resolve_settings(options)
    match command:
        case "segment":
            return segment(options["image"], settings)
        case "slice":
            return slice_image(options["image"], settings)
        case "evaluate":
            return evaluate(options["segmentation"], options["ground_truth"], settings, options.get("out"))
        case "batch":
            return batch(options["dataset_dir"], settings)
        case "roc":
            return roc(options["dataset_dir"], settings, options.get("ground_truth"))
        case "synthetic":
            return harness.make_synthetic_dataset(
                options["out"], options["count"], options["size"], options["seed"], settings[Keywords.MASK_SUFFIX]
            )
    raise UsageError(f"Unknown command '{command}'.")


def main() -> None:
    """Run a bitmrf subcommand from the command line.

    Also set the correct loglevel based on user input. Defaults to WARNING if not set.
    Known errors end the program with exit code 1 (usage) or 2 (data).
    """
    parser = get_parser()
    inputs = parser.parse_args()

    if inputs.loglevel is not None:
        loglevel = inputs.loglevel
    else:
        loglevel = logging.WARNING
    # Loglevel NOTSET (0) gets overwritten by higher up loggers to WARNING, setting loglevel to 1 is a lazy workaround.
    loglevel = 1 if loglevel == 0 else loglevel
    logger.setLevel(loglevel)

    logger.info("Running bitmrf version %s.", get_version())
    start = time.time()
    try:
        handle_error_messages(run)(**vars(inputs))
    except BitMrfError as e:
        raise abort(str(e), e.exit_code) from e
    logger.debug("Total runtime: %.1f s", time.time() - start)


if __name__ == "__main__":
    main()
