"""Parser for launch arguments."""

from __future__ import annotations

import argparse
import sys

from bitmrf.get_version import get_version

BITMRF_DESCRIPTION = """bitmrf segments fluorescence microscopy cell images without supervision.
The eight bit planes of a grayscale image start eight Markov Random Field optimizations (ICM or
simulated annealing) whose results are combined by pixelwise voting into a confidence map.
The batch and roc commands evaluate the method on a dataset of images with ground truth masks.
"""


class ArgumentParser(argparse.ArgumentParser):
    """Argument parser exiting with code 1 on usage errors, code 2 is reserved for data errors."""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _common_options() -> ArgumentParser:
    common = ArgumentParser(add_help=False)
    common.add_argument(
        "-l", "--loglevel", action="store", type=int, help="(Optional) log-level. Lower values gives more info (0-50)."
    )
    common.add_argument(
        "--config", type=str, help="(Optional) key = value file overriding the defaults, flags override the file."
    )
    return common


def _model_options() -> ArgumentParser:
    model = ArgumentParser(add_help=False)
    model.add_argument("--beta", type=float, help="(Optional) doubleton coupling strength in (0, 10]. Default 1.0.")
    model.add_argument("--neighborhood", type=int, choices=[4, 8], help="(Optional) 4 or 8 connectivity. Default 4.")
    model.add_argument("--optimizer", type=str, choices=["icm", "sa"], help="(Optional) icm or sa. Default icm.")
    model.add_argument("--max-sweeps", type=int, help="(Optional) sweep limit of ICM. Default 20.")
    model.add_argument("--sa-t0", type=float, help="(Optional) initial annealing temperature. Default 4.0.")
    model.add_argument("--sa-cooling", type=float, help="(Optional) geometric cooling factor. Default 0.95.")
    model.add_argument("--sa-tmin", type=float, help="(Optional) final annealing temperature. Default 0.05.")
    model.add_argument("--seed", type=int, help="(Optional) seed of the annealing; member j uses seed + j.")
    model.add_argument(
        "--reestimate",
        action=argparse.BooleanOptionalAction,
        default=None,
        help="(Optional) refresh the class parameters after every sweep. Default off.",
    )
    model.add_argument("--threads", type=int, help="(Optional) number of worker threads. Default 1.")
    return model


def _dataset_options() -> ArgumentParser:
    dataset = ArgumentParser(add_help=False)
    dataset.add_argument("dataset_dir", type=str, help="Directory of images and their ground truth masks.")
    dataset.add_argument("-o", "--out", type=str, help="(Optional) output directory. Default the current directory.")
    dataset.add_argument("--levels", type=int, nargs="+", help="(Optional) confidence levels to report. Default 0-7.")
    dataset.add_argument(
        "--mask-suffix",
        type=str,
        help="(Optional) mask of <stem>.png is <stem><suffix>.png. Default _mask. Write --mask-suffix=-gt for a suffix "
        "starting with -.",
    )
    dataset.add_argument("--mask-threshold", type=int, help="(Optional) mask foreground from this intensity.")
    dataset.add_argument("--image-glob", type=str, help="(Optional) pattern of the image files. Default *.png.")
    dataset.add_argument(
        "--plot", action="store_true", default=None, help="(Optional) draw the ROC curves to roc.png."
    )
    return dataset


def get_parser() -> ArgumentParser:
    """Parse user input from the command line.

    Returns:
        The parser with one subcommand per workflow.
    """
    common, model, dataset = _common_options(), _model_options(), _dataset_options()
    parser = ArgumentParser(description=BITMRF_DESCRIPTION)
    parser.add_argument("-v", "--version", action="version", version=f"bitmrf version {get_version()}!")
    commands = parser.add_subparsers(dest="command", required=True, metavar="command")

    segment = commands.add_parser(
        "segment", parents=[common, model], help="Segment one image and write its probability map and mask."
    )
    segment.add_argument("image", type=str, help="8-bit grayscale PNG or PGM image.")
    segment.add_argument("-o", "--out", type=str, help="(Optional) output directory. Default the current directory.")
    segment.add_argument("--level", type=int, help="(Optional) confidence level of the mask, 0-7. Default 3.")
    segment.add_argument(
        "--dump-members", action="store_true", default=None, help="(Optional) write the eight member labellings."
    )
    segment.add_argument("--plot", action="store_true", default=None, help="(Optional) draw all confidence levels.")

    slice_ = commands.add_parser("slice", parents=[common], help="Write the eight bit planes of an image.")
    slice_.add_argument("image", type=str, help="8-bit grayscale PNG or PGM image.")
    slice_.add_argument("-o", "--out", type=str, help="(Optional) output directory. Default the current directory.")
    slice_.add_argument("--plot", action="store_true", default=None, help="(Optional) draw a panel of all planes.")

    evaluate = commands.add_parser(
        "evaluate", parents=[common], help="Compare a segmentation mask with its ground truth."
    )
    evaluate.add_argument("segmentation", type=str, help="Segmentation mask.")
    evaluate.add_argument("ground_truth", type=str, help="Ground truth mask.")
    evaluate.add_argument("-o", "--out", type=str, help="(Optional) directory receiving evaluation.csv.")
    evaluate.add_argument("--mask-threshold", type=int, help="(Optional) mask foreground from this intensity.")

    batch = commands.add_parser(
        "batch", parents=[common, model, dataset], help="Evaluate every confidence level on a dataset."
    )
    batch.add_argument(
        "--aggregation",
        type=str,
        choices=["mean", "pooled", "both"],
        help="(Optional) tables to write: mean of the image metrics, metrics of pooled counts or both. Default both.",
    )
    roc = commands.add_parser("roc", parents=[common, model, dataset], help="Write ROC curves and AUC of a dataset.")
    roc.add_argument(
        "--ground-truth",
        type=str,
        help="(Optional) ground truth mask; dataset_dir is then a probability map written by segment.",
    )

    synthetic = commands.add_parser(
        "synthetic", parents=[common], help="Generate a dataset of bright disks on a dark background."
    )
    synthetic.add_argument("out", type=str, help="Output directory.")
    synthetic.add_argument("--count", type=int, default=10, help="(Optional) number of images. Default 10.")
    synthetic.add_argument("--size", type=int, default=256, help="(Optional) image height and width. Default 256.")
    synthetic.add_argument("--seed", type=int, default=0, help="(Optional) random seed. Default 0.")
    synthetic.add_argument(
        "--mask-suffix", type=str, help="(Optional) suffix of the mask files. Default _mask. Use --mask-suffix=<value>."
    )

    return parser
