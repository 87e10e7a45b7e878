"""Figures: ROC curves, bit plane panels and confidence level panels."""

from __future__ import annotations

from pathlib import Path

import matplotlib.pyplot as plt  # type: ignore
from matplotlib import rcParams
from matplotlib.axes import Axes  # type: ignore
from matplotlib.figure import Figure  # type: ignore

from bitmrf.bitplane import BitPlaneSet
from bitmrf.constants import N_LEVELS, ConfidenceMap, GrayImage
from bitmrf.ensemble import confidence_to_image, threshold_all
from bitmrf.exceptions.clean_exceptions import BitMrfError
from bitmrf.metrics import RocCurve


def update_fonts(family: str = "DejaVu Serif", size: float = 12) -> None:
    """Update the font and size in the plot.

    Args:
        family: Font family name.
        size: Font sizes.
    """
    rcParams["font.family"] = family
    rcParams["font.size"] = size


def format_axis(subplot: Axes, title: str, xlabel: str, ylabel: str) -> Axes:
    """Put labels, inward ticks on all sides and a faint grid on a curve subplot.

    Returns:
        The formatted subplot.
    """
    subplot.set_xlabel(xlabel)
    subplot.set_ylabel(ylabel)
    subplot.minorticks_on()
    subplot.tick_params(axis="both", which="major", direction="in", length=6, width=1.0)
    subplot.tick_params(axis="both", which="minor", direction="in", length=3, width=1.0)
    subplot.yaxis.set_ticks_position("both")
    subplot.xaxis.set_ticks_position("both")
    subplot.grid(which="both", linestyle="-", linewidth=0.1, color="grey", alpha=0.1)
    subplot.set_title(title)
    return subplot


def format_image_axis(subplot: Axes, title: str) -> Axes:
    """Hide the ticks of an image subplot and set its title."""
    subplot.set_xticks([])
    subplot.set_yticks([])
    subplot.set_title(title)
    return subplot


def create_figure(figsize: tuple[float, float] | None = (12, 12)) -> Figure:
    """Create a matplotlib figure.

    Args:
        figsize: (Width, height) in inches, the matplotlib default if None.

    Returns:
        Matplotlib figure.
    """
    if figsize is None:
        return plt.figure()
    return plt.figure(figsize=figsize)


def save_figure(figure: Figure, path: str | Path) -> Path:
    """Write a figure to disk and close it.

    Raises:
        BitMrfError: If the file cannot be written.
    """
    path = Path(path)
    try:
        figure.savefig(path, bbox_inches="tight")
    except OSError as e:
        raise BitMrfError(f"Could not write the figure '{path}': {e}") from e
    finally:
        plt.close(figure)
    return path


def plot_roc(curves: dict[str, RocCurve], path: str | Path) -> Path:
    """Plot ROC curves with their AUC in the legend, plus the chance diagonal.

    Args:
        curves: Curves keyed by label, e.g. image names and 'pooled'.
        path: Output image file.

    Returns:
        The written file.
    """
    update_fonts()
    figure = create_figure((7, 7))
    subplot = figure.add_subplot(1, 1, 1)
    subplot.plot([0.0, 1.0], [0.0, 1.0], color="grey", linestyle=":", linewidth=1.0)
    for label, curve in curves.items():
        if not curve.defined:
            continue
        fpr, tpr = zip(*curve.points)
        # Thin lines for single images, a thick one for the pooled curve.
        width = 2.5 if label == "pooled" else 0.8
        subplot.plot(fpr, tpr, "o-", linewidth=width, markersize=3, label=f"{label} (AUC {curve.auc:.3f})")
    subplot.set_xlim(0.0, 1.0)
    subplot.set_ylim(0.0, 1.0)
    format_axis(subplot, "ROC over confidence levels", "False positive rate", "True positive rate")
    if len(curves) <= 12:
        subplot.legend(loc="lower right", framealpha=0.2)
    return save_figure(figure, path)


def plot_bit_planes(image: GrayImage, planes: BitPlaneSet, path: str | Path) -> Path:
    """3x3 panel of the image and its eight bit planes."""
    figure = create_figure()
    format_image_axis(figure.add_subplot(3, 3, 1), "Original").imshow(image, cmap="gray", vmin=0, vmax=255)
    for bit, plane in enumerate(planes):
        subplot = figure.add_subplot(3, 3, bit + 2)
        format_image_axis(subplot, f"Bit plane {bit}").imshow(plane, cmap="gray", vmin=0, vmax=1)
    return save_figure(figure, path)


def plot_confidence_levels(confidence: ConfidenceMap, path: str | Path) -> Path:
    """3x3 panel of the probability map and the masks of the eight confidence levels."""
    figure = create_figure()
    subplot = format_image_axis(figure.add_subplot(3, 3, 1), "Probability map")
    subplot.imshow(confidence_to_image(confidence), cmap="gray", vmin=0, vmax=255)
    for level, mask in zip(range(N_LEVELS), threshold_all(confidence)):
        subplot = figure.add_subplot(3, 3, level + 2)
        format_image_axis(subplot, f"Level {level}").imshow(mask, cmap="gray", vmin=0, vmax=1)
    return save_figure(figure, path)
