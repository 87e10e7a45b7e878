"""Binary Markov Random Field model: Gaussian singleton energies, Potts doubleton energies, ICM and annealing.

The global energy of a labelling is the sum of the singleton energy of every pixel under its label
plus one doubleton term per unordered pair of neighboring pixels.
Both optimizers visit pixels in raster (row-major) order. Large images are swept in wavefronts of pixels
sharing the key 2 * row + col: every neighbor preceding a pixel in raster order has a smaller key and every
following neighbor a larger one, for 4- and 8-connectivity alike, and no two pixels with the same key are
neighbors. Updating one wavefront at a time therefore gives exactly the result of the row-major loop.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Any

import numpy as np
import numpy.typing as npt
from scipy import ndimage

from bitmrf.constants import Defaults, GrayImage, LabelField, Neighborhood
from bitmrf.exceptions.clean_exceptions import BitMrfError
from bitmrf.input_validation import check_same_shape, parse_neighborhood, validate_binary, validate_gray_image
from bitmrf.input_validation import validate_schedule
from bitmrf.logger import logger
from bitmrf.utils import neighbor_offsets_in_bounds

_LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)


@dataclass(frozen=True)
class ClassParams:
    """Gaussian intensity model of one label class.

    Attributes:
        mean: Mean intensity, in gray levels.
        std: Standard deviation, in gray levels. Always positive.
    """

    mean: float
    std: float

    def __post_init__(self):
        if not self.std > 0.0 or not math.isfinite(self.std) or not math.isfinite(self.mean):
            raise BitMrfError(f"Class parameters need a finite mean and a positive std, got {self}.")


@dataclass(frozen=True)
class MrfModel:
    """Energy model of a binary segmentation.

    Attributes:
        params: Class parameters, indexed by label 0 and 1.
        beta: Coupling strength of the doubleton term.
        neighborhood: 4- or 8-connectivity.
    """

    params: tuple[ClassParams, ClassParams]
    beta: float = Defaults.BETA
    neighborhood: Neighborhood = Neighborhood.FOUR

    def __post_init__(self):
        if len(self.params) != 2:
            raise BitMrfError(f"A binary model needs exactly two class parameters, got {len(self.params)}.")
        if not self.beta > 0.0:
            raise BitMrfError(f"beta must be positive, got {self.beta}.")
        object.__setattr__(self, "params", tuple(self.params))
        object.__setattr__(self, "neighborhood", parse_neighborhood(self.neighborhood))


@dataclass(frozen=True)
class SaSchedule:
    """Geometric cooling schedule; one full sweep is made at every temperature t0 * cooling**k >= t_min.

    Attributes:
        t0: Initial temperature.
        cooling: Factor in (0, 1) applied after each sweep.
        t_min: The run stops once the temperature drops below this value.
        seed: Seed of the random generator.
    """

    t0: float = Defaults.SA_T0
    cooling: float = Defaults.SA_COOLING
    t_min: float = Defaults.SA_TMIN
    seed: int = Defaults.SEED

    def __post_init__(self):
        validate_schedule(self.t0, self.cooling, self.t_min)

    def temperatures(self) -> list[float]:
        """All temperatures of the schedule, in order."""
        temperatures = []
        temperature = self.t0
        while temperature >= self.t_min:
            temperatures.append(temperature)
            temperature *= self.cooling
        return temperatures


@dataclass(frozen=True)
class OptimizeReport:
    """Summary of one optimization run.

    Attributes:
        final_energy: Global energy of the returned labelling.
        sweeps: Number of full sweeps made.
        converged: ICM: the last sweep changed no pixel. SA: the last sweep accepted no flip.
        energy_trace: Global energy after each sweep.
    """

    final_energy: float
    sweeps: int
    converged: bool
    energy_trace: tuple[float, ...] = field(default=())


def _estimate(image: GrayImage, labels: LabelField, std_floor: float) -> tuple[tuple[ClassParams, ClassParams], list]:
    values = np.asarray(image, dtype=np.float64)
    stats: list[tuple[float, float] | None] = []
    for label in (0, 1):
        sample = values[labels == label]
        if sample.size == 0:
            stats.append(None)
        else:
            stats.append((float(sample.mean()), max(float(sample.std()), std_floor)))

    empty = [label for label, stat in enumerate(stats) if stat is None]
    for label in empty:
        other_mean = stats[1 - label][0]  # type: ignore[index]
        stats[label] = (255.0 - other_mean, std_floor)
    params = (ClassParams(*stats[0]), ClassParams(*stats[1]))  # type: ignore[misc]
    return params, empty


def estimate_params(
    image: GrayImage, labels: LabelField, std_floor: float = Defaults.STD_FLOOR
) -> tuple[ClassParams, ClassParams]:
    """Estimate the Gaussian parameters of both classes from a labelling.

    The mean is the sample mean and the std the population standard deviation of the intensities of each
    class, floored at `std_floor`. An empty class gets mean 255 - (mean of the other class) and std `std_floor`.

    Args:
        image: 8-bit intensities.
        labels: Binary labelling of the same shape.
        std_floor: Smallest admissible standard deviation.

    Returns:
        Parameters of class 0 and class 1.

    Raises:
        BitMrfError: On a dimension mismatch.
    """
    validate_gray_image(image)
    validate_binary(labels)
    check_same_shape(image, labels)
    params, empty = _estimate(image, labels, std_floor)
    for label in empty:
        logger.warning(
            "Label class %d is empty, using mean %.2f and std %.2f.", label, params[label].mean, params[label].std
        )
    return params


def singleton_energy(intensity: float, label: int, model: MrfModel) -> float:
    """Gaussian negative log-likelihood of an intensity under the class of a label.

    E = log(sqrt(2 pi) * std) + (intensity - mean)**2 / (2 * std**2)

    Args:
        intensity: Gray level.
        label: 0 or 1.
        model: Energy model.

    Returns:
        The singleton energy.
    """
    params = model.params[label]
    return _LOG_SQRT_2PI + math.log(params.std) + (intensity - params.mean) ** 2 / (2.0 * params.std**2)


def singleton_field(image: GrayImage, params: tuple[ClassParams, ClassParams]) -> npt.NDArray[np.float64]:
    """Singleton energies of every pixel under both labels.

    Args:
        image: 8-bit intensities, shape (height, width).
        params: Class parameters of label 0 and 1.

    Returns:
        Energies, shape (2, height, width).
    """
    values = np.asarray(image, dtype=np.float64)
    energies = np.empty((2,) + values.shape, dtype=np.float64)
    for label, param in enumerate(params):
        energies[label] = _LOG_SQRT_2PI + math.log(param.std) + (values - param.mean) ** 2 / (2.0 * param.std**2)
    return energies


def doubleton_energy(label_a: int, label_b: int, beta: float) -> float:
    """Potts pair energy: -beta for equal labels, +beta otherwise."""
    return -beta if label_a == label_b else beta


def local_energy(
    image: GrayImage, labels: LabelField, pixel: tuple[int, int], candidate_label: int, model: MrfModel
) -> float:
    """Energy of one pixel taking a candidate label, given the labels of its neighbors.

    Pixels at the border have fewer neighbor terms.

    Args:
        image: 8-bit intensities.
        labels: Current labelling.
        pixel: (row, col) coordinate.
        candidate_label: 0 or 1.
        model: Energy model.

    Returns:
        Singleton energy plus the doubleton energies with all in-bounds neighbors.

    Raises:
        BitMrfError: If the pixel is out of bounds.
    """
    height, width = labels.shape
    row, col = pixel
    if not (0 <= row < height and 0 <= col < width):
        raise BitMrfError(f"Pixel {pixel} is outside the {height}x{width} image.")
    energy = singleton_energy(float(image[row, col]), candidate_label, model)
    for n_row, n_col in neighbor_offsets_in_bounds(row, col, height, width, model.neighborhood.offsets):
        energy += doubleton_energy(candidate_label, int(labels[n_row, n_col]), model.beta)
    return energy


def _pair_slices(height: int, width: int, d_row: int, d_col: int) -> tuple[tuple[slice, slice], tuple[slice, slice]]:
    col_start, col_stop = max(0, -d_col), width - max(0, d_col)
    first = (slice(0, height - d_row), slice(col_start, col_stop))
    second = (slice(d_row, height), slice(col_start + d_col, col_stop + d_col))
    return first, second


def global_energy(image: GrayImage, labels: LabelField, model: MrfModel) -> float:
    """Global energy U: all singleton terms plus one doubleton term per unordered neighbor pair.

    Raises:
        BitMrfError: On a dimension mismatch.
    """
    check_same_shape(image, labels)
    labels = np.asarray(labels)
    singles = singleton_field(image, model.params)
    energy = float(np.where(labels == 1, singles[1], singles[0]).sum())

    height, width = labels.shape
    for d_row, d_col in model.neighborhood.forward_offsets:
        first, second = _pair_slices(height, width, d_row, d_col)
        pairs = labels[first].size
        equal = int(np.count_nonzero(labels[first] == labels[second]))
        energy += model.beta * (pairs - 2 * equal)
    return energy


def neighbor_degree(shape: tuple[int, int], neighborhood: Neighborhood) -> npt.NDArray[np.int64]:
    """Number of in-bounds neighbors of every pixel."""
    kernel = np.zeros((3, 3), dtype=np.int64)
    for d_row, d_col in neighborhood.offsets:
        kernel[1 + d_row, 1 + d_col] = 1
    return ndimage.correlate(np.ones(shape, dtype=np.int64), kernel, mode="constant", cval=0)


@lru_cache(maxsize=32)
def _wavefronts(height: int, width: int) -> tuple[npt.NDArray[np.int64], ...]:
    """Flat pixel indices grouped by the key 2 * row + col, in increasing key order."""
    rows, cols = np.indices((height, width))
    keys = (2 * rows + cols).ravel()
    order = np.argsort(keys, kind="stable")
    boundaries = np.flatnonzero(np.diff(keys[order])) + 1
    return tuple(group for group in np.split(order, boundaries))


class _Greedy:
    """Accept a flip only if it lowers the energy; ties keep the current label."""

    def accept_one(self, delta: float, uniform: float) -> bool:
        return delta < 0.0

    def accept_many(self, delta: npt.NDArray[np.float64], uniform: Any) -> npt.NDArray[np.bool_]:
        return delta < 0.0


@dataclass(frozen=True)
class _Metropolis:
    """Accept a flip if it does not raise the energy, otherwise with probability exp(-delta / T)."""

    temperature: float

    def accept_one(self, delta: float, uniform: float) -> bool:
        return delta <= 0.0 or uniform < math.exp(-delta / self.temperature)

    def accept_many(self, delta: npt.NDArray[np.float64], uniform: npt.NDArray[np.float64]) -> npt.NDArray[np.bool_]:
        return (delta <= 0.0) | (uniform < np.exp(-np.maximum(delta, 0.0) / self.temperature))


class _Sweeper:
    """Row-major single-site update sweeps over one labelling.

    The labels live in a zero-padded array so neighbor lookups need no bounds checks;
    the degree array corrects the neighbor counts at the border.
    """

    def __init__(self, labels: LabelField, neighborhood: Neighborhood, scalar: bool | None = None):
        self.height, self.width = labels.shape
        self.neighborhood = neighborhood
        self.padded = np.zeros((self.height + 2, self.width + 2), dtype=np.int64)
        self.padded[1:-1, 1:-1] = labels
        self.degree = neighbor_degree(labels.shape, neighborhood).ravel()
        if scalar is None:
            scalar = labels.size <= Defaults.SCALAR_SWEEP_MAX_PIXELS
        self.scalar = scalar
        stride = self.width + 2
        self.flat_offsets = np.array([d_row * stride + d_col for d_row, d_col in neighborhood.offsets])

    @property
    def labels(self) -> LabelField:
        return self.padded[1:-1, 1:-1].astype(np.uint8)

    def sweep(
        self,
        delta_single: npt.NDArray[np.float64],
        beta: float,
        acceptance: _Greedy | _Metropolis,
        uniforms: npt.NDArray[np.float64] | None = None,
    ) -> tuple[int, float]:
        """Visit every pixel once in raster order and flip it if the acceptance rule says so.

        Args:
            delta_single: Singleton energy of label 1 minus that of label 0, shape (height, width).
            beta: Coupling strength.
            acceptance: Flip acceptance rule.
            uniforms: One uniform draw per pixel, used by the Metropolis rule.

        Returns:
            Number of flipped pixels and the summed energy change of the flips.
        """
        if self.scalar:
            return self._sweep_scalar(delta_single, beta, acceptance, uniforms)
        return self._sweep_wavefront(delta_single, beta, acceptance, uniforms)

    def _sweep_scalar(self, delta_single, beta, acceptance, uniforms) -> tuple[int, float]:
        grid = self.padded.tolist()
        delta = delta_single.tolist()
        degree = self.degree.reshape(self.height, self.width).tolist()
        draws = uniforms.tolist() if uniforms is not None else None
        offsets = self.neighborhood.offsets
        flips = 0
        change = 0.0
        for row in range(self.height):
            for col in range(self.width):
                current = grid[row + 1][col + 1]
                ones = 0
                for d_row, d_col in offsets:
                    ones += grid[row + 1 + d_row][col + 1 + d_col]
                # Energy of label 1 minus energy of label 0 at this pixel.
                difference = delta[row][col] + 2.0 * beta * (degree[row][col] - 2 * ones)
                flip_delta = difference if current == 0 else -difference
                if acceptance.accept_one(flip_delta, draws[row][col] if draws is not None else 0.0):
                    grid[row + 1][col + 1] = 1 - current
                    flips += 1
                    change += flip_delta
        self.padded[...] = grid
        return flips, change

    def _sweep_wavefront(self, delta_single, beta, acceptance, uniforms) -> tuple[int, float]:
        padded = self.padded.ravel()
        delta = delta_single.ravel()
        draws = uniforms.ravel() if uniforms is not None else None
        stride = self.width + 2
        flips = 0
        change = 0.0
        for group in _wavefronts(self.height, self.width):
            index = (group // self.width + 1) * stride + group % self.width + 1
            ones = padded[index + self.flat_offsets[0]]
            for offset in self.flat_offsets[1:]:
                ones = ones + padded[index + offset]
            difference = delta[group] + 2.0 * beta * (self.degree[group] - 2 * ones)
            current = padded[index]
            flip_delta = np.where(current == 0, difference, -difference)
            accepted = acceptance.accept_many(flip_delta, draws[group] if draws is not None else None)
            if accepted.any():
                padded[index[accepted]] = 1 - current[accepted]
                flips += int(np.count_nonzero(accepted))
                change += float(flip_delta[accepted].sum())
        return flips, change


def _check_inputs(image: GrayImage, initial: LabelField) -> None:
    validate_gray_image(image)
    validate_binary(initial)
    check_same_shape(image, initial)


def _delta_single(image: GrayImage, params: tuple[ClassParams, ClassParams]) -> npt.NDArray[np.float64]:
    singles = singleton_field(image, params)
    return singles[1] - singles[0]


def icm(
    image: GrayImage,
    initial: LabelField,
    model: MrfModel,
    max_sweeps: int = Defaults.MAX_SWEEPS,
    reestimate: bool = False,
    std_floor: float = Defaults.STD_FLOOR,
) -> tuple[LabelField, OptimizeReport]:
    """Iterated conditional modes from an initial labelling.

    Each sweep gives every pixel, in raster order, the label of lowest local energy; on a tie the
    pixel keeps its label. The run stops after a sweep that changes no pixel, or after `max_sweeps`.
    Without re-estimation the global energy never increases from one sweep to the next.

    Args:
        image: 8-bit intensities.
        initial: Initial labelling.
        model: Energy model.
        max_sweeps: Upper bound on the number of sweeps, at least 1.
        reestimate: Refresh the class parameters from the labelling after each sweep.
        std_floor: Smallest std used when re-estimating.

    Returns:
        The final labelling and a report.

    Raises:
        BitMrfError: On a dimension mismatch or max_sweeps < 1.
    """
    _check_inputs(image, initial)
    if max_sweeps < 1:
        raise BitMrfError(f"max_sweeps must be at least 1, got {max_sweeps}.")

    sweeper = _Sweeper(initial, model.neighborhood)
    acceptance = _Greedy()
    trace: list[float] = []
    converged = False
    sweeps = 0
    delta = _delta_single(image, model.params)
    while sweeps < max_sweeps:
        flips, _ = sweeper.sweep(delta, model.beta, acceptance)
        sweeps += 1
        if reestimate:
            params, _ = _estimate(image, sweeper.labels, std_floor)
            model = replace(model, params=params)
            delta = _delta_single(image, model.params)
        trace.append(global_energy(image, sweeper.labels, model))
        logger.debug("ICM sweep %d: %d pixels changed, energy %.6f.", sweeps, flips, trace[-1])
        if flips == 0:
            converged = True
            break

    labels = sweeper.labels
    return labels, OptimizeReport(final_energy=trace[-1], sweeps=sweeps, converged=converged, energy_trace=tuple(trace))


def simulated_annealing(
    image: GrayImage,
    initial: LabelField,
    model: MrfModel,
    schedule: SaSchedule | None = None,
    reestimate: bool = False,
    std_floor: float = Defaults.STD_FLOOR,
) -> tuple[LabelField, OptimizeReport]:
    """Metropolis annealing of single-pixel flips with geometric cooling.

    At temperature T a flip raising the energy by dE > 0 is accepted with probability exp(-dE / T),
    any other flip is accepted. One raster sweep is made per temperature. The labelling with the lowest
    energy seen after any sweep (or the initial one) is returned. The result is determined by the seed.
    With re-estimation the class parameters change from sweep to sweep, so the energy trace and the choice
    of the best labelling are computed under the parameters left after the last sweep.

    Args:
        image: 8-bit intensities.
        initial: Initial labelling.
        model: Energy model.
        schedule: Cooling schedule and seed.
        reestimate: Refresh the class parameters from the labelling after each sweep.
        std_floor: Smallest std used when re-estimating.

    Returns:
        The best labelling seen and a report.
    """
    _check_inputs(image, initial)
    schedule = schedule if schedule is not None else SaSchedule()
    rng = np.random.default_rng(schedule.seed)

    sweeper = _Sweeper(initial, model.neighborhood)
    initial = np.asarray(initial, dtype=np.uint8).copy()
    energy = global_energy(image, initial, model)
    best_labels = initial
    best_energy = energy
    trace: list[float] = []
    snapshots: list[LabelField] = []
    flips = -1
    delta = _delta_single(image, model.params)
    for temperature in schedule.temperatures():
        uniforms = rng.random(initial.shape)
        flips, change = sweeper.sweep(delta, model.beta, _Metropolis(temperature), uniforms)
        if reestimate:
            snapshots.append(sweeper.labels)
            params, _ = _estimate(image, snapshots[-1], std_floor)
            model = replace(model, params=params)
            delta = _delta_single(image, model.params)
            energy = global_energy(image, snapshots[-1], model)
        else:
            energy += change
            if energy < best_energy:
                best_energy = energy
                best_labels = sweeper.labels
        trace.append(energy)
        logger.debug("SA at T=%.4f: %d flips accepted, energy %.6f.", temperature, flips, energy)

    if reestimate:
        # Energies under different class parameters do not compare; score every labelling under the final model.
        trace = [global_energy(image, labels, model) for labels in snapshots]
        best_energy = global_energy(image, initial, model)
        for labels, energy in zip(snapshots, trace):
            if energy < best_energy:
                best_energy = energy
                best_labels = labels

    report = OptimizeReport(
        final_energy=global_energy(image, best_labels, model),
        sweeps=len(trace),
        converged=flips == 0,
        energy_trace=tuple(trace),
    )
    return best_labels, report
