"""Optical elements: the double slit, the wire grid, and the imaging lens."""

from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from .errors import (
    GridMismatchError,
    GridTooCoarseError,
    InvalidBoundsError,
    SlitsOutsideGridError,
    WiresOutsideGridError,
    WireTooThinError,
)
from .field import Grid1D, PhysicalParams, WaveField, total_power

# Interval membership tolerance, in units of the grid spacing. Keeps closed
# intervals whose edges fall exactly on samples from depending on rounding.
_EDGE_TOL = 1e-9

MIN_SAMPLES_PER_SLIT = 8
MIN_SAMPLES_PER_WIRE = 4


def _closed_interval(x: np.ndarray, center: float, half_width: float, dx: float) -> np.ndarray:
    return np.abs(x - center) <= half_width + _EDGE_TOL * dx


def fringe_period(params: PhysicalParams, separation: float) -> float:
    """Spacing ``lambda * L1 / s`` between neighbouring far-field minima."""
    return params.wavelength * params.L1 / separation


@dataclass(frozen=True)
class DoubleSlitSpec:
    """Two slits at ``-s/2`` (left) and ``+s/2`` (right).

    ``t`` is the transmission probability of the left slit and ``phase`` is
    added to the left slit's amplitude.
    """

    t: float = 0.5
    width: float = 62.5e-6
    separation: float = 0.25e-3
    phase: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.t <= 1.0:
            raise InvalidBoundsError(f"t out of [0,1]: {self.t!r}")
        if not self.width > 0:
            raise InvalidBoundsError(f"slit width must be > 0, got {self.width!r}")
        if not self.separation > self.width:
            raise InvalidBoundsError(
                f"slits overlap: separation {self.separation!r} <= width {self.width!r}"
            )

    @property
    def centers(self) -> Tuple[float, float]:
        return (-self.separation / 2, self.separation / 2)

    @property
    def path_weights(self) -> Tuple[complex, float]:
        return (np.sqrt(self.t) * np.exp(1j * self.phase), np.sqrt(1.0 - self.t))


def _slit_support(spec: DoubleSlitSpec, grid: Grid1D, center: float) -> np.ndarray:
    """Fraction of each sample's cell ``[x - dx/2, x + dx/2]`` covered by the slit.

    Interior samples get 1 and the two edge samples get their partial
    coverage, so ``sum(weights) * dx`` equals the slit width exactly and the
    sampled aperture does not jump by a cell when the grid is refined.
    """
    x = grid.x
    lo, hi = center - spec.width / 2, center + spec.width / 2
    if lo < grid.x_min or hi > grid.x_max:
        raise SlitsOutsideGridError(f"slit [{lo:g}, {hi:g}] not inside grid")
    half = grid.dx / 2
    cover = (np.minimum(x + half, hi) - np.maximum(x - half, lo)) / grid.dx
    cover = np.clip(cover, 0.0, 1.0)
    cover[cover < _EDGE_TOL] = 0.0
    n = int(np.count_nonzero(cover))
    if n < MIN_SAMPLES_PER_SLIT:
        raise GridTooCoarseError(
            f"slit width {spec.width:g} m covers {n} samples (need >= {MIN_SAMPLES_PER_SLIT})"
        )
    return cover


def slit_path_fields(spec: DoubleSlitSpec, grid: Grid1D) -> Tuple[WaveField, WaveField]:
    """Unit-power field of the left slit alone and of the right slit alone.

    These carry no ``t`` or phase weighting; :func:`double_slit_field` is
    their weighted sum.
    """
    fields = []
    for center in spec.centers:
        amp = _slit_support(spec, grid, center).astype(complex)
        amp /= np.sqrt(np.sum(amp.real ** 2) * grid.dx)
        fields.append(WaveField(grid, amp))
    return fields[0], fields[1]


def double_slit_field(spec: DoubleSlitSpec, grid: Grid1D) -> WaveField:
    """Slit-plane field: ``sqrt(t) e^{i phi}`` on the left slit, ``sqrt(1-t)`` on the right.

    Each slit's sampled shape has unit power before weighting, so the total
    power is exactly ``t + (1 - t) = 1`` and the slit powers stand in the
    ratio ``t : 1 - t``.
    """
    left, right = slit_path_fields(spec, grid)
    wl, wr = spec.path_weights
    return WaveField(grid, wl * left.amplitudes + wr * right.amplitudes)


@dataclass(frozen=True)
class WireGridSpec:
    """``2N+1`` opaque wires of width ``d`` centred at ``j*Lambda - b/2 + offset``.

    ``lens_width`` (``b``) of ``None`` means the default ``(2N+1)*Lambda``,
    which for a symmetric balanced pattern puts every wire on a minimum.
    """

    d: float = 127e-6
    N: int = 12
    lens_width: Optional[float] = None
    align_to_minima: bool = True

    def __post_init__(self):
        if self.d < 0:
            raise InvalidBoundsError(f"wire width must be >= 0, got {self.d!r}")
        if self.N < 0:
            raise InvalidBoundsError(f"N must be >= 0, got {self.N!r}")
        if self.lens_width is not None and not self.lens_width > 0:
            raise InvalidBoundsError(f"lens width must be > 0, got {self.lens_width!r}")

    def resolved_lens_width(self, period: float) -> float:
        if self.lens_width is None:
            return (2 * self.N + 1) * period
        return self.lens_width


def wire_centers(spec: WireGridSpec, params: PhysicalParams, separation: float,
                 offset: float = 0.0) -> np.ndarray:
    period = fringe_period(params, separation)
    b = spec.resolved_lens_width(period)
    j = np.arange(2 * spec.N + 1)
    return j * period - b / 2 + offset


@dataclass(eq=False)
class TransmissionMask:
    grid: Grid1D
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (self.grid.n_points,):
            raise ValueError("mask length does not match grid")

    @classmethod
    def ones(cls, grid: Grid1D) -> "TransmissionMask":
        return cls(grid, np.ones(grid.n_points))

    @property
    def blocked_length(self) -> float:
        return float(np.count_nonzero(self.values == 0.0) * self.grid.dx)


def wire_grid_mask(spec: WireGridSpec, params: PhysicalParams, separation: float,
                   grid: Grid1D, offset: float = 0.0) -> TransmissionMask:
    """Binary mask, 0 on every closed interval ``[x_j - d/2, x_j + d/2]``.

    The blocked set is the union of the wire intervals, i.e. the product of
    the per-wire notch functions ``1 - (H(x - x_j + d/2) - H(x - x_j - d/2))``.
    """
    if spec.d == 0:
        return TransmissionMask.ones(grid)
    period = fringe_period(params, separation)
    if spec.d >= period:
        raise InvalidBoundsError(
            f"wire wider than fringe: d={spec.d:g} m >= Lambda={period:g} m"
        )
    if spec.d / grid.dx < MIN_SAMPLES_PER_WIRE:
        raise WireTooThinError(
            f"wire width {spec.d:g} m spans {spec.d / grid.dx:.2f} samples "
            f"(need >= {MIN_SAMPLES_PER_WIRE})"
        )
    centers = wire_centers(spec, params, separation, offset)
    if centers[0] - spec.d / 2 < grid.x_min or centers[-1] + spec.d / 2 > grid.x_max:
        raise WiresOutsideGridError(
            f"wires span [{centers[0] - spec.d / 2:g}, {centers[-1] + spec.d / 2:g}] m, "
            f"grid is [{grid.x_min:g}, {grid.x_max:g}] m"
        )
    x = grid.x
    blocked = np.zeros(grid.n_points, dtype=bool)
    for c in centers:
        blocked |= _closed_interval(x, c, spec.d / 2, grid.dx)
    return TransmissionMask(grid, np.where(blocked, 0.0, 1.0))


def intensity_minima(grid: Grid1D, intensity: np.ndarray) -> np.ndarray:
    """Positions of interior local minima, refined by a three-point parabola."""
    I = np.asarray(intensity, dtype=float)
    k = np.flatnonzero((I[1:-1] < I[:-2]) & (I[1:-1] <= I[2:])) + 1
    left, mid, right = I[k - 1], I[k], I[k + 1]
    curv = left - 2 * mid + right
    shift = np.where(curv > 0, 0.5 * (left - right) / np.where(curv > 0, curv, 1.0), 0.0)
    return grid.x[k] + np.clip(shift, -0.5, 0.5) * grid.dx


def minima_alignment_offset(spec: WireGridSpec, params: PhysicalParams, separation: float,
                            grid: Grid1D, intensity: np.ndarray) -> float:
    """Smallest rigid shift of the comb that puts a wire centre on a computed minimum.

    The shift is measured at the central wire. When two minima are equally
    close (within a thousandth of a fringe) the one that keeps the comb
    closer to centred on the grid wins.
    """
    minima = intensity_minima(grid, intensity)
    if minima.size == 0:
        return 0.0
    centers = wire_centers(spec, params, separation)
    anchor = centers[spec.N]
    shifts = minima - anchor
    order = np.argsort(np.abs(shifts))
    best = shifts[order[0]]
    period = fringe_period(params, separation)
    if order.size > 1 and abs(abs(shifts[order[1]]) - abs(best)) < 1e-3 * period:
        mid = 0.5 * (grid.x_min + grid.x_max)
        candidates = (best, shifts[order[1]])
        best = min(candidates, key=lambda s: (abs(centers.mean() + s - mid), s))
    return float(best)


def apply_mask(field: WaveField, mask: TransmissionMask) -> WaveField:
    if field.grid != mask.grid:
        raise GridMismatchError("field and mask are sampled on different grids")
    return WaveField(field.grid, field.amplitudes * mask.values)


@dataclass(frozen=True)
class LensSpec:
    """Thin lens ``exp(i*alpha*x**2)`` with a hard aperture of half-width ``aperture``."""

    alpha: float
    aperture: float = np.inf
    magnification: Optional[float] = None

    def __post_init__(self):
        if not self.aperture > 0:
            raise InvalidBoundsError(f"lens aperture must be > 0, got {self.aperture!r}")


def lens_from_imaging(z1: float, z2: float, wavelength: float,
                      aperture: float = np.inf) -> LensSpec:
    """Lens that images the plane ``z1`` before it onto the plane ``z2`` after it."""
    if not (z1 > 0 and z2 > 0 and wavelength > 0):
        raise InvalidBoundsError("z1, z2 and wavelength must all be > 0")
    alpha = -(np.pi / wavelength) * (1.0 / z1 + 1.0 / z2)
    return LensSpec(alpha=alpha, aperture=aperture, magnification=z2 / z1)


def apply_lens(field: WaveField, lens: LensSpec) -> WaveField:
    x = field.grid.x
    inside = np.abs(x) <= lens.aperture + _EDGE_TOL * field.grid.dx
    phase = np.exp(1j * lens.alpha * x[inside] ** 2)
    out = np.zeros_like(field.amplitudes)
    out[inside] = field.amplitudes[inside] * phase
    return WaveField(field.grid, out)


def transmitted_fraction(field: WaveField, mask: TransmissionMask) -> float:
    before = total_power(field)
    return total_power(apply_mask(field, mask)) / before if before > 0 else 1.0
