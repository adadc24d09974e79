"""Uniform 1D grids and complex wavefields sampled on them.

All lengths are in meters. Integrals over a plane use the plain Riemann sum
with weight ``dx``; power is therefore ``sum(|psi|**2) * dx``.
"""

from dataclasses import dataclass

import numpy as np

from .errors import GridMismatchError, InvalidBoundsError, TooFewPointsError, ZeroFieldError


@dataclass(frozen=True)
class Grid1D:
    """Uniform sampling of a transverse coordinate, ``x_k = x_min + k*dx``."""

    x_min: float
    x_max: float
    n_points: int

    def __post_init__(self):
        if not self.x_min < self.x_max:
            raise InvalidBoundsError(f"x_min={self.x_min!r} must be < x_max={self.x_max!r}")
        if self.n_points < 2:
            raise TooFewPointsError(f"n_points={self.n_points} (need >= 2)")

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / (self.n_points - 1)

    @property
    def x(self) -> np.ndarray:
        return self.x_min + np.arange(self.n_points) * self.dx

    def position(self, k: int) -> float:
        return self.x_min + k * self.dx

    @property
    def extent(self) -> float:
        return self.x_max - self.x_min


def make_grid(x_min: float, x_max: float, n_points: int) -> Grid1D:
    return Grid1D(float(x_min), float(x_max), int(n_points))


def symmetric_grid(half_extent: float, n_points: int) -> Grid1D:
    return make_grid(-half_extent, half_extent, n_points)


@dataclass(frozen=True)
class PhysicalParams:
    """Wavelength and the two plane separations (slits->wires, wires->detector)."""

    wavelength: float = 650e-9
    L1: float = 0.55
    L2: float = 2.2

    def __post_init__(self):
        for name in ("wavelength", "L1", "L2"):
            if not getattr(self, name) > 0:
                raise InvalidBoundsError(f"{name} must be > 0, got {getattr(self, name)!r}")


@dataclass(eq=False)
class WaveField:
    """Complex amplitude sampled on a :class:`Grid1D`."""

    grid: Grid1D
    amplitudes: np.ndarray

    def __post_init__(self):
        self.amplitudes = np.asarray(self.amplitudes, dtype=complex)
        if self.amplitudes.shape != (self.grid.n_points,):
            raise ValueError(
                f"amplitudes shape {self.amplitudes.shape} does not match grid "
                f"n_points={self.grid.n_points}"
            )

    @classmethod
    def zeros(cls, grid: Grid1D) -> "WaveField":
        return cls(grid, np.zeros(grid.n_points, dtype=complex))

    @property
    def intensity(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    @property
    def power(self) -> float:
        return total_power(self)

    def scaled(self, factor: complex) -> "WaveField":
        return WaveField(self.grid, self.amplitudes * factor)

    def __add__(self, other: "WaveField") -> "WaveField":
        if other.grid != self.grid:
            raise GridMismatchError("cannot add fields sampled on different grids")
        return WaveField(self.grid, self.amplitudes + other.amplitudes)


def total_power(field: WaveField) -> float:
    # np.sum uses pairwise summation in index order, which is deterministic.
    return float(np.sum(field.intensity) * field.grid.dx)


def normalize(field: WaveField) -> WaveField:
    """Scale ``field`` by one positive real constant so its power is 1."""
    p = total_power(field)
    if p <= 0.0:
        raise ZeroFieldError("cannot normalize a field with zero power")
    return field.scaled(1.0 / np.sqrt(p))
