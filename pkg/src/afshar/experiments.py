"""The two measurement setups and the analyses built on them.

Distinguishability setup: slits -> L1 -> wire grid -> lens -> L2 -> detectors.
Visibility setup: slits -> L1 -> wire grid -> (optionally L2) -> phase scan.

Each slit is carried through the element chain separately as a unit-power
"path field"; a configuration's ``t`` and ``phi`` only enter as amplitude
weights on the two paths. Path fields depend on geometry alone and are
cached, so sweeps over ``t`` cost one propagation per path and wire width.
"""

import dataclasses
from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .elements import (
    DoubleSlitSpec,
    LensSpec,
    TransmissionMask,
    WireGridSpec,
    apply_lens,
    apply_mask,
    fringe_period,
    lens_from_imaging,
    minima_alignment_offset,
    slit_path_fields,
    wire_centers,
    wire_grid_mask,
)
from .errors import (
    ConfigValidationError,
    InvalidBoundsError,
    PeaksNotFoundError,
    UndersampledTargetError,
)
from .field import Grid1D, PhysicalParams, WaveField, symmetric_grid, total_power
from .observables import (
    DetectorRegions,
    DualityResult,
    PathProbabilities,
    detector_probabilities,
    distinguishability_full,
    distinguishability_simple,
    duality,
    path_probabilities,
    visibility_closed_form,
    visibility_profile,
)
from .propagator import KernelSpec, propagate

VISIBILITY_PLANES = ("interference", "detector")


@dataclass(frozen=True)
class GridSpec:
    """Sampling of the three planes.

    ``interference_margin`` extends the interference window beyond the lens
    edges, in fringe periods. ``detector_half_extent`` of ``None`` means
    ``3*M*s``, which keeps the +-2 wire-diffraction orders on the grid.
    """

    slit_points: int = 4097
    slit_half_extent: float = 4e-3
    interference_points: int = 8193
    interference_margin: float = 2.0
    detector_points: int = 8193
    detector_half_extent: Optional[float] = None

    def refined(self, factor: int = 2) -> "GridSpec":
        """Same windows with ``factor`` times as many intervals in every plane."""
        return replace(
            self,
            slit_points=(self.slit_points - 1) * factor + 1,
            interference_points=(self.interference_points - 1) * factor + 1,
            detector_points=(self.detector_points - 1) * factor + 1,
        )


@dataclass(frozen=True)
class LensSettings:
    """Imaging lens; ``None`` values are derived from the geometry.

    The default strength images the slit plane onto the detector plane
    (``z1 = L1``, ``z2 = L2``) and the default aperture half-width is ``b/2``.
    """

    alpha: Optional[float] = None
    aperture: Optional[float] = None


@dataclass(frozen=True)
class SweepSpec:
    """Transmission and wire-width values for the duality sweep."""

    t_values: Tuple[float, ...] = tuple(k / 20 for k in range(21))
    d_values: Tuple[float, ...] = (0.0, 127e-6, 381e-6)


@dataclass(frozen=True)
class ExperimentConfig:
    physics: PhysicalParams = PhysicalParams()
    slits: DoubleSlitSpec = DoubleSlitSpec()
    wires: WireGridSpec = WireGridSpec()
    lens: Optional[LensSettings] = LensSettings()
    grids: GridSpec = GridSpec()
    detector_boundary: float = 0.0
    visibility_plane: str = "interference"
    n_phases: int = 128
    kernel_phase: float = 0.0
    sweep: SweepSpec = SweepSpec()

    def __post_init__(self):
        if self.wires.d >= self.period:
            raise ConfigValidationError(
                f"wire wider than fringe: d={self.wires.d:g} m >= Lambda={self.period:g} m"
            )
        if self.visibility_plane not in VISIBILITY_PLANES:
            raise ConfigValidationError(
                f"visibility_plane must be one of {VISIBILITY_PLANES}, got {self.visibility_plane!r}"
            )
        if self.n_phases < 16:
            raise ConfigValidationError(f"n_phases must be >= 16, got {self.n_phases}")
        if self.lens is not None and self.lens.aperture is not None and self.lens.aperture <= 0:
            raise ConfigValidationError("lens aperture must be > 0")
        det = self.detector_grid()
        if not det.x_min < self.detector_boundary < det.x_max:
            raise ConfigValidationError("detector boundary lies outside the detector grid")

    # derived geometry
    @property
    def period(self) -> float:
        return fringe_period(self.physics, self.slits.separation)

    @property
    def lens_width(self) -> float:
        return self.wires.resolved_lens_width(self.period)

    @property
    def magnification(self) -> float:
        return self.physics.L2 / self.physics.L1

    @property
    def image_separation(self) -> float:
        return self.magnification * self.slits.separation

    @property
    def fill_factor(self) -> float:
        return (2 * self.wires.N + 1) * self.wires.d / self.lens_width

    def slit_grid(self) -> Grid1D:
        return symmetric_grid(self.grids.slit_half_extent, self.grids.slit_points)

    def interference_grid(self) -> Grid1D:
        half = self.lens_width / 2 + self.grids.interference_margin * self.period
        return symmetric_grid(half, self.grids.interference_points)

    def detector_grid(self) -> Grid1D:
        half = self.grids.detector_half_extent
        if half is None:
            half = 3.0 * self.image_separation
        return symmetric_grid(half, self.grids.detector_points)

    def lens_spec(self) -> LensSpec:
        if self.lens is None:
            raise ConfigValidationError("this configuration has no lens")
        aperture = self.lens.aperture if self.lens.aperture is not None else self.lens_width / 2
        spec = lens_from_imaging(self.physics.L1, self.physics.L2, self.physics.wavelength, aperture)
        if self.lens.alpha is not None:
            spec = replace(spec, alpha=self.lens.alpha)
        return spec

    def kernel(self, z: float) -> KernelSpec:
        return KernelSpec.with_phase(self.physics.wavelength, z, self.kernel_phase)

    def detector_regions(self) -> DetectorRegions:
        # The lens forms an inverted image, so the left slit lands above the boundary.
        return DetectorRegions(boundary=self.detector_boundary, d1_below=False)

    # variants
    def with_t(self, t: float, phase: Optional[float] = None) -> "ExperimentConfig":
        slits = replace(self.slits, t=t) if phase is None else replace(self.slits, t=t, phase=phase)
        return replace(self, slits=slits)

    def with_wire_width(self, d: float) -> "ExperimentConfig":
        return replace(self, wires=replace(self.wires, d=d))

    def with_lens(self, lens: Optional[LensSettings] = None) -> "ExperimentConfig":
        return replace(self, lens=lens or self.lens or LensSettings())

    def without_lens(self) -> "ExperimentConfig":
        return replace(self, lens=None)

    def refined(self, factor: int = 2) -> "ExperimentConfig":
        return replace(self, grids=self.grids.refined(factor))

    def describe(self) -> Dict[str, float]:
        """Flat parameter tuple echoed into every output row."""
        return {
            "wavelength": self.physics.wavelength,
            "L1": self.physics.L1,
            "L2": self.physics.L2,
            "t": self.slits.t,
            "slit_width": self.slits.width,
            "slit_separation": self.slits.separation,
            "phase": self.slits.phase,
            "wire_width": self.wires.d,
            "N": self.wires.N,
            "lens_width": self.lens_width,
        }


def check_target_sampling(target: Grid1D, wavelength: float, z: float, source_half_extent: float,
                          plane: str) -> None:
    """Require ``dx <= lambda*z / (2*X_src)`` so the fastest fringe is resolved."""
    if source_half_extent <= 0:
        return
    limit = wavelength * z / (2.0 * source_half_extent)
    if target.dx > limit:
        raise UndersampledTargetError(
            f"{plane} grid spacing {target.dx:.4g} m exceeds {limit:.4g} m "
            f"(lambda*z/(2*X_src) with X_src={source_half_extent:.4g} m)"
        )


def _support_half_extent(f: WaveField) -> float:
    nz = np.flatnonzero(f.amplitudes)
    if nz.size == 0:
        return 0.0
    x = f.grid.x[nz]
    return float(max(abs(x[0]), abs(x[-1])))


# ---------------------------------------------------------------------------
# cached, t-independent path fields


def _geometry_key(config: ExperimentConfig) -> ExperimentConfig:
    return replace(config, slits=replace(config.slits, t=0.5, phase=0.0), n_phases=128,
                   sweep=SweepSpec(), detector_boundary=0.0, visibility_plane="interference")


def _frozen(f: WaveField) -> WaveField:
    f.amplitudes.flags.writeable = False
    return f


@lru_cache(maxsize=4)
def _interference_paths(key: ExperimentConfig) -> Tuple[WaveField, WaveField]:
    key_grid = key.slit_grid()
    target = key.interference_grid()
    left, right = slit_path_fields(key.slits, key_grid)
    check_target_sampling(target, key.physics.wavelength, key.physics.L1,
                          max(_support_half_extent(left), _support_half_extent(right)),
                          "interference")
    spec = key.kernel(key.physics.L1)
    return _frozen(propagate(left, spec, target)), _frozen(propagate(right, spec, target))


def interference_paths(config: ExperimentConfig) -> Tuple[WaveField, WaveField]:
    """Unit-weight left/right path fields in the interference plane, before the grid."""
    return _interference_paths(replace(_geometry_key(config), lens=None,
                                       wires=replace(config.wires, d=0.0)))


@lru_cache(maxsize=8)
def _mask(key: ExperimentConfig) -> Tuple[TransmissionMask, float]:
    grid = key.interference_grid()
    offset = 0.0
    if key.wires.d > 0 and key.wires.align_to_minima:
        left, right = interference_paths(key)
        balanced = np.abs(left.amplitudes + right.amplitudes) ** 2
        offset = minima_alignment_offset(key.wires, key.physics, key.slits.separation, grid, balanced)
    mask = wire_grid_mask(key.wires, key.physics, key.slits.separation, grid, offset)
    mask.values.flags.writeable = False
    return mask, offset


def grid_mask(config: ExperimentConfig) -> Tuple[TransmissionMask, float]:
    """Wire-grid mask on the interference grid and the alignment shift applied to it."""
    return _mask(replace(_geometry_key(config), lens=None))


def wire_positions(config: ExperimentConfig) -> np.ndarray:
    _, offset = grid_mask(config)
    return wire_centers(config.wires, config.physics, config.slits.separation, offset)


@lru_cache(maxsize=8)
def _detector_paths(key: ExperimentConfig) -> Tuple[WaveField, WaveField]:
    mask, _ = grid_mask(key)
    target = key.detector_grid()
    spec = key.kernel(key.physics.L2)
    out = []
    for path in interference_paths(key):
        f = apply_mask(path, mask)
        if key.lens is not None:
            f = apply_lens(f, key.lens_spec())
        out.append(f)
    check_target_sampling(target, key.physics.wavelength, key.physics.L2,
                          max(_support_half_extent(f) for f in out), "detector")
    return tuple(_frozen(propagate(f, spec, target)) for f in out)


def detector_paths(config: ExperimentConfig) -> Tuple[WaveField, WaveField]:
    """Unit-weight path fields in the detector plane (through the lens if present)."""
    return _detector_paths(_geometry_key(config))


def clear_cache() -> None:
    for fn in (_interference_paths, _mask, _detector_paths):
        fn.cache_clear()


# ---------------------------------------------------------------------------
# distinguishability setup


@dataclass(frozen=True)
class Peak:
    order: int
    x: float
    height: float


@dataclass(eq=False)
class IntensityProfile:
    """Detector-plane intensity with the slit images and their diffraction orders.

    Order 0 are the two slit images at ``+-M*s/2``; order ``k != 0`` sits at
    ``sign(k) * (2|k| + 1) * M*s/2``, where the wire grid throws copies of
    the images.
    """

    grid: Grid1D
    intensity: np.ndarray
    image_separation: float
    peaks: List[Peak] = field(default_factory=list)

    def __post_init__(self):
        self.intensity = np.asarray(self.intensity, dtype=float)
        if np.any(self.intensity < 0):
            raise ValueError("intensity must be nonnegative")
        if not self.peaks:
            self.peaks = label_peaks(self.grid, self.intensity, self.image_separation)

    @property
    def window_half_width(self) -> float:
        return self.image_separation / 4

    @property
    def image_centers(self) -> Tuple[float, float]:
        return (-self.image_separation / 2, self.image_separation / 2)

    def main_window(self) -> np.ndarray:
        x = self.grid.x
        return np.abs(np.abs(x) - self.image_separation / 2) <= self.window_half_width


def order_centers(image_separation: float, max_order: int = 2) -> List[Tuple[int, float]]:
    out = [(0, -image_separation / 2), (0, image_separation / 2)]
    for k in range(1, max_order + 1):
        pos = (2 * k + 1) * image_separation / 2
        out += [(-k, -pos), (k, pos)]
    return out


def label_peaks(grid: Grid1D, intensity: np.ndarray, image_separation: float,
                max_order: int = 2) -> List[Peak]:
    x = grid.x
    half = image_separation / 4
    peaks = []
    for order, center in order_centers(image_separation, max_order):
        win = np.flatnonzero(np.abs(x - center) <= half)
        if win.size < 3:
            continue
        k = win[np.argmax(intensity[win])]
        peaks.append(Peak(order, float(x[k]), float(intensity[k])))
    return peaks


def side_peak_ratio(profile: IntensityProfile) -> float:
    """Tallest diffraction-order peak over the tallest slit image."""
    main = [p.height for p in profile.peaks if p.order == 0]
    side = [p.height for p in profile.peaks if p.order != 0]
    if not main or max(main) <= 0:
        raise PeaksNotFoundError("no slit image found")
    return max(side, default=0.0) / max(main)


def diffracted_fraction(profile: IntensityProfile) -> float:
    """Fraction of detected power outside the two slit-image windows."""
    I = profile.intensity
    win = profile.main_window()
    total = I.sum()
    inner = I[win]
    if total <= 0 or inner.size == 0 or inner.max() <= 0:
        raise PeaksNotFoundError("slit images not found in the detector plane")
    return float(I[~win].sum() / total)


@dataclass(eq=False)
class DistinguishabilityRun:
    config: ExperimentConfig
    paths: Tuple[WaveField, WaveField]
    total: WaveField
    probabilities: PathProbabilities
    D1: float
    D2: float
    D: float
    D_full: float
    profile: IntensityProfile


def run_distinguishability(config: ExperimentConfig) -> DistinguishabilityRun:
    """Lens-in setup. ``D`` is ``|D1 - D2| / (D1 + D2)`` on the coherent total."""
    if config.lens is None:
        raise ConfigValidationError("the distinguishability setup needs a lens")
    unit = detector_paths(config)
    wl, wr = config.slits.path_weights
    paths = (unit[0].scaled(wl), unit[1].scaled(wr))
    total = paths[0] + paths[1]
    regions = config.detector_regions()
    D1, D2 = detector_probabilities(total, regions)
    P = path_probabilities(paths, regions)
    profile = IntensityProfile(total.grid, total.intensity, config.image_separation)
    return DistinguishabilityRun(
        config=config, paths=paths, total=total, probabilities=P, D1=D1, D2=D2,
        D=distinguishability_simple(D1, D2), D_full=distinguishability_full(P), profile=profile,
    )


# ---------------------------------------------------------------------------
# visibility setup


def _visibility_unit_paths(config: ExperimentConfig, masked: bool) -> Tuple[WaveField, WaveField]:
    key = config.without_lens()
    if not masked:
        key = key.with_wire_width(0.0)
    if config.visibility_plane == "interference":
        mask, _ = grid_mask(key)
        return tuple(apply_mask(p, mask) for p in interference_paths(key))
    return detector_paths(key)


def reference_index(config: ExperimentConfig) -> int:
    """Brightest point of the grid-free balanced pattern on the visibility plane."""
    a, b = _visibility_unit_paths(config, masked=False)
    return int(np.argmax(np.abs(a.amplitudes + b.amplitudes) ** 2))


@dataclass(eq=False)
class VisibilityRun:
    config: ExperimentConfig
    grid: Grid1D
    a: np.ndarray
    b: np.ndarray
    ref_index: int
    V: float
    V_profile: np.ndarray
    I_max: np.ndarray
    I_min: np.ndarray
    dark: np.ndarray

    @property
    def x_ref(self) -> float:
        return float(self.grid.x[self.ref_index])

    def intensity(self, phi: float) -> np.ndarray:
        """``|a e^{i phi} + b|**2`` with ``a`` the left path (phase already included)."""
        return np.abs(self.a * np.exp(1j * phi) + self.b) ** 2

    def intensity_at(self, x, phi: float):
        """Intensity at position(s) ``x`` (snapped to the nearest sample) for phase ``phi``."""
        k = np.rint((np.asarray(x) - self.grid.x_min) / self.grid.dx).astype(int)
        return np.abs(self.a[k] * np.exp(1j * phi) + self.b[k]) ** 2


def run_visibility(config: ExperimentConfig) -> VisibilityRun:
    """Lens-out setup; ``V`` at the fixed reference point and the full envelope."""
    if config.lens is not None:
        config = config.without_lens()
    unit = _visibility_unit_paths(config, masked=True)
    wl, wr = config.slits.path_weights
    a, b = wl * unit[0].amplitudes, wr * unit[1].amplitudes
    k = reference_index(config)
    V_profile, I_max, I_min, dark = visibility_profile(a, b)
    V = visibility_closed_form(a[k], b[k])
    return VisibilityRun(config, unit[0].grid, a, b, k, V, V_profile, I_max, I_min, dark)


def shadow_mask(config: ExperimentConfig, x: np.ndarray) -> np.ndarray:
    """Geometric shadows of the wires on the visibility plane.

    In the interference plane these are the wire intervals themselves. On
    the far detector plane they are the wire intervals projected from both
    slit edges (umbra and penumbra).
    """
    if config.wires.d == 0:
        return np.zeros(x.shape, bool)
    centers = wire_positions(config)
    d = config.wires.d
    if config.visibility_plane == "interference":
        out = np.zeros(x.shape, bool)
        for c in centers:
            out |= np.abs(x - c) <= d / 2
        return out
    L1, L2 = config.physics.L1, config.physics.L2
    mag = (L1 + L2) / L1
    edges = []
    for sc in config.slits.centers:
        for e in (-config.slits.width / 2, config.slits.width / 2):
            edges.append(sc + e)
    out = np.zeros(x.shape, bool)
    for c in centers:
        ends = [src + (c + sgn * d / 2 - src) * mag for src in edges for sgn in (-1, 1)]
        out |= (x >= min(ends)) & (x <= max(ends))
    return out


# ---------------------------------------------------------------------------
# sweeps and flux


def sweep_duality(t_values: Sequence[float], d_values: Sequence[float],
                  base: ExperimentConfig) -> List[DualityResult]:
    """D and V for every ``(d, t)`` pair, ordered d-major, t-minor."""
    results = []
    for d in d_values:
        for t in t_values:
            cfg = base.with_wire_width(float(d)).with_t(float(t))
            drun = run_distinguishability(cfg.with_lens())
            vrun = run_visibility(cfg.without_lens())
            ctx = dict(cfg.describe(), D_full=drun.D_full, D1=drun.D1, D2=drun.D2,
                       x_ref=vrun.x_ref, visibility_plane=cfg.visibility_plane,
                       setup="lens-in + lens-out")
            results.append(duality(drun.D, vrun.V, ctx))
    return results


def _same_except_wires(a: ExperimentConfig, b: ExperimentConfig) -> bool:
    return replace(a, wires=b.wires) == b


def flux_ratio(with_grid: ExperimentConfig, without_grid: ExperimentConfig) -> float:
    """Power just after the grid over the power at the same plane with no grid."""
    if not _same_except_wires(with_grid, without_grid):
        raise ConfigValidationError("flux_ratio needs configurations differing only in the wires")
    left, right = interference_paths(without_grid)
    wl, wr = without_grid.slits.path_weights
    psi = left.scaled(wl) + right.scaled(wr)
    reference = total_power(apply_mask(psi, grid_mask(without_grid)[0]))
    if reference <= 0:
        raise InvalidBoundsError("no power in the interference plane")
    return total_power(apply_mask(psi, grid_mask(with_grid)[0])) / reference
