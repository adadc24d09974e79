"""Which-way distinguishability, fringe visibility, and the duality sum."""

from dataclasses import dataclass, field
from typing import Callable, Optional, Tuple

import numpy as np

from .errors import (
    DarkPointError,
    NoDetectionsError,
    NotNormalizedError,
    OutOfRangeError,
    ZeroFieldError,
)
from .field import WaveField

_RANGE_TOL = 1e-12


@dataclass(frozen=True)
class DetectorRegions:
    """Two detectors split at ``boundary``.

    With ``d1_below`` (the default) detector D1 collects ``x < boundary`` and
    D2 collects ``x >= boundary``; otherwise the sides are swapped. An
    imaging lens inverts the slit plane, so the detector that sees the left
    slit sits at ``x > 0``.
    """

    boundary: float = 0.0
    d1_below: bool = True

    def masks(self, x: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        below = x < self.boundary
        return (below, ~below) if self.d1_below else (~below, below)


@dataclass(frozen=True)
class PathProbabilities:
    """``P[i][j]``: probability of detector ``i`` and path ``j`` (0-based indices)."""

    P: Tuple[Tuple[float, float], Tuple[float, float]]
    conditioned: bool = True

    def __post_init__(self):
        arr = np.asarray(self.P, dtype=float)
        if arr.shape != (2, 2):
            raise ValueError("P must be 2x2")
        if np.any(arr < 0):
            raise OutOfRangeError("negative path probability")

    @property
    def array(self) -> np.ndarray:
        return np.asarray(self.P, dtype=float)


@dataclass(frozen=True)
class DualityResult:
    D: float
    V: float
    sum_sq: float
    context: dict = field(default_factory=dict, compare=False)


def _region_powers(psi: WaveField, regions: DetectorRegions) -> Tuple[float, float]:
    I = psi.intensity
    m1, m2 = regions.masks(psi.grid.x)
    return float(np.sum(I[m1])), float(np.sum(I[m2]))


def detector_probabilities(psi_det: WaveField, regions: DetectorRegions) -> Tuple[float, float]:
    p1, p2 = _region_powers(psi_det, regions)
    total = p1 + p2
    if total <= 0:
        raise ZeroFieldError("detector-plane field has no power")
    return p1 / total, p2 / total


def distinguishability_simple(D1: float, D2: float) -> float:
    """``|D1 - D2| / (D1 + D2)``."""
    total = D1 + D2
    if total <= 0:
        raise NoDetectionsError("D1 + D2 must be positive")
    return abs(D1 - D2) / total


def path_probabilities(paths: Tuple[WaveField, WaveField], regions: DetectorRegions) -> PathProbabilities:
    """Joint detector/path probabilities from separately propagated path fields.

    ``paths`` must already carry their ``t`` / ``1 - t`` amplitude weights.
    Entries are conditioned on detection: they sum to one over the four
    (detector, path) combinations.
    """
    cols = [_region_powers(p, regions) for p in paths]
    P = np.array([[cols[0][0], cols[1][0]], [cols[0][1], cols[1][1]]])
    total = P.sum()
    if total <= 0:
        raise NoDetectionsError("no power reaches either detector")
    P = P / total
    return PathProbabilities(tuple(map(tuple, P.tolist())))


def distinguishability_full(P: PathProbabilities) -> float:
    """``|P11 - P21| + |P12 - P22|`` over detectors ``i`` and paths ``j``."""
    arr = P.array
    if abs(arr.sum() - 1.0) > 1e-6:
        raise NotNormalizedError(f"path probabilities sum to {arr.sum():.9g}, not 1")
    return float(abs(arr[0, 0] - arr[1, 0]) + abs(arr[0, 1] - arr[1, 1]))


def visibility_closed_form(a: complex, b: complex) -> float:
    """Contrast of ``|a e^{i phi} + b|**2`` over a full phase cycle."""
    pa, pb = abs(a) ** 2, abs(b) ** 2
    if pa + pb == 0:
        raise DarkPointError("both path amplitudes vanish")
    return 2.0 * abs(a) * abs(b) / (pa + pb)


def visibility_profile(a: np.ndarray, b: np.ndarray, dark_threshold: float = 1e-12):
    """Pointwise visibility, ``I_max`` and ``I_min`` for path amplitudes ``a``, ``b``.

    Points whose two-path power is below ``dark_threshold`` times the peak
    are returned as NaN visibility and flagged dark.
    """
    ma, mb = np.abs(a), np.abs(b)
    total = ma ** 2 + mb ** 2
    dark = total <= dark_threshold * total.max() if total.size and total.max() > 0 else np.ones_like(total, bool)
    with np.errstate(invalid="ignore", divide="ignore"):
        V = np.where(dark, np.nan, 2.0 * ma * mb / np.where(dark, 1.0, total))
    return V, (ma + mb) ** 2, (ma - mb) ** 2, dark


def phase_samples(n_phases: int) -> np.ndarray:
    return 2.0 * np.pi * np.arange(n_phases) / n_phases


def visibility_sweep(intensity_at: Callable, x, n_phases: int = 128):
    """Visibility at ``x`` from the phase scan ``phi -> intensity_at(x, phi)``.

    Two-path intensity is exactly ``c0 + c1 cos(phi + theta)``; the sampled
    scan is projected onto that form (a least-squares fit on the uniform
    phase grid), so ``I_max = c0 + |c1|`` and ``I_min = c0 - |c1|`` do not
    depend on where the samples happen to fall. ``x`` may be an array if
    ``intensity_at`` is vectorized; the result then has the same shape.
    """
    if n_phases < 16:
        raise ValueError(f"n_phases must be >= 16, got {n_phases}")
    phis = phase_samples(n_phases)
    I = np.array([intensity_at(x, p) for p in phis], dtype=float)
    if np.any(np.all(I <= 0, axis=0)):
        raise DarkPointError(f"no intensity for any phase at some of x={x}")
    rot = np.exp(-1j * phis).reshape((-1,) + (1,) * (I.ndim - 1))
    c0 = I.mean(axis=0)
    c1 = 2.0 * np.abs(np.mean(I * rot, axis=0))
    i_max, i_min = c0 + c1, np.maximum(c0 - c1, 0.0)
    V = (i_max - i_min) / (i_max + i_min)
    return float(V) if np.ndim(V) == 0 else V


def _check_unit(name: str, value: float) -> float:
    if not (-_RANGE_TOL <= value <= 1.0 + _RANGE_TOL):
        raise OutOfRangeError(f"{name}={value!r} outside [0, 1]")
    return min(max(float(value), 0.0), 1.0)


def duality(D: float, V: float, context: Optional[dict] = None) -> DualityResult:
    D = _check_unit("D", D)
    V = _check_unit("V", V)
    return DualityResult(D=D, V=V, sum_sq=D * D + V * V, context=dict(context or {}))
