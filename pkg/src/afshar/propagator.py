"""Plane-to-plane propagation by direct summation over source points.

The kernel is the bare path-length phase ``exp(2*pi*i*L/lambda)`` with the
exact spherical path length ``L = sqrt((x_f - x_i)**2 + z**2)``. There is no
Huygens ``1/sqrt(i*lambda*z)`` prefactor, so absolute powers are not conserved
between planes; every observable built on top of this module is a ratio of
intensities within one plane, in which any constant prefactor cancels.
"""

from dataclasses import dataclass
from decimal import Decimal, localcontext

import numpy as np

from .errors import InvalidBoundsError, UndersampledSourceError
from .field import Grid1D, WaveField

# Upper bound on the number of kernel entries held in memory at once.
_CHUNK_ELEMENTS = 1 << 21


@dataclass(frozen=True)
class KernelSpec:
    wavelength: float
    z: float
    scale: complex = 1.0

    def __post_init__(self):
        if not self.wavelength > 0 or not self.z > 0:
            raise InvalidBoundsError(
                f"kernel needs wavelength > 0 and z > 0, got {self.wavelength!r}, {self.z!r}"
            )
        if abs(abs(self.scale) - 1.0) > 1e-12:
            raise InvalidBoundsError(f"kernel scale must have unit modulus, got {self.scale!r}")

    @classmethod
    def with_phase(cls, wavelength: float, z: float, phase: float = 0.0) -> "KernelSpec":
        return cls(wavelength, z, complex(np.exp(1j * phase)))


def _excess_path(dx, z):
    # L - z written without cancellation: dx^2 / (L + z).
    d2 = dx * dx
    return d2 / (np.sqrt(d2 + z * z) + z)


def _carrier(spec: KernelSpec) -> complex:
    # exp(2 pi i z / lambda) on the fractional number of cycles. z / lambda is
    # ~1e6 for optical setups, so the division is done in extended precision.
    with localcontext() as ctx:
        ctx.prec = 40
        cycles = float((Decimal(spec.z) / Decimal(spec.wavelength)) % 1)
    return spec.scale * complex(np.exp(2j * np.pi * cycles))


def kernel(spec: KernelSpec, x_i: float, x_f: float) -> complex:
    """Propagation weight from source point ``x_i`` to target point ``x_f``."""
    excess = _excess_path(float(x_f) - float(x_i), spec.z)
    return _carrier(spec) * complex(np.exp(2j * np.pi * np.fmod(excess / spec.wavelength, 1.0)))


def max_source_spacing(wavelength: float, z: float, reach: float) -> float:
    """Largest source spacing that samples the kernel phase at Nyquist.

    ``reach`` is the largest transverse distance ``|x_f - x_i|`` that occurs.
    The kernel phase gradient along ``x_i`` is at most
    ``2*pi*reach / (lambda * sqrt(reach**2 + z**2))``.
    """
    if reach <= 0:
        return np.inf
    return wavelength * np.hypot(reach, z) / (2.0 * reach)


def check_source_sampling(field: WaveField, spec: KernelSpec, target: Grid1D) -> None:
    support = np.flatnonzero(field.amplitudes)
    if support.size == 0:
        return
    xs = field.grid.x[support]
    reach = max(abs(target.x_max - xs[0]), abs(xs[-1] - target.x_min))
    limit = max_source_spacing(spec.wavelength, spec.z, reach)
    if field.grid.dx > limit:
        raise UndersampledSourceError(
            f"source spacing {field.grid.dx:.4g} m exceeds the Nyquist limit {limit:.4g} m "
            f"for z={spec.z:g} m and transverse reach {reach:.4g} m"
        )


def propagate(field: WaveField, spec: KernelSpec, target: Grid1D) -> WaveField:
    """Evaluate ``psi_f(x_f) = sum_k K(x_k, x_f) psi_i(x_k) dx`` on ``target``.

    Only nonzero source samples enter the sum (zero samples contribute
    exactly nothing). Each target value is one real dot product per
    quadrature over source samples in ascending index order.
    """
    check_source_sampling(field, spec, target)
    out = np.zeros(target.n_points, dtype=complex)
    support = np.flatnonzero(field.amplitudes)
    if support.size == 0:
        return WaveField(target, out)

    xs = field.grid.x[support]
    weights = field.amplitudes[support] * field.grid.dx
    # columns: real, imag of the source weights
    w = np.stack([weights.real, weights.imag], axis=1)
    xt = target.x
    k_over = 2.0 * np.pi / spec.wavelength
    rows = max(1, _CHUNK_ELEMENTS // xs.size)
    for start in range(0, xt.size, rows):
        stop = min(start + rows, xt.size)
        phase = k_over * _excess_path(xt[start:stop, None] - xs[None, :], spec.z)
        c = np.cos(phase) @ w
        s = np.sin(phase) @ w
        out[start:stop].real = c[:, 0] - s[:, 1]
        out[start:stop].imag = c[:, 1] + s[:, 0]
    out *= _carrier(spec)
    return WaveField(target, out)
