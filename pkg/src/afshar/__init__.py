"""Path-integral simulation of Afshar's wire-grid double-slit experiment."""

__version__ = "0.1.0"

from .elements import (
    DoubleSlitSpec,
    LensSpec,
    TransmissionMask,
    WireGridSpec,
    apply_lens,
    apply_mask,
    double_slit_field,
    fringe_period,
    lens_from_imaging,
    wire_grid_mask,
)
from .experiments import (
    ExperimentConfig,
    GridSpec,
    IntensityProfile,
    LensSettings,
    diffracted_fraction,
    flux_ratio,
    run_distinguishability,
    run_visibility,
    sweep_duality,
)
from .field import Grid1D, PhysicalParams, WaveField, make_grid, normalize, total_power
from .observables import (
    DetectorRegions,
    DualityResult,
    PathProbabilities,
    detector_probabilities,
    distinguishability_full,
    distinguishability_simple,
    duality,
    visibility_closed_form,
    visibility_sweep,
)
from .propagator import KernelSpec, kernel, propagate
