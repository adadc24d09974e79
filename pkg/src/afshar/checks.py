"""Acceptance checks, shared by ``afshar check`` and the test suite.

Each check runs one exit criterion at its fixed tolerance and returns a
:class:`CheckResult`; simulation errors are caught and reported as failures
carrying the error code.
"""

import time
from dataclasses import dataclass, replace
from typing import Callable, List

import numpy as np

from .elements import intensity_minima
from .errors import AfsharError
from .experiments import (
    ExperimentConfig,
    clear_cache,
    diffracted_fraction,
    flux_ratio,
    interference_paths,
    run_distinguishability,
    run_visibility,
    shadow_mask,
    side_peak_ratio,
    sweep_duality,
)
from .observables import visibility_sweep

IDEAL_TOL = 0.01
IDEAL_RUNTIME = 10.0
DUALITY_SLACK = 1e-6
SWEEP_RUNTIME = 300.0
ENVELOPE_TOL = 1e-3
ENVELOPE_LIT = 0.01
SIDE_PEAK_LIMIT = 0.05
FRINGE_SPACING_TOL = 0.005
REFINEMENT_TOL = 1e-3
SWEEP_FIT_TOL = 1e-6
GLOBAL_PHASE_TOL = 1e-12

WIRE_127 = 127e-6
WIRE_381 = 381e-6


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str
    elapsed: float = 0.0

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'}  {self.name}: {self.detail} [{self.elapsed:.1f} s]"


def _ideal_config(config: ExperimentConfig) -> ExperimentConfig:
    width = min(config.slits.width, config.period / 20)
    return replace(config, slits=replace(config.slits, width=width, phase=0.0)).with_wire_width(0.0)


def check_ideal_family(config: ExperimentConfig) -> CheckResult:
    """Narrow slits, no wires: D = |1-2t| and V = 2 sqrt(t(1-t))."""
    clear_cache()
    start = time.perf_counter()
    base = _ideal_config(config)
    worst_d = worst_v = 0.0
    quarter = None
    for t in (0.0, 0.25, 0.5, 0.75, 1.0):
        cfg = base.with_t(t)
        D = run_distinguishability(cfg.with_lens()).D
        V = run_visibility(cfg).V
        worst_d = max(worst_d, abs(D - abs(1 - 2 * t)))
        worst_v = max(worst_v, abs(V - 2 * np.sqrt(t * (1 - t))))
        if t == 0.25:
            quarter = (D * D, V * V)
    elapsed = time.perf_counter() - start
    ok = (worst_d <= IDEAL_TOL and worst_v <= IDEAL_TOL
          and abs(quarter[0] - 0.25) <= IDEAL_TOL and abs(quarter[1] - 0.75) <= IDEAL_TOL
          and elapsed < IDEAL_RUNTIME)
    detail = (f"max|D-|1-2t||={worst_d:.2e}, max|V-2sqrt(t(1-t))|={worst_v:.2e}, "
              f"t=1/4: D^2={quarter[0]:.5f}, V^2={quarter[1]:.5f}")
    return CheckResult("1 ideal-case family", ok, detail, elapsed)


def check_duality_bound(config: ExperimentConfig) -> CheckResult:
    clear_cache()
    start = time.perf_counter()
    sweep = config.sweep
    results = sweep_duality(sweep.t_values, sweep.d_values, config)
    elapsed = time.perf_counter() - start
    worst = max(results, key=lambda r: r.sum_sq)
    ok = all(r.sum_sq <= 1 + DUALITY_SLACK for r in results) and elapsed < SWEEP_RUNTIME
    detail = (f"{len(results)} points, max D^2+V^2={worst.sum_sq:.9f} "
              f"(t={worst.context['t']:g}, d={worst.context['wire_width']:g})")
    return CheckResult("2 duality bound", ok, detail, elapsed)


def envelope_deviation(config: ExperimentConfig, d: float = WIRE_127):
    """Max |V_grid - V_no_grid| over lit points outside the wire shadows."""
    cfg = config.with_t(0.5, 0.0)
    with_grid = run_visibility(cfg.with_wire_width(d))
    no_grid = run_visibility(cfg.with_wire_width(0.0))
    lit_power = np.abs(no_grid.a) ** 2 + np.abs(no_grid.b) ** 2
    x = with_grid.grid.x
    keep = (lit_power > ENVELOPE_LIT * lit_power.max()) & ~shadow_mask(cfg.with_wire_width(d), x)
    keep &= ~with_grid.dark
    dev = np.abs(with_grid.V_profile[keep] - no_grid.V_profile[keep])
    return float(dev.max()), int(keep.sum())


def check_envelope_invariance(config: ExperimentConfig) -> CheckResult:
    start = time.perf_counter()
    dev, n = envelope_deviation(config)
    elapsed = time.perf_counter() - start
    detail = f"max|V_grid-V_no_grid|={dev:.2e} over {n} points ({config.visibility_plane} plane)"
    return CheckResult("3 envelope invariance", dev < ENVELOPE_TOL, detail, elapsed)


def check_diffraction_ordering(config: ExperimentConfig) -> CheckResult:
    start = time.perf_counter()
    ok = True
    parts = []
    for t in (0.0, 0.5, 1.0):
        ratios, fracs = {}, {}
        for d in (0.0, WIRE_127, WIRE_381):
            prof = run_distinguishability(config.with_wire_width(d).with_t(t, 0.0).with_lens()).profile
            ratios[d] = side_peak_ratio(prof)
            fracs[d] = diffracted_fraction(prof)
        ok &= ratios[WIRE_127] < SIDE_PEAK_LIMIT and ratios[WIRE_381] > ratios[WIRE_127]
        ok &= fracs[0.0] <= fracs[WIRE_127] <= fracs[WIRE_381]
        parts.append(f"t={t:g}: side/main {ratios[WIRE_127]:.2e}->{ratios[WIRE_381]:.2e}, "
                     f"fraction {fracs[0.0]:.1e}/{fracs[WIRE_127]:.1e}/{fracs[WIRE_381]:.1e}")
    return CheckResult("4 diffraction ordering", bool(ok), "; ".join(parts), time.perf_counter() - start)


def check_flux(config: ExperimentConfig) -> CheckResult:
    start = time.perf_counter()
    balanced = config.with_t(0.5, 0.0)
    single = config.with_t(1.0, 0.0)
    r_bal = flux_ratio(balanced, balanced.with_wire_width(0.0))
    r_one = flux_ratio(single, single.with_wire_width(0.0))
    bound = 1 - config.fill_factor
    ok = r_bal > bound and r_bal > r_one
    detail = f"balanced {r_bal:.5f} > 1-fill {bound:.5f}; single slit {r_one:.5f}"
    return CheckResult("5 flux claim", ok, detail, time.perf_counter() - start)


def fringe_spacing_error(config: ExperimentConfig):
    """Relative fringe-spacing error and analytic-shape deviation in the interference plane.

    The reference is two slits in the Fraunhofer limit:
    ``cos^2(pi s x / (lambda L1)) * sinc^2(w x / (lambda L1))``.
    """
    cfg = _ideal_config(config).with_t(0.5)
    # narrower slits widen the envelope so more minima enter the fit
    cfg = replace(cfg, slits=replace(cfg.slits, width=cfg.slits.separation / 16))
    left, right = interference_paths(cfg)
    grid = left.grid
    x = grid.x
    I = np.abs(left.amplitudes + right.amplitudes) ** 2
    lam, L1 = cfg.physics.wavelength, cfg.physics.L1
    s = cfg.slits.separation
    w = cfg.slits.width
    lobe = 0.5 * lam * L1 / w
    minima = intensity_minima(grid, I)
    minima = minima[np.abs(minima) < lobe]
    idx = np.round(minima / cfg.period - 0.5)
    slope = np.polyfit(idx, minima, 1)[0]
    err = abs(slope - cfg.period) / cfg.period
    analytic = np.cos(np.pi * s * x / (lam * L1)) ** 2 * np.sinc(w * x / (lam * L1)) ** 2
    central = np.abs(x) < lobe
    shape = np.max(np.abs(I[central] / I.max() - analytic[central]))
    return float(err), float(shape), int(minima.size)


def check_oracle(config: ExperimentConfig) -> CheckResult:
    start = time.perf_counter()
    err, shape, n = fringe_spacing_error(config)
    detail = f"fringe spacing error {err:.2e} from {n} minima; max shape deviation {shape:.2e}"
    return CheckResult("6 two-source oracle", err < FRINGE_SPACING_TOL, detail, time.perf_counter() - start)


def refinement_changes(config: ExperimentConfig, t_values=(0.0, 0.25, 0.5),
                       d_values=(0.0, WIRE_127, WIRE_381)):
    worst_d = worst_v = 0.0
    for d in d_values:
        for t in t_values:
            cfg = config.with_wire_width(d).with_t(t)
            fine = cfg.refined(2)
            worst_d = max(worst_d, abs(run_distinguishability(cfg.with_lens()).D
                                       - run_distinguishability(fine.with_lens()).D))
            worst_v = max(worst_v, abs(run_visibility(cfg).V - run_visibility(fine).V))
        clear_cache()
    return worst_d, worst_v


def sweep_vs_closed_form(config: ExperimentConfig) -> float:
    run = run_visibility(config.with_t(0.25).with_wire_width(WIRE_127))
    x = run.grid.x[~run.dark]
    V_sweep = visibility_sweep(run.intensity_at, x, config.n_phases)
    return float(np.max(np.abs(V_sweep - run.V_profile[~run.dark])))


def global_phase_change(config: ExperimentConfig, phase: float = 0.7):
    cfg = config.with_t(0.25).with_wire_width(WIRE_127)
    turned = replace(cfg, kernel_phase=cfg.kernel_phase + phase)
    dD = abs(run_distinguishability(cfg.with_lens()).D - run_distinguishability(turned.with_lens()).D)
    dV = abs(run_visibility(cfg).V - run_visibility(turned).V)
    return dD, dV


def check_hygiene(config: ExperimentConfig) -> CheckResult:
    start = time.perf_counter()
    worst_d, worst_v = refinement_changes(config)
    fit = sweep_vs_closed_form(config)
    dD, dV = global_phase_change(config)
    ok = (worst_d < REFINEMENT_TOL and worst_v < REFINEMENT_TOL and fit < SWEEP_FIT_TOL
          and dD < GLOBAL_PHASE_TOL and dV < GLOBAL_PHASE_TOL)
    detail = (f"refinement dD={worst_d:.1e} dV={worst_v:.1e}; sweep-vs-closed {fit:.1e}; "
              f"global phase dD={dD:.1e} dV={dV:.1e}")
    return CheckResult("7 numerical hygiene", ok, detail, time.perf_counter() - start)


CHECKS: List[Callable[[ExperimentConfig], CheckResult]] = [
    check_ideal_family,
    check_duality_bound,
    check_envelope_invariance,
    check_diffraction_ordering,
    check_flux,
    check_oracle,
    check_hygiene,
]


CHECK_NAMES = {
    check_ideal_family: "1 ideal-case family",
    check_duality_bound: "2 duality bound",
    check_envelope_invariance: "3 envelope invariance",
    check_diffraction_ordering: "4 diffraction ordering",
    check_flux: "5 flux claim",
    check_oracle: "6 two-source oracle",
    check_hygiene: "7 numerical hygiene",
}


def run_check(check: Callable[[ExperimentConfig], CheckResult], config: ExperimentConfig) -> CheckResult:
    start = time.perf_counter()
    try:
        return check(config)
    except AfsharError as exc:
        return CheckResult(CHECK_NAMES[check], False, f"error {exc}", time.perf_counter() - start)


def run_all(config: ExperimentConfig) -> List[CheckResult]:
    return [run_check(c, config) for c in CHECKS]
