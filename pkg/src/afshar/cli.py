"""Command-line front end.

    afshar run --config exp.ini --fig fig5 --out results/
    afshar check --config exp.ini
    afshar --version

Exit status: 0 on success, 1 for configuration errors, 2 for numerical
failures (including failed acceptance checks).
"""

import argparse
import csv
import datetime
import os
import sys
from typing import Dict, Iterable, List, Sequence

import numpy as np

from . import __version__
from .checks import run_all
from .config import format_config, load_config
from .errors import AfsharError, ConfigError
from .experiments import (
    ExperimentConfig,
    diffracted_fraction,
    run_distinguishability,
    run_visibility,
    shadow_mask,
    side_peak_ratio,
    sweep_duality,
    wire_positions,
)

FIGURES = ("fig3", "fig4", "fig5", "custom")
FIG3_T = (0.0, 0.5, 1.0)
FIG3_D = (0.0, 127e-6, 381e-6)
FIG4_PHASES = 64


def _fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, str):
        return value
    return format(float(value), ".17e")


class CsvTable:
    """CSV with ``#`` metadata lines, one header line and full-precision numbers."""

    def __init__(self, columns: Sequence[str]):
        self.columns = list(columns)
        self.rows: List[List[str]] = []

    def add(self, row: Dict[str, object]) -> None:
        self.rows.append([_fmt(row[c]) for c in self.columns])

    def write(self, path: str, meta: Dict[str, str]) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            for key, value in meta.items():
                fh.write(f"# {key}: {value}\n")
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(self.columns)
            writer.writerows(self.rows)


def _meta(figure: str, config: ExperimentConfig) -> Dict[str, str]:
    return {
        "tool": f"afshar {__version__}",
        "generated": datetime.datetime.now(datetime.timezone.utc).isoformat(timespec="seconds"),
        "figure": figure,
        "deterministic": "yes",
        "visibility_plane": config.visibility_plane,
    }


PARAM_COLUMNS = list(ExperimentConfig().describe())


# ---------------------------------------------------------------------------
# figures


def write_fig3(config: ExperimentConfig, out: str) -> List[str]:
    profiles = CsvTable(PARAM_COLUMNS + ["x", "intensity", "intensity_left_path", "intensity_right_path"])
    peaks = CsvTable(PARAM_COLUMNS + ["order", "x", "height", "side_peak_ratio", "diffracted_fraction", "D"])
    summary = []
    for t in FIG3_T:
        for d in FIG3_D:
            cfg = config.with_wire_width(d).with_t(t, 0.0).with_lens()
            run = run_distinguishability(cfg)
            params = cfg.describe()
            x = run.total.grid.x
            I = run.total.intensity
            Ia, Ib = run.paths[0].intensity, run.paths[1].intensity
            for k in range(x.size):
                profiles.add(dict(params, x=x[k], intensity=I[k], intensity_left_path=Ia[k],
                                  intensity_right_path=Ib[k]))
            ratio = side_peak_ratio(run.profile)
            frac = diffracted_fraction(run.profile)
            for p in run.profile.peaks:
                peaks.add(dict(params, order=p.order, x=p.x, height=p.height, side_peak_ratio=ratio,
                               diffracted_fraction=frac, D=run.D))
            summary.append(f"t={t:g} d={d * 1e6:g}um  D={run.D:.6f}  side/main={ratio:.3e}  "
                           f"diffracted={frac:.3e}")
    meta = _meta("fig3", config)
    profiles.write(os.path.join(out, "fig3_profiles.csv"), meta)
    peaks.write(os.path.join(out, "fig3_peaks.csv"), meta)
    _write_text(os.path.join(out, "plot_fig3.py"), PLOT_FIG3)
    return summary


def _marked_points(config: ExperimentConfig, run) -> List[int]:
    grid = run.grid
    xs = [run.x_ref, run.x_ref + config.period / 4]
    if config.wires.d > 0 and config.visibility_plane == "interference":
        xs.append(float(wire_positions(config)[config.wires.N]))
    idx = [int(np.clip(np.rint((x - grid.x_min) / grid.dx), 0, grid.n_points - 1)) for x in xs]
    return sorted(set(idx))


def write_fig4(config: ExperimentConfig, out: str) -> List[str]:
    env = CsvTable(PARAM_COLUMNS + ["x", "intensity_phi0", "intensity_phipi", "I_max", "I_min",
                                    "visibility", "shadow", "status"])
    traces = CsvTable(PARAM_COLUMNS + ["x", "phi", "intensity", "status"])
    summary = []
    d_grid = config.wires.d if config.wires.d > 0 else 127e-6
    phis = 2 * np.pi * np.arange(FIG4_PHASES + 1) / FIG4_PHASES
    for d in (0.0, d_grid):
        cfg = config.with_wire_width(d).with_t(0.5, 0.0).without_lens()
        run = run_visibility(cfg)
        params = cfg.describe()
        x = run.grid.x
        I0, Ipi = run.intensity(0.0), run.intensity(np.pi)
        shadow = shadow_mask(cfg, x)
        for k in range(x.size):
            env.add(dict(params, x=x[k], intensity_phi0=I0[k], intensity_phipi=Ipi[k], I_max=run.I_max[k],
                         I_min=run.I_min[k], visibility=run.V_profile[k], shadow=shadow[k],
                         status="dark" if run.dark[k] else "lit"))
        for k in _marked_points(cfg, run):
            status = "dark" if run.dark[k] else "lit"
            for phi in phis:
                traces.add(dict(params, x=x[k], phi=phi, intensity=run.intensity_at(x[k], phi), status=status))
        summary.append(f"t=0.5 d={d * 1e6:g}um  V(x_ref={run.x_ref:.3e})={run.V:.6f}  "
                       f"dark points={int(run.dark.sum())}")
    meta = _meta("fig4", config)
    env.write(os.path.join(out, "fig4_envelope.csv"), meta)
    traces.write(os.path.join(out, "fig4_traces.csv"), meta)
    _write_text(os.path.join(out, "plot_fig4.py"), PLOT_FIG4)
    return summary


def write_fig5(config: ExperimentConfig, out: str) -> List[str]:
    table = CsvTable(PARAM_COLUMNS + ["D", "V", "sum_sq", "D_full", "D1", "D2", "x_ref"])
    results = sweep_duality(config.sweep.t_values, config.sweep.d_values, config)
    for r in results:
        ctx = r.context
        table.add(dict({k: ctx[k] for k in PARAM_COLUMNS}, D=r.D, V=r.V, sum_sq=r.sum_sq,
                       D_full=ctx["D_full"], D1=ctx["D1"], D2=ctx["D2"], x_ref=ctx["x_ref"]))
    table.write(os.path.join(out, "fig5_duality.csv"), _meta("fig5", config))
    _write_text(os.path.join(out, "plot_fig5.py"), PLOT_FIG5)
    worst = max(results, key=lambda r: r.sum_sq)
    return [f"{len(results)} sweep points, max D^2+V^2 = {worst.sum_sq:.9f} "
            f"at t={worst.context['t']:g}, d={worst.context['wire_width'] * 1e6:g}um"]


def write_custom(config: ExperimentConfig, out: str) -> List[str]:
    drun = run_distinguishability(config.with_lens())
    vrun = run_visibility(config)
    params = config.describe()
    det = CsvTable(PARAM_COLUMNS + ["x", "intensity"])
    for x, I in zip(drun.total.grid.x, drun.total.intensity):
        det.add(dict(params, x=x, intensity=I))
    vis = CsvTable(PARAM_COLUMNS + ["x", "I_max", "I_min", "visibility", "status"])
    for k, x in enumerate(vrun.grid.x):
        vis.add(dict(params, x=x, I_max=vrun.I_max[k], I_min=vrun.I_min[k], visibility=vrun.V_profile[k],
                     status="dark" if vrun.dark[k] else "lit"))
    meta = _meta("custom", config)
    det.write(os.path.join(out, "custom_distinguishability.csv"), meta)
    vis.write(os.path.join(out, "custom_visibility.csv"), meta)
    return [f"t={config.slits.t:g} d={config.wires.d * 1e6:g}um  D={drun.D:.6f}  D_full={drun.D_full:.6f}  "
            f"V={vrun.V:.6f}  D^2+V^2={drun.D ** 2 + vrun.V ** 2:.9f}"]


WRITERS = {"fig3": write_fig3, "fig4": write_fig4, "fig5": write_fig5, "custom": write_custom}


def _write_text(path: str, text: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


# ---------------------------------------------------------------------------
# commands


def cmd_run(args) -> int:
    config = load_config(args.config)
    os.makedirs(args.out, exist_ok=True)
    if not os.access(args.out, os.W_OK):
        raise ConfigError(f"output directory {args.out!r} is not writable")
    lines = WRITERS[args.fig](config, args.out)
    header = [f"afshar {__version__} {args.fig}", f"config: {args.config or '(defaults)'}", ""]
    _write_text(os.path.join(args.out, f"{args.fig}_summary.txt"), "\n".join(header + lines) + "\n")
    _write_text(os.path.join(args.out, f"{args.fig}_config.ini"), format_config(config))
    for line in lines:
        print(line)
    return 0


def cmd_check(args) -> int:
    config = load_config(args.config)
    results = run_all(config)
    for r in results:
        print(r.line(), flush=True)
    failed = [r.name for r in results if not r.passed]
    if failed:
        print(f"{len(failed)} check(s) failed: {', '.join(failed)}")
        return 2
    print(f"all {len(results)} checks passed")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="afshar", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"afshar {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="compute a figure's data and write CSV + plot script")
    run.add_argument("--config", help="INI configuration file (defaults if omitted)")
    run.add_argument("--fig", choices=FIGURES, required=True)
    run.add_argument("--out", required=True, help="output directory")
    run.set_defaults(func=cmd_run)

    check = sub.add_parser("check", help="run the acceptance checks")
    check.add_argument("--config", help="INI configuration file (defaults if omitted)")
    check.set_defaults(func=cmd_check)
    return parser


def main(argv: Iterable[str] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, OSError) as exc:
        print(f"afshar: {exc}", file=sys.stderr)
        return 1
    except AfsharError as exc:
        print(f"afshar: {exc}", file=sys.stderr)
        return 2


PLOT_FIG3 = '''"""Plot the detector-plane intensity grid written by `afshar run --fig fig3`."""
import numpy as np
import matplotlib.pyplot as plt

data = np.genfromtxt("fig3_profiles.csv", delimiter=",", names=True, comments="#")
ts = sorted(set(data["t"]))
ds = sorted(set(data["wire_width"]))
fig, axes = plt.subplots(len(ts), len(ds), figsize=(4 * len(ds), 3 * len(ts)), sharex=True)
for i, t in enumerate(ts):
    for j, d in enumerate(ds):
        sel = (data["t"] == t) & (data["wire_width"] == d)
        ax = np.atleast_2d(axes)[i, j]
        ax.plot(data["x"][sel] * 1e3, data["intensity"][sel], "k-", lw=0.8)
        ax.set_title(f"t={t:g}, d={d * 1e6:g} um", fontsize=9)
        if i == len(ts) - 1:
            ax.set_xlabel("detector x (mm)")
fig.tight_layout()
fig.savefig("fig3.png", dpi=150)
'''

PLOT_FIG4 = '''"""Plot the phase-scan envelopes written by `afshar run --fig fig4`."""
import numpy as np
import matplotlib.pyplot as plt

env = np.genfromtxt("fig4_envelope.csv", delimiter=",", names=True, comments="#", dtype=None,
                    encoding="utf-8")
tr = np.genfromtxt("fig4_traces.csv", delimiter=",", names=True, comments="#", dtype=None,
                   encoding="utf-8")
ds = sorted(set(env["wire_width"]))
fig, axes = plt.subplots(len(ds), 2, figsize=(10, 3 * len(ds)), squeeze=False)
for i, d in enumerate(ds):
    sel = env["wire_width"] == d
    x = env["x"][sel] * 1e3
    ax = axes[i, 0]
    ax.fill_between(x, env["I_min"][sel], env["I_max"][sel], color="0.8")
    ax.plot(x, env["intensity_phi0"][sel], "k-", lw=0.8, label="phi = 0")
    ax.plot(x, env["intensity_phipi"][sel], "r--", lw=0.8, label="phi = pi")
    ax.set_title(f"d = {d * 1e6:g} um")
    ax.set_xlabel("x (mm)")
    ax.legend(fontsize=8)
    ax = axes[i, 1]
    tsel = tr["wire_width"] == d
    for x0 in sorted(set(tr["x"][tsel])):
        s = tsel & (tr["x"] == x0)
        ax.plot(tr["phi"][s], tr["intensity"][s], label=f"x = {x0 * 1e3:.3f} mm")
    ax.set_xlabel("phi (rad)")
    ax.legend(fontsize=8)
fig.tight_layout()
fig.savefig("fig4.png", dpi=150)
'''

PLOT_FIG5 = '''"""Plot D, V and D^2 + V^2 against t, written by `afshar run --fig fig5`."""
import numpy as np
import matplotlib.pyplot as plt

data = np.genfromtxt("fig5_duality.csv", delimiter=",", names=True, comments="#")
fig, axes = plt.subplots(1, 3, figsize=(13, 3.5))
for d in sorted(set(data["wire_width"])):
    sel = data["wire_width"] == d
    label = f"d = {d * 1e6:g} um"
    axes[0].plot(data["t"][sel], data["D"][sel], "o-", ms=3, label=label)
    axes[1].plot(data["t"][sel], data["V"][sel], "o-", ms=3, label=label)
    axes[2].plot(data["t"][sel], data["sum_sq"][sel], "o-", ms=3, label=label)
for ax, name in zip(axes, ("D", "V", "D^2 + V^2")):
    ax.set_xlabel("t")
    ax.set_ylabel(name)
axes[2].axhline(1.0, color="k", lw=0.5)
axes[0].legend(fontsize=8)
fig.tight_layout()
fig.savefig("fig5.png", dpi=150)
'''


if __name__ == "__main__":
    sys.exit(main())
