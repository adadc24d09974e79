"""INI-style experiment configuration.

Every key is optional; an empty document gives the default experiment.

    [physics]    wavelength, L1, L2, kernel_phase
    [slits]      t, width, separation, phase
    [grid]       slit_points, slit_half_extent, interference_points,
                 interference_margin, detector_points, detector_half_extent
    [wires]      d, N, lens_width, align_to_minima
    [lens]       enabled, alpha, aperture, detector_boundary
    [visibility] plane, n_phases
    [sweep]      t_values, d_values   (comma lists or start:stop:step)

Lengths are in meters and angles in radians.
"""

import configparser
from dataclasses import replace
from typing import Callable, Dict, Optional, Tuple

import numpy as np

from .elements import DoubleSlitSpec, WireGridSpec
from .errors import AfsharError, ConfigParseError, ConfigValidationError
from .experiments import ExperimentConfig, GridSpec, LensSettings, SweepSpec
from .field import PhysicalParams


def _bool(text: str) -> bool:
    lowered = text.strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _int(text: str) -> int:
    value = float(text)
    if value != int(value):
        raise ValueError(f"not an integer: {text!r}")
    return int(value)


def _optional_float(text: str) -> Optional[float]:
    return None if text.strip().lower() in ("", "none", "auto") else float(text)


def _values(text: str) -> Tuple[float, ...]:
    text = text.strip()
    if ":" in text:
        start, stop, step = (float(p) for p in text.split(":"))
        if step <= 0:
            raise ValueError("range step must be > 0")
        n = int(np.floor((stop - start) / step + 1e-9)) + 1
        return tuple(float(np.round(start + k * step, 12)) for k in range(n))
    return tuple(float(p) for p in text.split(",") if p.strip())


# section -> key -> converter
SCHEMA: Dict[str, Dict[str, Callable]] = {
    "physics": {"wavelength": float, "l1": float, "l2": float, "kernel_phase": float},
    "slits": {"t": float, "width": float, "separation": float, "phase": float},
    "grid": {
        "slit_points": _int,
        "slit_half_extent": float,
        "interference_points": _int,
        "interference_margin": float,
        "detector_points": _int,
        "detector_half_extent": _optional_float,
    },
    "wires": {"d": float, "n": _int, "lens_width": _optional_float, "align_to_minima": _bool},
    "lens": {"enabled": _bool, "alpha": _optional_float, "aperture": _optional_float,
             "detector_boundary": float},
    "visibility": {"plane": str, "n_phases": _int},
    "sweep": {"t_values": _values, "d_values": _values},
}


def _locate(text: str, section: str, key: str) -> Tuple[Optional[int], Optional[int]]:
    current = None
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if stripped.startswith("[") and "]" in stripped:
            current = stripped[1:stripped.index("]")].strip().lower()
            continue
        if current != section:
            continue
        for sep in ("=", ":"):
            if sep in line:
                name, _, rest = line.partition(sep)
                if name.strip().lower() == key:
                    col = len(name) + 1 + (len(rest) - len(rest.lstrip())) + 1
                    return lineno, col
                break
    return None, None


def _read(text: str) -> configparser.ConfigParser:
    parser = configparser.ConfigParser(
        interpolation=None, inline_comment_prefixes=("#", ";"), default_section="__defaults__"
    )
    try:
        parser.read_string(text)
    except configparser.MissingSectionHeaderError as exc:
        raise ConfigParseError("key outside of any [section]", exc.lineno, 1) from None
    except configparser.ParsingError as exc:
        lineno, line = exc.errors[0]
        raise ConfigParseError(f"cannot parse {line.strip()!r}", lineno, 1) from None
    except (configparser.DuplicateOptionError, configparser.DuplicateSectionError) as exc:
        raise ConfigParseError(exc.message.split(": ", 1)[-1], exc.lineno, 1) from None
    return parser


def parse_config(text: str) -> ExperimentConfig:
    """Build a validated :class:`ExperimentConfig` from INI text."""
    parser = _read(text)
    raw: Dict[str, Dict[str, object]] = {}
    for section in parser.sections():
        name = section.strip().lower()
        if name not in SCHEMA:
            line, _ = _locate_section(text, section)
            raise ConfigParseError(f"unknown section [{section}]", line, 1)
        raw.setdefault(name, {})
        for key, value in parser.items(section):
            if key not in SCHEMA[name]:
                line, col = _locate(text, name, key)
                raise ConfigParseError(f"unknown key {key!r} in [{name}]", line, 1)
            try:
                raw[name][key] = SCHEMA[name][key](value)
            except ValueError as exc:
                line, col = _locate(text, name, key)
                raise ConfigParseError(f"bad value for {name}.{key}: {exc}", line, col) from None
    return build_config(raw)


def _locate_section(text: str, section: str):
    for lineno, line in enumerate(text.splitlines(), start=1):
        if line.strip().startswith("[") and section in line:
            return lineno, 1
    return None, None


def build_config(raw: Dict[str, Dict[str, object]]) -> ExperimentConfig:
    def get(section, key, default):
        return raw.get(section, {}).get(key, default)

    base = ExperimentConfig()
    try:
        physics = PhysicalParams(
            wavelength=get("physics", "wavelength", base.physics.wavelength),
            L1=get("physics", "l1", base.physics.L1),
            L2=get("physics", "l2", base.physics.L2),
        )
        slits = DoubleSlitSpec(
            t=get("slits", "t", base.slits.t),
            width=get("slits", "width", base.slits.width),
            separation=get("slits", "separation", base.slits.separation),
            phase=get("slits", "phase", base.slits.phase),
        )
        wires = WireGridSpec(
            d=get("wires", "d", base.wires.d),
            N=get("wires", "n", base.wires.N),
            lens_width=get("wires", "lens_width", base.wires.lens_width),
            align_to_minima=get("wires", "align_to_minima", base.wires.align_to_minima),
        )
        grids = replace(base.grids, **{k: v for k, v in raw.get("grid", {}).items()})
        for name in ("slit_points", "interference_points", "detector_points"):
            if getattr(grids, name) < 2:
                raise ConfigValidationError(f"grid.{name} must be >= 2")
        lens = None
        if get("lens", "enabled", True):
            lens = LensSettings(alpha=get("lens", "alpha", None), aperture=get("lens", "aperture", None))
        sweep = SweepSpec(
            t_values=get("sweep", "t_values", base.sweep.t_values),
            d_values=get("sweep", "d_values", base.sweep.d_values),
        )
        for t in sweep.t_values:
            if not 0.0 <= t <= 1.0:
                raise ConfigValidationError(f"t out of [0,1] in sweep: {t!r}")
        for d in sweep.d_values:
            if d < 0:
                raise ConfigValidationError(f"negative wire width in sweep: {d!r}")
        config = ExperimentConfig(
            physics=physics,
            slits=slits,
            wires=wires,
            lens=lens,
            grids=grids,
            detector_boundary=get("lens", "detector_boundary", base.detector_boundary),
            visibility_plane=get("visibility", "plane", base.visibility_plane),
            n_phases=get("visibility", "n_phases", base.n_phases),
            kernel_phase=get("physics", "kernel_phase", base.kernel_phase),
            sweep=sweep,
        )
        for d in sweep.d_values:
            if d >= config.period:
                raise ConfigValidationError(
                    f"wire wider than fringe: sweep d={d:g} m >= Lambda={config.period:g} m"
                )
    except ConfigValidationError:
        raise
    except AfsharError as exc:
        raise ConfigValidationError(str(exc).split(": ", 1)[-1]) from None
    return config


def load_config(path) -> ExperimentConfig:
    if path is None:
        return ExperimentConfig()
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())


def format_config(config: ExperimentConfig) -> str:
    """INI text that parses back to ``config``."""
    g = config.grids

    def fmt(v):
        if v is None:
            return "auto"
        if isinstance(v, bool):
            return "true" if v else "false"
        if isinstance(v, int):
            return str(v)
        return repr(float(v))

    def seq(vals):
        return ", ".join(repr(float(v)) for v in vals)

    lens = config.lens
    lines = [
        "[physics]",
        f"wavelength = {fmt(config.physics.wavelength)}",
        f"L1 = {fmt(config.physics.L1)}",
        f"L2 = {fmt(config.physics.L2)}",
        f"kernel_phase = {fmt(config.kernel_phase)}",
        "",
        "[slits]",
        f"t = {fmt(config.slits.t)}",
        f"width = {fmt(config.slits.width)}",
        f"separation = {fmt(config.slits.separation)}",
        f"phase = {fmt(config.slits.phase)}",
        "",
        "[grid]",
        f"slit_points = {g.slit_points}",
        f"slit_half_extent = {fmt(g.slit_half_extent)}",
        f"interference_points = {g.interference_points}",
        f"interference_margin = {fmt(g.interference_margin)}",
        f"detector_points = {g.detector_points}",
        f"detector_half_extent = {fmt(g.detector_half_extent)}",
        "",
        "[wires]",
        f"d = {fmt(config.wires.d)}",
        f"N = {config.wires.N}",
        f"lens_width = {fmt(config.wires.lens_width)}",
        f"align_to_minima = {fmt(config.wires.align_to_minima)}",
        "",
        "[lens]",
        f"enabled = {fmt(lens is not None)}",
        f"alpha = {fmt(lens.alpha if lens else None)}",
        f"aperture = {fmt(lens.aperture if lens else None)}",
        f"detector_boundary = {fmt(config.detector_boundary)}",
        "",
        "[visibility]",
        f"plane = {config.visibility_plane}",
        f"n_phases = {config.n_phases}",
        "",
        "[sweep]",
        f"t_values = {seq(config.sweep.t_values)}",
        f"d_values = {seq(config.sweep.d_values)}",
        "",
    ]
    return "\n".join(lines)
