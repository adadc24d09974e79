import pytest
from hypothesis import given
from hypothesis import strategies as st

from afshar.config import format_config, load_config, parse_config
from afshar.errors import ConfigParseError, ConfigValidationError
from afshar.experiments import ExperimentConfig


def test_empty_gives_defaults():
    cfg = parse_config("")
    assert cfg == ExperimentConfig()
    assert cfg.physics.wavelength == 650e-9
    assert cfg.physics.L1 == 0.55
    assert cfg.wires.d == 127e-6


def test_load_none_gives_defaults():
    assert load_config(None) == ExperimentConfig()


def test_values_and_comments():
    text = """
[physics]
wavelength = 633e-9   ; HeNe
[slits]
t = 0.25
phase = 0.5
[wires]
N = 6
align_to_minima = no
[lens]
enabled = false
[visibility]
plane = detector
n_phases = 64
[sweep]
t_values = 0:1:0.25
d_values = 0, 127e-6
"""
    cfg = parse_config(text)
    assert cfg.physics.wavelength == 633e-9
    assert cfg.slits.t == 0.25 and cfg.slits.phase == 0.5
    assert cfg.wires.N == 6 and cfg.wires.align_to_minima is False
    assert cfg.lens is None
    assert cfg.visibility_plane == "detector" and cfg.n_phases == 64
    assert cfg.sweep.t_values == (0.0, 0.25, 0.5, 0.75, 1.0)
    assert cfg.sweep.d_values == (0.0, 127e-6)


def test_t_out_of_range():
    with pytest.raises(ConfigValidationError, match=r"t out of \[0,1\]") as exc:
        parse_config("[slits]\nt = 1.5\n")
    assert exc.value.code == "validation-error"


def test_wire_wider_than_fringe():
    with pytest.raises(ConfigValidationError, match="wire wider than fringe"):
        parse_config("[slits]\nseparation = 2e-3\nwidth = 250e-6\n[wires]\nd = 381e-6\n")


def test_sweep_wire_wider_than_fringe():
    with pytest.raises(ConfigValidationError, match="wire wider than fringe"):
        parse_config("[sweep]\nd_values = 0, 2e-3\n")


def test_unknown_key_location():
    with pytest.raises(ConfigParseError) as exc:
        parse_config("[slits]\nt = 0.5\nfoo = 1\n")
    assert exc.value.line == 3
    assert exc.value.code == "parse-error"
    assert "line 3" in str(exc.value)


def test_unknown_section():
    with pytest.raises(ConfigParseError) as exc:
        parse_config("\n[optics]\nx = 1\n")
    assert exc.value.line == 2


def test_bad_value_column():
    with pytest.raises(ConfigParseError) as exc:
        parse_config("[slits]\nt =   abc\n")
    assert (exc.value.line, exc.value.column) == (2, 7)


def test_key_outside_section():
    with pytest.raises(ConfigParseError) as exc:
        parse_config("t = 0.5\n")
    assert exc.value.line == 1


def test_duplicate_key():
    with pytest.raises(ConfigParseError):
        parse_config("[slits]\nt = 0.5\nt = 0.6\n")


def test_bad_grid_count():
    with pytest.raises(ConfigValidationError):
        parse_config("[grid]\nslit_points = 1\n")


@given(st.floats(0, 1), st.floats(-3, 3), st.integers(1, 14), st.sampled_from(["interference", "detector"]),
       st.booleans())
def test_round_trip(t, phase, N, plane, lens):
    cfg = ExperimentConfig().with_t(t, phase)
    cfg = cfg.__class__(**{**cfg.__dict__, "visibility_plane": plane,
                           "wires": cfg.wires.__class__(d=cfg.wires.d, N=N)})
    if not lens:
        cfg = cfg.without_lens()
    assert parse_config(format_config(cfg)) == cfg
