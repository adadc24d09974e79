import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from afshar.elements import DoubleSlitSpec, double_slit_field
from afshar.errors import GridMismatchError, InvalidBoundsError, TooFewPointsError, ZeroFieldError
from afshar.field import Grid1D, PhysicalParams, WaveField, make_grid, normalize, symmetric_grid, total_power


class TestGrid:
    def test_spacing_micron(self):
        g = make_grid(-1e-3, 1e-3, 2001)
        assert g.dx == pytest.approx(1e-6, rel=1e-12)

    def test_minimal_grid(self):
        g = make_grid(0.0, 1.0, 2)
        np.testing.assert_array_equal(g.x, [0.0, 1.0])

    def test_even_count(self):
        g = make_grid(-5e-3, 5e-3, 4096)
        assert g.dx == 1e-2 / 4095

    def test_positions_follow_definition(self):
        g = make_grid(-2.0, 3.0, 11)
        np.testing.assert_array_equal(g.x, -2.0 + np.arange(11) * g.dx)
        assert g.position(7) == g.x[7]

    def test_position_is_reproducible(self):
        g = make_grid(-1e-3, 1e-3, 4097)
        assert g.position(1234) == g.position(1234)

    @pytest.mark.parametrize("lo,hi", [(1.0, 1.0), (2.0, -1.0)])
    def test_invalid_bounds(self, lo, hi):
        with pytest.raises(InvalidBoundsError) as exc:
            make_grid(lo, hi, 10)
        assert exc.value.code == "invalid-bounds"

    @pytest.mark.parametrize("n", [0, 1])
    def test_too_few_points(self, n):
        with pytest.raises(TooFewPointsError) as exc:
            make_grid(0.0, 1.0, n)
        assert exc.value.code == "too-few-points"

    def test_symmetric_odd_grid_contains_zero(self):
        g = symmetric_grid(4e-3, 4097)
        assert g.x[2048] == 0.0


def test_physical_params_validation():
    for kw in ({"wavelength": 0.0}, {"L1": -1.0}, {"L2": 0.0}):
        with pytest.raises(InvalidBoundsError):
            PhysicalParams(**kw)


class TestPower:
    def test_zero_field(self):
        g = make_grid(0, 1, 11)
        assert total_power(WaveField.zeros(g)) == 0.0

    def test_unit_constant(self):
        g = make_grid(0.0, 1.0, 1001)
        p = total_power(WaveField(g, np.ones(g.n_points)))
        assert abs(p - 1.0) <= 2 * g.dx

    def test_double_slit_normalized(self):
        g = symmetric_grid(4e-3, 4097)
        field = double_slit_field(DoubleSlitSpec(t=0.5), g)
        assert total_power(field) == pytest.approx(1.0, rel=1e-12)

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            WaveField(make_grid(0, 1, 5), np.zeros(4))

    def test_add_requires_same_grid(self):
        a = WaveField.zeros(make_grid(0, 1, 5))
        b = WaveField.zeros(make_grid(0, 2, 5))
        with pytest.raises(GridMismatchError):
            a + b

    @given(st.floats(0, 2 * np.pi), st.integers(0, 2**32 - 1))
    def test_unit_modulus_invariance(self, theta, seed):
        r = np.random.default_rng(seed)
        g = make_grid(-1, 1, 64)
        f = WaveField(g, r.normal(size=64) + 1j * r.normal(size=64))
        turned = f.scaled(np.exp(1j * theta))
        assert total_power(turned) == pytest.approx(total_power(f), rel=1e-13)


class TestNormalize:
    def test_power_four(self):
        g = make_grid(0.0, 1.0, 101)
        f = WaveField(g, np.full(g.n_points, 2.0 / np.sqrt(1.01)))
        assert total_power(f) == pytest.approx(4.0)
        n = normalize(f)
        assert total_power(n) == pytest.approx(1.0, rel=1e-12)
        np.testing.assert_allclose(n.amplitudes / f.amplitudes, 0.5, rtol=1e-12)

    def test_zero_field(self):
        with pytest.raises(ZeroFieldError) as exc:
            normalize(WaveField.zeros(make_grid(0, 1, 5)))
        assert exc.value.code == "zero-field"

    def test_unequal_slits_keep_ratio(self):
        g = symmetric_grid(4e-3, 4097)
        f = double_slit_field(DoubleSlitSpec(t=0.2), g).scaled(3.7)
        n = normalize(f)
        left = g.x < 0
        ratio = lambda w: np.sum(w.intensity[left]) / np.sum(w.intensity[~left])
        assert ratio(n) == pytest.approx(ratio(f), rel=1e-13)

    @given(st.integers(0, 2**32 - 1), st.floats(1e-3, 1e3))
    def test_idempotent(self, seed, scale):
        r = np.random.default_rng(seed)
        g = make_grid(-1, 1, 50)
        f = WaveField(g, scale * (r.normal(size=50) + 1j * r.normal(size=50)))
        once = normalize(f)
        twice = normalize(once)
        assert total_power(once) == pytest.approx(1.0, rel=1e-12)
        np.testing.assert_allclose(twice.amplitudes, once.amplitudes, rtol=1e-12, atol=0)
