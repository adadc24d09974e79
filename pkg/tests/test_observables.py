import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from afshar.errors import DarkPointError, NoDetectionsError, NotNormalizedError, OutOfRangeError, ZeroFieldError
from afshar.field import WaveField, make_grid
from afshar.observables import (
    DetectorRegions,
    PathProbabilities,
    detector_probabilities,
    distinguishability_full,
    distinguishability_simple,
    duality,
    path_probabilities,
    visibility_closed_form,
    visibility_profile,
    visibility_sweep,
)

GRID = make_grid(-1.0, 1.0, 201)
finite = st.floats(-1e3, 1e3, allow_nan=False)


def two_path(a, b):
    a, b = np.atleast_1d(a), np.atleast_1d(b)

    def intensity_at(x, phi):
        k = np.asarray(x, dtype=int)
        return np.abs(a[k] * np.exp(1j * phi) + b[k]) ** 2

    return intensity_at


class TestDetectorProbabilities:
    def test_symmetric(self):
        f = WaveField(GRID, np.exp(-GRID.x ** 2))
        # the boundary sample belongs to D2, so compare against the half-sample correction
        D1, D2 = detector_probabilities(f, DetectorRegions())
        assert D1 + D2 == pytest.approx(1.0)
        assert D1 == pytest.approx(0.5, abs=0.01)

    def test_all_left(self):
        f = WaveField(GRID, np.where(GRID.x < -0.2, 1.0, 0.0))
        assert detector_probabilities(f, DetectorRegions()) == (1.0, 0.0)

    def test_swapped_sides(self):
        f = WaveField(GRID, np.where(GRID.x < -0.2, 1.0, 0.0))
        assert detector_probabilities(f, DetectorRegions(d1_below=False)) == (0.0, 1.0)

    def test_zero_field(self):
        with pytest.raises(ZeroFieldError):
            detector_probabilities(WaveField.zeros(GRID), DetectorRegions())


class TestDistinguishability:
    @pytest.mark.parametrize("D1,D2,D", [(1, 0, 1), (0.5, 0.5, 0), (0.75, 0.25, 0.5), (0.25, 0.75, 0.5)])
    def test_simple(self, D1, D2, D):
        assert distinguishability_simple(D1, D2) == pytest.approx(D)

    def test_quarter_squared(self):
        assert distinguishability_simple(0.75, 0.25) ** 2 == pytest.approx(0.25)

    def test_no_detections(self):
        with pytest.raises(NoDetectionsError) as exc:
            distinguishability_simple(0.0, 0.0)
        assert exc.value.code == "no-detections"

    @pytest.mark.parametrize("P,D", [
        (((1, 0), (0, 0)), 1.0),
        (((0.5, 0), (0, 0.5)), 1.0),
        (((0.25, 0.25), (0.25, 0.25)), 0.0),
    ])
    def test_full(self, P, D):
        assert distinguishability_full(PathProbabilities(P)) == pytest.approx(D)

    def test_full_not_normalized(self):
        with pytest.raises(NotNormalizedError):
            distinguishability_full(PathProbabilities(((0.5, 0), (0, 0.4))))

    def test_negative_probability(self):
        with pytest.raises(OutOfRangeError):
            PathProbabilities(((1.1, -0.1), (0, 0)))

    @given(st.floats(0.0, 1.0))
    def test_block_diagonal_forms_differ(self, t):
        # Each path entirely on its own detector: the full form reports perfect
        # which-way knowledge, the simple form only the detector imbalance.
        left = WaveField(GRID, np.sqrt(t) * (GRID.x < -0.5))
        right = WaveField(GRID, np.sqrt(1 - t) * (GRID.x > 0.5))
        regions = DetectorRegions()
        P = path_probabilities((left, right), regions)
        assert P.array.sum() == pytest.approx(1.0, abs=1e-9)
        D1, D2 = detector_probabilities(left + right, regions)
        assert distinguishability_simple(D1, D2) == pytest.approx(abs(1 - 2 * t), abs=1e-12)
        assert distinguishability_full(P) == pytest.approx(1.0, abs=1e-12)

    @given(st.integers(0, 2**32 - 1), finite, finite)
    def test_global_rescaling(self, seed, re, im):
        c = complex(re, im)
        assume(abs(c) > 1e-3)
        r = np.random.default_rng(seed)
        paths = [WaveField(GRID, r.normal(size=201) + 1j * r.normal(size=201)) for _ in range(2)]
        regions = DetectorRegions()
        base = path_probabilities(paths, regions).array
        scaled = path_probabilities([p.scaled(c) for p in paths], regions).array
        np.testing.assert_allclose(scaled, base, rtol=1e-12, atol=1e-15)
        d0 = detector_probabilities(paths[0] + paths[1], regions)
        d1 = detector_probabilities(paths[0].scaled(c) + paths[1].scaled(c), regions)
        np.testing.assert_allclose(d1, d0, rtol=1e-12)


class TestVisibility:
    def test_closed_form_examples(self):
        assert visibility_closed_form(1 + 0j, 1j) == pytest.approx(1.0)
        assert visibility_closed_form(0.3, 0.0) == 0.0
        assert visibility_closed_form(1.0, np.sqrt(3)) == pytest.approx(np.sqrt(3) / 2)

    def test_closed_form_dark(self):
        with pytest.raises(DarkPointError) as exc:
            visibility_closed_form(0j, 0j)
        assert exc.value.code == "dark-point"

    @pytest.mark.parametrize("t,V", [(0.5, 1.0), (1.0, 0.0), (0.25, np.sqrt(3) / 2)])
    def test_sweep_examples(self, t, V):
        f = two_path(np.sqrt(t), np.sqrt(1 - t))
        assert visibility_sweep(f, 0, 128) == pytest.approx(V, abs=1e-12)

    def test_sweep_dark(self):
        with pytest.raises(DarkPointError):
            visibility_sweep(two_path(0.0, 0.0), 0, 64)

    def test_sweep_needs_enough_phases(self):
        with pytest.raises(ValueError):
            visibility_sweep(two_path(1.0, 1.0), 0, 8)

    @given(finite, finite, finite, finite, st.sampled_from([16, 17, 64, 128]))
    def test_sweep_matches_closed_form(self, ar, ai, br, bi, n):
        a, b = complex(ar, ai), complex(br, bi)
        assume(abs(a) ** 2 + abs(b) ** 2 > 1e-6)
        V = visibility_sweep(two_path(a, b), 0, n)
        assert V == pytest.approx(visibility_closed_form(a, b), abs=1e-6)
        assert 0.0 <= V <= 1.0

    def test_sweep_vectorized(self, rng):
        a = rng.normal(size=50) + 1j * rng.normal(size=50)
        b = rng.normal(size=50) + 1j * rng.normal(size=50)
        V = visibility_sweep(two_path(a, b), np.arange(50), 128)
        want = [visibility_closed_form(p, q) for p, q in zip(a, b)]
        np.testing.assert_allclose(V, want, atol=1e-12)

    def test_profile_flags_dark(self):
        a = np.array([1.0, 0.0, 0.5])
        b = np.array([1.0, 0.0, 0.0])
        V, I_max, I_min, dark = visibility_profile(a, b)
        assert dark.tolist() == [False, True, False]
        assert np.isnan(V[1])
        assert V[0] == 1.0 and V[2] == 0.0
        np.testing.assert_allclose(I_max, [4.0, 0.0, 0.25])
        np.testing.assert_allclose(I_min, [0.0, 0.0, 0.25])

    @given(finite, finite, finite, finite, finite, finite)
    def test_invariant_under_global_rescaling(self, ar, ai, br, bi, cr, ci):
        a, b, c = complex(ar, ai), complex(br, bi), complex(cr, ci)
        assume(abs(a) ** 2 + abs(b) ** 2 > 1e-6 and abs(c) > 1e-3)
        assert visibility_closed_form(c * a, c * b) == pytest.approx(visibility_closed_form(a, b), abs=1e-12)


class TestDuality:
    @pytest.mark.parametrize("D,V,s", [(1, 0, 1), (0.5, np.sqrt(3) / 2, 1), (0, 0, 0)])
    def test_examples(self, D, V, s):
        r = duality(D, V, {"t": 0.25})
        assert r.sum_sq == pytest.approx(s, abs=1e-15)
        assert r.context == {"t": 0.25}

    @pytest.mark.parametrize("D,V", [(-0.1, 0.5), (0.5, 1.2), (float("nan"), 0)])
    def test_out_of_range(self, D, V):
        with pytest.raises(OutOfRangeError) as exc:
            duality(D, V)
        assert exc.value.code == "out-of-range"

    @given(st.floats(0, 1), st.floats(0, 1))
    def test_ideal_family_saturates(self, t, _):
        r = duality(abs(1 - 2 * t), 2 * np.sqrt(t * (1 - t)))
        assert r.sum_sq == pytest.approx(1.0, abs=1e-12)
